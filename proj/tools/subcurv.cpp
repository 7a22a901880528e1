// Command-line front end: curvature, rank and scenario subcommands.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "subcurv/cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace subcurv::cli;
  CLI::App app{"subcurv: horizontal mean curvature, bracket ranks and comparison scenarios"};
  app.require_subcommand(1);

  CurvatureOptions curv;
  auto* c = app.add_subcommand("curvature", "evaluate H_{phi,p} at a point or over a grid");
  c->add_option("--config", curv.config, "config file")->required();
  c->add_option("--function", curv.function, "function section name")->required();
  c->add_option("--p", curv.p, "exact rational p >= 0 (0 = mean curvature)");
  std::string at;
  std::size_t grid = 0;
  auto* at_opt = c->add_option("--at", at, "comma-separated point");
  auto* grid_opt = c->add_option("--grid", grid, "points per non-degenerate axis of the function box");
  at_opt->excludes(grid_opt);
  c->add_option("--out", curv.out, "output file (default stdout)");
  c->add_option("--format", curv.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  c->add_option("--jobs", curv.jobs, "worker threads")->check(CLI::PositiveNumber);

  RankOptions rank;
  std::string rank_at;
  auto* r = app.add_subcommand("rank", "bracket-generating rank of fields, frames or a surface distribution");
  r->add_option("--config", rank.config, "config file")->required();
  r->add_option("--fields", rank.fields, "field section names");
  r->add_option("--surface", rank.surface, "function section defining a surface");
  auto* rank_at_opt = r->add_option("--at", rank_at, "comma-separated point (default origin)");
  r->add_option("--depth", rank.depth, "maximum bracket depth")->check(CLI::PositiveNumber);

  ScenarioOptions scen;
  auto* s = app.add_subcommand("scenario", "list, show or run comparison scenarios");
  s->require_subcommand(1);
  auto* s_list = s->add_subcommand("list", "builtin scenario names and descriptions");
  auto* s_show = s->add_subcommand("show", "print a builtin scenario as a config file");
  s_show->add_option("name", scen.name, "scenario name")->required();
  s_show->add_option("--out", scen.out, "output file (default stdout)");
  auto* s_run = s->add_subcommand("run", "run a builtin scenario or a [scenario] config");
  s_run->add_option("name", scen.name, "builtin scenario name");
  s_run->add_option("--config", scen.config, "config file with a [scenario] section");
  s_run->add_option("--out", scen.out, "report file (default stdout)");
  s_run->add_option("--csv", scen.csv, "per-point table file");
  s_run->add_option("--jobs", scen.jobs, "worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return config_error;
  }

  if (c->parsed()) {
    if (!at_opt->empty()) curv.at = at;
    if (!grid_opt->empty()) curv.grid = grid;
    return run_curvature(curv, std::cout, std::cerr);
  }
  if (r->parsed()) {
    if (!rank_at_opt->empty()) rank.at = rank_at;
    return run_rank(rank, std::cout, std::cerr);
  }
  scen.action = s_list->parsed() ? "list" : s_show->parsed() ? "show" : "run";
  (void)s_run;
  return run_scenario_command(scen, std::cout, std::cerr);
}
