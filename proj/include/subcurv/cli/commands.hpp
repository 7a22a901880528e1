#pragma once

#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "subcurv/brackets.hpp"
#include "subcurv/cli/config.hpp"
#include "subcurv/core.hpp"
#include "subcurv/smp.hpp"

namespace subcurv::cli {

enum ExitCode : int { ok = 0, config_error = 2, evaluation_error = 3, missing_frames = 4 };

class MissingFrames : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CurvatureOptions {
  std::string config;
  std::string function;
  std::string p = "0";
  std::optional<std::string> at;
  std::optional<std::size_t> grid;
  std::string out;
  std::string format;  // "", "json" or "csv"
  unsigned jobs = 1;
};

struct RankOptions {
  std::string config;
  std::vector<std::string> fields;
  std::string surface;
  std::optional<std::string> at;
  std::size_t depth = kDefaultBracketDepth;
};

struct ScenarioOptions {
  std::string action;  // list | run | show
  std::string name;
  std::string config;
  std::string out;
  std::string csv;
  unsigned jobs = 1;
};

namespace detail {

inline std::vector<double> parse_point(const std::string& text, std::size_t dim) {
  std::vector<double> x;
  for (const auto& item : subcurv::detail::split_list(text)) x.push_back(subcurv::detail::to_double(item));
  if (x.size() != dim) {
    throw ConfigError("point has " + std::to_string(x.size()) + " coordinates, expected " + std::to_string(dim));
  }
  return x;
}

inline void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f << text;
}

inline ConfigDocument require_structure(const std::string& path) {
  if (path.empty()) throw ConfigError("--config is required");
  ConfigDocument doc = load_config(path);
  if (!doc.structure) throw ConfigError("config has no [structure] section");
  return doc;
}

inline Expr parse_function(const ConfigDocument& doc, const SubriemannianStructure& s, const std::string& name) {
  auto it = doc.functions.find(name);
  if (it == doc.functions.end()) throw ConfigError("unknown function '" + name + "'");
  return parse_expr(it->second.expr, s.coords, s.definitions);
}

/// d(θ) as the coefficient matrix M_kj = ∂_k θ_j − ∂_j θ_k.
inline std::vector<std::vector<Expr>> exterior_derivative(const std::vector<Expr>& theta) {
  const std::size_t d = theta.size();
  std::vector<std::vector<Expr>> M(d, std::vector<Expr>(d));
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t j = 0; j < d; ++j) {
      if (j != k) M[k][j] = differentiate(theta[j], k) - differentiate(theta[k], j);
    }
  }
  return M;
}

/// Rank of the horizontal two-form of the structure at `point`, when the
/// structure kind has one.
inline std::optional<std::size_t> structure_two_form_rank(const StructureSpec& spec, const SubriemannianStructure& s,
                                                          const std::vector<double>& point) {
  if (spec.kind == "graph_F") {
    std::vector<double> head(point.begin(), point.end() - 1);
    return two_form_rank(curl_matrix(graph_F_components(spec)), head);
  }
  if (spec.kind == "heisenberg" || spec.kind == "cylinder") {
    auto theta = heisenberg_contact_form(spec.n);
    if (spec.kind == "cylinder") {
      Expr scale = pow(heisenberg_rho(spec.n), -2);
      for (auto& t : theta) t = scale * t;
    }
    return two_form_rank(exterior_derivative(theta), point, &*s.frame_fields);
  }
  return std::nullopt;
}

}  // namespace detail

/// Evaluates H_{φ,p} at one point or over the function's box.
inline int run_curvature(const CurvatureOptions& o, std::ostream& out, std::ostream& err) {
  try {
    ConfigDocument doc = detail::require_structure(o.config);
    SubriemannianStructure s = build_structure(*doc.structure);
    Expr phi = detail::parse_function(doc, s, o.function);
    Rational p = subcurv::detail::parse_rational(o.p);
    const double eps = eps_sing_from_env();
    if (o.at.has_value() == o.grid.has_value()) throw ConfigError("give exactly one of --at and --grid");
    if (!o.format.empty() && o.format != "json" && o.format != "csv") {
      throw ConfigError("--format must be json or csv");
    }
    CurvatureEvaluator ev(s, phi, p, eps);
    if (o.at) {
      auto x = detail::parse_point(*o.at, s.dim());
      double h = ev(x);
      std::string text;
      if (o.format == "json") {
        text = Json::object()
                   .set("function", o.function)
                   .set("p", p.to_string())
                   .set("point", Json::numbers(x))
                   .set("value", h)
                   .dump(2) +
               "\n";
      } else if (o.format == "csv") {
        for (const auto& c : s.coords.names()) text += c + ",";
        text += "H\n";
        for (double c : x) text += Json::format_double(c) + ",";
        text += Json::format_double(h) + "\n";
      } else {
        text = Json::format_double(h) + "\n";
      }
      detail::emit(text, o.out, out);
      return ok;
    }
    const auto& box = doc.functions.at(o.function).box;
    if (!box) throw ConfigError("function '" + o.function + "' has no box for --grid");
    if (box->dim() != s.dim()) throw ConfigError("function box dimension differs from the structure");
    if (*o.grid < 1) throw ConfigError("--grid must be positive");
    GridSpec grid = GridSpec::uniform(*box, *o.grid);
    std::vector<double> conorms(grid.size());
    std::vector<std::optional<double>> values(grid.size());
    parallel_for(grid.size(), o.jobs, [&](std::size_t i) {
      std::vector<double> work;
      auto x = grid.point(i);
      conorms[i] = ev.conorm(x, work);
      if (conorms[i] < eps) return;
      try {
        values[i] = ev(x, work);
      } catch (const EvaluationError&) {
        // reported as a singular row
      }
    });
    std::string text;
    if (o.format == "json") {
      Json rows = Json::array();
      for (std::size_t i = 0; i < grid.size(); ++i) {
        rows.push(Json::object()
                      .set("point", Json::numbers(grid.point(i)))
                      .set("conorm", conorms[i])
                      .set("H", values[i] ? Json(*values[i]) : Json()));
      }
      text = Json::object()
                 .set("function", o.function)
                 .set("p", p.to_string())
                 .set("eps_sing", eps)
                 .set("points", rows)
                 .dump(2) +
             "\n";
    } else {
      for (const auto& c : s.coords.names()) text += c + ",";
      text += "conorm,H,singular\n";
      for (std::size_t i = 0; i < grid.size(); ++i) {
        for (double c : grid.point(i)) text += Json::format_double(c) + ",";
        text += Json::format_double(conorms[i]) + "," + (values[i] ? Json::format_double(*values[i]) : "") + "," +
                (values[i] ? "0" : "1") + "\n";
      }
    }
    detail::emit(text, o.out, out);
    return ok;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return config_error;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return config_error;
  } catch (const EvaluationError& e) {
    err << e.what() << "\n";
    return evaluation_error;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return config_error;
  }
}

/// Bracket-generating rank of named fields, the structure frames, or the
/// tangent distribution of a surface.
inline int run_rank(const RankOptions& o, std::ostream& out, std::ostream& err) {
  try {
    ConfigDocument doc = detail::require_structure(o.config);
    SubriemannianStructure s = build_structure(*doc.structure);
    if (o.depth < 1) throw ConfigError("--depth must be at least 1");
    if (!o.fields.empty() && !o.surface.empty()) throw ConfigError("give --fields or --surface, not both");
    const std::size_t d = s.dim();
    std::vector<double> x = o.at ? detail::parse_point(*o.at, d) : std::vector<double>(d, 0.0);
    std::vector<VectorFieldExpr> fields;
    std::size_t target = d;
    std::string source;
    if (!o.fields.empty()) {
      for (const auto& name : o.fields) {
        auto it = doc.fields.find(name);
        if (it == doc.fields.end()) throw ConfigError("unknown field '" + name + "'");
        if (it->second.components.size() != d) {
          throw ConfigError("field '" + name + "' needs " + std::to_string(d) + " components");
        }
        VectorFieldExpr f;
        for (const auto& c : it->second.components) f.components.push_back(parse_expr(c, s.coords, s.definitions));
        fields.push_back(std::move(f));
      }
      source = "fields";
    } else {
      if (!s.frame_fields || s.frame_fields->empty()) {
        throw MissingFrames("structure '" + s.name + "' has no frame fields");
      }
      if (!o.surface.empty()) {
        fields = tangent_distribution_fields(s, detail::parse_function(doc, s, o.surface));
        target = d - 1;
        source = "surface " + o.surface;
      } else {
        fields = *s.frame_fields;
        source = "frames";
      }
    }
    RankReport rep = bracket_generate_rank(fields, x, o.depth, target);
    Json verdicts = Json::array();
    verdicts.push(std::string("hormander: ") + (rep.rank >= target ? "yes" : "no") + " (rank " +
                  std::to_string(rep.rank) + " of " + std::to_string(target) + ")");
    if (auto k = detail::structure_two_form_rank(*doc.structure, s, x)) {
      verdicts.push("two_form_rank: " + std::to_string(*k) + (*k >= 3 ? "" : " (rank >= 3 condition fails)"));
    }
    std::string text = Json::object()
                           .set("structure", s.name)
                           .set("source", source)
                           .set("point", Json::numbers(x))
                           .set("fields", fields.size())
                           .set("rank", rep.rank)
                           .set("depth", rep.depth)
                           .set("max_depth", o.depth)
                           .set("target", target)
                           .set("words", rep.words)
                           .set("tolerance", rep.tolerance)
                           .set("verdicts", verdicts)
                           .dump(2) +
                       "\n";
    out << text;
    return ok;
  } catch (const MissingFrames& e) {
    err << "error: " << e.what() << "\n";
    return missing_frames;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return config_error;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return config_error;
  } catch (const EvaluationError& e) {
    err << e.what() << "\n";
    return evaluation_error;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return config_error;
  }
}

/// Scenario subcommands: list, show NAME, run NAME | run --config PATH.
inline int run_scenario_command(const ScenarioOptions& o, std::ostream& out, std::ostream& err) {
  try {
    if (o.action == "list") {
      for (const auto& sc : builtin_scenarios()) out << sc.name << "  " << sc.description << "\n";
      return ok;
    }
    std::optional<ComparisonScenario> sc;
    if (!o.config.empty()) {
      if (!o.name.empty()) throw ConfigError("give a scenario name or --config, not both");
      ConfigDocument doc = load_config(o.config);
      if (!doc.scenario) throw ConfigError("config has no [scenario] section");
      sc = *doc.scenario;
    } else {
      if (o.name.empty()) throw ConfigError("scenario name or --config required");
      sc = find_builtin(o.name);
      if (!sc) throw ConfigError("unknown scenario '" + o.name + "'");
      sc->tol.sing = eps_sing_from_env();
    }
    if (o.action == "show") {
      detail::emit(scenario_config(*sc), o.out, out);
      return ok;
    }
    if (o.action != "run") throw ConfigError("unknown scenario action '" + o.action + "'");
    std::vector<PointRow> rows;
    ScenarioReport rep = run_scenario(*sc, o.jobs, o.csv.empty() ? nullptr : &rows);
    detail::emit(report_text(rep), o.out, out);
    if (!o.csv.empty()) detail::emit(table_csv(rep.chart, rows), o.csv, out);
    return ok;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return config_error;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return config_error;
  } catch (const EvaluationError& e) {
    err << e.what() << "\n";
    return evaluation_error;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return config_error;
  }
}

}  // namespace subcurv::cli
