#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "subcurv/smp/harness.hpp"
#include "subcurv/util/json.hpp"

namespace subcurv {

inline constexpr const char* kReportSchemaVersion = "1";

namespace detail {

inline Json opt_number(const std::optional<double>& d) { return d ? Json(*d) : Json(); }

inline Json touch_json(const TouchPoint& t) {
  return Json::object()
      .set("index", t.index)
      .set("point", Json::numbers(t.point))
      .set("v_minus_u", t.v_minus_u)
      .set("singular_u", t.singular_u)
      .set("refined", t.refined);
}

inline Json singular_json(const std::vector<SingularEntry>& cells) {
  Json a = Json::array();
  for (const auto& c : cells) {
    a.push(Json::object()
               .set("index", c.index)
               .set("point", Json::numbers(c.point))
               .set("conorm", c.conorm)
               .set("refined", c.refined));
  }
  return a;
}

}  // namespace detail

/// Report document with a fixed key order; arrays follow grid order.
inline Json to_json(const ScenarioReport& r) {
  Json chart = Json::array();
  for (const auto& c : r.chart) chart.push(c);
  Json box = Json::array();
  for (const auto& [lo, hi] : r.box.intervals) box.push(Json::numbers({lo, hi}));
  Json counts = Json::array();
  std::size_t points = 1;
  for (auto c : r.counts) {
    counts.push(c);
    points *= c;
  }

  Json touching = Json::array();
  for (const auto& t : r.touching) touching.push(detail::touch_json(t));

  Json rank;
  if (r.rank) {
    rank = Json::object()
               .set("rank", r.rank->rank)
               .set("depth", r.rank->depth)
               .set("target", r.rank->target)
               .set("words", r.rank->words)
               .set("tolerance", r.rank->tolerance)
               .set("checked_points", r.rank->checked_points)
               .set("point", Json::numbers(r.rank->point));
  }

  Json prop = Json::array();
  for (const auto& p : r.propagation) {
    prop.push(Json::object()
                  .set("start", Json::numbers(p.start))
                  .set("field", p.field)
                  .set("direction", p.direction)
                  .set("steps", p.steps)
                  .set("max_abs_v_minus_u", p.max_abs_v_minus_u)
                  .set("first_violation_step", p.first_violation_step ? Json(*p.first_violation_step) : Json())
                  .set("clipped", p.clipped)
                  .set("failed", p.failed)
                  .set("holds", p.holds));
  }

  Json notes = Json::array();
  for (const auto& n : r.notes) notes.push(n);

  return Json::object()
      .set("schema_version", kReportSchemaVersion)
      .set("scenario", Json::object()
                           .set("name", r.name)
                           .set("description", r.description)
                           .set("structure", r.structure)
                           .set("operator", r.op)
                           .set("p", r.p)
                           .set("u", r.u)
                           .set("v", r.v)
                           .set("chart", chart))
      .set("grid", Json::object().set("box", box).set("counts", counts).set("points", points))
      .set("tolerances", Json::object()
                             .set("eps_touch", r.tol.touch)
                             .set("eps_order", r.tol.order)
                             .set("eps_H", r.tol.H)
                             .set("eps_sing", r.tol.sing)
                             .set("T", r.T)
                             .set("step", r.step))
      .set("ordering", Json::object()
                           .set("holds", r.ordering.holds)
                           .set("swapped", r.ordering.swapped)
                           .set("min_v_minus_u", r.ordering.min_v_minus_u)
                           .set("argmin", Json::numbers(r.ordering.argmin)))
      .set("touching", touching)
      .set("neighborhood", Json::object()
                               .set("radius_cells", r.neighborhood_radius)
                               .set("max_abs_v_minus_u", detail::opt_number(r.neighborhood_max)))
      .set("curvature_gap", Json::object()
                                .set("max", detail::opt_number(r.gap.max))
                                .set("argmax", Json::numbers(r.gap.argmax))
                                .set("evaluated", r.gap.evaluated)
                                .set("skipped_singular", r.gap.skipped))
      .set("singular_fraction_u", r.singular_fraction_u)
      .set("singular_fraction_v", r.singular_fraction_v)
      .set("singular_u", detail::singular_json(r.singular_u))
      .set("singular_v", detail::singular_json(r.singular_v))
      .set("rank", rank)
      .set("propagation", prop)
      .set("classification", r.classification)
      .set("notes", notes)
      .set("provenance", Json::object()
                             .set("touch_sample_cap", r.touch_sample_cap)
                             .set("rank_depth", r.rank_depth)
                             .set("pivot_rel_tol", r.pivot_rel_tol)
                             .set("neighborhood_radius_cells", r.neighborhood_radius));
}

inline std::string report_text(const ScenarioReport& r) { return to_json(r).dump(2) + "\n"; }

namespace detail {

using njson = nlohmann::ordered_json;

inline std::vector<double> doubles(const njson& j) {
  std::vector<double> v;
  for (const auto& x : j) v.push_back(x.get<double>());
  return v;
}

inline std::optional<double> opt_double(const njson& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

inline std::vector<SingularEntry> singular_from(const njson& j) {
  std::vector<SingularEntry> out;
  for (const auto& c : j) {
    out.push_back({c.at("index").get<std::size_t>(), doubles(c.at("point")), c.at("conorm").get<double>(),
                   c.at("refined").get<bool>()});
  }
  return out;
}

}  // namespace detail

/// Reads a report back. Classification and notes are taken from the text;
/// callers re-derive them with classify().
inline ScenarioReport from_json(const std::string& text) {
  using detail::doubles;
  const auto j = detail::njson::parse(text);
  if (j.at("schema_version") != kReportSchemaVersion) throw std::invalid_argument("unsupported report schema");
  ScenarioReport r;
  const auto& s = j.at("scenario");
  r.name = s.at("name");
  r.description = s.at("description");
  r.structure = s.at("structure");
  r.op = s.at("operator");
  r.p = s.at("p");
  r.u = s.at("u");
  r.v = s.at("v");
  r.chart = s.at("chart").get<std::vector<std::string>>();
  for (const auto& iv : j.at("grid").at("box")) r.box.intervals.emplace_back(iv.at(0), iv.at(1));
  r.counts = j.at("grid").at("counts").get<std::vector<std::size_t>>();
  const auto& t = j.at("tolerances");
  r.tol = {t.at("eps_touch"), t.at("eps_order"), t.at("eps_H"), t.at("eps_sing")};
  r.T = t.at("T");
  r.step = t.at("step");
  const auto& o = j.at("ordering");
  r.ordering = {o.at("holds"), o.at("swapped"), o.at("min_v_minus_u"), doubles(o.at("argmin"))};
  for (const auto& tp : j.at("touching")) {
    r.touching.push_back({tp.at("index"), doubles(tp.at("point")), tp.at("v_minus_u"), tp.at("singular_u"),
                          tp.at("refined")});
    r.touching_nonsingular += r.touching.back().singular_u ? 0 : 1;
  }
  r.neighborhood_radius = j.at("neighborhood").at("radius_cells");
  r.neighborhood_max = detail::opt_double(j.at("neighborhood").at("max_abs_v_minus_u"));
  const auto& g = j.at("curvature_gap");
  r.gap = {detail::opt_double(g.at("max")), doubles(g.at("argmax")), g.at("evaluated"), g.at("skipped_singular")};
  r.singular_fraction_u = j.at("singular_fraction_u");
  r.singular_fraction_v = j.at("singular_fraction_v");
  r.singular_u = detail::singular_from(j.at("singular_u"));
  r.singular_v = detail::singular_from(j.at("singular_v"));
  if (const auto& k = j.at("rank"); !k.is_null()) {
    r.rank = RankVerdict{k.at("rank"),      k.at("target"),         k.at("depth"),        k.at("words"),
                         k.at("tolerance"), k.at("checked_points"), doubles(k.at("point"))};
  }
  for (const auto& p : j.at("propagation")) {
    PropagationEntry e;
    e.start = doubles(p.at("start"));
    e.field = p.at("field");
    e.direction = p.at("direction");
    e.steps = p.at("steps");
    e.max_abs_v_minus_u = p.at("max_abs_v_minus_u");
    if (!p.at("first_violation_step").is_null()) e.first_violation_step = p.at("first_violation_step");
    e.clipped = p.at("clipped");
    e.failed = p.at("failed");
    e.holds = p.at("holds");
    r.propagation.push_back(std::move(e));
  }
  r.classification = j.at("classification");
  r.notes = j.at("notes").get<std::vector<std::string>>();
  const auto& pv = j.at("provenance");
  r.touch_sample_cap = pv.at("touch_sample_cap");
  r.rank_depth = pv.at("rank_depth");
  r.pivot_rel_tol = pv.at("pivot_rel_tol");
  return r;
}

/// Per-point table: chart coordinates, v − u, both curvatures (empty at
/// singular points) and the singular flags.
inline std::string table_csv(const std::vector<std::string>& chart, const std::vector<PointRow>& rows) {
  std::string out;
  for (const auto& c : chart) out += c + ",";
  out += "v_minus_u,H_u,H_v,singular_u,singular_v\n";
  auto opt = [](const std::optional<double>& d) { return d ? Json::format_double(*d) : std::string(); };
  for (const auto& r : rows) {
    for (double x : r.x) out += Json::format_double(x) + ",";
    out += Json::format_double(r.v_minus_u) + "," + opt(r.H_u) + "," + opt(r.H_v) + "," +
           (r.singular_u ? "1" : "0") + "," + (r.singular_v ? "1" : "0") + "\n";
  }
  return out;
}

}  // namespace subcurv
