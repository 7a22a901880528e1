#pragma once

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "subcurv/smp/scenario.hpp"

namespace subcurv {

/// A named scalar function over the ambient coordinates.
struct FunctionDef {
  std::string expr;
  std::optional<Box> box;
};

/// A named vector field; one component per ambient coordinate.
struct FieldDef {
  std::vector<std::string> components;
};

/// Parsed config file. Sections: [structure], [function NAME],
/// [field NAME], [scenario].
struct ConfigDocument {
  std::optional<StructureSpec> structure;
  std::map<std::string, FunctionDef> functions;
  std::map<std::string, FieldDef> fields;
  std::optional<ComparisonScenario> scenario;
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

/// Splits on commas outside quotes and parentheses; quoted items are
/// unquoted.
inline std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  int depth = 0;
  auto flush = [&] {
    std::string t = was_quoted ? cur : trim(cur);
    if (!was_quoted && t.empty()) throw ConfigError("empty list item");
    out.push_back(std::move(t));
    cur.clear();
    was_quoted = false;
  };
  for (std::size_t i = 0; i < value.size(); ++i) {
    char c = value[i];
    if (c == '"') {
      if (!quoted && !trim(cur).empty()) throw ConfigError("stray quote in value");
      if (!quoted) cur.clear();
      quoted = !quoted;
      was_quoted = true;
      if (!quoted) {
        // only whitespace may follow a closing quote before the comma
        std::size_t j = i + 1;
        while (j < value.size() && std::isspace(static_cast<unsigned char>(value[j]))) ++j;
        if (j < value.size() && value[j] != ',') throw ConfigError("text after closing quote");
        i = j - 1;
      }
      continue;
    }
    if (quoted) {
      cur += c;
      continue;
    }
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      flush();
      continue;
    }
    cur += c;
  }
  if (quoted) throw ConfigError("unterminated quote");
  flush();
  return out;
}

inline std::string single(const std::string& value) {
  auto items = split_list(value);
  if (items.size() != 1) throw ConfigError("expected a single value");
  return items.front();
}

inline double to_double(const std::string& s) {
  std::string t = trim(s);
  double d = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), d);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("expected a number, got '" + t + "'");
  }
  return d;
}

inline long to_int(const std::string& s) {
  std::string t = trim(s);
  long v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("expected an integer, got '" + t + "'");
  }
  return v;
}

inline std::size_t to_count(const std::string& s) {
  long v = to_int(s);
  if (v < 1) throw ConfigError("grid counts must be positive");
  return static_cast<std::size_t>(v);
}

/// "lo:hi, lo:hi, ..." (a bare value is a degenerate interval).
inline Box parse_box(const std::string& value) {
  Box b;
  for (const auto& item : split_list(value)) {
    auto colon = item.find(':');
    double lo = to_double(item.substr(0, colon));
    double hi = colon == std::string::npos ? lo : to_double(item.substr(colon + 1));
    if (hi < lo) throw ConfigError("box interval with hi < lo");
    b.intervals.emplace_back(lo, hi);
  }
  return b;
}

/// Exact non-negative rational such as 0, 1, 1/2 or 0.25.
inline Rational parse_rational(const std::string& value) {
  static const CoordSystem none({"_a", "_b"});
  Expr e = parse_expr(value, none);
  if (!e.is_constant() || !e.value().is_exact()) throw ConfigError("p must be an exact rational");
  Rational r = e.value().rational();
  if (r < Rational{0}) throw ConfigError("p must be >= 0");
  return r;
}

/// Shortest text that reads back to the same double.
inline std::string format_double(double d) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, d);
  return std::string(buf, res.ptr);
}

inline std::string quote_list(const std::vector<std::string>& items) {
  std::string s;
  for (std::size_t i = 0; i < items.size(); ++i) s += (i ? ", \"" : "\"") + items[i] + "\"";
  return s;
}

inline std::string box_text(const Box& b) {
  std::string s;
  for (std::size_t i = 0; i < b.intervals.size(); ++i) {
    if (i) s += ", ";
    s += format_double(b.intervals[i].first) + ":" + format_double(b.intervals[i].second);
  }
  return s;
}

inline void structure_key(StructureSpec& s, const std::string& key, const std::string& value) {
  if (key == "kind") {
    s.kind = single(value);
    if (s.kind != "heisenberg" && s.kind != "cylinder" && s.kind != "graph_F" && s.kind != "custom") {
      throw ConfigError("unknown structure kind '" + s.kind + "'");
    }
  } else if (key == "n") {
    s.n = static_cast<int>(to_int(value));
  } else if (key == "m") {
    s.m = static_cast<int>(to_int(value));
  } else if (key == "F") {
    s.F = split_list(value);
  } else if (key == "coords") {
    s.coords = split_list(value);
  } else if (key == "density") {
    s.density = single(value);
  } else if (key == "degeneracy") {
    s.degeneracy = static_cast<int>(to_int(value));
  } else if (key.rfind("cometric.", 0) == 0) {
    auto rest = key.substr(9);
    auto dot = rest.find('.');
    if (dot == std::string::npos) throw ConfigError("cometric keys look like cometric.L.K");
    long l = to_int(rest.substr(0, dot));
    long k = to_int(rest.substr(dot + 1));
    if (l < 1 || k < 1) throw ConfigError("cometric indices start at 1");
    auto a = static_cast<std::size_t>(std::min(l, k) - 1);
    auto b = static_cast<std::size_t>(std::max(l, k) - 1);
    s.cometric[{a, b}] = single(value);
  } else if (key.rfind("frame.", 0) == 0) {
    long i = to_int(key.substr(6));
    if (i < 1) throw ConfigError("frame indices start at 1");
    if (static_cast<std::size_t>(i) > s.frames.size()) s.frames.resize(static_cast<std::size_t>(i));
    s.frames[static_cast<std::size_t>(i - 1)] = split_list(value);
  } else {
    throw ConfigError("unknown [structure] key '" + key + "'");
  }
}

inline void scenario_key(ComparisonScenario& sc, const std::string& key, const std::string& value) {
  if (key == "name") {
    sc.name = single(value);
  } else if (key == "description") {
    sc.description = single(value);
  } else if (key == "operator") {
    sc.op = operator_from_string(single(value));
  } else if (key == "p") {
    sc.p = parse_rational(single(value));
  } else if (key == "u") {
    sc.u = single(value);
  } else if (key == "v") {
    sc.v = single(value);
  } else if (key == "box") {
    sc.box = parse_box(value);
  } else if (key == "grid") {
    sc.grid.clear();
    for (const auto& c : split_list(value)) sc.grid.push_back(to_count(c));
  } else if (key == "eps_touch") {
    sc.tol.touch = to_double(value);
  } else if (key == "eps_order") {
    sc.tol.order = to_double(value);
  } else if (key == "eps_H") {
    sc.tol.H = to_double(value);
  } else if (key == "eps_sing") {
    sc.tol.sing = to_double(value);
  } else if (key == "T") {
    sc.T = to_double(value);
  } else if (key == "step") {
    sc.step = to_double(value);
  } else {
    throw ConfigError("unknown [scenario] key '" + key + "'");
  }
}

}  // namespace detail

/// Parses config text. Errors carry the 1-based line number.
inline ConfigDocument parse_config(const std::string& text) {
  ConfigDocument doc;
  enum class Section { none, structure, function, field, scenario } section = Section::none;
  std::string current;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  bool grid_uniform = false;
  bool eps_sing_set = false;
  std::size_t uniform_count = 0;
  try {
    while (std::getline(in, raw)) {
      ++line_no;
      std::string line = detail::trim(raw);
      if (line.empty() || line[0] == '#') continue;
      if (line.front() == '[') {
        if (line.back() != ']') throw ConfigError("unterminated section header");
        std::string head = detail::trim(std::string_view(line).substr(1, line.size() - 2));
        auto space = head.find_first_of(" \t");
        std::string kind = head.substr(0, space);
        std::string name = space == std::string::npos ? "" : detail::trim(head.substr(space));
        if (kind == "structure" && name.empty()) {
          if (doc.structure) throw ConfigError("duplicate [structure] section");
          doc.structure.emplace();
          section = Section::structure;
        } else if (kind == "scenario" && name.empty()) {
          if (doc.scenario) throw ConfigError("duplicate [scenario] section");
          doc.scenario.emplace();
          section = Section::scenario;
        } else if ((kind == "function" || kind == "field") && !name.empty()) {
          bool fresh = kind == "function" ? doc.functions.emplace(name, FunctionDef{}).second
                                          : doc.fields.emplace(name, FieldDef{}).second;
          if (!fresh) throw ConfigError("duplicate [" + kind + " " + name + "] section");
          section = kind == "function" ? Section::function : Section::field;
          current = name;
        } else {
          throw ConfigError("unknown section [" + head + "]");
        }
        continue;
      }
      auto eq = line.find('=');
      if (eq == std::string::npos) throw ConfigError("expected key = value");
      std::string key = detail::trim(std::string_view(line).substr(0, eq));
      std::string value = detail::trim(std::string_view(line).substr(eq + 1));
      if (key.empty()) throw ConfigError("missing key");
      switch (section) {
        case Section::none:
          throw ConfigError("key outside any section");
        case Section::structure:
          detail::structure_key(*doc.structure, key, value);
          break;
        case Section::function: {
          auto& f = doc.functions[current];
          if (key == "expr") {
            f.expr = detail::single(value);
          } else if (key == "box") {
            f.box = detail::parse_box(value);
          } else {
            throw ConfigError("unknown [function] key '" + key + "'");
          }
          break;
        }
        case Section::field:
          if (key != "components") throw ConfigError("unknown [field] key '" + key + "'");
          doc.fields[current].components = detail::split_list(value);
          break;
        case Section::scenario:
          detail::scenario_key(*doc.scenario, key, value);
          eps_sing_set = eps_sing_set || key == "eps_sing";
          if (key == "grid") {
            grid_uniform = doc.scenario->grid.size() == 1;
            uniform_count = doc.scenario->grid.front();
          }
          break;
      }
    }
  } catch (const ConfigError& e) {
    throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
  } catch (const ParseError& e) {
    throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
  }

  for (const auto& [name, f] : doc.functions) {
    if (f.expr.empty()) throw ConfigError("[function " + name + "] has no expr");
  }
  if (doc.scenario) {
    auto& sc = *doc.scenario;
    if (!doc.structure) throw ConfigError("[scenario] needs a [structure] section");
    sc.structure = *doc.structure;
    if (sc.u.empty() || sc.v.empty()) throw ConfigError("[scenario] needs u and v");
    if (sc.box.intervals.empty()) throw ConfigError("[scenario] needs a box");
    if (grid_uniform && sc.box.dim() > 1) sc.grid = GridSpec::uniform(sc.box, uniform_count).counts();
    if (sc.grid.empty()) throw ConfigError("[scenario] needs a grid");
    if (sc.grid.size() != sc.box.dim()) throw ConfigError("[scenario] grid and box have different lengths");
    if (sc.name.empty()) sc.name = "config";
    if (!eps_sing_set) sc.tol.sing = eps_sing_from_env();
  }
  return doc;
}

inline ConfigDocument load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

inline std::string structure_config(const StructureSpec& s) {
  std::string out = "[structure]\nkind = " + s.kind + "\n";
  if (s.kind == "heisenberg" || s.kind == "cylinder") out += "n = " + std::to_string(s.n) + "\n";
  if (s.kind == "graph_F") {
    out += "m = " + std::to_string(s.m) + "\n";
    if (!s.F.empty()) out += "F = " + detail::quote_list(s.F) + "\n";
  }
  if (s.kind == "custom") {
    std::string names;
    for (std::size_t i = 0; i < s.coords.size(); ++i) names += (i ? ", " : "") + s.coords[i];
    out += "coords = " + names + "\n";
    for (const auto& [lk, src] : s.cometric) {
      out += "cometric." + std::to_string(lk.first + 1) + "." + std::to_string(lk.second + 1) + " = \"" + src + "\"\n";
    }
    out += "density = \"" + s.density + "\"\n";
    out += "degeneracy = " + std::to_string(s.degeneracy) + "\n";
    for (std::size_t i = 0; i < s.frames.size(); ++i) {
      out += "frame." + std::to_string(i + 1) + " = " + detail::quote_list(s.frames[i]) + "\n";
    }
  }
  return out;
}

/// Config text that parses back to `sc`.
inline std::string scenario_config(const ComparisonScenario& sc) {
  using detail::format_double;
  std::string grid;
  for (std::size_t i = 0; i < sc.grid.size(); ++i) grid += (i ? ", " : "") + std::to_string(sc.grid[i]);
  std::string out = structure_config(sc.structure);
  out += "\n[scenario]\n";
  out += "name = " + sc.name + "\n";
  out += "description = \"" + sc.description + "\"\n";
  out += "operator = " + to_string(sc.op) + "\n";
  out += "p = " + sc.p.to_string() + "\n";
  out += "u = \"" + sc.u + "\"\n";
  out += "v = \"" + sc.v + "\"\n";
  out += "box = " + detail::box_text(sc.box) + "\n";
  out += "grid = " + grid + "\n";
  out += "eps_touch = " + format_double(sc.tol.touch) + "\n";
  out += "eps_order = " + format_double(sc.tol.order) + "\n";
  out += "eps_H = " + format_double(sc.tol.H) + "\n";
  out += "eps_sing = " + format_double(sc.tol.sing) + "\n";
  out += "T = " + format_double(sc.T) + "\n";
  out += "step = " + format_double(sc.step) + "\n";
  return out;
}

}  // namespace subcurv
