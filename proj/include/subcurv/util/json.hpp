#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace subcurv {

/// Minimal JSON value with insertion-ordered objects and a byte-stable
/// writer: doubles use 17 significant digits, -0 prints as 0 and
/// non-finite values print as null.
class Json {
 public:
  using Array = std::vector<Json>;
  using Object = std::vector<std::pair<std::string, Json>>;

  Json() : v_(nullptr) {}
  Json(std::nullptr_t) : v_(nullptr) {}                       // NOLINT
  Json(bool b) : v_(b) {}                                     // NOLINT
  Json(double d) : v_(d) {}                                   // NOLINT
  Json(int i) : v_(static_cast<std::int64_t>(i)) {}           // NOLINT
  Json(std::int64_t i) : v_(i) {}                             // NOLINT
  Json(std::size_t i) : v_(static_cast<std::int64_t>(i)) {}   // NOLINT
  Json(const char* s) : v_(std::string(s)) {}                 // NOLINT
  Json(std::string s) : v_(std::move(s)) {}                   // NOLINT
  Json(Array a) : v_(std::move(a)) {}                         // NOLINT
  Json(Object o) : v_(std::move(o)) {}                        // NOLINT

  static Json array() { return Json(Array{}); }
  static Json object() { return Json(Object{}); }
  static Json numbers(const std::vector<double>& xs) {
    Array a;
    a.reserve(xs.size());
    for (double x : xs) a.emplace_back(x);
    return Json(std::move(a));
  }

  /// Appends (or replaces) a key, keeping first-insertion order.
  Json& set(const std::string& key, Json value) {
    auto& o = std::get<Object>(v_);
    for (auto& [k, v] : o) {
      if (k == key) {
        v = std::move(value);
        return *this;
      }
    }
    o.emplace_back(key, std::move(value));
    return *this;
  }
  Json& push(Json value) {
    std::get<Array>(v_).push_back(std::move(value));
    return *this;
  }

  std::string dump(int indent = 2) const {
    std::string out;
    write(out, indent, 0);
    return out;
  }

  static std::string format_double(double d) {
    if (!std::isfinite(d)) return "null";
    if (d == 0.0) return "0";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    return buf;
  }

 private:
  static void escape(std::string& out, const std::string& s) {
    out += '"';
    for (unsigned char c : s) {
      switch (c) {
        case '"':
          out += "\\\"";
          break;
        case '\\':
          out += "\\\\";
          break;
        case '\n':
          out += "\\n";
          break;
        case '\t':
          out += "\\t";
          break;
        default:
          if (c < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\u%04x", c);
            out += buf;
          } else {
            out += static_cast<char>(c);
          }
      }
    }
    out += '"';
  }

  void write(std::string& out, int indent, int depth) const {
    auto newline = [&](int d) {
      if (indent <= 0) return;
      out += '\n';
      out.append(static_cast<std::size_t>(indent * d), ' ');
    };
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, std::nullptr_t>) {
            out += "null";
          } else if constexpr (std::is_same_v<T, bool>) {
            out += x ? "true" : "false";
          } else if constexpr (std::is_same_v<T, double>) {
            out += format_double(x);
          } else if constexpr (std::is_same_v<T, std::int64_t>) {
            out += std::to_string(x);
          } else if constexpr (std::is_same_v<T, std::string>) {
            escape(out, x);
          } else if constexpr (std::is_same_v<T, Array>) {
            if (x.empty()) {
              out += "[]";
              return;
            }
            out += '[';
            for (std::size_t i = 0; i < x.size(); ++i) {
              if (i) out += ',';
              newline(depth + 1);
              x[i].write(out, indent, depth + 1);
            }
            newline(depth);
            out += ']';
          } else {
            if (x.empty()) {
              out += "{}";
              return;
            }
            out += '{';
            for (std::size_t i = 0; i < x.size(); ++i) {
              if (i) out += ',';
              newline(depth + 1);
              escape(out, x[i].first);
              out += indent > 0 ? ": " : ":";
              x[i].second.write(out, indent, depth + 1);
            }
            newline(depth);
            out += '}';
          }
        },
        v_);
  }

  std::variant<std::nullptr_t, bool, double, std::int64_t, std::string, Array, Object> v_;
};

}  // namespace subcurv
