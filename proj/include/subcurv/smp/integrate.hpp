#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "subcurv/core/structure.hpp"
#include "subcurv/util/grid.hpp"

namespace subcurv {

struct Trajectory {
  std::vector<std::vector<double>> points;  // starts with x0
  bool clipped = false;                     // left the clip box; the exit point is not kept
  bool failed = false;                      // field evaluation failed
  std::string error;
};

using RegionTest = std::function<bool(const std::vector<double>&)>;

/// Classical RK4 for dx/dt = X(x) over [0, T] with ⌈|T|/step⌉ equal steps
/// (negative T runs backwards). Stops early at the first point for which
/// `inside` is false.
inline Trajectory integrate_field(const VectorFieldExpr& field, std::vector<double> x0, double T, double step,
                                  const RegionTest& inside = {}) {
  if (!(step > 0.0)) throw std::invalid_argument("integration step must be positive");
  if (x0.size() != field.dim()) throw DimensionMismatch("start point dimension differs from field");
  Tape tape(field.components);
  const std::size_t d = x0.size();
  const auto n = static_cast<std::size_t>(std::ceil(std::abs(T) / step - 1e-12));
  const double h = n == 0 ? 0.0 : T / static_cast<double>(n);
  Trajectory tr;
  tr.points.reserve(n + 1);
  tr.points.push_back(x0);
  std::vector<double> work;
  std::vector<double> k1(d), k2(d), k3(d), k4(d), tmp(d);
  auto eval = [&](const std::vector<double>& x, std::vector<double>& out) { tape.run(x, work, out); };
  std::vector<double> x = std::move(x0);
  try {
    for (std::size_t s = 0; s < n; ++s) {
      eval(x, k1);
      for (std::size_t i = 0; i < d; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
      eval(tmp, k2);
      for (std::size_t i = 0; i < d; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
      eval(tmp, k3);
      for (std::size_t i = 0; i < d; ++i) tmp[i] = x[i] + h * k3[i];
      eval(tmp, k4);
      for (std::size_t i = 0; i < d; ++i) x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (inside && !inside(x)) {
        tr.clipped = true;
        break;
      }
      tr.points.push_back(x);
    }
  } catch (const EvaluationError& e) {
    tr.failed = true;
    tr.error = e.what();
  }
  return tr;
}

inline Trajectory integrate_field(const VectorFieldExpr& field, std::vector<double> x0, double T, double step,
                                  const Box& clip) {
  return integrate_field(field, std::move(x0), T, step,
                         [&clip](const std::vector<double>& x) { return clip.contains(x, 1e-12); });
}

}  // namespace subcurv
