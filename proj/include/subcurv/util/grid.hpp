#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace subcurv {

/// Closed per-coordinate intervals.
struct Box {
  std::vector<std::pair<double, double>> intervals;

  std::size_t dim() const { return intervals.size(); }
  bool contains(const std::vector<double>& x, double slack = 0.0) const {
    if (x.size() != intervals.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] < intervals[i].first - slack || x[i] > intervals[i].second + slack) return false;
    }
    return true;
  }
  void clamp(std::vector<double>& x) const {
    for (std::size_t i = 0; i < x.size() && i < intervals.size(); ++i) {
      if (x[i] < intervals[i].first) x[i] = intervals[i].first;
      if (x[i] > intervals[i].second) x[i] = intervals[i].second;
    }
  }
};

/// Tensor-product sampling of a Box. Flat indices are row-major: the last
/// axis varies fastest. An axis with one point samples its lower bound.
class GridSpec {
 public:
  GridSpec() = default;
  GridSpec(Box box, std::vector<std::size_t> counts) : box_(std::move(box)), counts_(std::move(counts)) {
    if (box_.dim() != counts_.size()) throw std::invalid_argument("grid rank differs from box rank");
    for (std::size_t i = 0; i < counts_.size(); ++i) {
      if (counts_[i] == 0) throw std::invalid_argument("grid axis with zero points");
      if (box_.intervals[i].second < box_.intervals[i].first) {
        throw std::invalid_argument("box interval with hi < lo");
      }
    }
  }
  static GridSpec uniform(Box box, std::size_t per_axis) {
    std::vector<std::size_t> counts;
    for (const auto& [lo, hi] : box.intervals) counts.push_back(hi > lo ? per_axis : 1);
    return GridSpec(std::move(box), std::move(counts));
  }

  const Box& box() const { return box_; }
  const std::vector<std::size_t>& counts() const { return counts_; }
  std::size_t dim() const { return counts_.size(); }
  std::size_t size() const {
    std::size_t n = 1;
    for (auto c : counts_) n *= c;
    return n;
  }
  double spacing(std::size_t axis) const {
    const auto& [lo, hi] = box_.intervals[axis];
    return counts_[axis] > 1 ? (hi - lo) / static_cast<double>(counts_[axis] - 1) : 0.0;
  }
  double coordinate(std::size_t axis, std::size_t i) const {
    const auto& [lo, hi] = box_.intervals[axis];
    if (counts_[axis] == 1) return lo;
    if (i + 1 == counts_[axis]) return hi;
    return lo + spacing(axis) * static_cast<double>(i);
  }
  std::vector<std::size_t> multi_index(std::size_t flat) const {
    std::vector<std::size_t> idx(counts_.size());
    for (std::size_t k = counts_.size(); k-- > 0;) {
      idx[k] = flat % counts_[k];
      flat /= counts_[k];
    }
    return idx;
  }
  std::size_t flat_index(const std::vector<std::size_t>& idx) const {
    std::size_t f = 0;
    for (std::size_t k = 0; k < counts_.size(); ++k) f = f * counts_[k] + idx[k];
    return f;
  }
  std::vector<double> point(std::size_t flat) const {
    auto idx = multi_index(flat);
    std::vector<double> x(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) x[k] = coordinate(k, idx[k]);
    return x;
  }

 private:
  Box box_;
  std::vector<std::size_t> counts_;
};

}  // namespace subcurv
