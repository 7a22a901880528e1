#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "subcurv/calculus/errors.hpp"
#include "subcurv/calculus/expr.hpp"

namespace subcurv {

/// Flattened, common-subexpression-shared evaluation program for one or
/// more expressions. A Tape is immutable after construction; concurrent
/// callers each bring their own workspace.
class Tape {
 public:
  Tape() = default;
  explicit Tape(const Expr& e) : Tape(std::vector<Expr>{e}) {}
  explicit Tape(const std::vector<Expr>& outputs) {
    std::unordered_map<Expr, std::uint32_t, detail::ExprHash> slots;
    for (const auto& e : outputs) outputs_.push_back(emit(e, slots));
  }

  std::size_t output_count() const { return outputs_.size(); }
  std::size_t size() const { return ops_.size(); }
  /// One past the largest coordinate index read by the program.
  std::size_t arity() const { return arity_; }

  /// Evaluates every output into `out`; `work` is scratch storage.
  void run(std::span<const double> point, std::vector<double>& work,
           std::span<double> out) const {
    if (point.size() < arity_) {
      throw DimensionMismatch("evaluation point has " + std::to_string(point.size()) +
                              " coordinates, expression needs " + std::to_string(arity_));
    }
    if (out.size() != outputs_.size()) throw DimensionMismatch("output buffer size mismatch");
    work.resize(ops_.size());
    for (std::size_t i = 0; i < ops_.size(); ++i) work[i] = step(ops_[i], point, work);
    for (std::size_t k = 0; k < outputs_.size(); ++k) out[k] = work[outputs_[k]];
  }

  std::vector<double> operator()(std::span<const double> point) const {
    std::vector<double> work;
    std::vector<double> out(outputs_.size());
    run(point, work, out);
    return out;
  }

  double scalar(std::span<const double> point, std::vector<double>& work) const {
    double v = 0.0;
    run(point, work, std::span<double>(&v, 1));
    return v;
  }

 private:
  enum class Op : std::uint8_t { constant, variable, negate, sum, product, pow_int, pow_rat };
  struct Instr {
    Op op;
    std::uint32_t a = 0;      // operand slot or args offset
    std::uint32_t count = 0;  // argument count for sum/product
    std::int64_t num = 0;
    std::int64_t den = 1;
    double value = 0.0;
  };

  std::uint32_t emit(const Expr& e,
                     std::unordered_map<Expr, std::uint32_t, detail::ExprHash>& slots) {
    auto it = slots.find(e);
    if (it != slots.end()) return it->second;
    Instr in{};
    switch (e.kind()) {
      case Kind::constant:
        in.op = Op::constant;
        in.value = e.value().value();
        break;
      case Kind::variable:
        in.op = Op::variable;
        in.a = static_cast<std::uint32_t>(e.index());
        arity_ = std::max(arity_, e.index() + 1);
        break;
      case Kind::negation:
        in.op = Op::negate;
        in.a = emit(e.children().front(), slots);
        break;
      case Kind::power:
        in.a = emit(e.base(), slots);
        in.num = e.exponent().num();
        in.den = e.exponent().den();
        in.op = in.den == 1 ? Op::pow_int : Op::pow_rat;
        break;
      case Kind::sum:
      case Kind::product: {
        std::vector<std::uint32_t> args;
        args.reserve(e.children().size());
        for (const auto& c : e.children()) args.push_back(emit(c, slots));
        in.op = e.kind() == Kind::sum ? Op::sum : Op::product;
        in.a = static_cast<std::uint32_t>(args_.size());
        in.count = static_cast<std::uint32_t>(args.size());
        args_.insert(args_.end(), args.begin(), args.end());
        break;
      }
    }
    auto slot = static_cast<std::uint32_t>(ops_.size());
    ops_.push_back(in);
    slots.emplace(e, slot);
    return slot;
  }

  static double pow_int(double b, std::int64_t k) {
    if (k < 0) {
      if (b == 0.0) throw DivisionByZero("negative integer power of zero");
      return 1.0 / pow_int(b, -k);
    }
    double acc = 1.0;
    while (k > 0) {
      if (k & 1) acc *= b;
      k >>= 1;
      if (k > 0) b *= b;
    }
    return acc;
  }

  static double pow_rat(double b, std::int64_t num, std::int64_t den) {
    if (!(b > 0.0)) throw NonSmoothPoint("non-integer power of a non-positive base");
    double root = 0.0;
    switch (den) {
      case 2:
        root = std::sqrt(b);
        break;
      case 3:
        root = std::cbrt(b);
        break;
      case 4:
        root = std::sqrt(std::sqrt(b));
        break;
      default:
        return std::pow(b, static_cast<double>(num) / static_cast<double>(den));
    }
    return pow_int(root, num);
  }

  double step(const Instr& in, std::span<const double> point,
              const std::vector<double>& w) const {
    switch (in.op) {
      case Op::constant:
        return in.value;
      case Op::variable:
        return point[in.a];
      case Op::negate:
        return -w[in.a];
      case Op::sum: {
        double s = 0.0;
        for (std::uint32_t i = 0; i < in.count; ++i) s += w[args_[in.a + i]];
        return s;
      }
      case Op::product: {
        double p = 1.0;
        for (std::uint32_t i = 0; i < in.count; ++i) p *= w[args_[in.a + i]];
        return p;
      }
      case Op::pow_int:
        return pow_int(w[in.a], in.num);
      case Op::pow_rat:
        return pow_rat(w[in.a], in.num, in.den);
    }
    return 0.0;
  }

  std::vector<Instr> ops_;
  std::vector<std::uint32_t> args_;
  std::vector<std::uint32_t> outputs_;
  std::size_t arity_ = 0;
};

/// One-shot evaluation. Prefer a Tape when the same tree is evaluated at
/// many points.
inline double evaluate(const Expr& e, std::span<const double> point) {
  std::vector<double> work;
  return Tape(e).scalar(point, work);
}

inline double evaluate(const Expr& e, std::initializer_list<double> point) {
  return evaluate(e, std::span<const double>(point.begin(), point.size()));
}

}  // namespace subcurv
