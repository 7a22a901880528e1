#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

namespace subcurv {

/// Exact rational with 64-bit numerator and positive denominator, always
/// reduced. Arithmetic reports overflow through std::optional.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t value) : num_(value) {}  // NOLINT: implicit by design of literals
  Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    auto r = make(static_cast<__int128>(num), static_cast<__int128>(den));
    if (!r) throw std::overflow_error("rational out of range");
    *this = *r;
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  bool is_integer() const { return den_ == 1; }
  bool is_zero() const { return num_ == 0; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend std::optional<Rational> checked_add(Rational a, Rational b) {
    return make(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                static_cast<__int128>(a.den_) * b.den_);
  }
  friend std::optional<Rational> checked_mul(Rational a, Rational b) {
    return make(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
  }
  /// Integer power; nullopt on overflow or 0^negative.
  friend std::optional<Rational> checked_pow(Rational base, std::int64_t k) {
    if (k < 0) {
      if (base.num_ == 0) return std::nullopt;
      base = Rational::raw(base.num_ < 0 ? -base.den_ : base.den_,
                           base.num_ < 0 ? -base.num_ : base.num_);
      k = -k;
    }
    Rational acc{1};
    while (k > 0) {
      if (k & 1) {
        auto next = checked_mul(acc, base);
        if (!next) return std::nullopt;
        acc = *next;
      }
      k >>= 1;
      if (k > 0) {
        auto sq = checked_mul(base, base);
        if (!sq) return std::nullopt;
        base = *sq;
      }
    }
    return acc;
  }

  Rational operator-() const { return raw(-num_, den_); }

  friend bool operator==(Rational a, Rational b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend bool operator<(Rational a, Rational b) {
    return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
  }

  std::string to_string() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

 private:
  static Rational raw(std::int64_t n, std::int64_t d) {
    Rational r;
    r.num_ = n;
    r.den_ = d;
    return r;
  }
  static std::optional<Rational> make(__int128 n, __int128 d) {
    if (d == 0) return std::nullopt;
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 a = n < 0 ? -n : n;
    __int128 b = d;
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      n /= a;
      d /= a;
    }
    constexpr __int128 lim = static_cast<__int128>(INT64_MAX);
    if (n > lim || n < -lim || d > lim) return std::nullopt;
    return raw(static_cast<std::int64_t>(n), static_cast<std::int64_t>(d));
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Constant payload of an expression: exact rational when representable,
/// otherwise an IEEE double.
class Number {
 public:
  Number() = default;
  Number(Rational r) : exact_(true), rational_(r), value_(r.to_double()) {}  // NOLINT
  Number(std::int64_t v) : Number(Rational{v}) {}                           // NOLINT
  static Number inexact(double v) {
    Number n;
    n.exact_ = false;
    n.value_ = v;
    return n;
  }

  bool is_exact() const { return exact_; }
  const Rational& rational() const { return rational_; }
  double value() const { return value_; }

  bool is_zero() const { return exact_ ? rational_.is_zero() : value_ == 0.0; }
  bool is_one() const { return exact_ ? rational_ == Rational{1} : value_ == 1.0; }
  bool is_minus_one() const { return exact_ ? rational_ == Rational{-1} : value_ == -1.0; }
  bool is_negative() const { return value_ < 0.0; }

  friend Number operator+(const Number& a, const Number& b) {
    if (a.exact_ && b.exact_) {
      if (auto r = checked_add(a.rational_, b.rational_)) return Number{*r};
    }
    return inexact(a.value_ + b.value_);
  }
  friend Number operator*(const Number& a, const Number& b) {
    if (a.exact_ && b.exact_) {
      if (auto r = checked_mul(a.rational_, b.rational_)) return Number{*r};
    }
    return inexact(a.value_ * b.value_);
  }
  Number operator-() const { return exact_ ? Number{-rational_} : inexact(-value_); }

  friend bool operator==(const Number& a, const Number& b) {
    if (a.exact_ != b.exact_) return false;
    if (a.exact_) return a.rational_ == b.rational_;
    return a.value_ == b.value_ || (std::isnan(a.value_) && std::isnan(b.value_));
  }

  /// Total order used for canonical child ordering.
  friend int compare(const Number& a, const Number& b) {
    if (a.value_ < b.value_) return -1;
    if (b.value_ < a.value_) return 1;
    if (a.exact_ != b.exact_) return a.exact_ ? -1 : 1;
    if (a.exact_) {
      if (a.rational_ < b.rational_) return -1;
      if (b.rational_ < a.rational_) return 1;
    }
    return 0;
  }

 private:
  bool exact_ = true;
  Rational rational_{0};
  double value_ = 0.0;
};

}  // namespace subcurv
