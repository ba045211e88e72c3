#ifndef PMET_EXT_REAL_HPP
#define PMET_EXT_REAL_HPP

#include <cmath>
#include <compare>
#include <cstdio>
#include <limits>
#include <string>

#include "pmet/error.hpp"

namespace pmet {

/// Tolerance for every axiom and equality check on finite values.
inline constexpr double kEps = 1e-9;

/**
 * A value in [0, inf]. Addition saturates at inf; subtraction is replaced
 * by euclid().
 */
class ExtReal {
 public:
  constexpr ExtReal() = default;
  constexpr explicit ExtReal(double v) : v_(v) {
    if (!(v >= 0.0)) throw RangeError("negative or NaN distance: " + std::to_string(v));
  }

  static constexpr ExtReal inf() { return ExtReal(std::numeric_limits<double>::infinity()); }
  static constexpr ExtReal zero() { return ExtReal(); }

  constexpr bool is_inf() const { return v_ == std::numeric_limits<double>::infinity(); }
  constexpr double value() const { return v_; }

  friend constexpr ExtReal operator+(ExtReal a, ExtReal b) { return ExtReal(a.v_ + b.v_); }
  ExtReal& operator+=(ExtReal o) { return *this = *this + o; }

  /// Scaling by a non-negative factor; 0 * inf is 0.
  friend constexpr ExtReal operator*(double k, ExtReal a) {
    if (k == 0.0) return ExtReal();
    return ExtReal(k * a.v_);
  }

  friend constexpr auto operator<=>(ExtReal a, ExtReal b) = default;
  friend constexpr bool operator==(ExtReal a, ExtReal b) = default;

 private:
  double v_ = 0.0;
};

/// |a - b|, with inf - inf taken as 0.
constexpr ExtReal euclid(ExtReal a, ExtReal b) {
  if (a.is_inf() && b.is_inf()) return ExtReal();
  if (a.is_inf() || b.is_inf()) return ExtReal::inf();
  return ExtReal(a.value() > b.value() ? a.value() - b.value() : b.value() - a.value());
}

constexpr ExtReal max(ExtReal a, ExtReal b) { return a < b ? b : a; }
constexpr ExtReal min(ExtReal a, ExtReal b) { return b < a ? b : a; }

/// Equal up to kEps; infinities compare exactly.
inline bool approx_equal(ExtReal a, ExtReal b, double tol = kEps) {
  if (a.is_inf() || b.is_inf()) return a.is_inf() == b.is_inf();
  return std::fabs(a.value() - b.value()) <= tol;
}

/// a <= b up to kEps.
inline bool approx_le(ExtReal a, ExtReal b, double tol = kEps) {
  if (b.is_inf()) return true;
  if (a.is_inf()) return false;
  return a.value() <= b.value() + tol;
}

/** The bound of a distance space: 1 or inf. */
class Top {
 public:
  enum class Kind { one, inf };

  constexpr Top() = default;
  constexpr explicit Top(Kind k) : kind_(k) {}
  static constexpr Top one() { return Top(Kind::one); }
  static constexpr Top infinite() { return Top(Kind::inf); }

  constexpr bool is_inf() const { return kind_ == Kind::inf; }
  constexpr ExtReal value() const { return is_inf() ? ExtReal::inf() : ExtReal(1.0); }
  constexpr bool admits(ExtReal x) const { return is_inf() || x.value() <= 1.0; }

  /// Admits x, tolerating an overshoot of kEps which is then rounded to 1.
  ExtReal check(ExtReal x, const char* what = "distance") const {
    if (admits(x)) return x;
    if (x.value() <= 1.0 + kEps) return ExtReal(1.0);
    throw RangeError(std::string(what) + " exceeds top 1: " + std::to_string(x.value()));
  }

  std::string name() const { return is_inf() ? "inf" : "1"; }
  static Top parse(const std::string& s) {
    if (s == "1") return one();
    if (s == "inf") return infinite();
    throw InputError("top must be 1 or inf, got '" + s + "'");
  }

  friend constexpr bool operator==(Top, Top) = default;

 private:
  Kind kind_ = Kind::one;
};

/// 12 significant digits, "inf" for infinity.
inline std::string format_value(ExtReal x) {
  if (x.is_inf()) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x.value());
  return buf;
}

}  // namespace pmet

#endif
