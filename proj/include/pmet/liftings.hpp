#ifndef PMET_LIFTINGS_HPP
#define PMET_LIFTINGS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pmet/error.hpp"
#include "pmet/ext_real.hpp"
#include "pmet/pseudometric.hpp"
#include "pmet/transport.hpp"

namespace pmet {

// ---------------------------------------------------------------------------
// Evaluation maps on [0, top]

enum class InputMode { max, sum, avg };

inline InputMode parse_input_mode(const std::string& s) {
  if (s == "max") return InputMode::max;
  if (s == "sum") return InputMode::sum;
  if (s == "avg") return InputMode::avg;
  throw InputError("unknown aggregation mode '" + s + "'");
}
inline const char* to_string(InputMode m) {
  switch (m) {
    case InputMode::max: return "max";
    case InputMode::sum: return "sum";
    case InputMode::avg: return "avg";
  }
  return "?";
}

inline void require_factor(double c, const char* what) {
  if (!(c > 0.0 && c <= 1.0)) throw InputError(std::string(what) + " must lie in ]0,1], got " + std::to_string(c));
}

inline void require_mode_top(InputMode m, Top top) {
  if (m == InputMode::sum && !top.is_inf()) throw InputError("sum aggregation needs top = inf");
}

/// Aggregate of a family of distances: max, sum or mean.
inline ExtReal ev_input(std::span<const ExtReal> r, InputMode mode) {
  ExtReal acc;
  for (ExtReal x : r) acc = mode == InputMode::max ? max(acc, x) : acc + x;
  if (mode == InputMode::avg && !r.empty()) acc = (1.0 / static_cast<double>(r.size())) * acc;
  return acc;
}

inline ExtReal ev_max(std::span<const ExtReal> r) { return ev_input(r, InputMode::max); }

/// inf of a set; inf of the empty set is top. Not well-behaved, kept for the checks.
inline ExtReal ev_min(std::span<const ExtReal> r, Top top) {
  ExtReal acc = top.value();
  for (ExtReal x : r) acc = min(acc, x);
  return acc;
}

/// Expected value of weighted distances.
inline ExtReal ev_expectation(std::span<const std::pair<double, ExtReal>> atoms) {
  ExtReal acc;
  for (const auto& [w, x] : atoms) acc += w * x;
  return acc;
}

struct ProductEval {
  enum class Kind { max, pnorm };
  Kind kind = Kind::max;
  double c1 = 1.0, c2 = 1.0;
  double p = 1.0;

  void validate(Top top) const {
    require_factor(c1, "product weight c1");
    require_factor(c2, "product weight c2");
    if (kind == Kind::pnorm) {
      if (!(p >= 1.0) || !std::isfinite(p)) throw InputError("p-norm exponent must be finite and >= 1");
      if (!top.is_inf() && c1 + c2 > 1.0 + kEps) throw InputError("p-norm with top 1 needs c1 + c2 <= 1");
    }
  }
};

inline ExtReal ev_product(ExtReal r1, ExtReal r2, const ProductEval& e) {
  if (e.kind == ProductEval::Kind::max) return max(e.c1 * r1, e.c2 * r2);
  if (r1.is_inf() || r2.is_inf()) return ExtReal::inf();
  return ExtReal(std::pow(e.c1 * std::pow(r1.value(), e.p) + e.c2 * std::pow(r2.value(), e.p), 1.0 / e.p));
}

struct MachineEval {
  enum class Variant { discounted_max, avg_sum, sum };
  Variant variant = Variant::discounted_max;
  double c1 = 1.0, c2 = 1.0;

  void validate(Top top) const {
    require_factor(c1, "machine weight c1");
    require_factor(c2, "machine weight c2");
    if (variant == Variant::avg_sum && !top.is_inf() && c1 + c2 > 1.0 + kEps)
      throw InputError("avg-sum machine evaluation with top 1 needs c1 + c2 <= 1");
    if (variant == Variant::sum && !top.is_inf()) throw InputError("sum machine evaluation needs top = inf");
  }
};

inline MachineEval::Variant parse_machine_variant(const std::string& s) {
  if (s == "max" || s == "discounted-max") return MachineEval::Variant::discounted_max;
  if (s == "avg" || s == "avg-sum") return MachineEval::Variant::avg_sum;
  if (s == "sum") return MachineEval::Variant::sum;
  throw InputError("unknown machine evaluation '" + s + "'");
}

/// Combines an output distance with the per-letter successor distances.
inline ExtReal ev_machine(ExtReal out, std::span<const ExtReal> next, const MachineEval& e) {
  switch (e.variant) {
    case MachineEval::Variant::discounted_max:
      return max(e.c1 * out, e.c2 * ev_input(next, InputMode::max));
    case MachineEval::Variant::avg_sum:
      return e.c1 * out + e.c2 * ev_input(next, InputMode::avg);
    case MachineEval::Variant::sum:
      return e.c1 * out + e.c2 * ev_input(next, InputMode::sum);
  }
  return ExtReal();
}

// ---------------------------------------------------------------------------
// Lifted distances

/// Hausdorff distance over an arbitrary distance; max of empty is 0, min of empty is top.
template <class Dist>
ExtReal hausdorff_by(std::size_t n1, std::size_t n2, Dist&& dist, Top top) {
  auto directed = [&](std::size_t na, std::size_t nb, bool flip) {
    ExtReal worst;
    for (std::size_t a = 0; a < na; ++a) {
      ExtReal best = top.value();
      for (std::size_t b = 0; b < nb; ++b) best = min(best, flip ? dist(b, a) : dist(a, b));
      worst = max(worst, best);
    }
    return worst;
  };
  return max(directed(n1, n2, false), directed(n2, n1, true));
}

inline ExtReal hausdorff(const PseudometricMatrix& d, std::span<const std::size_t> s1, std::span<const std::size_t> s2) {
  return hausdorff_by(s1.size(), s2.size(), [&](std::size_t a, std::size_t b) { return d(s1[a], s2[b]); }, d.top());
}

/// Optimal transport cost, or top when no coupling exists.
inline ExtReal wasserstein_distribution(const PseudometricMatrix& d, const Distribution& p, const Distribution& q) {
  return solve_transport(p, q, d).cost;
}

/**
 * Supremum over non-expansive f : X -> [0, top] of |sum f (p - q)|.
 * For subdistributions of different mass the missing mass is parked on an
 * extra point at distance top from everything.
 */
inline ExtReal kantorovich_distribution(const PseudometricMatrix& d, const Distribution& p, const Distribution& q) {
  const double mp = p.mass(), mq = q.mass();
  if (std::fabs(mp - mq) <= kEps) return solve_dual(p, q, d).value;
  if (d.top().is_inf()) return ExtReal::inf();
  const std::size_t n = d.size();
  std::vector<std::string> carrier = d.carrier();
  std::string extra = "*";
  while (d.find(extra)) extra += "*";
  carrier.push_back(extra);
  PseudometricMatrix ext(carrier, d.top());
  for (std::size_t i = 0; i <= n; ++i)
    for (std::size_t j = 0; j <= n; ++j)
      ext.set(i, j, i == j ? ExtReal() : (i == n || j == n) ? d.top().value() : d(i, j));
  const double mass = std::max(mp, mq);
  std::vector<double> pw(p.weights().begin(), p.weights().end()), qw(q.weights().begin(), q.weights().end());
  pw.push_back(mass - mp);
  qw.push_back(mass - mq);
  return solve_dual(Distribution(pw, true), Distribution(qw, true), ext).value;
}

inline void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) throw InputError("input functions have different alphabets");
}

/// Aggregated pointwise distance of two A-indexed families.
inline ExtReal lift_input(const PseudometricMatrix& d, std::span<const std::size_t> s1, std::span<const std::size_t> s2,
                          InputMode mode) {
  require_same_length(s1.size(), s2.size());
  require_mode_top(mode, d.top());
  std::vector<ExtReal> r(s1.size());
  for (std::size_t a = 0; a < s1.size(); ++a) r[a] = d(s1[a], s2[a]);
  return d.top().check(ev_input(r, mode));
}

inline ExtReal lift_product(const PseudometricMatrix& d1, const PseudometricMatrix& d2,
                            std::pair<std::size_t, std::size_t> x, std::pair<std::size_t, std::size_t> y,
                            const ProductEval& e) {
  if (d1.top() != d2.top()) throw InputError("product components have different tops");
  e.validate(d1.top());
  return d1.top().check(ev_product(d1(x.first, y.first), d2(x.second, y.second), e));
}

struct CoproductElement {
  int side;  // 0 or 1
  std::size_t index;
};

inline ExtReal lift_coproduct(const PseudometricMatrix& d1, const PseudometricMatrix& d2, CoproductElement x,
                              CoproductElement y) {
  if (d1.top() != d2.top()) throw InputError("coproduct components have different tops");
  if (x.side != y.side) return d1.top().value();
  return x.side == 0 ? d1(x.index, y.index) : d2(x.index, y.index);
}

/** An output together with one successor per letter. */
struct MachineElement {
  std::size_t output;
  std::vector<std::size_t> next;
};

/// Machine lifting of an output distance and a state distance.
inline ExtReal lift_machine(const PseudometricMatrix& out_d, const PseudometricMatrix& d, const MachineElement& x,
                            const MachineElement& y, const MachineEval& e) {
  if (out_d.top() != d.top()) throw InputError("machine components have different tops");
  require_same_length(x.next.size(), y.next.size());
  e.validate(d.top());
  std::vector<ExtReal> r(x.next.size());
  for (std::size_t a = 0; a < r.size(); ++a) r[a] = d(x.next[a], y.next[a]);
  return d.top().check(ev_machine(out_d(x.output, y.output), r, e));
}

/**
 * Machine lifting with a discrete output alphabet: top when the outputs
 * differ, otherwise c times the aggregated successor distance.
 */
inline ExtReal lift_discrete_machine(const PseudometricMatrix& d, bool out1, bool out2, std::span<const std::size_t> s1,
                                     std::span<const std::size_t> s2, double c, InputMode mode) {
  require_factor(c, "discount");
  if (out1 != out2) return d.top().value();
  return c * lift_input(d, s1, s2, mode);
}

/// Wasserstein lifting for X -> X x X with sum evaluation; top must be inf.
inline ExtReal squaring_wasserstein(const PseudometricMatrix& d, std::pair<std::size_t, std::size_t> x,
                                    std::pair<std::size_t, std::size_t> y) {
  if (!d.top().is_inf()) throw InputError("the squaring lifting needs top = inf");
  return d(x.first, y.first) + d(x.second, y.second);
}

// ---------------------------------------------------------------------------
// Grid enumeration of non-expansive functions

namespace detail {

inline long grid_steps(double range, double h) {
  double k = std::round(range / h);
  if (!(h > 0.0) || std::fabs(k * h - range) > kEps * std::max(1.0, range))
    throw InputError("grid step must divide the value range exactly");
  return static_cast<long>(k);
}

}  // namespace detail

/**
 * Calls visit(values) for every f : points -> {0, h, ..., cap} with
 * |f(a) - f(b)| <= d(a, b). Any such f extends to a non-expansive
 * [0, cap]-valued map on the whole carrier.
 */
template <class Visit>
void for_each_grid_function(const PseudometricMatrix& d, std::span<const std::size_t> points, double h, double cap,
                            Visit&& visit) {
  const long steps = detail::grid_steps(cap, h);
  const std::size_t n = points.size();
  std::vector<double> f(n);
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == n) {
      visit(std::span<const double>(f));
      return;
    }
    for (long s = 0; s <= steps; ++s) {
      double v = static_cast<double>(s) * h;
      bool ok = true;
      for (std::size_t j = 0; j < k && ok; ++j) {
        ExtReal dist = d(points[k], points[j]);
        ok = dist.is_inf() || std::fabs(v - f[j]) <= dist.value() + 1e-12;
      }
      if (!ok) continue;
      f[k] = v;
      rec(k + 1);
    }
  };
  rec(0);
}

/// Distinct positions among the given lists, in first-seen order.
inline std::vector<std::size_t> collect_points(std::initializer_list<std::span<const std::size_t>> lists) {
  std::vector<std::size_t> out;
  for (auto l : lists)
    for (auto x : l)
      if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
  return out;
}

/**
 * Grid lower approximation of the Kantorovich lifting for X -> X x X:
 * max over grid-valued non-expansive f into [0, cap] of
 * |f(x1) + f(x2) - f(y1) - f(y2)|.
 */
inline ExtReal squaring_kantorovich_oracle(const PseudometricMatrix& d, std::pair<std::size_t, std::size_t> x,
                                           std::pair<std::size_t, std::size_t> y, double h, double cap) {
  if (d.size() > 5) throw LimitError("squaring oracle limited to carriers of size 5");
  if (!d.top().is_inf() && cap > 1.0) throw InputError("grid cap exceeds top");
  const std::size_t a[] = {x.first, x.second, y.first, y.second};
  auto pts = collect_points({std::span<const std::size_t>(a)});
  auto pos = [&](std::size_t v) { return static_cast<std::size_t>(std::find(pts.begin(), pts.end(), v) - pts.begin()); };
  double best = 0.0;
  for_each_grid_function(d, pts, h, cap, [&](std::span<const double> f) {
    double v = std::fabs(f[pos(x.first)] + f[pos(x.second)] - f[pos(y.first)] - f[pos(y.second)]);
    best = std::max(best, v);
  });
  return ExtReal(std::round(best / h) * h);
}

}  // namespace pmet

#endif
