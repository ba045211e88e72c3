#ifndef PMET_VERIFICATION_HPP
#define PMET_VERIFICATION_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pmet/error.hpp"
#include "pmet/ext_real.hpp"
#include "pmet/liftings.hpp"
#include "pmet/pseudometric.hpp"
#include "pmet/transport.hpp"

namespace pmet {

struct Violation {
  std::string instance;
  std::string relation;  // what should have held
  std::string observed;
};

struct CheckReport {
  explicit CheckReport(std::string check_name = {}) : name(std::move(check_name)) {}

  std::string name;
  std::size_t instances = 0;
  std::vector<Violation> violations;

  bool passed() const { return violations.empty(); }
  void fail(std::string instance, std::string relation, std::string observed) {
    if (violations.size() < kMaxRecorded) violations.push_back({std::move(instance), std::move(relation), std::move(observed)});
    else ++suppressed;
  }
  std::size_t suppressed = 0;
  static constexpr std::size_t kMaxRecorded = 20;
};

inline constexpr std::uint64_t kDefaultSeed = 42;
inline constexpr std::size_t kDefaultBudget = 200;

// ---------------------------------------------------------------------------
// Brute-force liftings

/// Max over grid-valued non-expansive f into [0, top] of |max f[s1] - max f[s2]|.
inline ExtReal brute_kantorovich_sets(const PseudometricMatrix& d, std::span<const std::size_t> s1,
                                      std::span<const std::size_t> s2, double h) {
  if (d.top().is_inf()) throw InputError("grid enumeration needs a finite top");
  if (d.size() > 5) throw LimitError("brute force limited to carriers of size 5");
  auto pts = collect_points({s1, s2});
  auto pos = [&](std::size_t v) { return static_cast<std::size_t>(std::find(pts.begin(), pts.end(), v) - pts.begin()); };
  double best = 0.0;
  for_each_grid_function(d, pts, h, 1.0, [&](std::span<const double> f) {
    double a = 0.0, b = 0.0;
    for (auto x : s1) a = std::max(a, f[pos(x)]);
    for (auto y : s2) b = std::max(b, f[pos(y)]);
    best = std::max(best, std::fabs(a - b));
  });
  return ExtReal(std::round(best / h) * h);
}

/// Max over grid-valued non-expansive f into [0, top] of |sum f (p - q)|.
inline ExtReal brute_kantorovich_distributions(const PseudometricMatrix& d, const Distribution& p, const Distribution& q,
                                               double h) {
  if (d.top().is_inf()) throw InputError("grid enumeration needs a finite top");
  if (d.size() > 5) throw LimitError("brute force limited to carriers of size 5");
  auto sp = p.support(), sq = q.support();
  auto pts = collect_points({std::span<const std::size_t>(sp), std::span<const std::size_t>(sq)});
  double best = 0.0;
  for_each_grid_function(d, pts, h, 1.0, [&](std::span<const double> f) {
    double v = 0.0;
    for (std::size_t k = 0; k < pts.size(); ++k) v += f[k] * (p[pts[k]] - q[pts[k]]);
    best = std::max(best, std::fabs(v));
  });
  return ExtReal(best);
}

/// Min over all set couplings of the largest coupled distance; top if none.
inline ExtReal brute_wasserstein_sets(const PseudometricMatrix& d, std::span<const std::size_t> s1,
                                      std::span<const std::size_t> s2) {
  auto couplings = enumerate_set_couplings(s1, s2);
  if (couplings.empty()) return d.top().value();
  ExtReal best = d.top().value();
  for (const auto& t : couplings) {
    ExtReal v;
    for (auto [x, y] : t) v = max(v, d(x, y));
    best = min(best, v);
  }
  return best;
}

/// Min over grid couplings (step h) of the expected distance; top if none.
inline ExtReal brute_wasserstein_distributions(const PseudometricMatrix& d, const Distribution& p, const Distribution& q,
                                               double h) {
  auto couplings = enumerate_grid_couplings(p, q, h);
  if (couplings.empty()) return d.top().value();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& t : couplings) {
    double v = 0.0;
    bool finite = true;
    for (const auto& e : t.entries) {
      if (d(e.from, e.to).is_inf()) finite = false;
      else v += e.mass * d(e.from, e.to).value();
    }
    if (finite) best = std::min(best, v);
  }
  return std::isfinite(best) ? ExtReal(best) : d.top().value();
}

// ---------------------------------------------------------------------------
// Sampling helpers

namespace detail {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  std::size_t uniform(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

  /// A grid-valued pseudometric (values multiples of h in [0, 1]) via shortest-path closure.
  PseudometricMatrix metric(std::size_t n, double h, Top top = Top::one(), double zero_chance = 0.1) {
    const std::size_t steps = static_cast<std::size_t>(std::llround(1.0 / h));
    std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        w[i][j] = w[j][i] = coin(zero_chance) ? 0.0 : static_cast<double>(uniform(1, steps)) * h;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) w[i][j] = std::min(w[i][j], w[i][k] + w[k][j]);
    std::vector<std::string> carrier;
    for (std::size_t i = 0; i < n; ++i) carrier.push_back("p" + std::to_string(i));
    PseudometricMatrix d(carrier, top);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d.set(i, j, ExtReal(std::round(w[i][j] / h) * h));
    return d;
  }

  std::vector<std::size_t> subset(std::size_t n, std::size_t max_size, std::size_t min_size = 0) {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    std::shuffle(all.begin(), all.end(), rng_);
    all.resize(uniform(min_size, std::min(max_size, n)));
    std::sort(all.begin(), all.end());
    return all;
  }

  /// Grid weights (step h) summing to 1 over a random support.
  Distribution distribution(std::size_t n, std::size_t max_support, double h) {
    auto support = subset(n, max_support, 1);
    const std::size_t units = static_cast<std::size_t>(std::llround(1.0 / h));
    std::vector<std::size_t> cut{0, units};
    for (std::size_t k = 1; k < support.size(); ++k) cut.push_back(uniform(0, units));
    std::sort(cut.begin(), cut.end());
    std::vector<double> w(n, 0.0);
    for (std::size_t k = 0; k < support.size(); ++k) w[support[k]] = static_cast<double>(cut[k + 1] - cut[k]) * h;
    // a zero slice just shrinks the support
    return Distribution(std::move(w));
  }

  ExtReal grid_value(double h, Top top) {
    if (top.is_inf() && coin(0.1)) return ExtReal::inf();
    const std::size_t steps = static_cast<std::size_t>(std::llround((top.is_inf() ? 2.0 : 1.0) / h));
    return ExtReal(static_cast<double>(uniform(0, steps)) * h);
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline std::string fmt_set(std::span<const std::size_t> s, const PseudometricMatrix& d) {
  std::string out = "{";
  for (std::size_t k = 0; k < s.size(); ++k) out += (k ? "," : "") + d.carrier()[s[k]];
  return out + "}";
}

inline std::string fmt_dist(const Distribution& p, const PseudometricMatrix& d) {
  std::string out = "{";
  bool first = true;
  for (auto i : p.support()) {
    out += (first ? "" : ",") + d.carrier()[i] + ":" + format_value(ExtReal(p[i]));
    first = false;
  }
  return out + "}";
}

inline std::string fmt_metric(const PseudometricMatrix& d) {
  std::string out = "d=[";
  for (std::size_t i = 0; i < d.size(); ++i) {
    out += i ? ";" : "";
    for (std::size_t j = 0; j < d.size(); ++j) out += (j ? "," : "") + format_value(d(i, j));
  }
  return out + "]";
}

inline std::string rel(ExtReal a, const char* op, ExtReal b) { return format_value(a) + " " + op + " " + format_value(b); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Well-behaved evaluation functions

/** An evaluation map on one of the shipped functors, with its parameters. */
struct EvaluationSpec {
  enum class Functor { distribution, powerset, input, product, coproduct, machine };
  Functor functor = Functor::distribution;
  bool infimum = false;  // powerset only: inf instead of sup
  InputMode mode = InputMode::max;
  ProductEval product;
  MachineEval machine;
  Top top = Top::one();
};

/// Named evaluation maps accepted by "well-behaved:<name>".
inline std::map<std::string, EvaluationSpec> evaluation_catalog() {
  using F = EvaluationSpec::Functor;
  std::map<std::string, EvaluationSpec> m;
  auto spec = [](F f, Top top = Top::one()) {
    EvaluationSpec e;
    e.functor = f;
    e.top = top;
    return e;
  };
  m["distribution"] = spec(F::distribution);
  m["powerset-max"] = spec(F::powerset);
  m["powerset-min"] = spec(F::powerset);
  m["powerset-min"].infimum = true;
  for (auto mode : {InputMode::max, InputMode::sum, InputMode::avg}) {
    auto& e = m[std::string("input-") + to_string(mode)];
    e = spec(F::input, mode == InputMode::sum ? Top::infinite() : Top::one());
    e.mode = mode;
  }
  m["product-max"] = spec(F::product);
  m["product-max"].product = {ProductEval::Kind::max, 1.0, 0.5, 1.0};
  m["product-pnorm"] = spec(F::product);
  m["product-pnorm"].product = {ProductEval::Kind::pnorm, 0.5, 0.5, 2.0};
  m["coproduct"] = spec(F::coproduct);
  m["machine-max"] = spec(F::machine);
  m["machine-max"].machine = {MachineEval::Variant::discounted_max, 1.0, 0.5};
  m["machine-avg"] = spec(F::machine);
  m["machine-avg"].machine = {MachineEval::Variant::avg_sum, 0.5, 0.5};
  m["machine-sum"] = spec(F::machine, Top::infinite());
  m["machine-sum"].machine = {MachineEval::Variant::sum, 1.0, 0.5};
  return m;
}

namespace detail {

// An element of F over some value set: a fixed shape with value slots.
struct Shape {
  std::vector<double> weights;  // distribution only
  int side = 0;                 // coproduct only
  std::size_t slots = 0;
};

inline ExtReal evaluate(const EvaluationSpec& e, const Shape& sh, std::span<const ExtReal> r) {
  using F = EvaluationSpec::Functor;
  switch (e.functor) {
    case F::distribution: {
      ExtReal acc;
      for (std::size_t k = 0; k < r.size(); ++k) acc += sh.weights[k] * r[k];
      return acc;
    }
    case F::powerset:
      return e.infimum ? ev_min(r, e.top) : ev_max(r);
    case F::input:
      return ev_input(r, e.mode);
    case F::product:
      return ev_product(r[0], r[1], e.product);
    case F::coproduct:
      return r[0];
    case F::machine:
      return ev_machine(r[0], r.subspan(1), e.machine);
  }
  return ExtReal();
}

inline Shape random_shape(const EvaluationSpec& e, Sampler& s) {
  using F = EvaluationSpec::Functor;
  Shape sh;
  switch (e.functor) {
    case F::distribution: {
      sh.slots = s.uniform(1, 3);
      std::vector<std::size_t> cut{0, 10};
      for (std::size_t k = 1; k < sh.slots; ++k) cut.push_back(s.uniform(1, 9));
      std::sort(cut.begin(), cut.end());
      for (std::size_t k = 0; k < sh.slots; ++k) sh.weights.push_back(static_cast<double>(cut[k + 1] - cut[k]) / 10.0);
      break;
    }
    case F::powerset: sh.slots = s.uniform(0, 3); break;
    case F::input: sh.slots = s.uniform(1, 3); break;
    case F::product: sh.slots = 2; break;
    case F::coproduct: sh.slots = 1; sh.side = static_cast<int>(s.uniform(0, 1)); break;
    case F::machine: sh.slots = 1 + s.uniform(1, 3); break;
  }
  return sh;
}

// All shapes with at most `max_slots` slots (distribution weights on a coarse grid).
inline std::vector<Shape> small_shapes(const EvaluationSpec& e, std::size_t max_slots) {
  using F = EvaluationSpec::Functor;
  std::vector<Shape> out;
  switch (e.functor) {
    case F::distribution:
      out.push_back({{1.0}, 0, 1});
      if (max_slots >= 2)
        for (double w : {0.25, 0.5}) out.push_back({{w, 1.0 - w}, 0, 2});
      break;
    case F::powerset:
      for (std::size_t k = 0; k <= max_slots; ++k) out.push_back({{}, 0, k});
      break;
    case F::input:
      for (std::size_t k = 1; k <= max_slots; ++k) out.push_back({{}, 0, k});
      break;
    case F::product: out.push_back({{}, 0, 2}); break;
    case F::coproduct:
      out.push_back({{}, 0, 1});
      out.push_back({{}, 1, 1});
      break;
    case F::machine:
      for (std::size_t k = 2; k <= std::max<std::size_t>(2, max_slots); ++k) out.push_back({{}, 0, k});
      break;
  }
  return out;
}

inline std::string fmt_element(const EvaluationSpec& e, const Shape& sh, std::span<const std::string> slots) {
  using F = EvaluationSpec::Functor;
  std::string body;
  for (std::size_t k = 0; k < slots.size(); ++k) {
    body += k ? "," : "";
    if (e.functor == F::distribution) body += format_value(ExtReal(sh.weights[k])) + ":";
    body += slots[k];
  }
  switch (e.functor) {
    case F::powerset: return "{" + body + "}";
    case F::distribution: return "D{" + body + "}";
    case F::coproduct: return (sh.side ? "inr(" : "inl(") + body + ")";
    default: return "(" + body + ")";
  }
}

// Calls f for every tuple in values^k (or every k-subset when `sets` is true).
template <class T, class Fn>
void for_each_tuple(const std::vector<T>& values, std::size_t k, bool sets, Fn&& f) {
  std::vector<std::size_t> idx(k, 0);
  std::vector<T> cur(k);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t pos, std::size_t from) {
    if (pos == k) {
      f(std::span<const T>(cur));
      return;
    }
    for (std::size_t i = sets ? from : 0; i < values.size(); ++i) {
      cur[pos] = values[i];
      rec(pos + 1, sets ? i + 1 : 0);
    }
  };
  rec(0, 0);
}

}  // namespace detail

/**
 * Tests W1 (monotone), W2 (projections of a coupling of values are no
 * further apart than the evaluated coupling) and W3 (zero exactly on
 * F{0}) on small exhaustive grids followed by random samples.
 */
inline CheckReport check_well_behaved(const EvaluationSpec& e, std::size_t budget = kDefaultBudget,
                                      std::uint64_t seed = kDefaultSeed, std::string name = "well-behaved") {
  using detail::Shape;
  CheckReport rep(std::move(name));
  if (e.functor == EvaluationSpec::Functor::input) require_mode_top(e.mode, e.top);
  if (e.functor == EvaluationSpec::Functor::product) e.product.validate(e.top);
  if (e.functor == EvaluationSpec::Functor::machine) e.machine.validate(e.top);
  detail::Sampler rng(seed);
  const bool sets = e.functor == EvaluationSpec::Functor::powerset;
  const double h = 0.05;
  const ExtReal hi = e.top.is_inf() ? ExtReal::inf() : ExtReal(1.0);

  // W3 on a grid of small elements: ev(t) = 0 iff every slot is 0.
  const std::vector<ExtReal> w3_values{ExtReal(0.0), ExtReal(0.5), hi};
  for (const Shape& sh : detail::small_shapes(e, 2)) {
    detail::for_each_tuple(w3_values, sh.slots, sets, [&](std::span<const ExtReal> r) {
      ++rep.instances;
      bool in_zero_image = std::all_of(r.begin(), r.end(), [](ExtReal x) { return x == ExtReal(); });
      ExtReal v = detail::evaluate(e, sh, r);
      if ((v == ExtReal()) != in_zero_image) {
        std::vector<std::string> names;
        for (auto x : r) names.push_back(format_value(x));
        rep.fail("W3 " + detail::fmt_element(e, sh, names),
                 in_zero_image ? "element of F{0} evaluates to 0" : "evaluates to 0 only on F{0}",
                 "ev = " + format_value(v));
      }
    });
  }

  // W2 on every small element over {0, top} x {0, top}.
  auto check_w2 = [&](const Shape& sh, std::span<const std::pair<ExtReal, ExtReal>> t) {
    ++rep.instances;
    std::vector<ExtReal> a, b, gap;
    for (auto [x, y] : t) {
      a.push_back(x);
      b.push_back(y);
      gap.push_back(euclid(x, y));
    }
    ExtReal lhs = euclid(detail::evaluate(e, sh, a), detail::evaluate(e, sh, b));
    ExtReal rhs = detail::evaluate(e, sh, gap);
    if (!approx_le(lhs, rhs)) {
      std::vector<std::string> names;
      for (auto [x, y] : t) names.push_back("(" + format_value(x) + "," + format_value(y) + ")");
      rep.fail("W2 S=" + detail::fmt_element(e, sh, names), "|ev(F pi1 t) - ev(F pi2 t)| <= ev(F d_e t)",
               detail::rel(lhs, ">", rhs));
    }
  };
  {
    std::vector<std::pair<ExtReal, ExtReal>> pairs;
    for (ExtReal x : {ExtReal(), hi})
      for (ExtReal y : {ExtReal(), hi}) pairs.emplace_back(x, y);
    for (const Shape& sh : detail::small_shapes(e, 2))
      detail::for_each_tuple(pairs, sh.slots, sets, [&](auto t) { check_w2(sh, t); });
  }

  // Random W1 and W2 samples.
  while (rep.instances < budget) {
    Shape sh = detail::random_shape(e, rng);
    std::vector<ExtReal> u, v;
    for (std::size_t k = 0; k < sh.slots; ++k) {
      ExtReal a = rng.grid_value(h, e.top), b = rng.grid_value(h, e.top);
      u.push_back(min(a, b));
      v.push_back(max(a, b));
    }
    ++rep.instances;
    ExtReal lo_v = detail::evaluate(e, sh, u), hi_v = detail::evaluate(e, sh, v);
    if (!approx_le(lo_v, hi_v)) {
      std::vector<std::string> names;
      for (std::size_t k = 0; k < u.size(); ++k) names.push_back(format_value(u[k]) + "<=" + format_value(v[k]));
      rep.fail("W1 " + detail::fmt_element(e, sh, names), "f <= g implies ev(Ff t) <= ev(Fg t)",
               detail::rel(lo_v, ">", hi_v));
    }
    std::vector<std::pair<ExtReal, ExtReal>> t;
    for (std::size_t k = 0; k < sh.slots; ++k) t.emplace_back(rng.grid_value(h, e.top), rng.grid_value(h, e.top));
    check_w2(sh, t);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Duality and comparison checks

/// Hausdorff equals the enumerated Wasserstein lifting and the grid Kantorovich within 2h.
inline CheckReport check_duality_hausdorff(std::size_t budget = kDefaultBudget, std::uint64_t seed = kDefaultSeed,
                                           double h = 0.05) {
  CheckReport rep{"duality:hausdorff"};
  detail::Sampler rng(seed);
  while (rep.instances < budget) {
    ++rep.instances;
    auto d = rng.metric(rng.uniform(1, 4), h);
    auto s1 = rng.subset(d.size(), 3), s2 = rng.subset(d.size(), 3);
    ExtReal hd = hausdorff(d, s1, s2), w = brute_wasserstein_sets(d, s1, s2), k = brute_kantorovich_sets(d, s1, s2, h);
    std::string inst = detail::fmt_metric(d) + " S1=" + detail::fmt_set(s1, d) + " S2=" + detail::fmt_set(s2, d);
    if (!approx_equal(hd, w)) rep.fail(inst, "hausdorff = brute wasserstein", detail::rel(hd, "!=", w));
    if (!approx_le(k, hd) || !approx_le(hd, k + ExtReal(2 * h)))
      rep.fail(inst, "hausdorff - 2h <= brute kantorovich <= hausdorff", "K = " + format_value(k) + ", H = " + format_value(hd));
  }
  return rep;
}

/// Transport primal equals its dual; both agree with grid brute force within 2h.
inline CheckReport check_duality_distribution(std::size_t budget = kDefaultBudget, std::uint64_t seed = kDefaultSeed,
                                              double h = 0.05) {
  CheckReport rep{"duality:distribution"};
  detail::Sampler rng(seed);
  while (rep.instances < budget) {
    ++rep.instances;
    const std::size_t n = rng.uniform(1, 4);
    auto d = rng.metric(n, h);
    auto p = rng.distribution(n, 4, 0.1), q = rng.distribution(n, 4, 0.1);
    auto primal = solve_transport(p, q, d);
    auto dual = solve_dual(p, q, d);
    std::string inst = detail::fmt_metric(d) + " P=" + detail::fmt_dist(p, d) + " Q=" + detail::fmt_dist(q, d);
    if (!approx_equal(primal.cost, dual.value)) rep.fail(inst, "primal = dual", detail::rel(primal.cost, "!=", dual.value));
    if (p.support().size() + q.support().size() <= 6) {
      ExtReal bw = brute_wasserstein_distributions(d, p, q, 0.1);
      if (!approx_le(primal.cost, bw) || !approx_le(bw, primal.cost + ExtReal(2 * h)))
        rep.fail(inst, "W <= brute W <= W + 2h", "brute W = " + format_value(bw) + ", W = " + format_value(primal.cost));
    }
    ExtReal bk = brute_kantorovich_distributions(d, p, q, h);
    if (!approx_le(bk, dual.value) || !approx_le(dual.value, bk + ExtReal(2 * h)))
      rep.fail(inst, "K - 2h <= brute K <= K", "brute K = " + format_value(bk) + ", K = " + format_value(dual.value));
  }
  return rep;
}

/**
 * The squaring functor X -> X x X with sum evaluation: on t1 = (x1, x2),
 * t2 = (x2, x1) every f evaluates equally, so the Kantorovich lifting is 0
 * while the Wasserstein lifting is 2 d(x1, x2). The gap is reported as a
 * violation of duality.
 */
inline CheckReport check_duality_squaring(double delta = 0.5, double h = 0.05) {
  CheckReport rep{"duality:squaring"};
  PseudometricMatrix d({"x1", "x2"}, Top::infinite(), {{ExtReal(0), ExtReal(delta)}, {ExtReal(delta), ExtReal(0)}});
  ++rep.instances;
  ExtReal w = squaring_wasserstein(d, {0, 1}, {1, 0});
  ExtReal k = squaring_kantorovich_oracle(d, {0, 1}, {1, 0}, h, 1.0);
  if (!approx_le(w, k + ExtReal(2 * h)))
    rep.fail("d(x1,x2)=" + format_value(ExtReal(delta)) + " t1=(x1,x2) t2=(x2,x1)", "K = W (duality)",
             "K = " + format_value(k) + ", W = " + format_value(w));
  return rep;
}

// ---------------------------------------------------------------------------
// Lifting properties on random instances

/// Lifted distances of distributions, sets and input families satisfy the pseudometric axioms.
inline CheckReport check_lifted_axioms(std::size_t budget = kDefaultBudget, std::uint64_t seed = kDefaultSeed) {
  CheckReport rep{"lifting:axioms"};
  detail::Sampler rng(seed);
  const std::vector<std::string> names{"t0", "t1", "t2", "t3"};
  auto verify = [&](const PseudometricMatrix& lifted, const std::string& what, const PseudometricMatrix& d) {
    for (const auto& v : check_axioms(lifted))
      rep.fail(what + " " + detail::fmt_metric(d), std::string("lifted ") + to_string(v.kind),
               "slack " + format_value(ExtReal(v.slack)));
  };
  while (rep.instances < budget) {
    ++rep.instances;
    const std::size_t n = rng.uniform(1, 4);
    auto d = rng.metric(n, 0.05);
    PseudometricMatrix wd(names, d.top()), kd(names, d.top()), hd(names, d.top()), id(names, d.top());
    std::vector<Distribution> ps;
    std::vector<std::vector<std::size_t>> ss, fs;
    for (std::size_t k = 0; k < names.size(); ++k) {
      ps.push_back(rng.distribution(n, 3, 0.1));
      ss.push_back(rng.subset(n, 3));
      std::vector<std::size_t> f;
      for (int a = 0; a < 2; ++a) f.push_back(rng.uniform(0, n - 1));
      fs.push_back(f);
    }
    for (std::size_t i = 0; i < names.size(); ++i)
      for (std::size_t j = 0; j < names.size(); ++j) {
        wd.set(i, j, wasserstein_distribution(d, ps[i], ps[j]));
        kd.set(i, j, kantorovich_distribution(d, ps[i], ps[j]));
        hd.set(i, j, hausdorff(d, ss[i], ss[j]));
        id.set(i, j, lift_input(d, fs[i], fs[j], InputMode::avg));
      }
    verify(wd, "wasserstein", d);
    verify(kd, "kantorovich", d);
    verify(hd, "hausdorff", d);
    verify(id, "input-avg", d);
  }
  return rep;
}

/// d <= d' implies lifted(d) <= lifted(d').
inline CheckReport check_lifting_monotone(std::size_t budget = kDefaultBudget, std::uint64_t seed = kDefaultSeed) {
  CheckReport rep{"lifting:monotone"};
  detail::Sampler rng(seed);
  while (rep.instances < budget) {
    ++rep.instances;
    const std::size_t n = rng.uniform(1, 4);
    auto d = rng.metric(n, 0.05);
    auto bigger = sup_join(d, rng.metric(n, 0.05));
    auto p = rng.distribution(n, 3, 0.1), q = rng.distribution(n, 3, 0.1);
    auto s1 = rng.subset(n, 3), s2 = rng.subset(n, 3);
    std::string inst = detail::fmt_metric(d) + " <= " + detail::fmt_metric(bigger);
    auto cmp = [&](ExtReal a, ExtReal b, const char* what) {
      if (!approx_le(a, b)) rep.fail(inst, std::string(what) + " monotone", detail::rel(a, ">", b));
    };
    cmp(wasserstein_distribution(d, p, q), wasserstein_distribution(bigger, p, q), "wasserstein");
    cmp(kantorovich_distribution(d, p, q), kantorovich_distribution(bigger, p, q), "kantorovich");
    cmp(hausdorff(d, s1, s2), hausdorff(bigger, s1, s2), "hausdorff");
    MachineEval me{MachineEval::Variant::avg_sum, 0.5, 0.5};
    MachineElement m1{rng.uniform(0, n - 1), {rng.uniform(0, n - 1), rng.uniform(0, n - 1)}};
    MachineElement m2{rng.uniform(0, n - 1), {rng.uniform(0, n - 1), rng.uniform(0, n - 1)}};
    cmp(lift_machine(d, d, m1, m2, me), lift_machine(d, bigger, m1, m2, me), "machine");
  }
  return rep;
}

/// Kantorovich never exceeds Wasserstein; grid oracles stay within 2h below.
inline CheckReport check_kantorovich_below_wasserstein(std::size_t budget = kDefaultBudget,
                                                       std::uint64_t seed = kDefaultSeed, double h = 0.05) {
  CheckReport rep{"lifting:k-le-w"};
  detail::Sampler rng(seed);
  while (rep.instances < budget) {
    ++rep.instances;
    const std::size_t n = rng.uniform(1, 4);
    auto d = rng.metric(n, h);
    auto p = rng.distribution(n, 3, 0.1), q = rng.distribution(n, 3, 0.1);
    auto s1 = rng.subset(n, 3), s2 = rng.subset(n, 3);
    std::string inst = detail::fmt_metric(d);
    ExtReal k = kantorovich_distribution(d, p, q), w = wasserstein_distribution(d, p, q);
    if (!approx_le(k, w)) rep.fail(inst + " P=" + detail::fmt_dist(p, d), "K <= W", detail::rel(k, ">", w));
    ExtReal bk = brute_kantorovich_sets(d, s1, s2, h), bw = brute_wasserstein_sets(d, s1, s2);
    if (!approx_le(bk, bw + ExtReal(2 * h)))
      rep.fail(inst + " S1=" + detail::fmt_set(s1, d), "brute K <= brute W + 2h", detail::rel(bk, ">", bw));
    PseudometricMatrix dinf(d.carrier(), Top::infinite());
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) dinf.set(i, j, d(i, j));
    std::pair<std::size_t, std::size_t> x{rng.uniform(0, n - 1), rng.uniform(0, n - 1)};
    std::pair<std::size_t, std::size_t> y{rng.uniform(0, n - 1), rng.uniform(0, n - 1)};
    ExtReal sk = squaring_kantorovich_oracle(dinf, x, y, h, 2.0), sw = squaring_wasserstein(dinf, x, y);
    if (!approx_le(sk, sw + ExtReal(2 * h))) rep.fail(inst, "squaring K <= W + 2h", detail::rel(sk, ">", sw));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Compositionality

namespace detail {

using SetOfSets = std::vector<std::vector<std::size_t>>;

inline SetOfSets random_set_of_sets(Sampler& rng, std::size_t n, std::size_t outer, std::size_t inner) {
  SetOfSets out;
  const std::size_t k = rng.uniform(0, outer);
  for (std::size_t i = 0; i < k; ++i) {
    auto s = rng.subset(n, inner);
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::string fmt_sets(const SetOfSets& t, const PseudometricMatrix& d) {
  std::string out = "{";
  for (std::size_t k = 0; k < t.size(); ++k) out += (k ? "," : "") + fmt_set(t[k], d);
  return out + "}";
}

inline ExtReal hausdorff_of_hausdorff(const PseudometricMatrix& d, const SetOfSets& t1, const SetOfSets& t2) {
  return hausdorff_by(t1.size(), t2.size(), [&](std::size_t a, std::size_t b) { return hausdorff(d, t1[a], t2[b]); },
                      d.top());
}

// Smallest threshold at which the cheapest candidates cover both sides; top if never.
inline ExtReal min_max_cover(std::vector<std::tuple<ExtReal, std::size_t, std::size_t>> cands, std::size_t n1,
                             std::size_t n2, Top top) {
  if (n1 == 0 && n2 == 0) return ExtReal();
  std::sort(cands.begin(), cands.end());
  std::vector<bool> c1(n1), c2(n2);
  std::size_t left = n1 + n2;
  for (const auto& [v, a, b] : cands) {
    if (!c1[a]) c1[a] = true, --left;
    if (!c2[b]) c2[b] = true, --left;
    if (left == 0) return v;
  }
  return top.value();
}

/**
 * Wasserstein lifting of d along P_f P_f, straight from the definition: a
 * coupling is a set of relations V, each projecting onto a member of T1 and
 * of T2, jointly covering both; its value is the largest distance in any V.
 */
inline ExtReal brute_wasserstein_pfpf(const PseudometricMatrix& d, const SetOfSets& t1, const SetOfSets& t2) {
  std::vector<std::size_t> u1, u2;
  for (const auto& s : t1) u1.insert(u1.end(), s.begin(), s.end());
  for (const auto& s : t2) u2.insert(u2.end(), s.begin(), s.end());
  auto uniq = [](std::vector<std::size_t>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  uniq(u1);
  uniq(u2);
  const std::size_t cells = u1.size() * u2.size();
  if (cells > 16) throw LimitError("nested set coupling too large");
  std::vector<std::tuple<ExtReal, std::size_t, std::size_t>> cands;
  for (std::uint32_t mask = 0; mask < (1u << cells); ++mask) {
    std::vector<std::size_t> p1, p2;
    ExtReal v;
    for (std::size_t c = 0; c < cells; ++c)
      if (mask & (1u << c)) {
        p1.push_back(u1[c / u2.size()]);
        p2.push_back(u2[c % u2.size()]);
        v = max(v, d(u1[c / u2.size()], u2[c % u2.size()]));
      }
    uniq(p1);
    uniq(p2);
    auto i1 = std::find(t1.begin(), t1.end(), p1), i2 = std::find(t2.begin(), t2.end(), p2);
    if (i1 == t1.end() || i2 == t2.end()) continue;
    cands.emplace_back(v, static_cast<std::size_t>(i1 - t1.begin()), static_cast<std::size_t>(i2 - t2.begin()));
  }
  return min_max_cover(std::move(cands), t1.size(), t2.size(), d.top());
}

// Distribution over finitely many distributions on the carrier.
struct NestedDistribution {
  std::vector<Distribution> inner;
  std::vector<double> weights;
};

inline NestedDistribution random_nested(Sampler& rng, std::size_t n) {
  NestedDistribution t;
  const std::size_t k = rng.uniform(1, 2);
  std::size_t first = k == 1 ? 4 : rng.uniform(1, 3);
  for (std::size_t i = 0; i < k; ++i) {
    t.inner.push_back(rng.distribution(n, 2, 0.25));
    t.weights.push_back((i == 0 ? static_cast<double>(first) : static_cast<double>(4 - first)) * 0.25);
  }
  return t;
}

inline ExtReal transport_over(std::span<const double> p, std::span<const double> q,
                              const std::function<ExtReal(std::size_t, std::size_t)>& cost, Top top) {
  return solve_on_supports(p, q, cost, top.value()).cost;
}

inline ExtReal flattened_wasserstein(const PseudometricMatrix& d, const NestedDistribution& a, const NestedDistribution& b) {
  auto flat = [&](const NestedDistribution& t) {
    std::vector<double> w(d.size(), 0.0);
    for (std::size_t k = 0; k < t.inner.size(); ++k)
      for (std::size_t x = 0; x < d.size(); ++x) w[x] += t.weights[k] * t.inner[k][x];
    return Distribution(w);
  };
  return wasserstein_distribution(d, flat(a), flat(b));
}

inline ExtReal wasserstein_of_wasserstein(const PseudometricMatrix& d, const NestedDistribution& a,
                                          const NestedDistribution& b) {
  return transport_over(a.weights, b.weights,
                        [&](std::size_t i, std::size_t j) { return wasserstein_distribution(d, a.inner[i], b.inner[j]); },
                        d.top());
}

// Composite coupling by grid enumeration at both levels.
inline ExtReal brute_wasserstein_dfdf(const PseudometricMatrix& d, const NestedDistribution& a,
                                      const NestedDistribution& b, double h) {
  std::vector<std::vector<ExtReal>> inner(a.inner.size(), std::vector<ExtReal>(b.inner.size()));
  for (std::size_t i = 0; i < a.inner.size(); ++i)
    for (std::size_t j = 0; j < b.inner.size(); ++j)
      inner[i][j] = brute_wasserstein_distributions(d, a.inner[i], b.inner[j], h);
  std::vector<std::string> idx;
  const std::size_t m = std::max(a.weights.size(), b.weights.size());
  for (std::size_t k = 0; k < m; ++k) idx.push_back(std::to_string(k));
  auto pad = [&](const std::vector<double>& w) {
    std::vector<double> out(w);
    out.resize(m, 0.0);
    return Distribution(out);
  };
  PseudometricMatrix dummy(idx, d.top());
  auto outer = enumerate_grid_couplings(pad(a.weights), pad(b.weights), h);
  ExtReal best = d.top().value();
  for (const auto& t : outer) {
    ExtReal v;
    for (const auto& e : t.entries) v += e.mass * inner[e.from][e.to];
    best = min(best, v);
  }
  return best;
}

// Elements of 2 x X^A.
struct MachineState {
  bool output;
  std::vector<std::size_t> next;
  friend bool operator==(const MachineState&, const MachineState&) = default;
  friend auto operator<=>(const MachineState&, const MachineState&) = default;
};

inline std::vector<MachineState> random_machine_set(Sampler& rng, std::size_t n, std::size_t letters, std::size_t max_size) {
  std::vector<MachineState> out;
  const std::size_t k = rng.uniform(0, max_size);
  for (std::size_t i = 0; i < k; ++i) {
    MachineState m{rng.coin(), {}};
    for (std::size_t a = 0; a < letters; ++a) m.next.push_back(rng.uniform(0, n - 1));
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  }
  return out;
}

inline ExtReal machine2_distance(const PseudometricMatrix& d, const MachineState& x, const MachineState& y, double c) {
  return lift_discrete_machine(d, x.output, y.output, x.next, y.next, c, InputMode::max);
}

inline std::string fmt_machines(const std::vector<MachineState>& s, const PseudometricMatrix& d) {
  std::string out = "{";
  for (std::size_t k = 0; k < s.size(); ++k) {
    out += (k ? "," : "") + std::string("(") + (s[k].output ? "1" : "0") + ",";
    for (std::size_t a = 0; a < s[k].next.size(); ++a) out += (a ? "" : "") + d.carrier()[s[k].next[a]];
    out += ")";
  }
  return out + "}";
}

// All subsets of same-output pairs that cover both sides; min of the max value.
inline ExtReal brute_wasserstein_pfm2(const PseudometricMatrix& d, const std::vector<MachineState>& t1,
                                      const std::vector<MachineState>& t2, double c) {
  if (t1.empty() && t2.empty()) return ExtReal();
  std::vector<std::tuple<std::size_t, std::size_t, ExtReal>> pairs;
  for (std::size_t i = 0; i < t1.size(); ++i)
    for (std::size_t j = 0; j < t2.size(); ++j)
      if (t1[i].output == t2[j].output) {
        ExtReal v;
        for (std::size_t a = 0; a < t1[i].next.size(); ++a) v = max(v, d(t1[i].next[a], t2[j].next[a]));
        pairs.emplace_back(i, j, c * v);
      }
  if (pairs.size() > 16) throw LimitError("machine set coupling too large");
  ExtReal best = d.top().value();
  for (std::uint32_t mask = 1; mask < (1u << pairs.size()); ++mask) {
    std::vector<bool> c1(t1.size()), c2(t2.size());
    ExtReal v;
    for (std::size_t k = 0; k < pairs.size(); ++k)
      if (mask & (1u << k)) {
        auto [i, j, w] = pairs[k];
        c1[i] = c2[j] = true;
        v = max(v, w);
      }
    if (std::all_of(c1.begin(), c1.end(), [](bool b) { return b; }) &&
        std::all_of(c2.begin(), c2.end(), [](bool b) { return b; }))
      best = min(best, v);
  }
  return best;
}

}  // namespace detail

enum class CompositePair { pfpf, dfdf, pfm2 };

/// Lifting along a composite functor equals the lifting of the lifting.
inline CheckReport check_compositionality(CompositePair which, std::size_t budget = kDefaultBudget,
                                          std::uint64_t seed = kDefaultSeed) {
  const char* names[] = {"compositionality:pfpf", "compositionality:dfdf", "compositionality:pfm2"};
  CheckReport rep{names[static_cast<int>(which)]};
  detail::Sampler rng(seed);
  const double h = 0.25;
  while (rep.instances < budget) {
    ++rep.instances;
    const std::size_t n = rng.uniform(1, 3);
    auto d = rng.metric(n, 0.05);
    switch (which) {
      case CompositePair::pfpf: {
        auto t1 = detail::random_set_of_sets(rng, n, 2, 2), t2 = detail::random_set_of_sets(rng, n, 2, 2);
        ExtReal direct = detail::brute_wasserstein_pfpf(d, t1, t2), nested = detail::hausdorff_of_hausdorff(d, t1, t2);
        if (!approx_equal(direct, nested))
          rep.fail(detail::fmt_metric(d) + " T1=" + detail::fmt_sets(t1, d) + " T2=" + detail::fmt_sets(t2, d),
                   "composite = lifted(lifted)", detail::rel(direct, "!=", nested));
        break;
      }
      case CompositePair::dfdf: {
        auto t1 = detail::random_nested(rng, n), t2 = detail::random_nested(rng, n);
        ExtReal direct = detail::brute_wasserstein_dfdf(d, t1, t2, h), nested = detail::wasserstein_of_wasserstein(d, t1, t2);
        if (!approx_le(nested, direct) || !approx_le(direct, nested + ExtReal(2 * h)))
          rep.fail(detail::fmt_metric(d), "composite = lifted(lifted) within 2h", detail::rel(direct, "vs", nested));
        break;
      }
      case CompositePair::pfm2: {
        const std::size_t letters = rng.uniform(1, 2);
        const double c = 0.5;
        auto t1 = detail::random_machine_set(rng, n, letters, 3), t2 = detail::random_machine_set(rng, n, letters, 3);
        ExtReal direct = detail::brute_wasserstein_pfm2(d, t1, t2, c);
        ExtReal nested = hausdorff_by(
            t1.size(), t2.size(), [&](std::size_t a, std::size_t b) { return detail::machine2_distance(d, t1[a], t2[b], c); },
            d.top());
        if (!approx_equal(direct, nested))
          rep.fail(detail::fmt_metric(d) + " T1=" + detail::fmt_machines(t1, d) + " T2=" + detail::fmt_machines(t2, d),
                   "composite = lifted(lifted)", detail::rel(direct, "!=", nested));
        break;
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Monads and the distributive law

enum class MonadKind { powerset, distribution };

/// Unit is an isometry and multiplication is non-expansive.
inline CheckReport check_monad_conditions(MonadKind which, std::size_t budget = kDefaultBudget,
                                          std::uint64_t seed = kDefaultSeed) {
  CheckReport rep{which == MonadKind::powerset ? "monad:powerset" : "monad:distribution"};
  detail::Sampler rng(seed);
  while (rep.instances < budget) {
    ++rep.instances;
    const std::size_t n = rng.uniform(1, 4);
    auto d = rng.metric(n, 0.05);
    const std::size_t x = rng.uniform(0, n - 1), y = rng.uniform(0, n - 1);
    const std::string inst = detail::fmt_metric(d);
    if (which == MonadKind::powerset) {
      const std::size_t sx[] = {x}, sy[] = {y};
      ExtReal unit = hausdorff(d, sx, sy);
      if (!approx_equal(unit, d(x, y))) rep.fail(inst, "unit isometry", detail::rel(unit, "!=", d(x, y)));
      auto t1 = detail::random_set_of_sets(rng, n, 3, 2), t2 = detail::random_set_of_sets(rng, n, 3, 2);
      auto flat = [](const detail::SetOfSets& t) {
        std::vector<std::size_t> u;
        for (const auto& s : t) u.insert(u.end(), s.begin(), s.end());
        std::sort(u.begin(), u.end());
        u.erase(std::unique(u.begin(), u.end()), u.end());
        return u;
      };
      ExtReal lhs = hausdorff(d, flat(t1), flat(t2)), rhs = detail::hausdorff_of_hausdorff(d, t1, t2);
      if (!approx_le(lhs, rhs))
        rep.fail(inst + " S=" + detail::fmt_sets(t1, d) + " T=" + detail::fmt_sets(t2, d), "multiplication non-expansive",
                 detail::rel(lhs, ">", rhs));
    } else {
      ExtReal unit = wasserstein_distribution(d, Distribution::dirac(n, x), Distribution::dirac(n, y));
      ExtReal kunit = kantorovich_distribution(d, Distribution::dirac(n, x), Distribution::dirac(n, y));
      if (!approx_equal(unit, d(x, y)) || !approx_equal(kunit, d(x, y)))
        rep.fail(inst, "unit isometry", "W = " + format_value(unit) + ", K = " + format_value(kunit) + ", d = " + format_value(d(x, y)));
      auto t1 = detail::random_nested(rng, n), t2 = detail::random_nested(rng, n);
      ExtReal lhs = detail::flattened_wasserstein(d, t1, t2), rhs = detail::wasserstein_of_wasserstein(d, t1, t2);
      if (!approx_le(lhs, rhs)) rep.fail(inst, "multiplication non-expansive", detail::rel(lhs, ">", rhs));
    }
  }
  return rep;
}

/**
 * The law P(2 x X^A) -> 2 x (P X)^A for nondeterministic automata: output is
 * the disjunction, successors per letter are collected. Checks that the
 * image distance never exceeds the source distance.
 */
inline CheckReport check_distlaw_nfa(std::size_t budget = kDefaultBudget, std::uint64_t seed = kDefaultSeed) {
  CheckReport rep{"distlaw:nfa"};
  detail::Sampler rng(seed);
  const double c = 0.5;
  while (rep.instances < budget) {
    ++rep.instances;
    const std::size_t n = rng.uniform(1, 3), letters = rng.uniform(1, 2);
    auto d = rng.metric(n, 0.05);
    auto s1 = detail::random_machine_set(rng, n, letters, 3), s2 = detail::random_machine_set(rng, n, letters, 3);
    auto law = [&](const std::vector<detail::MachineState>& s) {
      bool out = false;
      std::vector<std::vector<std::size_t>> next(letters);
      for (const auto& m : s) {
        out = out || m.output;
        for (std::size_t a = 0; a < letters; ++a) next[a].push_back(m.next[a]);
      }
      for (auto& v : next) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
      }
      return std::make_pair(out, next);
    };
    auto [o1, n1] = law(s1);
    auto [o2, n2] = law(s2);
    ExtReal image;
    if (o1 != o2) {
      image = d.top().value();
    } else {
      for (std::size_t a = 0; a < letters; ++a) image = max(image, hausdorff(d, n1[a], n2[a]));
      image = c * image;
    }
    ExtReal source = hausdorff_by(
        s1.size(), s2.size(), [&](std::size_t a, std::size_t b) { return detail::machine2_distance(d, s1[a], s2[b], c); },
        d.top());
    if (!approx_le(image, source))
      rep.fail(detail::fmt_metric(d) + " S1=" + detail::fmt_machines(s1, d) + " S2=" + detail::fmt_machines(s2, d),
               "law non-expansive", detail::rel(image, ">", source));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Registry

inline std::vector<std::string> check_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : evaluation_catalog()) out.push_back("well-behaved:" + k);
  for (const char* n : {"duality:hausdorff", "duality:distribution", "duality:squaring", "compositionality:pfpf",
                        "compositionality:dfdf", "compositionality:pfm2", "monad:powerset", "monad:distribution",
                        "distlaw:nfa", "lifting:axioms", "lifting:monotone", "lifting:k-le-w"})
    out.push_back(n);
  return out;
}

inline CheckReport run_check(const std::string& name, std::uint64_t seed = kDefaultSeed,
                             std::size_t budget = kDefaultBudget) {
  const std::string wb = "well-behaved:";
  if (name.rfind(wb, 0) == 0) {
    auto cat = evaluation_catalog();
    auto it = cat.find(name.substr(wb.size()));
    if (it == cat.end()) throw InputError("unknown evaluation '" + name.substr(wb.size()) + "'");
    return check_well_behaved(it->second, budget, seed, name);
  }
  if (name == "duality:hausdorff") return check_duality_hausdorff(budget, seed);
  if (name == "duality:distribution") return check_duality_distribution(budget, seed);
  if (name == "duality:squaring") return check_duality_squaring();
  if (name == "compositionality:pfpf") return check_compositionality(CompositePair::pfpf, budget, seed);
  if (name == "compositionality:dfdf") return check_compositionality(CompositePair::dfdf, budget, seed);
  if (name == "compositionality:pfm2") return check_compositionality(CompositePair::pfm2, budget, seed);
  if (name == "monad:powerset") return check_monad_conditions(MonadKind::powerset, budget, seed);
  if (name == "monad:distribution") return check_monad_conditions(MonadKind::distribution, budget, seed);
  if (name == "distlaw:nfa") return check_distlaw_nfa(budget, seed);
  if (name == "lifting:axioms") return check_lifted_axioms(budget, seed);
  if (name == "lifting:monotone") return check_lifting_monotone(budget, seed);
  if (name == "lifting:k-le-w") return check_kantorovich_below_wasserstein(budget, seed);
  throw InputError("unknown check '" + name + "'");
}

}  // namespace pmet

#endif
