#ifndef PMET_TRANSPORT_HPP
#define PMET_TRANSPORT_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "pmet/error.hpp"
#include "pmet/ext_real.hpp"
#include "pmet/network_simplex.hpp"
#include "pmet/pseudometric.hpp"

namespace pmet {

/**
 * Weights over the positions of a carrier. Total mass is 1 unless the
 * distribution is marked as a subdistribution, in which case it is at most 1.
 */
class Distribution {
 public:
  Distribution() = default;
  explicit Distribution(std::vector<double> weights, bool subdistribution = false)
      : w_(std::move(weights)), sub_(subdistribution) {
    double total = 0.0;
    for (double x : w_) {
      if (!(x >= 0.0) || x > 1.0 + kEps) throw InputError("probability outside [0,1]: " + std::to_string(x));
      total += x;
    }
    if (sub_ ? total > 1.0 + kEps : std::fabs(total - 1.0) > kEps)
      throw InputError("probabilities sum to " + std::to_string(total));
  }

  static Distribution dirac(std::size_t n, std::size_t at) {
    std::vector<double> w(n, 0.0);
    w.at(at) = 1.0;
    return Distribution(std::move(w));
  }

  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  std::span<const double> weights() const { return w_; }
  bool is_subdistribution() const { return sub_; }
  double mass() const {
    double t = 0.0;
    for (double x : w_) t += x;
    return t;
  }
  std::vector<std::size_t> support() const {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < w_.size(); ++i)
      if (w_[i] > 0.0) s.push_back(i);
    return s;
  }

 private:
  std::vector<double> w_;
  bool sub_ = false;
};

struct TransportEntry {
  std::size_t from, to;
  double mass;
};

/** A coupling, listed by its non-zero cells. */
struct TransportPlan {
  std::vector<TransportEntry> entries;

  double cost(const PseudometricMatrix& d) const {
    double c = 0.0;
    for (const auto& e : entries) c += e.mass * d(e.from, e.to).value();
    return c;
  }
};

struct TransportResult {
  ExtReal cost;
  std::optional<TransportPlan> plan;  // empty when no coupling exists
};

struct DualResult {
  ExtReal value;
  std::vector<double> potential;  // over the whole carrier, min 0; empty when value is unbounded
};

namespace detail {

struct TransportSolve {
  ExtReal cost;
  std::optional<TransportPlan> plan;
  std::vector<std::size_t> sources, sinks;
  std::vector<double> source_pi, sink_pi;
};

using CostFn = std::function<ExtReal(std::size_t, std::size_t)>;

inline TransportSolve solve_on_supports(std::span<const double> p, std::span<const double> q, const CostFn& cost,
                                        ExtReal top) {
  TransportSolve out;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) out.sources.push_back(i);
  for (std::size_t j = 0; j < q.size(); ++j)
    if (q[j] > 0.0) out.sinks.push_back(j);
  double mp = 0.0, mq = 0.0;
  for (double x : p) mp += x;
  for (double x : q) mq += x;
  if (std::fabs(mp - mq) > kEps) {
    out.cost = top;
    return out;
  }
  if (out.sources.empty() || out.sinks.empty()) {
    out.cost = ExtReal();
    out.plan = TransportPlan{};
    return out;
  }

  const std::size_t m = out.sources.size(), n = out.sinks.size();
  std::vector<double> supply(m + n);
  for (std::size_t i = 0; i < m; ++i) supply[i] = p[out.sources[i]];
  for (std::size_t j = 0; j < n; ++j) supply[m + j] = -q[out.sinks[j]];
  NetworkSimplex ns(supply);
  struct Cell {
    std::size_t i, j;
    int arc;
    double c;
  };
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      ExtReal c = cost(out.sources[i], out.sinks[j]);
      if (c.is_inf()) continue;
      cells.push_back({i, j, ns.add_arc(static_cast<int>(i), static_cast<int>(m + j), c.value()), c.value()});
    }
  if (ns.run() == NetworkSimplex::Status::infeasible) {
    out.cost = top;
    return out;
  }
  TransportPlan plan;
  double total = 0.0;
  for (const Cell& cell : cells) {
    double f = ns.flow(cell.arc);
    if (f <= 0.0) continue;
    plan.entries.push_back({out.sources[cell.i], out.sinks[cell.j], f});
    total += f * cell.c;
  }
  out.cost = ExtReal(total < 0.0 ? 0.0 : total);
  out.plan = std::move(plan);
  for (std::size_t i = 0; i < m; ++i) out.source_pi.push_back(ns.potential(static_cast<int>(i)));
  for (std::size_t j = 0; j < n; ++j) out.sink_pi.push_back(ns.potential(static_cast<int>(m + j)));
  return out;
}

inline void require_carrier(const Distribution& p, const Distribution& q, const PseudometricMatrix& d) {
  if (p.size() != d.size() || q.size() != d.size()) throw InputError("distribution does not match carrier size");
}

}  // namespace detail

/**
 * Minimal-cost coupling of p and q under d. Cells at distance inf are never
 * used; if no coupling avoids them, or the masses differ, the cost is top
 * and no plan is returned.
 */
inline TransportResult solve_transport(const Distribution& p, const Distribution& q, const PseudometricMatrix& d) {
  detail::require_carrier(p, q, d);
  auto s = detail::solve_on_supports(p.weights(), q.weights(), [&](std::size_t i, std::size_t j) { return d(i, j); },
                                     d.top().value());
  if (s.plan && !s.cost.is_inf()) s.cost = d.top().check(s.cost, "transport cost");
  return {s.cost, std::move(s.plan)};
}

/**
 * A non-expansive potential f with sum f (q - p) equal to the optimal
 * transport cost. Built from the final basis potentials by the c-transform
 * f(z) = min over sources x of (pi(x) + d(x, z)), then shifted to min 0.
 */
inline DualResult solve_dual(const Distribution& p, const Distribution& q, const PseudometricMatrix& d) {
  detail::require_carrier(p, q, d);
  auto s = detail::solve_on_supports(p.weights(), q.weights(), [&](std::size_t i, std::size_t j) { return d(i, j); },
                                     d.top().value());
  DualResult out{s.cost, {}};
  if (!s.plan) return out;
  const std::size_t n = d.size();
  if (s.sources.empty()) {
    out.potential.assign(n, 0.0);
    return out;
  }
  std::vector<double> f(n, std::numeric_limits<double>::infinity());
  for (std::size_t z = 0; z < n; ++z)
    for (std::size_t k = 0; k < s.sources.size(); ++k) {
      ExtReal dist = d(s.sources[k], z);
      if (!dist.is_inf()) f[z] = std::min(f[z], s.source_pi[k] + dist.value());
    }
  double lo = std::numeric_limits<double>::infinity();
  for (double x : f)
    if (std::isfinite(x)) lo = std::min(lo, x);
  for (double& x : f) x = std::isfinite(x) ? x - lo : 0.0;
  double value = 0.0;
  for (std::size_t z = 0; z < n; ++z) value += f[z] * (q[z] - p[z]);
  out.value = ExtReal(value < 0.0 ? 0.0 : value);
  out.potential = std::move(f);
  return out;
}

/// A relation T with both projections onto the given sets.
using SetCoupling = std::vector<std::pair<std::size_t, std::size_t>>;

/**
 * Every T within s1 x s2 whose projections are exactly s1 and s2.
 * The empty pair of sets has the single empty coupling.
 */
inline std::vector<SetCoupling> enumerate_set_couplings(std::span<const std::size_t> s1,
                                                        std::span<const std::size_t> s2) {
  const std::size_t cells = s1.size() * s2.size();
  if (cells > 12) throw LimitError("set coupling enumeration limited to 12 cells");
  std::vector<SetCoupling> out;
  if (s1.empty() || s2.empty()) {
    if (s1.empty() && s2.empty()) out.emplace_back();
    return out;
  }
  for (unsigned mask = 1; mask < (1u << cells); ++mask) {
    std::vector<bool> hit1(s1.size()), hit2(s2.size());
    SetCoupling t;
    for (std::size_t c = 0; c < cells; ++c)
      if (mask & (1u << c)) {
        std::size_t i = c / s2.size(), j = c % s2.size();
        hit1[i] = hit2[j] = true;
        t.emplace_back(s1[i], s2[j]);
      }
    bool onto = true;
    for (bool b : hit1) onto = onto && b;
    for (bool b : hit2) onto = onto && b;
    if (onto) out.push_back(std::move(t));
  }
  return out;
}

namespace detail {

inline long grid_units(double x, double h) {
  double k = std::round(x / h);
  if (std::fabs(k * h - x) > kEps) throw InputError("mass " + std::to_string(x) + " is not a multiple of the grid step");
  return static_cast<long>(k);
}

}  // namespace detail

/**
 * Every coupling of p and q whose cells are multiples of h. The masses of
 * p and q must themselves lie on the grid.
 */
inline std::vector<TransportPlan> enumerate_grid_couplings(const Distribution& p, const Distribution& q, double h) {
  if (!(h > 0.0)) throw InputError("grid step must be positive");
  auto sp = p.support(), sq = q.support();
  if (sp.size() + sq.size() > 6) throw LimitError("grid coupling enumeration limited to total support 6");
  std::vector<long> row, col;
  for (auto i : sp) row.push_back(detail::grid_units(p[i], h));
  for (auto j : sq) col.push_back(detail::grid_units(q[j], h));
  long rt = 0, ct = 0;
  for (long r : row) rt += r;
  for (long c : col) ct += c;
  std::vector<TransportPlan> out;
  if (rt != ct) return out;
  if (sp.empty()) {
    out.emplace_back();
    return out;
  }

  const std::size_t m = sp.size(), n = sq.size();
  std::vector<long> cell(m * n, 0);
  std::function<void(std::size_t)> fill = [&](std::size_t k) {
    if (k == m * n) {
      TransportPlan t;
      for (std::size_t c = 0; c < m * n; ++c)
        if (cell[c] > 0) t.entries.push_back({sp[c / n], sq[c % n], static_cast<double>(cell[c]) * h});
      out.push_back(std::move(t));
      return;
    }
    std::size_t i = k / n, j = k % n;
    if (j == n - 1) {
      // last cell of a row is forced
      long v = row[i];
      if (v > col[j]) return;
      if (i == m - 1 && v != col[j]) return;
      cell[k] = v;
      row[i] -= v;
      col[j] -= v;
      fill(k + 1);
      row[i] += v;
      col[j] += v;
      return;
    }
    long hi = std::min(row[i], col[j]);
    long lo = (i == m - 1) ? col[j] : 0;
    for (long v = lo; v <= hi; ++v) {
      cell[k] = v;
      row[i] -= v;
      col[j] -= v;
      fill(k + 1);
      row[i] += v;
      col[j] += v;
    }
  };
  fill(0);
  return out;
}

}  // namespace pmet

#endif
