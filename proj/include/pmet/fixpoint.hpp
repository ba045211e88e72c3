#ifndef PMET_FIXPOINT_HPP
#define PMET_FIXPOINT_HPP

#include <cmath>
#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "pmet/error.hpp"
#include "pmet/ext_real.hpp"
#include "pmet/liftings.hpp"
#include "pmet/pseudometric.hpp"
#include "pmet/systems.hpp"
#include "pmet/transport.hpp"

namespace pmet {

struct FixpointConfig {
  double tol = 1e-9;
  std::size_t max_iter = 10000;
  bool trace = false;  // keep every iterate's delta
};

struct FixpointResult {
  PseudometricMatrix metric;
  std::size_t iterations = 0;
  bool converged = false;
  ExtReal final_delta;
  std::vector<ExtReal> deltas;  // filled when tracing
};

namespace detail {

inline PseudometricMatrix pts_step(const SystemSpec& s, const PtsData& p, const PseudometricMatrix& d) {
  const std::size_t n = s.states.size();
  std::vector<std::string> ext = s.states;
  ext.push_back(kDone);
  PseudometricMatrix lifted(ext, s.top);
  for (std::size_t x = 0; x <= n; ++x)
    for (std::size_t y = 0; y <= n; ++y) {
      if (x < n && y < n) lifted.set(x, y, p.c * d(x, y));
      else if (x != y) lifted.set(x, y, s.top.value());
    }
  PseudometricMatrix next(s.states, s.top);
  std::vector<Distribution> succ;
  for (std::size_t x = 0; x < n; ++x) succ.emplace_back(p.next[x]);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y) {
      ExtReal v = wasserstein_distribution(lifted, succ[x], succ[y]);
      next.set(x, y, v);
      next.set(y, x, v);
    }
  return next;
}

template <class PairFn>
PseudometricMatrix symmetric_step(const SystemSpec& s, PairFn&& f) {
  const std::size_t n = s.states.size();
  PseudometricMatrix next(s.states, s.top);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y) {
      ExtReal v = s.top.check(f(x, y));
      next.set(x, y, v);
      next.set(y, x, v);
    }
  return next;
}

}  // namespace detail

/// One application of the lifted-metric map of the system to d.
inline PseudometricMatrix bisim_step(const SystemSpec& s, const PseudometricMatrix& d) {
  if (d.carrier() != s.states || d.top() != s.top) throw InputError("metric does not match the system's states");
  switch (s.kind()) {
    case SystemKind::pts:
      return detail::pts_step(s, s.as<PtsData>(), d);
    case SystemKind::dfa: {
      const auto& m = s.as<DfaData>();
      return detail::symmetric_step(s, [&](std::size_t x, std::size_t y) {
        return lift_discrete_machine(d, m.accepting[x], m.accepting[y], m.next[x], m.next[y], m.c, m.mode);
      });
    }
    case SystemKind::real_machine: {
      const auto& m = s.as<RealMachineData>();
      std::vector<ExtReal> outs;
      for (double o : m.output) outs.push_back(ExtReal(o));
      auto out_d = PseudometricMatrix::euclidean(s.states, s.top, outs);
      return detail::symmetric_step(s, [&](std::size_t x, std::size_t y) {
        return lift_machine(out_d, d, {x, m.next[x]}, {y, m.next[y]}, m.eval);
      });
    }
    case SystemKind::mts: {
      const auto& m = s.as<MtsData>();
      return detail::symmetric_step(s, [&](std::size_t x, std::size_t y) {
        ExtReal v;
        for (std::size_t r = 0; r < m.propositions.size(); ++r)
          v = max(v, m.propositions[r].metric(m.valuation[x][r], m.valuation[y][r]));
        return max(v, hausdorff(d, m.successors[x], m.successors[y]));
      });
    }
    case SystemKind::nfa:
    case SystemKind::pa:
      throw InputError(std::string("no bisimilarity metric for kind ") + to_string(s.kind()) +
                       "; use the trace metric or determinize first");
  }
  throw InputError("unknown system kind");
}

/**
 * Least fixpoint of the lifted-metric map by Kleene iteration from the zero
 * metric. Stops once successive iterates are within tol; for metric
 * transition systems it waits for an exact repeat instead.
 */
inline FixpointResult bisim_metric(const SystemSpec& s, const FixpointConfig& cfg = {}) {
  const bool exact = s.kind() == SystemKind::mts;
  FixpointResult res;
  res.metric = PseudometricMatrix(s.states, s.top);
  while (res.iterations < cfg.max_iter) {
    PseudometricMatrix next = bisim_step(s, res.metric);
    res.final_delta = sup_norm_diff(next, res.metric);
    res.metric = std::move(next);
    ++res.iterations;
    if (cfg.trace) res.deltas.push_back(res.final_delta);
    bool done = exact ? res.final_delta == ExtReal() : (!res.final_delta.is_inf() && res.final_delta.value() <= cfg.tol);
    if (done) {
      res.converged = true;
      break;
    }
  }
  return res;
}

/**
 * Shortest word on which two DFA states differ in acceptance, by breadth-first
 * search over state pairs. Empty optional if the states are equivalent.
 */
inline std::optional<std::vector<std::size_t>> shortest_distinguishing_word(const SystemSpec& s, std::size_t x,
                                                                            std::size_t y) {
  const auto& m = s.as<DfaData>();
  using Pair = std::pair<std::size_t, std::size_t>;
  std::map<Pair, std::pair<Pair, std::size_t>> parent;
  std::deque<Pair> queue{{x, y}};
  parent[{x, y}] = {{x, y}, SIZE_MAX};
  while (!queue.empty()) {
    Pair cur = queue.front();
    queue.pop_front();
    if (m.accepting[cur.first] != m.accepting[cur.second]) {
      std::vector<std::size_t> word;
      for (Pair at = cur; parent[at].second != SIZE_MAX; at = parent[at].first) word.push_back(parent[at].second);
      return std::vector<std::size_t>(word.rbegin(), word.rend());
    }
    for (std::size_t a = 0; a < s.alphabet.size(); ++a) {
      Pair nxt{m.next[cur.first][a], m.next[cur.second][a]};
      if (parent.emplace(nxt, std::make_pair(cur, a)).second) queue.push_back(nxt);
    }
  }
  return std::nullopt;
}

/// c^n for the shortest distinguishing word of length n, 0 if none.
inline ExtReal dfa_closed_form(const SystemSpec& s, std::size_t x, std::size_t y) {
  const auto& m = s.as<DfaData>();
  if (m.mode != InputMode::max) throw InputError("closed form only holds for max aggregation");
  auto w = shortest_distinguishing_word(s, x, y);
  if (!w) return ExtReal();
  return std::pow(m.c, static_cast<double>(w->size())) * s.top.value();
}

}  // namespace pmet

#endif
