#ifndef PMET_TRACES_HPP
#define PMET_TRACES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pmet/error.hpp"
#include "pmet/ext_real.hpp"
#include "pmet/systems.hpp"

namespace pmet {

inline constexpr std::size_t kMaxNfaStates = 20;

/** Subset automaton restricted to subsets reachable from singletons. */
struct DeterminizedNfa {
  std::vector<std::vector<std::size_t>> subsets;  // sorted members
  std::vector<bool> accepting;
  std::vector<std::vector<std::size_t>> next;  // [subset][letter] -> subset
  std::vector<std::size_t> singleton;          // state -> index of {state}

  std::size_t size() const { return subsets.size(); }
};

namespace detail {

using Mask = std::uint32_t;

inline Mask mask_of(const std::vector<std::size_t>& set) {
  Mask m = 0;
  for (auto x : set) m |= Mask{1} << x;
  return m;
}

inline std::vector<std::size_t> members(Mask m) {
  std::vector<std::size_t> out;
  for (std::size_t x = 0; x < 32; ++x)
    if (m & (Mask{1} << x)) out.push_back(x);
  return out;
}

inline void require_nfa(const SystemSpec& s) {
  if (s.kind() != SystemKind::nfa) throw InputError("expected an nfa");
  if (s.states.size() > kMaxNfaStates) throw LimitError("nfa has more than 20 states");
}

struct NfaMasks {
  std::vector<std::vector<Mask>> next;
  Mask accepting = 0;

  explicit NfaMasks(const NfaData& d) {
    for (std::size_t x = 0; x < d.next.size(); ++x) {
      next.emplace_back();
      for (const auto& set : d.next[x]) next.back().push_back(mask_of(set));
      if (d.accepting[x]) accepting |= Mask{1} << x;
    }
  }
  Mask step(Mask s, std::size_t a) const {
    Mask out = 0;
    for (std::size_t x = 0; x < next.size(); ++x)
      if (s & (Mask{1} << x)) out |= next[x][a];
    return out;
  }
  bool accepts(Mask s) const { return (s & accepting) != 0; }
};

}  // namespace detail

/// Output and per-letter successor set of a subset, by the direct formulas.
inline std::pair<bool, std::vector<std::vector<std::size_t>>> subset_step(const SystemSpec& s,
                                                                        const std::vector<std::size_t>& subset) {
  const auto& d = s.as<NfaData>();
  bool out = false;
  std::vector<std::vector<std::size_t>> next(s.alphabet.size());
  for (std::size_t a = 0; a < s.alphabet.size(); ++a) {
    std::vector<bool> hit(s.states.size(), false);
    for (auto x : subset)
      for (auto y : d.next[x][a]) hit[y] = true;
    for (std::size_t y = 0; y < hit.size(); ++y)
      if (hit[y]) next[a].push_back(y);
  }
  for (auto x : subset) out = out || d.accepting[x];
  return {out, next};
}

/**
 * The same step computed in three stages: apply the coalgebra to each
 * member, distribute the set of (output, successor-set family) pairs into
 * one output and a family of sets of sets, then flatten each set of sets.
 */
inline std::pair<bool, std::vector<std::vector<std::size_t>>> subset_step_compositional(
    const SystemSpec& s, const std::vector<std::size_t>& subset) {
  const auto& d = s.as<NfaData>();
  using Family = std::vector<std::vector<std::size_t>>;
  std::vector<std::pair<bool, Family>> image;  // coalgebra applied to each member
  for (auto x : subset) image.emplace_back(d.accepting[x], d.next[x]);

  bool out = false;
  std::vector<std::vector<std::vector<std::size_t>>> sets_of_sets(s.alphabet.size());
  for (const auto& [o, fam] : image) {
    out = out || o;
    for (std::size_t a = 0; a < fam.size(); ++a) {
      auto& bucket = sets_of_sets[a];
      if (std::find(bucket.begin(), bucket.end(), fam[a]) == bucket.end()) bucket.push_back(fam[a]);
    }
  }
  Family flat(s.alphabet.size());
  for (std::size_t a = 0; a < flat.size(); ++a) {
    std::vector<bool> hit(s.states.size(), false);
    for (const auto& inner : sets_of_sets[a])
      for (auto y : inner) hit[y] = true;
    for (std::size_t y = 0; y < hit.size(); ++y)
      if (hit[y]) flat[a].push_back(y);
  }
  return {out, flat};
}

inline DeterminizedNfa determinize_nfa(const SystemSpec& s) {
  detail::require_nfa(s);
  const detail::NfaMasks nfa(s.as<NfaData>());
  DeterminizedNfa det;
  std::unordered_map<detail::Mask, std::size_t> index;
  std::deque<detail::Mask> queue;
  auto visit = [&](detail::Mask m) {
    auto [it, fresh] = index.emplace(m, det.subsets.size());
    if (fresh) {
      det.subsets.push_back(detail::members(m));
      det.accepting.push_back(nfa.accepts(m));
      det.next.emplace_back();
      queue.push_back(m);
    }
    return it->second;
  };
  for (std::size_t x = 0; x < s.states.size(); ++x) det.singleton.push_back(visit(detail::Mask{1} << x));
  while (!queue.empty()) {
    detail::Mask m = queue.front();
    queue.pop_front();
    std::size_t i = index.at(m);
    std::vector<std::size_t> row;
    for (std::size_t a = 0; a < s.alphabet.size(); ++a) row.push_back(visit(nfa.step(m, a)));
    det.next[i] = std::move(row);
  }
  return det;
}

/// The subset automaton as a DFA system, states named {x,y,...}.
inline SystemSpec determinized_system(const SystemSpec& s, const DeterminizedNfa& det) {
  SystemSpec out;
  out.top = s.top;
  out.alphabet = s.alphabet;
  for (const auto& sub : det.subsets) {
    std::string name = "{";
    for (std::size_t k = 0; k < sub.size(); ++k) name += (k ? "," : "") + s.states[sub[k]];
    out.states.push_back(name + "}");
  }
  DfaData d;
  d.c = s.as<NfaData>().c;
  d.accepting = det.accepting;
  d.next = det.next;
  out.data = std::move(d);
  validate(out);
  return out;
}

struct TraceResult {
  ExtReal distance;
  std::optional<std::vector<std::string>> witness;  // shortest distinguishing word, if any
};

/// c^n for the shortest word on which the languages of x and y differ, 0 if equal.
inline TraceResult trace_metric_nfa(const SystemSpec& s, std::size_t x, std::size_t y,
                                    std::optional<double> c_override = std::nullopt) {
  detail::require_nfa(s);
  const double c = c_override.value_or(s.as<NfaData>().c);
  if (!(c > 0.0 && c < 1.0)) throw InputError("discount must lie in ]0,1[");
  const detail::NfaMasks nfa(s.as<NfaData>());
  using Pair = std::pair<detail::Mask, detail::Mask>;
  std::map<Pair, std::pair<Pair, std::size_t>> parent;
  Pair start{detail::Mask{1} << x, detail::Mask{1} << y};
  parent[start] = {start, SIZE_MAX};
  std::deque<Pair> queue{start};
  while (!queue.empty()) {
    Pair cur = queue.front();
    queue.pop_front();
    if (nfa.accepts(cur.first) != nfa.accepts(cur.second)) {
      std::vector<std::string> word;
      for (Pair at = cur; parent[at].second != SIZE_MAX; at = parent[at].first)
        word.push_back(s.alphabet[parent[at].second]);
      std::reverse(word.begin(), word.end());
      return {ExtReal(std::pow(c, static_cast<double>(word.size()))), std::move(word)};
    }
    for (std::size_t a = 0; a < s.alphabet.size(); ++a) {
      Pair nxt{nfa.step(cur.first, a), nfa.step(cur.second, a)};
      if (parent.emplace(nxt, std::make_pair(cur, a)).second) queue.push_back(nxt);
    }
  }
  return {ExtReal(), std::nullopt};
}

// ---------------------------------------------------------------------------
// Probabilistic automata

struct BeliefStep {
  double output;
  std::vector<std::vector<double>> next;  // [letter] -> belief
};

/// Expected output of a belief and its image under each letter.
inline BeliefStep pa_belief_step(const SystemSpec& s, const std::vector<double>& belief) {
  const auto& d = s.as<PaData>();
  const std::size_t n = s.states.size();
  if (belief.size() != n) throw InputError("belief has wrong size");
  BeliefStep out{0.0, std::vector<std::vector<double>>(s.alphabet.size(), std::vector<double>(n, 0.0))};
  for (std::size_t x = 0; x < n; ++x) {
    if (belief[x] == 0.0) continue;
    out.output += belief[x] * d.output[x];
    for (std::size_t a = 0; a < s.alphabet.size(); ++a)
      for (std::size_t y = 0; y < n; ++y) out.next[a][y] += belief[x] * d.next[x][a][y];
  }
  return out;
}

struct PaTraceResult {
  ExtReal distance;
  std::size_t depth = 0;  // deepest word length summed
  std::size_t words = 0;  // words visited
};

inline constexpr std::size_t kMaxWordVisits = std::size_t{1} << 28;

/**
 * c1 * sum over words w of (c2/|A|)^|w| * |out(x after w) - out(y after w)|,
 * to within tol. The summand only depends on the difference of the two
 * beliefs, which evolves linearly. Half the tolerance goes to a depth cutoff,
 * the other half to skipping words below which the difference is too small
 * to matter.
 */
inline PaTraceResult trace_metric_pa(const SystemSpec& s, std::size_t x, std::size_t y, double c1, double c2,
                                     double tol) {
  if (s.kind() != SystemKind::pa) throw InputError("expected a probabilistic automaton");
  if (!(c1 > 0.0 && c1 < 1.0 && c2 > 0.0 && c2 < 1.0) || c1 + c2 > 1.0 + kEps)
    throw InputError("trace weights need c1, c2 in ]0,1[ and c1 + c2 <= 1");
  if (!(tol > 0.0)) throw InputError("tolerance must be positive");
  const auto& d = s.as<PaData>();
  const std::size_t n = s.states.size(), k = s.alphabet.size();
  detail::require_index(x, n, "state");
  detail::require_index(y, n, "state");

  const auto [lo, hi] = std::minmax_element(d.output.begin(), d.output.end());
  const double span = *hi - *lo;
  PaTraceResult res;
  if (span == 0.0 || x == y) return res;

  // |<delta, out>| <= span * |delta|_1 / 2 and |delta|_1 never grows
  std::size_t depth = 0;
  while (c1 * span * std::pow(c2, static_cast<double>(depth + 1)) / (1.0 - c2) > tol / 2) ++depth;
  const double negligible = tol * (1.0 - c2) * (1.0 - c2) / (c1 * span);
  const double shrink = c2 / static_cast<double>(k);

  std::vector<std::vector<double>> delta(depth + 1, std::vector<double>(n, 0.0));
  delta[0][x] += 1.0;
  delta[0][y] -= 1.0;
  double sum = 0.0;
  auto visit = [&](auto&& self, std::size_t len, double weight) -> void {
    if (++res.words > kMaxWordVisits) throw LimitError("too many words needed for this tolerance");
    res.depth = std::max(res.depth, len);
    const auto& cur = delta[len];
    double out = 0.0, norm = 0.0;
    for (std::size_t q = 0; q < n; ++q) {
      out += cur[q] * d.output[q];
      norm += std::fabs(cur[q]);
    }
    sum += weight * std::fabs(out);
    if (len == depth || norm <= negligible) return;
    auto& child = delta[len + 1];
    for (std::size_t a = 0; a < k; ++a) {
      std::fill(child.begin(), child.end(), 0.0);
      for (std::size_t q = 0; q < n; ++q)
        if (cur[q] != 0.0)
          for (std::size_t r = 0; r < n; ++r) child[r] += cur[q] * d.next[q][a][r];
      self(self, len + 1, weight * shrink);
    }
  };
  visit(visit, 0, 1.0);
  res.distance = ExtReal(c1 * sum);
  return res;
}

}  // namespace pmet

#endif
