// Independent reference computations used by the tests.
#ifndef PMET_TESTS_ORACLES_HPP
#define PMET_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "pmet/pmet.hpp"

namespace oracle {

using pmet::ExtReal;
using pmet::PseudometricMatrix;
using pmet::Top;

inline std::vector<std::string> labels(std::size_t n, const std::string& stem = "p") {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(stem + std::to_string(i));
  return out;
}

/// Metric on n points with entries that are multiples of h, via Floyd-Warshall.
inline PseudometricMatrix grid_metric(std::mt19937_64& rng, std::size_t n, double h = 0.05, Top top = Top::one()) {
  const int steps = static_cast<int>(std::lround(1.0 / h));
  std::uniform_int_distribution<int> pick(0, steps);
  std::vector<std::vector<int>> w(n, std::vector<int>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) w[i][j] = w[j][i] = pick(rng);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) w[i][j] = std::min(w[i][j], w[i][k] + w[k][j]);
  PseudometricMatrix d(labels(n), top);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d.set(i, j, ExtReal(w[i][j] * h));
  return d;
}

/// Weights that are multiples of 1/units, summing to 1 (or to mass/units).
inline std::vector<double> grid_weights(std::mt19937_64& rng, std::size_t n, std::size_t max_support, int units = 10,
                                        int mass = 10) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  const std::size_t k = std::uniform_int_distribution<std::size_t>(1, std::min(n, max_support))(rng);
  std::vector<int> cut{0, mass};
  for (std::size_t i = 1; i < k; ++i) cut.push_back(std::uniform_int_distribution<int>(0, mass)(rng));
  std::sort(cut.begin(), cut.end());
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i < k; ++i) w[idx[i]] = static_cast<double>(cut[i + 1] - cut[i]) / units;
  return w;
}

inline std::vector<std::size_t> random_subset(std::mt19937_64& rng, std::size_t n, std::size_t max_size) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i)
    if (out.size() < max_size && std::bernoulli_distribution(0.5)(rng)) out.push_back(i);
  return out;
}

/// Every word over k letters of length exactly len, in lexicographic order.
inline void for_each_word(std::size_t k, std::size_t len, const std::function<void(const std::vector<std::size_t>&)>& f) {
  std::vector<std::size_t> w(len, 0);
  for (;;) {
    f(w);
    std::size_t i = len;
    while (i > 0 && w[i - 1] + 1 == k) w[--i] = 0;
    if (i == 0) return;
    ++w[i - 1];
  }
}

/// Acceptance of a word from state x, by simulating the set of current states.
inline bool nfa_accepts(const pmet::SystemSpec& s, std::size_t x, const std::vector<std::size_t>& word) {
  const auto& d = s.as<pmet::NfaData>();
  std::vector<bool> cur(s.states.size(), false);
  cur[x] = true;
  for (auto a : word) {
    std::vector<bool> nxt(s.states.size(), false);
    for (std::size_t q = 0; q < cur.size(); ++q)
      if (cur[q])
        for (auto r : d.next[q][a]) nxt[r] = true;
    cur = nxt;
  }
  for (std::size_t q = 0; q < cur.size(); ++q)
    if (cur[q] && d.accepting[q]) return true;
  return false;
}

/// c^n for the first length n at which some word separates the languages; 0 if none up to max_len.
inline double nfa_language_distance(const pmet::SystemSpec& s, std::size_t x, std::size_t y, double c,
                                    std::size_t max_len) {
  for (std::size_t len = 0; len <= max_len; ++len) {
    bool differs = false;
    for_each_word(s.alphabet.size(), len, [&](const std::vector<std::size_t>& w) {
      if (!differs && nfa_accepts(s, x, w) != nfa_accepts(s, y, w)) differs = true;
    });
    if (differs) return std::pow(c, static_cast<double>(len));
  }
  return 0.0;
}

inline bool dfa_accepts(const pmet::SystemSpec& s, std::size_t x, const std::vector<std::size_t>& word) {
  const auto& d = s.as<pmet::DfaData>();
  for (auto a : word) x = d.next[x][a];
  return d.accepting[x];
}

/// Shortest separating word length by explicit enumeration; -1 if none up to max_len.
inline int dfa_separating_length(const pmet::SystemSpec& s, std::size_t x, std::size_t y, std::size_t max_len) {
  for (std::size_t len = 0; len <= max_len; ++len) {
    bool differs = false;
    for_each_word(s.alphabet.size(), len, [&](const std::vector<std::size_t>& w) {
      if (!differs && dfa_accepts(s, x, w) != dfa_accepts(s, y, w)) differs = true;
    });
    if (differs) return static_cast<int>(len);
  }
  return -1;
}

/**
 * c1 * sum over words up to max_len of (c2/|A|)^|w| |out_x(w) - out_y(w)|,
 * each word evaluated from scratch by repeated vector-matrix products.
 */
inline double pa_series(const pmet::SystemSpec& s, std::size_t x, std::size_t y, double c1, double c2,
                        std::size_t max_len) {
  const auto& d = s.as<pmet::PaData>();
  const std::size_t n = s.states.size(), k = s.alphabet.size();
  // beliefs along the current branch, one pair of rows per depth
  std::vector<std::vector<double>> bx(max_len + 1, std::vector<double>(n, 0.0)), by = bx;
  bx[0][x] = 1.0;
  by[0][y] = 1.0;
  double total = 0.0;
  std::function<void(std::size_t, double)> walk = [&](std::size_t len, double weight) {
    double ox = 0.0, oy = 0.0;
    for (std::size_t q = 0; q < n; ++q) {
      ox += bx[len][q] * d.output[q];
      oy += by[len][q] * d.output[q];
    }
    total += weight * std::fabs(ox - oy);
    if (len == max_len) return;
    for (std::size_t a = 0; a < k; ++a) {
      auto& nx = bx[len + 1];
      auto& ny = by[len + 1];
      std::fill(nx.begin(), nx.end(), 0.0);
      std::fill(ny.begin(), ny.end(), 0.0);
      for (std::size_t q = 0; q < n; ++q)
        for (std::size_t r = 0; r < n; ++r) {
          nx[r] += bx[len][q] * d.next[q][a][r];
          ny[r] += by[len][q] * d.next[q][a][r];
        }
      walk(len + 1, weight * c2 / static_cast<double>(k));
    }
  };
  walk(0, 1.0);
  return c1 * total;
}

inline pmet::SystemSpec random_dfa(std::mt19937_64& rng, std::size_t max_states, std::size_t max_letters, double c) {
  pmet::SystemSpec s;
  s.top = Top::one();
  const std::size_t n = std::uniform_int_distribution<std::size_t>(1, max_states)(rng);
  const std::size_t k = std::uniform_int_distribution<std::size_t>(1, max_letters)(rng);
  s.states = labels(n, "q");
  for (std::size_t a = 0; a < k; ++a) s.alphabet.push_back(std::string(1, static_cast<char>('a' + a)));
  pmet::DfaData d;
  d.c = c;
  std::uniform_int_distribution<std::size_t> st(0, n - 1);
  for (std::size_t q = 0; q < n; ++q) {
    d.accepting.push_back(std::bernoulli_distribution(0.4)(rng));
    d.next.emplace_back();
    for (std::size_t a = 0; a < k; ++a) d.next.back().push_back(st(rng));
  }
  s.data = d;
  pmet::validate(s);
  return s;
}

inline pmet::SystemSpec random_nfa(std::mt19937_64& rng, std::size_t max_states, std::size_t letters, double c) {
  pmet::SystemSpec s;
  s.top = Top::one();
  const std::size_t n = std::uniform_int_distribution<std::size_t>(1, max_states)(rng);
  s.states = labels(n, "q");
  for (std::size_t a = 0; a < letters; ++a) s.alphabet.push_back(std::string(1, static_cast<char>('a' + a)));
  pmet::NfaData d;
  d.c = c;
  for (std::size_t q = 0; q < n; ++q) {
    d.accepting.push_back(std::bernoulli_distribution(0.35)(rng));
    d.next.emplace_back();
    for (std::size_t a = 0; a < letters; ++a) {
      std::vector<std::size_t> succ;
      for (std::size_t r = 0; r < n; ++r)
        if (std::bernoulli_distribution(0.3)(rng)) succ.push_back(r);
      d.next.back().push_back(succ);
    }
  }
  s.data = d;
  pmet::validate(s);
  return s;
}

inline pmet::SystemSpec random_pa(std::mt19937_64& rng, std::size_t max_states, std::size_t max_letters, double c1,
                                  double c2) {
  pmet::SystemSpec s;
  s.top = Top::one();
  const std::size_t n = std::uniform_int_distribution<std::size_t>(1, max_states)(rng);
  const std::size_t k = std::uniform_int_distribution<std::size_t>(1, max_letters)(rng);
  s.states = labels(n, "q");
  for (std::size_t a = 0; a < k; ++a) s.alphabet.push_back(std::string(1, static_cast<char>('a' + a)));
  pmet::PaData d;
  d.c1 = c1;
  d.c2 = c2;
  for (std::size_t q = 0; q < n; ++q) {
    d.output.push_back(std::uniform_int_distribution<int>(0, 20)(rng) / 20.0);
    d.next.emplace_back();
    for (std::size_t a = 0; a < k; ++a) d.next.back().push_back(grid_weights(rng, n, n, 8, 8));
  }
  s.data = d;
  pmet::validate(s);
  return s;
}

}  // namespace oracle

#endif
