#ifndef PMET_SYSTEMS_HPP
#define PMET_SYSTEMS_HPP

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pmet/error.hpp"
#include "pmet/ext_real.hpp"
#include "pmet/liftings.hpp"
#include "pmet/pseudometric.hpp"

namespace pmet {

enum class SystemKind { pts, dfa, real_machine, mts, nfa, pa };

inline const char* to_string(SystemKind k) {
  switch (k) {
    case SystemKind::pts: return "pts";
    case SystemKind::dfa: return "dfa";
    case SystemKind::real_machine: return "real-machine";
    case SystemKind::mts: return "mts";
    case SystemKind::nfa: return "nfa";
    case SystemKind::pa: return "pa";
  }
  return "?";
}

/// Name of the terminal target in probabilistic transition systems.
inline constexpr const char* kDone = "DONE";

/// Probabilistic transition system; next[x] has one extra last entry for DONE.
struct PtsData {
  double c = 1.0;
  std::vector<std::vector<double>> next;
  friend bool operator==(const PtsData&, const PtsData&) = default;
};

struct DfaData {
  double c = 1.0;
  InputMode mode = InputMode::max;
  std::vector<bool> accepting;
  std::vector<std::vector<std::size_t>> next;  // [state][letter]
  friend bool operator==(const DfaData&, const DfaData&) = default;
};

struct RealMachineData {
  MachineEval eval{MachineEval::Variant::avg_sum, 0.5, 0.5};
  std::vector<double> output;
  std::vector<std::vector<std::size_t>> next;
  friend bool operator==(const RealMachineData& a, const RealMachineData& b) {
    return a.eval.variant == b.eval.variant && a.eval.c1 == b.eval.c1 && a.eval.c2 == b.eval.c2 &&
           a.output == b.output && a.next == b.next;
  }
};

/** Metric transition system: finitely many propositions, each valued in a finite table. */
struct MtsData {
  struct Proposition {
    std::string name;
    PseudometricMatrix metric;
    friend bool operator==(const Proposition&, const Proposition&) = default;
  };
  std::vector<Proposition> propositions;
  std::vector<std::vector<std::size_t>> valuation;   // [state][proposition] -> point
  std::vector<std::vector<std::size_t>> successors;  // [state]
  friend bool operator==(const MtsData&, const MtsData&) = default;
};

struct NfaData {
  double c = 0.5;
  std::vector<bool> accepting;
  std::vector<std::vector<std::vector<std::size_t>>> next;  // [state][letter] -> sorted set
  friend bool operator==(const NfaData&, const NfaData&) = default;
};

/// Probabilistic automaton with outputs in [0,1].
struct PaData {
  double c1 = 0.5, c2 = 0.5;
  std::vector<double> output;
  std::vector<std::vector<std::vector<double>>> next;  // [state][letter][target]
  friend bool operator==(const PaData&, const PaData&) = default;
};

struct SystemSpec {
  Top top;
  std::vector<std::string> states;
  std::vector<std::string> alphabet;
  std::variant<PtsData, DfaData, RealMachineData, MtsData, NfaData, PaData> data;

  SystemKind kind() const { return static_cast<SystemKind>(data.index()); }
  std::size_t state_index(const std::string& name) const {
    auto it = std::find(states.begin(), states.end(), name);
    if (it == states.end()) throw InputError("unknown state '" + name + "'");
    return static_cast<std::size_t>(it - states.begin());
  }
  template <class T>
  const T& as() const {
    return std::get<T>(data);
  }
  friend bool operator==(const SystemSpec&, const SystemSpec&) = default;
};

// ---------------------------------------------------------------------------
// Validation

namespace detail {

inline void require_distribution(const std::vector<double>& w, const std::string& where) {
  double total = 0.0;
  for (double x : w) {
    if (!(x >= 0.0 && x <= 1.0 + kEps)) throw InputError(where + ": probability outside [0,1]");
    total += x;
  }
  if (std::fabs(total - 1.0) > kEps)
    throw InputError(where + ": probabilities sum to " + std::to_string(total) + ", expected 1");
}

inline void require_index(std::size_t i, std::size_t n, const std::string& where) {
  if (i >= n) throw InputError(where + ": index out of range");
}

inline void require_open_factor(double c, const char* what) {
  if (!(c > 0.0 && c < 1.0)) throw InputError(std::string(what) + " must lie in ]0,1[, got " + std::to_string(c));
}

}  // namespace detail

/// Throws InputError if the spec breaks a structural invariant of its kind.
inline void validate(const SystemSpec& s) {
  const std::size_t n = s.states.size(), k = s.alphabet.size();
  {
    std::set<std::string> seen;
    for (const auto& x : s.states)
      if (!seen.insert(x).second) throw InputError("duplicate state '" + x + "'");
    seen.clear();
    for (const auto& a : s.alphabet)
      if (!seen.insert(a).second) throw InputError("duplicate letter '" + a + "'");
  }
  auto rows = [&](std::size_t got, const char* what) {
    if (got != n) throw InputError(std::string(what) + " must have one entry per state");
  };
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, PtsData>) {
          require_factor(d.c, "c");
          if (std::find(s.states.begin(), s.states.end(), kDone) != s.states.end())
            throw InputError("state name DONE is reserved");
          rows(d.next.size(), "transitions");
          for (std::size_t x = 0; x < n; ++x) {
            if (d.next[x].size() != n + 1) throw InputError("transition row has wrong width");
            detail::require_distribution(d.next[x], "transitions of " + s.states[x]);
          }
        } else if constexpr (std::is_same_v<T, DfaData>) {
          require_factor(d.c, "c");
          require_mode_top(d.mode, s.top);
          rows(d.accepting.size(), "accepting");
          rows(d.next.size(), "transitions");
          for (std::size_t x = 0; x < n; ++x) {
            if (d.next[x].size() != k) throw InputError("transitions of " + s.states[x] + " must cover the alphabet");
            for (auto y : d.next[x]) detail::require_index(y, n, "transitions of " + s.states[x]);
          }
        } else if constexpr (std::is_same_v<T, RealMachineData>) {
          d.eval.validate(s.top);
          rows(d.output.size(), "outputs");
          rows(d.next.size(), "transitions");
          for (std::size_t x = 0; x < n; ++x) {
            if (!(d.output[x] >= 0.0 && d.output[x] <= 1.0)) throw InputError("output of " + s.states[x] + " outside [0,1]");
            if (d.next[x].size() != k) throw InputError("transitions of " + s.states[x] + " must cover the alphabet");
            for (auto y : d.next[x]) detail::require_index(y, n, "transitions of " + s.states[x]);
          }
        } else if constexpr (std::is_same_v<T, MtsData>) {
          rows(d.valuation.size(), "valuation");
          rows(d.successors.size(), "transitions");
          for (const auto& p : d.propositions) {
            if (p.metric.top() != s.top) throw InputError("proposition '" + p.name + "' has a different top");
            auto bad = check_axioms(p.metric);
            if (!bad.empty()) throw InputError("proposition '" + p.name + "' is not a pseudometric");
          }
          for (std::size_t x = 0; x < n; ++x) {
            if (d.valuation[x].size() != d.propositions.size())
              throw InputError("valuation of " + s.states[x] + " must cover every proposition");
            for (std::size_t r = 0; r < d.propositions.size(); ++r)
              detail::require_index(d.valuation[x][r], d.propositions[r].metric.size(), "valuation of " + s.states[x]);
            for (auto y : d.successors[x]) detail::require_index(y, n, "transitions of " + s.states[x]);
          }
        } else if constexpr (std::is_same_v<T, NfaData>) {
          detail::require_open_factor(d.c, "c");
          if (s.top.is_inf()) throw InputError("nfa needs top = 1");
          rows(d.accepting.size(), "accepting");
          rows(d.next.size(), "transitions");
          for (std::size_t x = 0; x < n; ++x) {
            if (d.next[x].size() != k) throw InputError("transitions of " + s.states[x] + " must cover the alphabet");
            for (const auto& set : d.next[x])
              for (auto y : set) detail::require_index(y, n, "transitions of " + s.states[x]);
          }
        } else if constexpr (std::is_same_v<T, PaData>) {
          detail::require_open_factor(d.c1, "c1");
          detail::require_open_factor(d.c2, "c2");
          if (d.c1 + d.c2 > 1.0 + kEps) throw InputError("pa needs c1 + c2 <= 1");
          if (s.top.is_inf()) throw InputError("pa needs top = 1");
          rows(d.output.size(), "outputs");
          rows(d.next.size(), "transitions");
          for (std::size_t x = 0; x < n; ++x) {
            if (!(d.output[x] >= 0.0 && d.output[x] <= 1.0)) throw InputError("output of " + s.states[x] + " outside [0,1]");
            if (d.next[x].size() != k) throw InputError("transitions of " + s.states[x] + " must cover the alphabet");
            for (std::size_t a = 0; a < k; ++a) {
              if (d.next[x][a].size() != n) throw InputError("transition row has wrong width");
              detail::require_distribution(d.next[x][a], "transitions of " + s.states[x] + " on " + s.alphabet[a]);
            }
          }
        }
      },
      s.data);
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

inline std::string where(const YAML::Node& n) {
  const auto m = n.Mark();
  if (m.line < 0) return "";
  return "line " + std::to_string(m.line + 1) + ", column " + std::to_string(m.column + 1) + ": ";
}

[[noreturn]] inline void fail(const YAML::Node& n, const std::string& msg) { throw InputError(where(n) + msg); }

inline void require_keys(const YAML::Node& map, std::initializer_list<const char*> allowed, const char* what) {
  if (!map.IsMap()) fail(map, std::string(what) + " must be a mapping");
  for (const auto& kv : map) {
    auto key = kv.first.as<std::string>();
    bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
    if (!ok) fail(kv.first, "unknown key '" + key + "' in " + what);
  }
}

inline const YAML::Node need(const YAML::Node& map, const char* key) {
  auto n = map[key];
  if (!n) fail(map, std::string("missing key '") + key + "'");
  return n;
}

inline std::string scalar(const YAML::Node& n) {
  if (!n.IsScalar()) fail(n, "expected a scalar");
  return n.Scalar();
}

inline double number(const YAML::Node& n) {
  std::string s = scalar(n);
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0' || !std::isfinite(v)) fail(n, "expected a decimal number, got '" + s + "'");
  return v;
}

inline std::vector<std::string> names(const YAML::Node& n) {
  if (!n.IsSequence()) fail(n, "expected a list");
  std::vector<std::string> out;
  for (const auto& e : n) out.push_back(scalar(e));
  return out;
}

inline std::size_t lookup(const std::vector<std::string>& v, const YAML::Node& n, const char* what) {
  auto s = scalar(n);
  auto it = std::find(v.begin(), v.end(), s);
  if (it == v.end()) fail(n, std::string("unknown ") + what + " '" + s + "'");
  return static_cast<std::size_t>(it - v.begin());
}

inline void wrap(const YAML::Node& n, const auto& f) {
  try {
    f();
  } catch (const InputError& e) {
    std::string msg = e.what();
    if (msg.rfind("line ", 0) == 0) throw;
    fail(n, msg);
  }
}

// A mapping keyed by state names; each state may appear at most once.
template <class F>
void per_state(const YAML::Node& map, const std::vector<std::string>& states, const char* what, F&& f) {
  if (!map.IsMap()) fail(map, std::string(what) + " must be a mapping from states");
  std::set<std::size_t> seen;
  for (const auto& kv : map) {
    std::size_t x = lookup(states, kv.first, "state");
    if (!seen.insert(x).second) fail(kv.first, "state listed twice");
    f(x, kv.second);
  }
}

inline double param(const YAML::Node& params, const char* key, std::optional<double> dflt = std::nullopt) {
  if (params && params[key]) return number(params[key]);
  if (dflt) return *dflt;
  fail(params, std::string("missing parameter '") + key + "'");
}

}  // namespace detail

/**
 * Reads a system description. Errors carry a line and column where possible.
 * See docs/format.md for the accepted document shape.
 */
inline SystemSpec parse_system(const std::string& text) {
  using namespace detail;
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw InputError("line " + std::to_string(e.mark.line + 1) + ", column " + std::to_string(e.mark.column + 1) +
                     ": syntax error: " + e.msg);
  }
  if (!root || !root.IsMap()) throw InputError("system description must be a mapping");

  const std::string kind = scalar(need(root, "kind"));
  SystemSpec s;
  wrap(root["top"], [&] { s.top = root["top"] ? Top::parse(scalar(root["top"])) : Top::one(); });
  YAML::Node params = root["params"];
  if (params && !params.IsMap()) fail(params, "params must be a mapping");
  s.states = names(need(root, "states"));
  const std::size_t n = s.states.size();

  auto letters = [&] { s.alphabet = names(need(root, "alphabet")); };
  auto accepting = [&](std::vector<bool>& acc) {
    acc.assign(n, false);
    if (root["accepting"])
      for (const auto& e : root["accepting"]) acc[lookup(s.states, e, "state")] = true;
  };
  auto outputs = [&](std::vector<double>& out) {
    out.assign(n, -1.0);
    per_state(need(root, "outputs"), s.states, "outputs", [&](std::size_t x, const YAML::Node& v) { out[x] = number(v); });
    for (std::size_t x = 0; x < n; ++x)
      if (out[x] < 0.0) fail(root["outputs"], "missing or negative output for state '" + s.states[x] + "'");
  };
  auto letter_map = [&](const YAML::Node& row, auto&& each) {
    if (!row.IsMap()) fail(row, "expected a mapping from letters");
    std::set<std::size_t> seen;
    for (const auto& kv : row) {
      std::size_t a = lookup(s.alphabet, kv.first, "letter");
      if (!seen.insert(a).second) fail(kv.first, "letter listed twice");
      each(a, kv.second);
    }
    return seen.size();
  };
  auto total_function = [&](std::vector<std::vector<std::size_t>>& next) {
    next.assign(n, std::vector<std::size_t>(s.alphabet.size(), 0));
    std::vector<bool> done(n, false);
    per_state(need(root, "transitions"), s.states, "transitions", [&](std::size_t x, const YAML::Node& row) {
      done[x] = true;
      auto got = letter_map(row, [&](std::size_t a, const YAML::Node& v) { next[x][a] = lookup(s.states, v, "state"); });
      if (got != s.alphabet.size()) fail(row, "transitions of '" + s.states[x] + "' must cover the alphabet");
    });
    for (std::size_t x = 0; x < n; ++x)
      if (!done[x]) fail(root["transitions"], "no transitions for state '" + s.states[x] + "'");
  };

  if (kind == "pts") {
    require_keys(root, {"kind", "top", "params", "states", "transitions"}, "pts");
    if (params) require_keys(params, {"c"}, "params");
    PtsData d;
    d.c = param(params, "c");
    d.next.assign(n, std::vector<double>(n + 1, 0.0));
    std::vector<std::string> targets = s.states;
    targets.push_back(kDone);
    per_state(need(root, "transitions"), s.states, "transitions", [&](std::size_t x, const YAML::Node& row) {
      if (!row.IsMap()) fail(row, "expected a mapping from target states to probabilities");
      std::set<std::size_t> seen;
      for (const auto& kv : row) {
        std::size_t y = lookup(targets, kv.first, "state");
        if (!seen.insert(y).second) fail(kv.first, "target listed twice");
        d.next[x][y] = number(kv.second);
      }
    });
    s.data = std::move(d);
  } else if (kind == "dfa") {
    require_keys(root, {"kind", "top", "params", "alphabet", "states", "accepting", "transitions"}, "dfa");
    if (params) require_keys(params, {"c", "mode"}, "params");
    letters();
    DfaData d;
    d.c = param(params, "c");
    if (params && params["mode"]) wrap(params["mode"], [&] { d.mode = parse_input_mode(scalar(params["mode"])); });
    accepting(d.accepting);
    total_function(d.next);
    s.data = std::move(d);
  } else if (kind == "real-machine") {
    require_keys(root, {"kind", "top", "params", "alphabet", "states", "outputs", "transitions"}, "real-machine");
    if (params) require_keys(params, {"c1", "c2", "mode"}, "params");
    letters();
    RealMachineData d;
    d.eval.c1 = param(params, "c1");
    d.eval.c2 = param(params, "c2");
    if (params && params["mode"])
      wrap(params["mode"], [&] { d.eval.variant = parse_machine_variant(scalar(params["mode"])); });
    outputs(d.output);
    total_function(d.next);
    s.data = std::move(d);
  } else if (kind == "mts") {
    require_keys(root, {"kind", "top", "params", "states", "propositions", "valuation", "transitions"}, "mts");
    if (params) require_keys(params, {}, "params");
    MtsData d;
    YAML::Node props = need(root, "propositions");
    if (!props.IsMap()) fail(props, "propositions must be a mapping");
    for (const auto& kv : props) {
      require_keys(kv.second, {"points", "metric"}, "proposition");
      auto pts = names(need(kv.second, "points"));
      YAML::Node m = need(kv.second, "metric");
      MtsData::Proposition p{scalar(kv.first), {}};
      wrap(m, [&] {
        if (m.IsScalar() && m.Scalar() == "euclid") {
          std::vector<ExtReal> vals;
          for (const auto& e : need(kv.second, "points")) vals.push_back(ExtReal(number(e)));
          p.metric = PseudometricMatrix::euclidean(pts, s.top, vals);
        } else if (m.IsSequence()) {
          std::vector<std::vector<ExtReal>> rows;
          for (const auto& r : m) {
            if (!r.IsSequence()) fail(r, "metric rows must be lists");
            rows.emplace_back();
            for (const auto& e : r)
              rows.back().push_back(scalar(e) == "inf" ? ExtReal::inf() : ExtReal(number(e)));
          }
          p.metric = PseudometricMatrix(pts, s.top, rows);
        } else {
          fail(m, "metric must be 'euclid' or a square table");
        }
      });
      d.propositions.push_back(std::move(p));
    }
    d.valuation.assign(n, std::vector<std::size_t>(d.propositions.size(), SIZE_MAX));
    per_state(need(root, "valuation"), s.states, "valuation", [&](std::size_t x, const YAML::Node& row) {
      if (!row.IsMap()) fail(row, "valuation must map propositions to points");
      for (const auto& kv : row) {
        auto pname = scalar(kv.first);
        auto it = std::find_if(d.propositions.begin(), d.propositions.end(), [&](const auto& p) { return p.name == pname; });
        if (it == d.propositions.end()) fail(kv.first, "unknown proposition '" + pname + "'");
        std::size_t r = static_cast<std::size_t>(it - d.propositions.begin());
        d.valuation[x][r] = lookup(it->metric.carrier(), kv.second, "point");
      }
    });
    for (std::size_t x = 0; x < n; ++x)
      for (auto v : d.valuation[x])
        if (v == SIZE_MAX) fail(root["valuation"], "state '" + s.states[x] + "' lacks a value for some proposition");
    d.successors.assign(n, {});
    per_state(need(root, "transitions"), s.states, "transitions", [&](std::size_t x, const YAML::Node& row) {
      if (!row.IsSequence()) fail(row, "mts transitions must be lists of successor states");
      std::set<std::size_t> succ;
      for (const auto& e : row) succ.insert(lookup(s.states, e, "state"));
      d.successors[x].assign(succ.begin(), succ.end());
    });
    s.data = std::move(d);
  } else if (kind == "nfa") {
    require_keys(root, {"kind", "top", "params", "alphabet", "states", "accepting", "transitions"}, "nfa");
    if (params) require_keys(params, {"c"}, "params");
    letters();
    NfaData d;
    d.c = param(params, "c", 0.5);
    accepting(d.accepting);
    d.next.assign(n, std::vector<std::vector<std::size_t>>(s.alphabet.size()));
    per_state(need(root, "transitions"), s.states, "transitions", [&](std::size_t x, const YAML::Node& row) {
      letter_map(row, [&](std::size_t a, const YAML::Node& v) {
        if (!v.IsSequence()) fail(v, "nfa successors must be a list");
        std::set<std::size_t> succ;
        for (const auto& e : v) succ.insert(lookup(s.states, e, "state"));
        d.next[x][a].assign(succ.begin(), succ.end());
      });
    });
    s.data = std::move(d);
  } else if (kind == "pa") {
    require_keys(root, {"kind", "top", "params", "alphabet", "states", "outputs", "transitions"}, "pa");
    if (params) require_keys(params, {"c1", "c2"}, "params");
    letters();
    PaData d;
    d.c1 = param(params, "c1", 0.5);
    d.c2 = param(params, "c2", 0.5);
    outputs(d.output);
    d.next.assign(n, std::vector<std::vector<double>>(s.alphabet.size(), std::vector<double>(n, 0.0)));
    per_state(need(root, "transitions"), s.states, "transitions", [&](std::size_t x, const YAML::Node& row) {
      auto got = letter_map(row, [&](std::size_t a, const YAML::Node& v) {
        if (!v.IsMap()) fail(v, "expected a mapping from target states to probabilities");
        std::set<std::size_t> seen;
        for (const auto& kv : v) {
          std::size_t y = lookup(s.states, kv.first, "state");
          if (!seen.insert(y).second) fail(kv.first, "target listed twice");
          d.next[x][a][y] = number(kv.second);
        }
      });
      if (got != s.alphabet.size()) fail(row, "transitions of '" + s.states[x] + "' must cover the alphabet");
    });
    s.data = std::move(d);
  } else {
    fail(root["kind"], "unknown system kind '" + kind + "'");
  }
  validate(s);
  return s;
}

// ---------------------------------------------------------------------------
// Serialisation

namespace detail {

// Shortest decimal that reads back to the same double.
inline std::string exact(double v) {
  char buf[40];
  for (int digits = 12; digits <= 17; ++digits) {
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

}  // namespace detail

/// Writes a document that parse_system reads back to an equal spec.
inline std::string serialize_system(const SystemSpec& s) {
  using detail::exact;
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << to_string(s.kind());
  out << YAML::Key << "top" << YAML::Value << s.top.name();
  auto flow_names = [&](const char* key, const std::vector<std::string>& v) {
    out << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (const auto& x : v) out << YAML::DoubleQuoted << x;
    out << YAML::EndSeq;
  };
  auto params = [&](std::initializer_list<std::pair<const char*, std::string>> kv) {
    out << YAML::Key << "params" << YAML::Value << YAML::Flow << YAML::BeginMap;
    for (const auto& [k, v] : kv) out << YAML::Key << k << YAML::Value << v;
    out << YAML::EndMap;
  };
  auto accepting = [&](const std::vector<bool>& acc) {
    out << YAML::Key << "accepting" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (std::size_t x = 0; x < acc.size(); ++x)
      if (acc[x]) out << YAML::DoubleQuoted << s.states[x];
    out << YAML::EndSeq;
  };
  auto outputs = [&](const std::vector<double>& o) {
    out << YAML::Key << "outputs" << YAML::Value << YAML::BeginMap;
    for (std::size_t x = 0; x < o.size(); ++x) out << YAML::Key << YAML::DoubleQuoted << s.states[x] << YAML::Value << exact(o[x]);
    out << YAML::EndMap;
  };
  auto functions = [&](const std::vector<std::vector<std::size_t>>& next) {
    out << YAML::Key << "transitions" << YAML::Value << YAML::BeginMap;
    for (std::size_t x = 0; x < next.size(); ++x) {
      out << YAML::Key << YAML::DoubleQuoted << s.states[x] << YAML::Value << YAML::Flow << YAML::BeginMap;
      for (std::size_t a = 0; a < next[x].size(); ++a)
        out << YAML::Key << YAML::DoubleQuoted << s.alphabet[a] << YAML::Value << YAML::DoubleQuoted << s.states[next[x][a]];
      out << YAML::EndMap;
    }
    out << YAML::EndMap;
  };

  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, PtsData>) {
          params({{"c", exact(d.c)}});
          flow_names("states", s.states);
          out << YAML::Key << "transitions" << YAML::Value << YAML::BeginMap;
          for (std::size_t x = 0; x < d.next.size(); ++x) {
            out << YAML::Key << YAML::DoubleQuoted << s.states[x] << YAML::Value << YAML::Flow << YAML::BeginMap;
            for (std::size_t y = 0; y < d.next[x].size(); ++y)
              if (d.next[x][y] != 0.0)
                out << YAML::Key << YAML::DoubleQuoted << (y < s.states.size() ? s.states[y] : std::string(kDone))
                    << YAML::Value << exact(d.next[x][y]);
            out << YAML::EndMap;
          }
          out << YAML::EndMap;
        } else if constexpr (std::is_same_v<T, DfaData>) {
          params({{"c", exact(d.c)}, {"mode", to_string(d.mode)}});
          flow_names("alphabet", s.alphabet);
          flow_names("states", s.states);
          accepting(d.accepting);
          functions(d.next);
        } else if constexpr (std::is_same_v<T, RealMachineData>) {
          const char* mode = d.eval.variant == MachineEval::Variant::discounted_max ? "max"
                             : d.eval.variant == MachineEval::Variant::avg_sum      ? "avg"
                                                                                    : "sum";
          params({{"c1", exact(d.eval.c1)}, {"c2", exact(d.eval.c2)}, {"mode", mode}});
          flow_names("alphabet", s.alphabet);
          flow_names("states", s.states);
          outputs(d.output);
          functions(d.next);
        } else if constexpr (std::is_same_v<T, MtsData>) {
          flow_names("states", s.states);
          out << YAML::Key << "propositions" << YAML::Value << YAML::BeginMap;
          for (const auto& p : d.propositions) {
            out << YAML::Key << YAML::DoubleQuoted << p.name << YAML::Value << YAML::BeginMap;
            flow_names("points", p.metric.carrier());
            out << YAML::Key << "metric" << YAML::Value << YAML::BeginSeq;
            for (std::size_t i = 0; i < p.metric.size(); ++i) {
              out << YAML::Flow << YAML::BeginSeq;
              for (std::size_t j = 0; j < p.metric.size(); ++j)
                out << (p.metric(i, j).is_inf() ? std::string("inf") : exact(p.metric(i, j).value()));
              out << YAML::EndSeq;
            }
            out << YAML::EndSeq << YAML::EndMap;
          }
          out << YAML::EndMap;
          out << YAML::Key << "valuation" << YAML::Value << YAML::BeginMap;
          for (std::size_t x = 0; x < s.states.size(); ++x) {
            out << YAML::Key << YAML::DoubleQuoted << s.states[x] << YAML::Value << YAML::Flow << YAML::BeginMap;
            for (std::size_t r = 0; r < d.propositions.size(); ++r)
              out << YAML::Key << YAML::DoubleQuoted << d.propositions[r].name << YAML::Value << YAML::DoubleQuoted
                  << d.propositions[r].metric.carrier()[d.valuation[x][r]];
            out << YAML::EndMap;
          }
          out << YAML::EndMap;
          out << YAML::Key << "transitions" << YAML::Value << YAML::BeginMap;
          for (std::size_t x = 0; x < s.states.size(); ++x) {
            out << YAML::Key << YAML::DoubleQuoted << s.states[x] << YAML::Value << YAML::Flow << YAML::BeginSeq;
            for (auto y : d.successors[x]) out << YAML::DoubleQuoted << s.states[y];
            out << YAML::EndSeq;
          }
          out << YAML::EndMap;
        } else if constexpr (std::is_same_v<T, NfaData>) {
          params({{"c", exact(d.c)}});
          flow_names("alphabet", s.alphabet);
          flow_names("states", s.states);
          accepting(d.accepting);
          out << YAML::Key << "transitions" << YAML::Value << YAML::BeginMap;
          for (std::size_t x = 0; x < d.next.size(); ++x) {
            out << YAML::Key << YAML::DoubleQuoted << s.states[x] << YAML::Value << YAML::Flow << YAML::BeginMap;
            for (std::size_t a = 0; a < d.next[x].size(); ++a) {
              out << YAML::Key << YAML::DoubleQuoted << s.alphabet[a] << YAML::Value << YAML::Flow << YAML::BeginSeq;
              for (auto y : d.next[x][a]) out << YAML::DoubleQuoted << s.states[y];
              out << YAML::EndSeq;
            }
            out << YAML::EndMap;
          }
          out << YAML::EndMap;
        } else if constexpr (std::is_same_v<T, PaData>) {
          params({{"c1", exact(d.c1)}, {"c2", exact(d.c2)}});
          flow_names("alphabet", s.alphabet);
          flow_names("states", s.states);
          outputs(d.output);
          out << YAML::Key << "transitions" << YAML::Value << YAML::BeginMap;
          for (std::size_t x = 0; x < d.next.size(); ++x) {
            out << YAML::Key << YAML::DoubleQuoted << s.states[x] << YAML::Value << YAML::BeginMap;
            for (std::size_t a = 0; a < d.next[x].size(); ++a) {
              out << YAML::Key << YAML::DoubleQuoted << s.alphabet[a] << YAML::Value << YAML::Flow << YAML::BeginMap;
              for (std::size_t y = 0; y < d.next[x][a].size(); ++y)
                if (d.next[x][a][y] != 0.0)
                  out << YAML::Key << YAML::DoubleQuoted << s.states[y] << YAML::Value << exact(d.next[x][a][y]);
              out << YAML::EndMap;
            }
            out << YAML::EndMap;
          }
          out << YAML::EndMap;
        }
      },
      s.data);
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

// ---------------------------------------------------------------------------
// Builtin fixtures

struct NamedSystem {
  std::string name;
  std::string description;
  SystemSpec spec;
};

/// The probabilistic system with branching 1/2 - eps vs 1/2 + eps.
inline SystemSpec branching_pts(double eps = 0.1, double c = 0.9) {
  SystemSpec s;
  s.top = Top::one();
  s.states = {"x", "y", "u", "z"};
  PtsData d;
  d.c = c;
  //            x    y    u          z          DONE
  d.next = {{0.0, 0.0, 0.5 - eps, 0.5 + eps, 0.0},
            {0.0, 0.0, 0.5, 0.5, 0.0},
            {0.0, 0.0, 1.0, 0.0, 0.0},
            {0.0, 0.0, 0.0, 0.0, 1.0}};
  s.data = std::move(d);
  validate(s);
  return s;
}

/// Metric transition system over one [0,1]-valued proposition.
inline SystemSpec interval_mts() {
  SystemSpec s;
  s.top = Top::infinite();
  s.states = {"x1", "x2", "x3", "y1", "y2", "y3"};
  MtsData d;
  std::vector<std::string> pts = {"0", "0.4", "0.5", "0.7", "1"};
  d.propositions.push_back(
      {"r", PseudometricMatrix::euclidean(pts, s.top, {ExtReal(0), ExtReal(0.4), ExtReal(0.5), ExtReal(0.7), ExtReal(1)})});
  d.valuation = {{0}, {1}, {3}, {0}, {2}, {4}};
  d.successors = {{1, 2}, {1}, {2}, {4, 5}, {4}, {5}};
  s.data = std::move(d);
  validate(s);
  return s;
}

/// s and t agree on every word shorter than "ab".
inline SystemSpec nfa_ab() {
  SystemSpec s;
  s.top = Top::one();
  s.states = {"s", "t", "f"};
  s.alphabet = {"a", "b"};
  NfaData d;
  d.c = 0.5;
  d.accepting = {false, false, true};
  d.next = {{{1}, {2}}, {{}, {2}}, {{}, {}}};
  s.data = std::move(d);
  validate(s);
  return s;
}

/// Chain p -> q -> r -> f with f accepting; p and q first differ on "aa".
inline SystemSpec dfa_chain() {
  SystemSpec s;
  s.top = Top::one();
  s.states = {"p", "q", "r", "f"};
  s.alphabet = {"a"};
  DfaData d;
  d.c = 0.5;
  d.accepting = {false, false, false, true};
  d.next = {{1}, {2}, {3}, {3}};
  s.data = std::move(d);
  validate(s);
  return s;
}

inline SystemSpec pa_three() {
  SystemSpec s;
  s.top = Top::one();
  s.states = {"x", "y", "z"};
  s.alphabet = {"a"};
  PaData d;
  d.c1 = 0.4;
  d.c2 = 0.4;
  d.output = {0.2, 0.6, 1.0};
  d.next = {{{0.5, 0.5, 0.0}}, {{0.0, 0.25, 0.75}}, {{1.0, 0.0, 0.0}}};
  s.data = std::move(d);
  validate(s);
  return s;
}

inline SystemSpec real_machine_pair() {
  SystemSpec s;
  s.top = Top::one();
  s.states = {"p", "q", "r"};
  s.alphabet = {"a", "b"};
  RealMachineData d;
  d.eval = {MachineEval::Variant::avg_sum, 0.5, 0.5};
  d.output = {0.0, 0.2, 1.0};
  d.next = {{0, 1}, {1, 2}, {2, 0}};
  s.data = std::move(d);
  validate(s);
  return s;
}

inline std::vector<NamedSystem> builtin_examples() {
  return {
      {"fig2-pts", "probabilistic system, eps = 0.1, c = 0.9", branching_pts()},
      {"fig4-mts", "metric transition system with one [0,1] proposition", interval_mts()},
      {"nfa-ab", "nfa whose states s, t first differ on the word ab", nfa_ab()},
      {"dfa-chain", "four-state dfa, p and q first differ on aa", dfa_chain()},
      {"pa-three", "three-state probabilistic automaton over one letter", pa_three()},
      {"real-machine", "three-state machine with outputs in [0,1]", real_machine_pair()},
  };
}

inline SystemSpec builtin_system(const std::string& name) {
  for (auto& e : builtin_examples())
    if (e.name == name) return e.spec;
  throw InputError("unknown builtin example '" + name + "'");
}

}  // namespace pmet

#endif
