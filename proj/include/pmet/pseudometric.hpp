#ifndef PMET_PSEUDOMETRIC_HPP
#define PMET_PSEUDOMETRIC_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "pmet/error.hpp"
#include "pmet/ext_real.hpp"

namespace pmet {

/**
 * A distance table over a named carrier. Entries are kept inside [0, top];
 * the pseudometric axioms are not enforced here, see check_axioms().
 */
class PseudometricMatrix {
 public:
  PseudometricMatrix() = default;

  /// All-zero table.
  PseudometricMatrix(std::vector<std::string> carrier, Top top)
      : carrier_(std::move(carrier)), top_(top), entries_(carrier_.size() * carrier_.size()) {
    index_carrier();
  }

  PseudometricMatrix(std::vector<std::string> carrier, Top top, const std::vector<std::vector<ExtReal>>& rows)
      : PseudometricMatrix(std::move(carrier), top) {
    if (rows.size() != size()) throw InputError("distance table has wrong number of rows");
    for (std::size_t i = 0; i < size(); ++i) {
      if (rows[i].size() != size()) throw InputError("distance table row " + std::to_string(i) + " has wrong length");
      for (std::size_t j = 0; j < size(); ++j) set(i, j, rows[i][j]);
    }
  }

  /// 0 on the diagonal, top elsewhere.
  static PseudometricMatrix discrete(std::vector<std::string> carrier, Top top) {
    PseudometricMatrix m(std::move(carrier), top);
    for (std::size_t i = 0; i < m.size(); ++i)
      for (std::size_t j = 0; j < m.size(); ++j)
        if (i != j) m.set(i, j, top.value());
    return m;
  }

  /// |a - b| on the given values.
  static PseudometricMatrix euclidean(std::vector<std::string> carrier, Top top, const std::vector<ExtReal>& values) {
    PseudometricMatrix m(std::move(carrier), top);
    if (values.size() != m.size()) throw InputError("value list does not match carrier");
    for (std::size_t i = 0; i < m.size(); ++i)
      for (std::size_t j = 0; j < m.size(); ++j) m.set(i, j, euclid(values[i], values[j]));
    return m;
  }

  std::size_t size() const { return carrier_.size(); }
  Top top() const { return top_; }
  const std::vector<std::string>& carrier() const { return carrier_; }

  ExtReal operator()(std::size_t i, std::size_t j) const { return entries_[i * size() + j]; }
  ExtReal at(const std::string& a, const std::string& b) const { return (*this)(index_of(a), index_of(b)); }

  void set(std::size_t i, std::size_t j, ExtReal v) { entries_[i * size() + j] = top_.check(v); }

  std::size_t index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw InputError("unknown carrier element '" + name + "'");
    return it->second;
  }
  std::optional<std::size_t> find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  friend bool operator==(const PseudometricMatrix& a, const PseudometricMatrix& b) {
    return a.carrier_ == b.carrier_ && a.top_ == b.top_ && a.entries_ == b.entries_;
  }

 private:
  void index_carrier() {
    index_.clear();
    for (std::size_t i = 0; i < carrier_.size(); ++i)
      if (!index_.emplace(carrier_[i], i).second) throw InputError("duplicate carrier element '" + carrier_[i] + "'");
  }

  std::vector<std::string> carrier_;
  Top top_;
  std::vector<ExtReal> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct AxiomViolation {
  enum class Kind { reflexivity, symmetry, triangle };
  Kind kind;
  std::size_t x, y, z;  // z is unused unless kind == triangle
  double slack;         // amount by which the axiom fails; inf if unbounded
};

inline const char* to_string(AxiomViolation::Kind k) {
  switch (k) {
    case AxiomViolation::Kind::reflexivity: return "reflexivity";
    case AxiomViolation::Kind::symmetry: return "symmetry";
    case AxiomViolation::Kind::triangle: return "triangle";
  }
  return "?";
}

/// Empty when d is a pseudometric up to kEps.
inline std::vector<AxiomViolation> check_axioms(const PseudometricMatrix& d, double tol = kEps) {
  std::vector<AxiomViolation> out;
  const std::size_t n = d.size();
  for (std::size_t x = 0; x < n; ++x)
    if (!approx_equal(d(x, x), ExtReal(), tol))
      out.push_back({AxiomViolation::Kind::reflexivity, x, x, x, d(x, x).value()});
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y)
      if (!approx_equal(d(x, y), d(y, x), tol))
        out.push_back({AxiomViolation::Kind::symmetry, x, y, y, euclid(d(x, y), d(y, x)).value()});
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      for (std::size_t z = 0; z < n; ++z) {
        ExtReal via = d(x, y) + d(y, z);
        if (!approx_le(d(x, z), via, tol))
          out.push_back({AxiomViolation::Kind::triangle, x, y, z,
                         d(x, z).is_inf() ? ExtReal::inf().value() : d(x, z).value() - via.value()});
      }
  return out;
}

inline bool is_pseudometric(const PseudometricMatrix& d, double tol = kEps) { return check_axioms(d, tol).empty(); }

inline void require_same_shape(const PseudometricMatrix& a, const PseudometricMatrix& b) {
  if (a.carrier() != b.carrier()) throw InputError("pseudometrics are over different carriers");
  if (a.top() != b.top()) throw InputError("pseudometrics have different tops");
}

/// Pointwise maximum. There is deliberately no meet.
inline PseudometricMatrix sup_join(const PseudometricMatrix& a, const PseudometricMatrix& b) {
  require_same_shape(a, b);
  PseudometricMatrix out(a.carrier(), a.top());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) out.set(i, j, max(a(i, j), b(i, j)));
  return out;
}

/// max over entries of euclid(a, b).
inline ExtReal sup_norm_diff(const PseudometricMatrix& a, const PseudometricMatrix& b) {
  require_same_shape(a, b);
  ExtReal m;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) m = max(m, euclid(a(i, j), b(i, j)));
  return m;
}

/// a <= b entrywise up to tol.
inline bool pointwise_le(const PseudometricMatrix& a, const PseudometricMatrix& b, double tol = kEps) {
  require_same_shape(a, b);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if (!approx_le(a(i, j), b(i, j), tol)) return false;
  return true;
}

}  // namespace pmet

#endif
