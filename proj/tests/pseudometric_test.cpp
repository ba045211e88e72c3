#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "pmet/pseudometric.hpp"

using pmet::ExtReal;
using pmet::PseudometricMatrix;
using pmet::Top;

namespace {

PseudometricMatrix table(std::vector<std::vector<double>> rows, Top top = Top::infinite()) {
  std::vector<std::vector<ExtReal>> r;
  for (auto& row : rows) {
    r.emplace_back();
    for (double v : row) r.back().push_back(std::isinf(v) ? ExtReal::inf() : ExtReal(v));
  }
  return PseudometricMatrix(oracle::labels(rows.size()), top, r);
}

}  // namespace

TEST(Pseudometric, DiscreteAndEuclideanAreMetrics) {
  EXPECT_TRUE(pmet::is_pseudometric(PseudometricMatrix::discrete({"a", "b", "c"}, Top::one())));
  auto e = PseudometricMatrix::euclidean({"0", "0.4", "1"}, Top::one(), {ExtReal(0), ExtReal(0.4), ExtReal(1)});
  EXPECT_TRUE(pmet::is_pseudometric(e));
  EXPECT_NEAR(e.at("0.4", "1").value(), 0.6, 1e-12);
}

TEST(Pseudometric, TriangleViolationNamesTripleAndSlack) {
  auto d = table({{0, 1, 3}, {1, 0, 1}, {3, 1, 0}});
  auto v = pmet::check_axioms(d);
  ASSERT_FALSE(v.empty());
  bool found = false;
  for (const auto& x : v)
    if (x.kind == pmet::AxiomViolation::Kind::triangle && x.x == 0 && x.y == 1 && x.z == 2) {
      EXPECT_NEAR(x.slack, 1.0, 1e-12);
      found = true;
    }
  EXPECT_TRUE(found);
}

TEST(Pseudometric, ReflexivityAndSymmetryViolations) {
  auto d = table({{0.5, 1}, {2, 0}});
  auto v = pmet::check_axioms(d);
  int refl = 0, sym = 0;
  for (const auto& x : v) {
    refl += x.kind == pmet::AxiomViolation::Kind::reflexivity;
    sym += x.kind == pmet::AxiomViolation::Kind::symmetry;
  }
  EXPECT_EQ(refl, 1);
  EXPECT_EQ(sym, 1);
}

TEST(Pseudometric, InfiniteDistancesKeepTheTriangle) {
  auto d = table({{0, INFINITY, 1}, {INFINITY, 0, INFINITY}, {1, INFINITY, 0}});
  EXPECT_TRUE(pmet::is_pseudometric(d));
}

TEST(Pseudometric, EntriesAboveTopAreRejected) {
  PseudometricMatrix d({"a", "b"}, Top::one());
  EXPECT_THROW(d.set(0, 1, ExtReal(1.5)), pmet::RangeError);
  EXPECT_THROW(PseudometricMatrix({"a", "a"}, Top::one()), pmet::InputError);
}

TEST(Pseudometric, SupJoinIsPointwiseMax) {
  auto a = table({{0, 1, 2}, {1, 0, 1}, {2, 1, 0}});
  auto b = table({{0, 3, 1}, {3, 0, 2}, {1, 2, 0}});
  auto j = pmet::sup_join(a, b);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(j(i, k), pmet::max(a(i, k), b(i, k)));
}

TEST(Pseudometric, SupJoinRejectsDifferentCarriers) {
  PseudometricMatrix a({"a", "b"}, Top::one()), b({"a", "c"}, Top::one());
  EXPECT_THROW(pmet::sup_join(a, b), pmet::InputError);
  EXPECT_THROW(pmet::sup_norm_diff(a, b), pmet::InputError);
}

TEST(Pseudometric, SupNormDiff) {
  auto a = table({{0, 1}, {1, 0}});
  auto b = table({{0, 1.25}, {1.25, 0}});
  EXPECT_DOUBLE_EQ(pmet::sup_norm_diff(a, b).value(), 0.25);
  auto c = table({{0, INFINITY}, {INFINITY, 0}});
  EXPECT_TRUE(pmet::sup_norm_diff(a, c).is_inf());
  EXPECT_EQ(pmet::sup_norm_diff(c, c), ExtReal());
}

TEST(PseudometricProperty, JoinOfPseudometricsIsPseudometric) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    std::size_t n = 1 + rng() % 5;
    auto a = oracle::grid_metric(rng, n), b = oracle::grid_metric(rng, n);
    auto j = pmet::sup_join(a, b);
    EXPECT_TRUE(pmet::is_pseudometric(j));
    EXPECT_TRUE(pmet::pointwise_le(a, j));
    EXPECT_TRUE(pmet::pointwise_le(b, j));
  }
}
