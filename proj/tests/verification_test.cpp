#include <gtest/gtest.h>

#include "pmet/verification.hpp"

using pmet::ExtReal;
using pmet::PseudometricMatrix;
using pmet::Top;

TEST(BruteForce, SetsAgreeWithHandValues) {
  auto d = PseudometricMatrix::euclidean({"0", "0.5", "1"}, Top::one(), {ExtReal(0), ExtReal(0.5), ExtReal(1)});
  std::vector<std::size_t> none, a{0}, b{1, 2};
  EXPECT_EQ(pmet::brute_wasserstein_sets(d, none, none), ExtReal());
  EXPECT_EQ(pmet::brute_wasserstein_sets(d, none, a), ExtReal(1.0));
  EXPECT_NEAR(pmet::brute_wasserstein_sets(d, a, b).value(), 1.0, 1e-12);
  EXPECT_EQ(pmet::brute_kantorovich_sets(d, a, a, 0.05), ExtReal());
  EXPECT_NEAR(pmet::brute_kantorovich_sets(d, a, b, 0.05).value(), 1.0, 1e-12);
}

TEST(BruteForce, RejectsLargeOrUnboundedInputs) {
  auto big = PseudometricMatrix::discrete({"a", "b", "c", "d", "e", "f"}, Top::one());
  std::vector<std::size_t> s{0};
  EXPECT_THROW(pmet::brute_kantorovich_sets(big, s, s, 0.05), pmet::LimitError);
  auto inf = PseudometricMatrix::discrete({"a"}, Top::infinite());
  EXPECT_THROW(pmet::brute_kantorovich_sets(inf, s, s, 0.05), pmet::InputError);
}

TEST(WellBehaved, ShippedEvaluationsPass) {
  for (const auto& [name, spec] : pmet::evaluation_catalog()) {
    if (name == "powerset-min") continue;
    auto rep = pmet::check_well_behaved(spec, 200, 42, name);
    EXPECT_TRUE(rep.passed()) << name << ": " << (rep.violations.empty() ? "" : rep.violations[0].observed);
    EXPECT_GT(rep.instances, 0u);
  }
}

TEST(WellBehaved, MinimumEvaluationFailsWithWitnesses) {
  auto rep = pmet::check_well_behaved(pmet::evaluation_catalog().at("powerset-min"), 200, 42, "powerset-min");
  ASSERT_FALSE(rep.passed());
  bool w2 = false, w3 = false;
  for (const auto& v : rep.violations) {
    w2 = w2 || v.instance.rfind("W2", 0) == 0;
    w3 = w3 || v.instance.rfind("W3", 0) == 0;
  }
  EXPECT_TRUE(w2);
  EXPECT_TRUE(w3);
}

TEST(Duality, SquaringFunctorHasAGap) {
  auto rep = pmet::check_duality_squaring(0.5, 0.05);
  EXPECT_FALSE(rep.passed());
  ASSERT_EQ(rep.violations.size(), 1u);
}

TEST(Checks, EveryOtherRegisteredCheckPasses) {
  for (const auto& name : pmet::check_names()) {
    if (name == "well-behaved:powerset-min" || name == "duality:squaring") continue;
    auto rep = pmet::run_check(name, 42, 200);
    EXPECT_TRUE(rep.passed()) << name << ": "
                              << (rep.violations.empty() ? "" : rep.violations[0].instance + " | " +
                                                                    rep.violations[0].relation + " | " +
                                                                    rep.violations[0].observed);
    EXPECT_GT(rep.instances, 0u) << name;
  }
}

TEST(Checks, SeedsAreReproducible) {
  auto a = pmet::run_check("lifting:k-le-w", 7, 50), b = pmet::run_check("lifting:k-le-w", 7, 50);
  EXPECT_EQ(a.instances, b.instances);
  auto c = pmet::run_check("well-behaved:powerset-min", 9, 50), e = pmet::run_check("well-behaved:powerset-min", 9, 50);
  ASSERT_EQ(c.violations.size(), e.violations.size());
  for (std::size_t i = 0; i < c.violations.size(); ++i) EXPECT_EQ(c.violations[i].instance, e.violations[i].instance);
}

TEST(Checks, UnknownNamesAreInputErrors) {
  EXPECT_THROW(pmet::run_check("duality:nothing"), pmet::InputError);
  EXPECT_THROW(pmet::run_check("well-behaved:median"), pmet::InputError);
}
