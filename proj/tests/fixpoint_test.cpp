#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "pmet/fixpoint.hpp"

using pmet::ExtReal;
using pmet::SystemSpec;

namespace {

double at(const pmet::FixpointResult& r, const std::string& a, const std::string& b) {
  return r.metric.at(a, b).value();
}

}  // namespace

TEST(PtsBisim, DiscountedExample) {
  auto r = pmet::bisim_metric(pmet::branching_pts(0.1, 0.9));
  ASSERT_TRUE(r.converged);
  EXPECT_EQ(r.metric.at("u", "z"), ExtReal(1.0));
  EXPECT_NEAR(at(r, "x", "y"), 0.09, 1e-8);
  EXPECT_LE(r.iterations, 250u);
  EXPECT_TRUE(pmet::is_pseudometric(r.metric));
}

TEST(PtsBisim, UndiscountedExample) {
  auto r = pmet::bisim_metric(pmet::branching_pts(0.1, 1.0));
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(at(r, "x", "y"), 0.1, 1e-8);
  EXPECT_LE(r.iterations, 250u);
}

TEST(PtsBisim, ScalesWithEpsilon) {
  for (double eps : {0.0, 0.05, 0.2, 0.4}) {
    auto r = pmet::bisim_metric(pmet::branching_pts(eps, 0.9));
    EXPECT_NEAR(at(r, "x", "y"), 0.9 * eps, 1e-8) << eps;
  }
}

TEST(MtsBisim, FivePointExample) {
  auto r = pmet::bisim_metric(pmet::interval_mts());
  ASSERT_TRUE(r.converged);
  EXPECT_EQ(r.final_delta, ExtReal());
  EXPECT_LE(r.iterations, 10u);
  EXPECT_NEAR(at(r, "x2", "y2"), 0.1, 1e-9);
  EXPECT_NEAR(at(r, "x2", "y3"), 0.6, 1e-9);
  EXPECT_NEAR(at(r, "x3", "y2"), 0.2, 1e-9);
  EXPECT_NEAR(at(r, "x3", "y3"), 0.3, 1e-9);
  EXPECT_NEAR(at(r, "x1", "y1"), 0.3, 1e-9);
}

TEST(MtsBisim, IteratesIncrease) {
  pmet::FixpointConfig cfg;
  cfg.trace = true;
  auto s = pmet::interval_mts();
  pmet::PseudometricMatrix d(s.states, s.top);
  for (int i = 0; i < 5; ++i) {
    auto next = pmet::bisim_step(s, d);
    EXPECT_TRUE(pmet::pointwise_le(d, next));
    d = next;
  }
}

TEST(DfaBisim, ChainMatchesClosedForm) {
  auto s = pmet::dfa_chain();
  auto r = pmet::bisim_metric(s);
  ASSERT_TRUE(r.converged);
  const double c = s.as<pmet::DfaData>().c;
  // p -> q -> r -> f with only f accepting: p and q first differ after 2 letters
  EXPECT_NEAR(at(r, "p", "q"), c * c, 1e-9);
  EXPECT_NEAR(at(r, "p", "f"), 1.0, 1e-9);
  EXPECT_NEAR(at(r, "q", "r"), c, 1e-9);
  auto w = pmet::shortest_distinguishing_word(s, 0, 1);
  ASSERT_TRUE(w);
  EXPECT_EQ(w->size(), 2u);
}

TEST(DfaBisim, RandomAgainstWordEnumeration) {
  std::mt19937_64 rng(41);
  for (int it = 0; it < 50; ++it) {
    auto s = oracle::random_dfa(rng, 6, 2, 0.5);
    auto r = pmet::bisim_metric(s);
    ASSERT_TRUE(r.converged);
    const std::size_t n = s.states.size();
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y) {
        int len = oracle::dfa_separating_length(s, x, y, n);
        double expected = len < 0 ? 0.0 : std::pow(0.5, len);
        ASSERT_NEAR(r.metric(x, y).value(), expected, 1e-8);
        ASSERT_NEAR(pmet::dfa_closed_form(s, x, y).value(), expected, 1e-12);
      }
  }
}

TEST(RealMachineBisim, SelfLoopsHaveGeometricDistance) {
  // two states looping on themselves: d = c1 |o1 - o2| + c2 d
  SystemSpec s;
  s.top = pmet::Top::one();
  s.states = {"p", "q"};
  s.alphabet = {"a"};
  pmet::RealMachineData m;
  m.eval = {pmet::MachineEval::Variant::avg_sum, 0.5, 0.4};
  m.output = {0.2, 0.9};
  m.next = {{0}, {1}};
  s.data = m;
  auto r = pmet::bisim_metric(s);
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.metric(0, 1).value(), 0.5 * 0.7 / (1 - 0.4), 1e-8);
}

TEST(RealMachineBisim, BuiltinIsAPseudometric) {
  auto r = pmet::bisim_metric(pmet::builtin_system("real-machine"));
  ASSERT_TRUE(r.converged);
  EXPECT_TRUE(pmet::is_pseudometric(r.metric));
}

TEST(Fixpoint, SingleStateIsZero) {
  auto s = pmet::parse_system("kind: dfa\nparams: {c: 0.5}\nalphabet: [a]\nstates: [p]\ntransitions: {p: {a: p}}\n");
  auto r = pmet::bisim_metric(s);
  ASSERT_EQ(r.metric.size(), 1u);
  EXPECT_EQ(r.metric(0, 0), ExtReal());
  EXPECT_TRUE(r.converged);
}

TEST(Fixpoint, IterationCapReportsNonConvergence) {
  pmet::FixpointConfig cfg;
  cfg.max_iter = 2;
  auto r = pmet::bisim_metric(pmet::branching_pts(0.1, 1.0), cfg);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 2u);
}

TEST(Fixpoint, DeltasShrinkUnderDiscount) {
  pmet::FixpointConfig cfg;
  cfg.trace = true;
  auto s = pmet::builtin_system("real-machine");
  auto r = pmet::bisim_metric(s, cfg);
  ASSERT_EQ(r.deltas.size(), r.iterations);
  const double c2 = s.as<pmet::RealMachineData>().eval.c2;
  for (std::size_t i = 1; i < r.deltas.size(); ++i) EXPECT_LE(r.deltas[i].value(), c2 * r.deltas[i - 1].value() + 1e-12);
}

TEST(Fixpoint, UnsupportedKindsThrow) {
  EXPECT_THROW(pmet::bisim_metric(pmet::nfa_ab()), pmet::InputError);
  EXPECT_THROW(pmet::bisim_metric(pmet::pa_three()), pmet::InputError);
}
