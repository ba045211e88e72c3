#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "pmet/liftings.hpp"
#include "pmet/verification.hpp"

using pmet::Distribution;
using pmet::ExtReal;
using pmet::PseudometricMatrix;
using pmet::Top;

namespace {

PseudometricMatrix points(Top top = Top::infinite()) {
  return PseudometricMatrix::euclidean({"0", "0.4", "0.5", "0.7", "1"}, top,
                                       {ExtReal(0), ExtReal(0.4), ExtReal(0.5), ExtReal(0.7), ExtReal(1)});
}

using Idx = std::vector<std::size_t>;

}  // namespace

TEST(Evaluation, InputModes) {
  std::vector<ExtReal> r{ExtReal(0.2), ExtReal(0.6), ExtReal(0.1)};
  EXPECT_DOUBLE_EQ(pmet::ev_input(r, pmet::InputMode::max).value(), 0.6);
  EXPECT_NEAR(pmet::ev_input(r, pmet::InputMode::sum).value(), 0.9, 1e-12);
  EXPECT_NEAR(pmet::ev_input(r, pmet::InputMode::avg).value(), 0.3, 1e-12);
  EXPECT_EQ(pmet::ev_max({}), ExtReal());
  EXPECT_EQ(pmet::ev_min({}, Top::one()), ExtReal(1.0));
}

TEST(Evaluation, ProductAndMachine) {
  pmet::ProductEval mx{pmet::ProductEval::Kind::max, 1.0, 0.5, 1.0};
  EXPECT_DOUBLE_EQ(pmet::ev_product(ExtReal(0.3), ExtReal(0.8), mx).value(), 0.4);
  pmet::ProductEval pn{pmet::ProductEval::Kind::pnorm, 0.5, 0.5, 2.0};
  EXPECT_NEAR(pmet::ev_product(ExtReal(0.6), ExtReal(0.8), pn).value(), std::sqrt(0.5 * 0.36 + 0.5 * 0.64), 1e-12);
  EXPECT_THROW((pmet::ProductEval{pmet::ProductEval::Kind::pnorm, 0.8, 0.8, 2.0}.validate(Top::one())),
               pmet::InputError);
  EXPECT_NO_THROW((pmet::ProductEval{pmet::ProductEval::Kind::pnorm, 0.8, 0.8, 2.0}.validate(Top::infinite())));

  std::vector<ExtReal> next{ExtReal(0.2), ExtReal(0.6)};
  pmet::MachineEval dm{pmet::MachineEval::Variant::discounted_max, 1.0, 0.5};
  EXPECT_DOUBLE_EQ(pmet::ev_machine(ExtReal(0.25), next, dm).value(), 0.3);
  pmet::MachineEval avg{pmet::MachineEval::Variant::avg_sum, 0.5, 0.5};
  EXPECT_NEAR(pmet::ev_machine(ExtReal(0.25), next, avg).value(), 0.125 + 0.2, 1e-12);
  pmet::MachineEval sum{pmet::MachineEval::Variant::sum, 1.0, 0.5};
  EXPECT_THROW(sum.validate(Top::one()), pmet::InputError);
  EXPECT_NEAR(pmet::ev_machine(ExtReal(0.25), next, sum).value(), 0.25 + 0.4, 1e-12);
  EXPECT_THROW(pmet::parse_machine_variant("median"), pmet::InputError);
}

TEST(Hausdorff, EmptySets) {
  auto d = points(Top::one());
  Idx none, some{1};
  EXPECT_EQ(pmet::hausdorff(d, none, none), ExtReal());
  EXPECT_EQ(pmet::hausdorff(d, none, some), ExtReal(1.0));
  EXPECT_EQ(pmet::hausdorff(d, some, none), ExtReal(1.0));
}

TEST(Hausdorff, PointSets) {
  auto d = points();
  Idx a{1, 3}, b{2, 4};  // {0.4, 0.7} vs {0.5, 1}
  // directed: 0.4->0.5 is 0.1, 0.7->0.5 is 0.2; 0.5->0.4 is 0.1, 1->0.7 is 0.3
  EXPECT_NEAR(pmet::hausdorff(d, a, b).value(), 0.3, 1e-12);
  Idx c{0}, e{0, 4};
  EXPECT_NEAR(pmet::hausdorff(d, c, e).value(), 1.0, 1e-12);
}

TEST(DistributionLifting, DiscreteExample) {
  const double eps = 0.1;
  auto d = PseudometricMatrix::discrete({"u", "z"}, Top::one());
  Distribution p({0.5 - eps, 0.5 + eps}), q({0.5, 0.5});
  EXPECT_NEAR(pmet::wasserstein_distribution(d, p, q).value(), eps, 1e-12);
  EXPECT_NEAR(pmet::kantorovich_distribution(d, p, q).value(), eps, 1e-12);
  EXPECT_EQ(pmet::wasserstein_distribution(d, p, p), ExtReal());
}

TEST(DistributionLifting, SubdistributionsOfDifferentMass) {
  auto d = PseudometricMatrix::discrete({"x"}, Top::one());
  Distribution p({0.3}, true), q({0.7}, true);
  EXPECT_NEAR(pmet::kantorovich_distribution(d, p, q).value(), 0.4, 1e-12);
  EXPECT_EQ(pmet::wasserstein_distribution(d, p, q), ExtReal(1.0));
  EXPECT_NEAR(pmet::brute_kantorovich_distributions(d, p, q, 0.05).value(), 0.4, 1e-12);
}

TEST(InputLifting, Modes) {
  auto d = points();
  Idx f{0, 1, 3}, g{2, 1, 4};
  EXPECT_NEAR(pmet::lift_input(d, f, g, pmet::InputMode::max).value(), 0.5, 1e-12);
  EXPECT_NEAR(pmet::lift_input(d, f, g, pmet::InputMode::sum).value(), 0.8, 1e-12);
  EXPECT_NEAR(pmet::lift_input(d, f, g, pmet::InputMode::avg).value(), 0.8 / 3, 1e-12);
  EXPECT_THROW(pmet::lift_input(points(Top::one()), f, g, pmet::InputMode::sum), pmet::InputError);
  Idx shorter{0};
  EXPECT_THROW(pmet::lift_input(d, f, shorter, pmet::InputMode::max), pmet::InputError);
}

TEST(ProductLifting, Components) {
  auto d = points(Top::one());
  auto e = PseudometricMatrix::discrete({"a", "b"}, Top::one());
  pmet::ProductEval mx{pmet::ProductEval::Kind::max, 1.0, 0.5, 1.0};
  EXPECT_NEAR(pmet::lift_product(d, e, {1, 0}, {3, 1}, mx).value(), std::max(0.3, 0.5), 1e-12);
  EXPECT_NEAR(pmet::lift_product(d, e, {1, 0}, {4, 0}, mx).value(), 0.6, 1e-12);
  EXPECT_THROW(pmet::lift_product(d, points(), {0, 0}, {0, 0}, mx), pmet::InputError);
}

TEST(CoproductLifting, SidesAreTopApart) {
  auto d = points(Top::one());
  EXPECT_EQ(pmet::lift_coproduct(d, d, {0, 1}, {1, 1}), ExtReal(1.0));
  EXPECT_NEAR(pmet::lift_coproduct(d, d, {1, 0}, {1, 2}).value(), 0.5, 1e-12);
}

TEST(MachineLifting, Variants) {
  auto out = points(Top::one());
  auto d = PseudometricMatrix::discrete({"p", "q"}, Top::one());
  pmet::MachineElement x{1, {0, 0}}, y{3, {0, 1}};
  pmet::MachineEval dm{pmet::MachineEval::Variant::discounted_max, 1.0, 0.5};
  EXPECT_NEAR(pmet::lift_machine(out, d, x, y, dm).value(), 0.5, 1e-12);
  pmet::MachineEval avg{pmet::MachineEval::Variant::avg_sum, 0.5, 0.5};
  EXPECT_NEAR(pmet::lift_machine(out, d, x, y, avg).value(), 0.15 + 0.25, 1e-12);
}

TEST(MachineLifting, DiscreteOutputs) {
  auto d = PseudometricMatrix::euclidean({"p", "q"}, Top::one(), {ExtReal(0), ExtReal(0.8)});
  Idx s1{0}, s2{1};
  EXPECT_EQ(pmet::lift_discrete_machine(d, true, false, s1, s1, 0.5, pmet::InputMode::max), ExtReal(1.0));
  EXPECT_NEAR(pmet::lift_discrete_machine(d, true, true, s1, s2, 0.5, pmet::InputMode::max).value(), 0.4, 1e-12);
}

TEST(SquaringLifting, WassersteinAndGridKantorovich) {
  const double delta = 0.5, h = 0.05;
  auto d = PseudometricMatrix::euclidean({"a", "b"}, Top::infinite(), {ExtReal(0), ExtReal(delta)});
  EXPECT_DOUBLE_EQ(pmet::squaring_wasserstein(d, {0, 1}, {1, 0}).value(), 2 * delta);
  EXPECT_LE(pmet::squaring_kantorovich_oracle(d, {0, 1}, {1, 0}, h, 1.0).value(), 2 * h);
  EXPECT_THROW(pmet::squaring_wasserstein(points(Top::one()), {0, 1}, {1, 0}), pmet::InputError);
  // identical pairs: both liftings vanish
  EXPECT_EQ(pmet::squaring_kantorovich_oracle(d, {0, 1}, {0, 1}, h, 1.0), ExtReal());
}

TEST(LiftingProperty, HausdorffMatchesBruteForce) {
  std::mt19937_64 rng(21);
  for (int it = 0; it < 200; ++it) {
    const std::size_t n = 1 + rng() % 4;
    auto d = oracle::grid_metric(rng, n);
    auto s1 = oracle::random_subset(rng, n, 3), s2 = oracle::random_subset(rng, n, 3);
    ExtReal hd = pmet::hausdorff(d, s1, s2);
    ASSERT_EQ(hd, pmet::brute_wasserstein_sets(d, s1, s2));
    ASSERT_NEAR(hd.value(), pmet::brute_kantorovich_sets(d, s1, s2, 0.05).value(), 0.1 + 1e-9);
  }
}

TEST(LiftingProperty, KantorovichOnSubdistributionsMatchesBruteForce) {
  std::mt19937_64 rng(22);
  for (int it = 0; it < 200; ++it) {
    const std::size_t n = 1 + rng() % 3;
    auto d = oracle::grid_metric(rng, n);
    const int mp = static_cast<int>(rng() % 11), mq = static_cast<int>(rng() % 11);
    Distribution p(mp ? oracle::grid_weights(rng, n, 3, 10, mp) : std::vector<double>(n, 0.0), true);
    Distribution q(mq ? oracle::grid_weights(rng, n, 3, 10, mq) : std::vector<double>(n, 0.0), true);
    ExtReal k = pmet::kantorovich_distribution(d, p, q);
    ExtReal brute = pmet::brute_kantorovich_distributions(d, p, q, 0.05);
    ASSERT_TRUE(pmet::approx_le(brute, k)) << "brute " << brute.value() << " exact " << k.value();
    ASSERT_NEAR(k.value(), brute.value(), 0.1 + 1e-9);
  }
}

TEST(LiftingProperty, LiftedDistancesArePseudometrics) {
  std::mt19937_64 rng(23);
  for (int it = 0; it < 50; ++it) {
    const std::size_t n = 1 + rng() % 4;
    auto d = oracle::grid_metric(rng, n);
    std::vector<Distribution> ds;
    std::vector<Idx> ss;
    for (int k = 0; k < 4; ++k) {
      ds.emplace_back(oracle::grid_weights(rng, n, 3));
      ss.push_back(oracle::random_subset(rng, n, 3));
    }
    for (auto& a : ds)
      for (auto& b : ds)
        for (auto& c : ds) {
          auto ab = pmet::wasserstein_distribution(d, a, b).value();
          auto bc = pmet::wasserstein_distribution(d, b, c).value();
          auto ac = pmet::wasserstein_distribution(d, a, c).value();
          ASSERT_LE(ac, ab + bc + 1e-9);
        }
    for (auto& a : ss)
      for (auto& b : ss) {
        ASSERT_EQ(pmet::hausdorff(d, a, b), pmet::hausdorff(d, b, a));
        for (auto& c : ss)
          ASSERT_LE(pmet::hausdorff(d, a, c).value(),
                    pmet::hausdorff(d, a, b).value() + pmet::hausdorff(d, b, c).value() + 1e-9);
      }
  }
}

TEST(LiftingProperty, KantorovichBelowWasserstein) {
  std::mt19937_64 rng(24);
  for (int it = 0; it < 200; ++it) {
    const std::size_t n = 1 + rng() % 4;
    auto d = oracle::grid_metric(rng, n);
    Distribution p(oracle::grid_weights(rng, n, 3)), q(oracle::grid_weights(rng, n, 3));
    ASSERT_TRUE(pmet::approx_le(pmet::kantorovich_distribution(d, p, q), pmet::wasserstein_distribution(d, p, q)));
  }
}
