#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "telegraph/rng.hpp"
#include "telegraph/trial_schemes.hpp"
#include "telegraph/validation.hpp"

using namespace telegraph;

TEST(Philox, KnownAnswer) {
  const auto out = Philox4x32::generate({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out[0], 0x6627e8d5u);
  EXPECT_EQ(out[1], 0xe169c58du);
  EXPECT_EQ(out[2], 0xbc57ac4cu);
  EXPECT_EQ(out[3], 0x9b00dbd8u);
  const auto pi = Philox4x32::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(pi[0], 0xd16cfe09u);
  EXPECT_EQ(pi[1], 0x94fdccebu);
  EXPECT_EQ(pi[2], 0x5001e420u);
  EXPECT_EQ(pi[3], 0x24126ea1u);
}

TEST(RandomStream, DeterministicAndDistinct) {
  RandomStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    EXPECT_NE(x, c());
    EXPECT_NE(x, d());
    seen.insert(x);
  }
  EXPECT_EQ(seen.size(), 100u);
  auto s1 = a.split(3), s2 = b.split(3);
  EXPECT_EQ(s1(), s2());
}

TEST(RandomStream, UniformMoments) {
  RandomStream r(1, 0);
  const int n = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    s += u;
    s2 += u * u;
  }
  EXPECT_NEAR(s / n, 0.5, 3 * std::sqrt(1.0 / 12 / n));
  EXPECT_NEAR(s2 / n, 1.0 / 3, 0.003);
}

TEST(RandomStream, GammaMean) {
  RandomStream r(5, 1);
  for (double shape : {0.5, 1.0, 3.5}) {
    const int n = 200000;
    double s = 0;
    for (int i = 0; i < n; ++i) s += r.gamma(shape, 2.0);
    const double sd = std::sqrt(shape) / 2.0;
    EXPECT_NEAR(s / n, shape / 2.0, 3 * sd / std::sqrt(n));
  }
}

TEST(TrialScheme, Construction) {
  EXPECT_THROW(TrialScheme::bernoulli(0.0), domain_error);
  EXPECT_THROW(TrialScheme::bernoulli(1.5), domain_error);
  EXPECT_NO_THROW(TrialScheme::bernoulli(1.0));
  EXPECT_THROW(TrialScheme::polya(1, 1, 0), domain_error);
  EXPECT_THROW(TrialScheme::polya(-1, 1, 1), domain_error);
  const auto u = TrialScheme::polya(2, 3, 1.5);
  EXPECT_DOUBLE_EQ(u.forward_probability(), 0.4);
  EXPECT_DOUBLE_EQ(u.pi_A(), 3.5 / 6.5);
  EXPECT_DOUBLE_EQ(u.mirrored().forward_probability(), 0.6);
}

TEST(NextSuccess, Examples) {
  auto st = TrialState::start(TrialScheme::bernoulli(0.3));
  EXPECT_EQ(next_success_prob(st.advanced(1).advanced(0)), 0.3);
  auto u = TrialState::start(TrialScheme::polya(1, 1, 1));
  EXPECT_DOUBLE_EQ(next_success_prob(u.advanced(1)), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(next_success_prob(TrialState::start(TrialScheme::polya(2, 3, 2))), 0.4);
}

TEST(SampleTrial, DegenerateAndEmpirical) {
  RandomStream r(9, 0);
  auto st = TrialState::start(TrialScheme::bernoulli(1.0));
  for (int i = 0; i < 1000; ++i) {
    auto [x, next] = sample_trial(st, r);
    EXPECT_EQ(x, 1);
    st = next;
  }
  // X_2 given X_1 = 1 in the b = r = A = 1 urn
  const auto first = TrialState::start(TrialScheme::polya(1, 1, 1)).advanced(1);
  const int n = 1000000;
  int ones = 0;
  for (int i = 0; i < n; ++i) {
    RandomStream ri(11, i);
    ones += sample_trial(first, ri).first;
  }
  EXPECT_NEAR(static_cast<double>(ones) / n, 2.0 / 3.0, 3 * std::sqrt(2.0 / 9.0 / n));
}

TEST(CountDist, Examples) {
  const auto b = count_dist(TrialScheme::bernoulli(0.5), 3, Direction::forward);
  EXPECT_NEAR(b.pmf[0], 0.25, 1e-15);
  EXPECT_NEAR(b.pmf[1], 0.5, 1e-15);
  EXPECT_NEAR(b.pmf[2], 0.25, 1e-15);
  const auto u = count_dist(TrialScheme::polya(1, 1, 1), 2, Direction::forward);
  EXPECT_NEAR(u.pmf[0], 1.0 / 3, 1e-15);
  EXPECT_NEAR(u.pmf[1], 2.0 / 3, 1e-15);
  for (auto s : {TrialScheme::bernoulli(0.2), TrialScheme::polya(2, 3, 1.5)})
    for (Direction y : {Direction::forward, Direction::backward}) {
      const auto one = count_dist(s, 1, y);
      ASSERT_EQ(one.pmf.size(), 1u);
      EXPECT_NEAR(one.pmf[0], 1.0, 1e-15);
    }
}

TEST(JointCount, FirstStep) {
  EXPECT_NEAR(joint_count_velocity(TrialScheme::bernoulli(0.37), 1, 0, Direction::forward, Direction::forward), 0.37,
              1e-15);
  const double b = 2, r = 3, A = 1.5;
  EXPECT_NEAR(joint_count_velocity(TrialScheme::polya(b, r, A), 1, 0, Direction::forward, Direction::forward),
              (b + A) / (b + r + A), 1e-15);
  EXPECT_NEAR(joint_count_velocity(TrialScheme::polya(b, r, A), 1, 0, Direction::backward, Direction::forward),
              b / (b + r + A), 1e-15);
  EXPECT_THROW(joint_count_velocity(TrialScheme::bernoulli(0.5), 3, 3, Direction::forward, Direction::forward),
               domain_error);
}

TEST(JointCount, SumsAndMarginals) {
  for (auto s : {TrialScheme::bernoulli(0.37), TrialScheme::polya(2, 3, 1.5), TrialScheme::polya(0.3, 4, 0.7)})
    for (Direction y : {Direction::forward, Direction::backward})
      for (unsigned k = 1; k <= 12; ++k) {
        const auto cd = count_dist(s, k, y);
        double total = 0;
        for (unsigned j = 0; j < k; ++j) {
          const double f = joint_count_velocity(s, k, j, y, Direction::forward);
          const double b = joint_count_velocity(s, k, j, y, Direction::backward);
          EXPECT_NEAR(f + b, cd.pmf[j], 1e-12);
          total += f + b;
        }
        EXPECT_NEAR(total, 1.0, 1e-12);
      }
}

TEST(JointCount, BernoulliLimitOfUrn) {
  const double p = 0.35, A = 1e-8;
  const auto u = TrialScheme::polya(p, 1 - p, A);
  const auto b = TrialScheme::bernoulli(p);
  for (Direction y : {Direction::forward, Direction::backward})
    for (unsigned k = 1; k <= 6; ++k)
      for (unsigned j = 0; j < k; ++j)
        for (Direction z : {Direction::forward, Direction::backward})
          EXPECT_NEAR(joint_count_velocity(u, k, j, y, z), joint_count_velocity(b, k, j, y, z), 1e-5);
}

TEST(Enumeration, BothSchemes) {
  for (auto s : {TrialScheme::bernoulli(0.37), TrialScheme::polya(2, 3, 1.5), TrialScheme::polya(1, 1, 1)}) {
    const auto r = enumerate_counts(s, 10);
    EXPECT_LE(r.max_error, 1e-12);
    EXPECT_LE(r.max_sum_error, 1e-12);
    EXPECT_TRUE(check_enumeration(s).passed);
  }
}

TEST(Enumeration, ExchangeabilityWitness) {
  const double b = 2, r = 3, A = 1.5;
  const auto s = TrialScheme::polya(b, r, A);
  // P{X_2 = 1 | X_1 = 1} by enumerating one step
  EXPECT_NEAR(joint_count_velocity(s, 1, 0, Direction::forward, Direction::forward), s.pi_A(), 1e-15);
  // and by exchangeability the same for X_3 given X_1 = 1
  double p3 = 0;
  for (unsigned j = 0; j < 2; ++j) p3 += joint_count_velocity(s, 2, j, Direction::forward, Direction::forward);
  EXPECT_NEAR(p3, s.pi_A(), 1e-14);
}
