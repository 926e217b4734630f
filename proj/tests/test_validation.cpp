#include <gtest/gtest.h>

#include "telegraph/validation.hpp"

using namespace telegraph;

namespace {

const MotionParams kUnit{1, 1};

}  // namespace

TEST(Normalization, DampedPolyaAndSeries) {
  for (const auto& c : check_normalization(law_damped(0.3, 1, 1, kUnit, 1))) EXPECT_TRUE(c.passed) << c.name;
  for (const auto& c : check_normalization(law_polya(1, 1, 1, 1, 1, kUnit, 1))) EXPECT_TRUE(c.passed) << c.name;
  // a density that is off by a constant must fail
  const auto good = law_damped(0.3, 1, 1, kUnit, 1);
  const ProcessLaw bad(1, kUnit, 0.3, good.atoms(), [&](double x) { return good.parts(x); },
                       [&](double x) { return 1.01 * good.density(x); });
  EXPECT_FALSE(check_normalization(bad).front().passed);
}

TEST(Normalization, QuadratureFailureIsReported) {
  const auto good = law_damped(0.3, 1, 1, kUnit, 1);
  const ProcessLaw broken(1, kUnit, 0.3, good.atoms(), [&](double x) { return good.parts(x); },
                          [](double) { return NAN; });
  const auto c = check_normalization(broken).front();
  EXPECT_FALSE(c.passed);
  EXPECT_FALSE(c.detail.empty());
}

TEST(Empirical, MatchedAndNegativeControl) {
  const auto model = IntertimeModel::linear_rate(1, 1);
  const auto law = law_damped(0.3, 1, 1, kUnit, 1);
  const auto emp = estimate_law(TrialScheme::bernoulli(0.3), model, kUnit, 1, 200000, 50, 17);
  EXPECT_TRUE(check_empirical_vs_analytic(emp, law).passed);
  const auto wrong = estimate_law(TrialScheme::bernoulli(0.5), model, kUnit, 1, 200000, 50, 17);
  EXPECT_FALSE(check_empirical_vs_analytic(wrong, law).passed);
}

TEST(Empirical, SmallSampleStillPasses) {
  const auto law = law_damped(0.3, 1, 1, kUnit, 1);
  const auto emp = estimate_law(TrialScheme::bernoulli(0.3), IntertimeModel::linear_rate(1, 1), kUnit, 1, 1000, 20, 2);
  const auto r = compare_empirical(emp, law);
  EXPECT_TRUE(r.passed()) << r.bins_outside << ' ' << r.p_value;
}

TEST(Enumeration, Checks) {
  EXPECT_TRUE(check_enumeration(TrialScheme::bernoulli(0.37)).passed);
  EXPECT_TRUE(check_enumeration(TrialScheme::polya(2, 3, 1.5)).passed);
  EXPECT_THROW(enumerate_counts(TrialScheme::bernoulli(0.5), 0), domain_error);
}

TEST(Report, JsonShape) {
  ValidationReport rep;
  rep.add({"a", 1, 1, 0.1, true, "closed-form", "exact", ""});
  rep.add({"b", 1, NAN, 0.1, false, "quadrature", "failed", "why"});
  const auto j = rep.to_json();
  EXPECT_EQ(j["summary"]["passed"], 1);
  EXPECT_EQ(j["summary"]["failed"], 1);
  EXPECT_EQ(j["checks"][0]["provenance"], "closed-form");
  EXPECT_TRUE(j["checks"][1]["estimate"].is_null());
  EXPECT_FALSE(rep.ok());
}

TEST(DefaultSuite, PassesAndNegativeControlFails) {
  SuiteOptions opt;
  opt.n_paths = 100000;
  const auto ok = default_suite(TrialScheme::bernoulli(0.3), IntertimeModel::linear_rate(1, 1), kUnit, 1, opt);
  EXPECT_TRUE(ok.ok()) << ok.summary();
  opt.negative_control = true;
  const auto bad = default_suite(TrialScheme::bernoulli(0.3), IntertimeModel::linear_rate(1, 1), kUnit, 1, opt);
  EXPECT_FALSE(bad.ok());
}
