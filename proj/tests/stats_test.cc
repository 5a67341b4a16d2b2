// tests/stats_test.cc

// Copyright 2026  The earshot Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "earshot/error.h"
#include "earshot/stats.h"
#include "test_util.h"

namespace earshot {
namespace {

// Composite Simpson integral of the t density from 0 to |t|.
double TCdfQuadrature(double t, double dof) {
  const double c = std::exp(std::lgamma(0.5 * (dof + 1)) - std::lgamma(0.5 * dof)) /
                   std::sqrt(dof * testing::kPi);
  const auto pdf = [&](double x) { return c * std::pow(1.0 + x * x / dof, -0.5 * (dof + 1)); };
  const int n = 20000;
  const double h = std::abs(t) / n;
  double s = pdf(0.0) + pdf(std::abs(t));
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * pdf(i * h);
  const double half = s * h / 3.0;
  return t >= 0 ? 0.5 + half : 0.5 - half;
}

TEST(StudentT, CdfMatchesQuadrature) {
  for (double dof : {1.0, 2.5, 4.0, 9.3, 30.0, 200.0})
    for (double t : {-6.0, -2.2, -0.4, 0.0, 0.7, 1.96, 4.5})
      EXPECT_NEAR(StudentTCdf(t, dof), TCdfQuadrature(t, dof), 1e-9) << t << " " << dof;
}

TEST(StudentT, ClosedFormsAndReferenceValues) {
  EXPECT_NEAR(StudentTCdf(1.0, 1.0), 0.75, 1e-14);  // Cauchy
  for (double t : {-3.0, 0.4, 2.0})
    EXPECT_NEAR(StudentTCdf(t, 2.0), 0.5 + t / (2.0 * std::sqrt(2.0 + t * t)), 1e-13);
  // Reference values from an independent statistics library.
  EXPECT_NEAR(StudentTCdf(0.5, 3), 0.6742760175759246, 1e-12);
  EXPECT_NEAR(StudentTCdf(2.1, 7.5), 0.9643814642709609, 1e-12);
  EXPECT_NEAR(StudentTCdf(-1.3, 15), 0.10661166055663134, 1e-12);
  EXPECT_NEAR(StudentTCdf(3.7, 40), 0.9996757360398613, 1e-12);
  EXPECT_THROW(StudentTCdf(1.0, 0.0), InvalidArgument);
}

TEST(RegularizedIncompleteBeta, SymmetryAndUniformCase) {
  EXPECT_NEAR(RegularizedIncompleteBeta(1.0, 1.0, 0.3), 0.3, 1e-14);
  EXPECT_NEAR(RegularizedIncompleteBeta(2.5, 4.0, 0.2) + RegularizedIncompleteBeta(4.0, 2.5, 0.8),
              1.0, 1e-13);
  EXPECT_EQ(RegularizedIncompleteBeta(2, 3, 0.0), 0.0);
  EXPECT_EQ(RegularizedIncompleteBeta(2, 3, 1.0), 1.0);
}

TEST(WelchTTest, ReferenceExample) {
  const std::vector<double> a{4.1, 5.3, 6.2, 5.9, 4.8, 5.5}, b{6.4, 7.1, 5.8, 7.9, 6.6, 8.2, 7.3};
  const TestResult r = welch_t_test(a, b);
  EXPECT_NEAR(r.statistic, -3.9071269528441257, 1e-12);
  EXPECT_NEAR(r.dof, 10.956797725694612, 1e-10);
  EXPECT_NEAR(r.p_value, 0.0024644197670079682, 1e-12);
  EXPECT_TRUE(r.significant);
  EXPECT_NEAR(welch_t_test(b, a).statistic, -r.statistic, 1e-15);
}

TEST(WelchTTest, DegenerateAndInvalidSamples) {
  const std::vector<double> c{2, 2, 2}, d{3, 3}, one{1.0};
  EXPECT_EQ(welch_t_test(c, c).p_value, 1.0);
  EXPECT_EQ(welch_t_test(d, c).p_value, 0.0);
  EXPECT_GT(welch_t_test(d, c).statistic, 0.0);
  EXPECT_THROW(welch_t_test(one, c), InvalidArgument);
  const std::vector<double> bad{1.0, NAN};
  EXPECT_THROW(welch_t_test(bad, c), InvalidArgument);
}

TEST(PermutationTest, AgreesWithWelchAndIsSeeded) {
  const std::vector<double> a{4.1, 5.3, 6.2, 5.9, 4.8, 5.5}, b{6.4, 7.1, 5.8, 7.9, 6.6, 8.2, 7.3};
  const TestResult p1 = permutation_test(a, b, 20000, 3);
  EXPECT_NEAR(p1.p_value, welch_t_test(a, b).p_value, 0.01);
  EXPECT_EQ(p1.p_value, permutation_test(a, b, 20000, 3).p_value);
}

double DirectPearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

TEST(Pearson, MatchesDirectFormulaAndReference) {
  const std::vector<double> x{1.2, 2.3, 2.9, 4.1, 5.2, 5.8}, y{2.0, 2.9, 3.4, 4.9, 5.1, 7.0};
  const auto r = pearson(x, y);
  ASSERT_TRUE(r);
  EXPECT_NEAR(r->r, DirectPearson(x, y), 1e-13);
  EXPECT_NEAR(r->r, 0.9709862516558678, 1e-13);
  EXPECT_NEAR(r->p_value, 0.0012504845377052886, 1e-12);
  EXPECT_EQ(r->n, 6u);
}

TEST(Pearson, PerfectConstantAndInvalid) {
  const std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9}, k{1, 1, 1, 1};
  EXPECT_EQ(pearson(x, y)->r, 1.0);
  EXPECT_EQ(pearson(x, y)->p_value, 0.0);
  EXPECT_FALSE(pearson(x, k));
  EXPECT_THROW(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2}), InvalidArgument);
  EXPECT_THROW(pearson(x, std::vector<double>{1, 2, 3}), InvalidArgument);
}

std::vector<FeatureObservation> Cells(const std::string& spk, EnvLabel label,
                                      std::vector<double> values) {
  std::vector<FeatureObservation> out;
  for (double v : values) out.push_back({spk, label, v});
  return out;
}

TEST(EnvEffectReport, DirectionCountsAndSkippedCells) {
  std::vector<FeatureObservation> obs;
  for (auto part : {Cells("a", EnvLabel::kQuiet, {500, 510, 495, 505}),
                    Cells("a", EnvLabel::kModerate, {520, 515, 525}),
                    Cells("a", EnvLabel::kNoisy, {600, 610, 590, 605}),
                    Cells("b", EnvLabel::kQuiet, {1.0, 2.0}), Cells("b", EnvLabel::kNoisy, {3.0})})
    obs.insert(obs.end(), part.begin(), part.end());
  obs.push_back({"a", EnvLabel::kNoisy, std::nullopt});
  const EnvEffectReport rep = env_effect_report(obs, Feature::kF1);
  const EnvEffectRow* a = rep.Find("a", Feature::kF1);
  ASSERT_NE(a, nullptr);
  EXPECT_EQ(a->dropped_undefined, 1u);
  ASSERT_EQ(a->comparisons.size(), 3u);
  const auto& qn = a->comparisons[2];
  EXPECT_EQ(qn.from, EnvLabel::kQuiet);
  EXPECT_EQ(qn.to, EnvLabel::kNoisy);
  EXPECT_NEAR(qn.mean_difference, 601.25 - 502.5, 1e-12);
  EXPECT_TRUE(qn.test.significant);
  EXPECT_GT(qn.test.statistic, 0.0);

  const EnvEffectRow* b = rep.Find("b", Feature::kF1);
  ASSERT_NE(b, nullptr);
  EXPECT_TRUE(b->comparisons.empty());
  EXPECT_EQ(b->labels.size(), 2u);
  EXPECT_FALSE(rep.notes.empty());
  EXPECT_NE(EnvEffectTestsCsv(rep).find("a,f1,quiet,noisy,98.75,"), std::string::npos);
  EXPECT_EQ(ToJson(rep)["rows"].size(), 2u);
}

TEST(EntrainmentReport, GroupsByPairAndLabel) {
  std::vector<EntrainmentObservation> obs;
  for (int i = 0; i < 10; ++i) {
    obs.push_back({"s1-s2", EnvLabel::kNoisy, 2.0 * i + 1.0, double(i)});
    obs.push_back({"s1-s2", EnvLabel::kQuiet, double(i % 3), double(i)});
  }
  obs.push_back({"s1-s2", EnvLabel::kNoisy, std::nullopt, 1.0});
  obs.push_back({"s3-s4", EnvLabel::kQuiet, 1.0, 2.0});
  const auto rows = entrainment_report(obs, Feature::kRms);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) {
    if (r.speaker_pair == "s3-s4") {
      EXPECT_FALSE(r.result);
      continue;
    }
    ASSERT_TRUE(r.result);
    if (r.label == EnvLabel::kNoisy) {
      EXPECT_EQ(r.n, 10u);
      EXPECT_EQ(r.dropped_undefined, 1u);
      EXPECT_NEAR(r.result->r, 1.0, 1e-15);
    }
  }
  EXPECT_NE(EntrainmentCsv(rows).find("speaker_pair,feature,label,n,r"), std::string::npos);
}

}  // namespace
}  // namespace earshot
