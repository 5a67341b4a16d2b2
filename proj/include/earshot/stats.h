// include/earshot/stats.h

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

#ifndef EARSHOT_STATS_H_
#define EARSHOT_STATS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "earshot/corpus.h"
#include "earshot/features.h"

namespace earshot {

struct TestResult {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
  bool significant = false;  // p_value < alpha
};

struct CorrelationResult {
  double r = 0.0;
  std::size_t n = 0;
  double p_value = 1.0;
  bool significant = false;
};

// I_x(a, b), continued-fraction evaluation.
double RegularizedIncompleteBeta(double a, double b, double x);

// P(T <= t) for Student's t with `dof` degrees of freedom.
double StudentTCdf(double t, double dof);

// P(|T| >= |t|).
double StudentTTwoSidedP(double t, double dof);

// Two-sided Welch test of mean(a) - mean(b). Needs at least two finite
// values per sample. If both variances are zero the p-value is 1 for equal
// means and 0 otherwise (statistic 0 or +-inf).
TestResult welch_t_test(std::span<const double> a, std::span<const double> b,
                        double alpha = 0.05);

// Distribution-free check: the Welch statistic re-evaluated over random
// relabelings of the pooled sample. p = (exceedances + 1) / (resamples + 1).
TestResult permutation_test(std::span<const double> a, std::span<const double> b,
                            std::size_t resamples = 100000, std::uint64_t seed = 0,
                            double alpha = 0.05);

// Sample Pearson correlation with a two-sided t-based p-value. nullopt when
// either input is constant.
std::optional<CorrelationResult> pearson(std::span<const double> x,
                                         std::span<const double> y,
                                         double alpha = 0.05);

struct FeatureObservation {
  std::string speaker_id;
  EnvLabel label;
  std::optional<double> value;
};

struct LabelSummary {
  EnvLabel label;
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;
};

struct LabelComparison {
  EnvLabel from;
  EnvLabel to;
  double mean_difference = 0.0;  // mean(to) - mean(from)
  TestResult test;                // statistic > 0 means an increase
};

struct EnvEffectRow {
  std::string speaker_id;
  Feature feature;
  std::vector<LabelSummary> labels;  // only cells with data
  std::vector<LabelComparison> comparisons;
  std::size_t dropped_undefined = 0;
};

struct EnvEffectReport {
  double alpha = 0.05;
  std::vector<EnvEffectRow> rows;
  std::vector<std::string> notes;

  const EnvEffectRow* Find(const std::string& speaker, Feature feature) const;
};

// Per speaker: label means and Welch tests for quiet->moderate,
// moderate->noisy and quiet->noisy. Cells with fewer than two values are
// excluded and noted.
EnvEffectReport env_effect_report(std::span<const FeatureObservation> observations,
                                  Feature feature, double alpha = 0.05);

// Same over every utterance of a corpus that carries features, for each
// requested feature. Labels come from the utterance's session.
EnvEffectReport env_effect_report(const Corpus& corpus, std::span<const Feature> features,
                                  double alpha = 0.05);

struct EntrainmentObservation {
  std::string speaker_pair;
  EnvLabel label;
  std::optional<double> target;
  std::optional<double> previous;
};

struct EntrainmentRow {
  std::string speaker_pair;
  Feature feature;
  EnvLabel label;
  std::size_t n = 0;  // pairs with both values defined
  std::size_t dropped_undefined = 0;
  std::optional<CorrelationResult> result;  // nullopt when n < 3 or constant
};

// Pearson correlation of target against previous-interlocutor values,
// within each (speaker pair, env-label) group.
std::vector<EntrainmentRow> entrainment_report(
    std::span<const EntrainmentObservation> observations, Feature feature,
    double alpha = 0.05);

// Builds turn pairs per session and reports each requested feature. The
// speaker-pair key is the two speaker ids, sorted, joined by '-'.
std::vector<EntrainmentRow> entrainment_report(const Corpus& corpus,
                                               std::span<const Feature> features,
                                               double alpha = 0.05);

nlohmann::json ToJson(const EnvEffectReport& report);
std::string EnvEffectSummaryCsv(const EnvEffectReport& report);
std::string EnvEffectTestsCsv(const EnvEffectReport& report);
nlohmann::json ToJson(const std::vector<EntrainmentRow>& rows);
std::string EntrainmentCsv(const std::vector<EntrainmentRow>& rows);

}  // namespace earshot

#endif  // EARSHOT_STATS_H_
