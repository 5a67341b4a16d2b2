// src/stats.cc

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

#include "earshot/stats.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "earshot/error.h"
#include "earshot/rng.h"

namespace earshot {

using nlohmann::json;

namespace {

// Continued fraction for I_x(a, b) (modified Lentz).
double BetaContinuedFraction(double a, double b, double x) {
  constexpr int kMaxIter = 20000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

struct Moments {
  double mean = 0.0;
  double var = 0.0;  // unbiased
  std::size_t n = 0;
};

Moments ComputeMoments(std::span<const double> v) {
  Moments m;
  m.n = v.size();
  if (v.empty()) return m;
  m.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m.mean) * (x - m.mean);
  m.var = v.size() > 1 ? ss / static_cast<double>(v.size() - 1) : 0.0;
  return m;
}

void CheckSample(std::span<const double> v, const char* name) {
  if (v.size() < 2)
    throw InvalidArgument(std::string("welch_t_test: sample ") + name +
                          " needs at least 2 values, got " + std::to_string(v.size()));
  for (double x : v)
    if (!std::isfinite(x))
      throw InvalidArgument(std::string("welch_t_test: non-finite value in sample ") + name);
}

struct WelchCore {
  double statistic;
  double dof;
  double p_value;
};

WelchCore Welch(const Moments& a, const Moments& b) {
  const double va = a.var / static_cast<double>(a.n);
  const double vb = b.var / static_cast<double>(b.n);
  const double se2 = va + vb;
  const double diff = a.mean - b.mean;
  if (se2 == 0.0) {
    const double dof = static_cast<double>(a.n + b.n - 2);
    if (diff == 0.0) return {0.0, dof, 1.0};
    return {std::copysign(std::numeric_limits<double>::infinity(), diff), dof, 0.0};
  }
  const double t = diff / std::sqrt(se2);
  const double dof = se2 * se2 /
                     (va * va / static_cast<double>(a.n - 1) + vb * vb / static_cast<double>(b.n - 1));
  return {t, dof, StudentTTwoSidedP(t, dof)};
}

}  // namespace

double RegularizedIncompleteBeta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw InvalidArgument("RegularizedIncompleteBeta: a, b must be > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * BetaContinuedFraction(a, b, x) / a;
  return 1.0 - front * BetaContinuedFraction(b, a, 1.0 - x) / b;
}

double StudentTTwoSidedP(double t, double dof) {
  if (!(dof > 0.0)) throw InvalidArgument("StudentTTwoSidedP: dof must be > 0");
  if (std::isnan(t)) throw InvalidArgument("StudentTTwoSidedP: t is NaN");
  if (std::isinf(t)) return 0.0;
  const double x = dof / (dof + t * t);
  return std::clamp(RegularizedIncompleteBeta(0.5 * dof, 0.5, x), 0.0, 1.0);
}

double StudentTCdf(double t, double dof) {
  const double tail = 0.5 * StudentTTwoSidedP(t, dof);
  return t > 0.0 ? 1.0 - tail : tail;
}

TestResult welch_t_test(std::span<const double> a, std::span<const double> b, double alpha) {
  CheckSample(a, "a");
  CheckSample(b, "b");
  const WelchCore w = Welch(ComputeMoments(a), ComputeMoments(b));
  return {w.statistic, w.dof, w.p_value, w.p_value < alpha};
}

TestResult permutation_test(std::span<const double> a, std::span<const double> b,
                            std::size_t resamples, std::uint64_t seed, double alpha) {
  CheckSample(a, "a");
  CheckSample(b, "b");
  if (resamples == 0) throw InvalidArgument("permutation_test: resamples must be > 0");
  const WelchCore observed = Welch(ComputeMoments(a), ComputeMoments(b));
  const double threshold = std::abs(observed.statistic) * (1.0 - 1e-12);

  std::vector<double> pool(a.begin(), a.end());
  pool.insert(pool.end(), b.begin(), b.end());
  const std::size_t na = a.size();
  std::mt19937_64 rng(SplitMix64(seed));
  std::size_t exceed = 0;
  for (std::size_t r = 0; r < resamples; ++r) {
    // Partial Fisher-Yates: the first na slots become the relabeled sample a.
    for (std::size_t i = 0; i < na; ++i) {
      const std::size_t j = i + UniformIndex(rng, pool.size() - i);
      std::swap(pool[i], pool[j]);
    }
    const auto pa = std::span<const double>(pool).first(na);
    const auto pb = std::span<const double>(pool).subspan(na);
    const WelchCore w = Welch(ComputeMoments(pa), ComputeMoments(pb));
    if (std::abs(w.statistic) >= threshold) ++exceed;
  }
  const double p = static_cast<double>(exceed + 1) / static_cast<double>(resamples + 1);
  return {observed.statistic, observed.dof, p, p < alpha};
}

std::optional<CorrelationResult> pearson(std::span<const double> x, std::span<const double> y,
                                         double alpha) {
  if (x.size() != y.size())
    throw InvalidArgument("pearson: length mismatch (" + std::to_string(x.size()) + " vs " +
                          std::to_string(y.size()) + ")");
  if (x.size() < 3) throw InvalidArgument("pearson: need at least 3 pairs");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  CorrelationResult out;
  out.n = x.size();
  out.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double dof = static_cast<double>(out.n - 2);
  if (std::abs(out.r) >= 1.0) {
    out.p_value = 0.0;
  } else {
    const double t = out.r * std::sqrt(dof / (1.0 - out.r * out.r));
    out.p_value = StudentTTwoSidedP(t, dof);
  }
  out.significant = out.p_value < alpha;
  return out;
}

const EnvEffectRow* EnvEffectReport::Find(const std::string& speaker, Feature feature) const {
  for (const auto& row : rows)
    if (row.speaker_id == speaker && row.feature == feature) return &row;
  return nullptr;
}

namespace {

constexpr std::pair<EnvLabel, EnvLabel> kComparisons[] = {
    {EnvLabel::kQuiet, EnvLabel::kModerate},
    {EnvLabel::kModerate, EnvLabel::kNoisy},
    {EnvLabel::kQuiet, EnvLabel::kNoisy},
};

void AppendEnvEffect(std::span<const FeatureObservation> observations, Feature feature,
                     EnvEffectReport& report) {
  std::map<std::string, std::map<EnvLabel, std::vector<double>>> cells;
  std::map<std::string, std::size_t> dropped;
  for (const auto& o : observations) {
    auto& by_label = cells[o.speaker_id];
    if (o.value && std::isfinite(*o.value))
      by_label[o.label].push_back(*o.value);
    else
      ++dropped[o.speaker_id];
  }
  for (const auto& [speaker, by_label] : cells) {
    EnvEffectRow row;
    row.speaker_id = speaker;
    row.feature = feature;
    row.dropped_undefined = dropped[speaker];
    std::map<EnvLabel, bool> usable;
    for (EnvLabel label : kAllEnvLabels) {
      const auto it = by_label.find(label);
      const std::size_t n = it == by_label.end() ? 0 : it->second.size();
      if (n > 0) {
        const Moments m = ComputeMoments(it->second);
        row.labels.push_back({label, n, m.mean, std::sqrt(m.var)});
      }
      usable[label] = n >= 2;
      if (n < 2) {
        std::ostringstream note;
        note << "speaker " << speaker << ", " << FeatureName(feature) << ", "
             << EnvLabelName(label) << ": " << n
             << " utterance(s); comparisons with this label skipped";
        report.notes.push_back(note.str());
      }
    }
    for (const auto& [from, to] : kComparisons) {
      if (!usable[from] || !usable[to]) continue;
      const auto& vf = by_label.at(from);
      const auto& vt = by_label.at(to);
      LabelComparison c{from, to, 0.0, welch_t_test(vt, vf, report.alpha)};
      c.mean_difference = ComputeMoments(vt).mean - ComputeMoments(vf).mean;
      row.comparisons.push_back(c);
    }
    report.rows.push_back(std::move(row));
  }
}

std::string Num(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "" : (v > 0 ? "inf" : "-inf");
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

json JsonNum(double v) { return std::isfinite(v) ? json(v) : json(Num(v)); }

std::string PairKey(std::string a, std::string b) {
  if (b < a) std::swap(a, b);
  return a + "-" + b;
}

}  // namespace

EnvEffectReport env_effect_report(std::span<const FeatureObservation> observations,
                                  Feature feature, double alpha) {
  EnvEffectReport report;
  report.alpha = alpha;
  AppendEnvEffect(observations, feature, report);
  return report;
}

EnvEffectReport env_effect_report(const Corpus& corpus, std::span<const Feature> features,
                                  double alpha) {
  EnvEffectReport report;
  report.alpha = alpha;
  std::size_t unlabeled = 0;
  for (Feature feature : features) {
    std::vector<FeatureObservation> obs;
    for (const auto& u : corpus.utterances) {
      const SessionManifest* s = corpus.FindSession(u.session_id);
      if (s == nullptr) {
        ++unlabeled;
        continue;
      }
      obs.push_back({u.speaker_id, s->env_label,
                     u.features ? u.features->Get(feature) : std::nullopt});
    }
    AppendEnvEffect(obs, feature, report);
  }
  if (unlabeled > 0)
    report.notes.push_back(std::to_string(unlabeled / std::max<std::size_t>(features.size(), 1)) +
                           " utterance(s) without a session (no env-label) ignored");
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const EnvEffectRow& a, const EnvEffectRow& b) {
                     return std::tie(a.speaker_id, a.feature) < std::tie(b.speaker_id, b.feature);
                   });
  return report;
}

std::vector<EntrainmentRow> entrainment_report(
    std::span<const EntrainmentObservation> observations, Feature feature, double alpha) {
  std::map<std::pair<std::string, EnvLabel>, std::pair<std::vector<double>, std::vector<double>>>
      groups;
  std::map<std::pair<std::string, EnvLabel>, std::size_t> dropped;
  for (const auto& o : observations) {
    const auto key = std::make_pair(o.speaker_pair, o.label);
    auto& g = groups[key];
    if (o.target && o.previous && std::isfinite(*o.target) && std::isfinite(*o.previous)) {
      g.first.push_back(*o.target);
      g.second.push_back(*o.previous);
    } else {
      ++dropped[key];
    }
  }
  std::vector<EntrainmentRow> rows;
  for (const auto& [key, g] : groups) {
    EntrainmentRow row;
    row.speaker_pair = key.first;
    row.label = key.second;
    row.feature = feature;
    row.n = g.first.size();
    row.dropped_undefined = dropped[key];
    if (row.n >= 3) row.result = pearson(g.first, g.second, alpha);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<EntrainmentRow> entrainment_report(const Corpus& corpus,
                                               std::span<const Feature> features, double alpha) {
  std::vector<EntrainmentRow> rows;
  for (Feature feature : features) {
    std::vector<EntrainmentObservation> obs;
    for (const auto& s : corpus.sessions) {
      const auto utts = SessionUtterances(corpus, s.session_id);
      for (const TurnPair& p : turn_pairs(utts)) {
        const Utterance& t = utts[p.target];
        const Utterance& v = utts[p.previous];
        obs.push_back({PairKey(t.speaker_id, v.speaker_id), s.env_label,
                       t.features ? t.features->Get(feature) : std::nullopt,
                       v.features ? v.features->Get(feature) : std::nullopt});
      }
    }
    auto part = entrainment_report(obs, feature, alpha);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  std::stable_sort(rows.begin(), rows.end(), [](const EntrainmentRow& a, const EntrainmentRow& b) {
    return std::tie(a.speaker_pair, a.feature, a.label) <
           std::tie(b.speaker_pair, b.feature, b.label);
  });
  return rows;
}

json ToJson(const EnvEffectReport& report) {
  json rows = json::array();
  for (const auto& row : report.rows) {
    json labels = json::array();
    for (const auto& l : row.labels)
      labels.push_back({{"label", EnvLabelName(l.label)},
                        {"count", l.count},
                        {"mean", JsonNum(l.mean)},
                        {"stddev", JsonNum(l.stddev)}});
    json tests = json::array();
    for (const auto& c : row.comparisons)
      tests.push_back({{"from", EnvLabelName(c.from)},
                       {"to", EnvLabelName(c.to)},
                       {"mean_difference", JsonNum(c.mean_difference)},
                       {"statistic", JsonNum(c.test.statistic)},
                       {"dof", JsonNum(c.test.dof)},
                       {"p_value", JsonNum(c.test.p_value)},
                       {"significant", c.test.significant}});
    rows.push_back({{"speaker_id", row.speaker_id},
                    {"feature", FeatureName(row.feature)},
                    {"dropped_undefined", row.dropped_undefined},
                    {"labels", labels},
                    {"comparisons", tests}});
  }
  return {{"alpha", report.alpha}, {"rows", rows}, {"notes", report.notes}};
}

std::string EnvEffectSummaryCsv(const EnvEffectReport& report) {
  std::ostringstream out;
  out << "speaker_id,feature,label,count,mean,stddev,dropped_undefined\n";
  for (const auto& row : report.rows)
    for (const auto& l : row.labels)
      out << row.speaker_id << ',' << FeatureName(row.feature) << ',' << EnvLabelName(l.label)
          << ',' << l.count << ',' << Num(l.mean) << ',' << Num(l.stddev) << ','
          << row.dropped_undefined << '\n';
  return out.str();
}

std::string EnvEffectTestsCsv(const EnvEffectReport& report) {
  std::ostringstream out;
  out << "speaker_id,feature,from,to,mean_difference,statistic,dof,p_value,significant\n";
  for (const auto& row : report.rows)
    for (const auto& c : row.comparisons)
      out << row.speaker_id << ',' << FeatureName(row.feature) << ',' << EnvLabelName(c.from)
          << ',' << EnvLabelName(c.to) << ',' << Num(c.mean_difference) << ','
          << Num(c.test.statistic) << ',' << Num(c.test.dof) << ',' << Num(c.test.p_value) << ','
          << (c.test.significant ? "true" : "false") << '\n';
  return out.str();
}

json ToJson(const std::vector<EntrainmentRow>& rows) {
  json out = json::array();
  for (const auto& row : rows) {
    json j{{"speaker_pair", row.speaker_pair},
           {"feature", FeatureName(row.feature)},
           {"label", EnvLabelName(row.label)},
           {"n", row.n},
           {"dropped_undefined", row.dropped_undefined}};
    if (row.result) {
      j["r"] = row.result->r;
      j["p_value"] = row.result->p_value;
      j["significant"] = row.result->significant;
    } else {
      j["r"] = nullptr;
      j["p_value"] = nullptr;
      j["significant"] = nullptr;
    }
    out.push_back(j);
  }
  return out;
}

std::string EntrainmentCsv(const std::vector<EntrainmentRow>& rows) {
  std::ostringstream out;
  out << "speaker_pair,feature,label,n,r,p_value,significant,dropped_undefined\n";
  for (const auto& row : rows) {
    out << row.speaker_pair << ',' << FeatureName(row.feature) << ',' << EnvLabelName(row.label)
        << ',' << row.n << ',';
    if (row.result)
      out << Num(row.result->r) << ',' << Num(row.result->p_value) << ','
          << (row.result->significant ? "true" : "false");
    else
      out << ",,";
    out << ',' << row.dropped_undefined << '\n';
  }
  return out.str();
}

}  // namespace earshot
