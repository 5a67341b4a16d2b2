// src/augment.cc

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

#include "earshot/augment.h"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "earshot/dsp.h"
#include "earshot/error.h"
#include "earshot/features.h"
#include "earshot/parallel.h"
#include "earshot/rng.h"
#include "earshot/vad.h"

namespace earshot {

namespace {

double DbToAmp(double db) { return std::pow(10.0, db / 20.0); }

// Gain that brings `peak` just under full scale, or 1.
double HeadroomGain(double peak) {
  return peak > 1.0 ? (1.0 - 1e-12) / peak : 1.0;
}

void Scale(std::vector<double>& x, double g) {
  if (g == 1.0) return;
  for (double& v : x) v *= g;
}

}  // namespace

std::vector<bool> ActiveSampleMask(const AudioClip& speech, const ActivityGate& gate) {
  RequireMono(speech, "activity gate");
  if (!(gate.margin_db > 0.0) || !(gate.floor_percentile >= 0.0 && gate.floor_percentile <= 100.0))
    throw InvalidArgument("activity gate: bad margin or percentile");
  if (speech.num_samples() == 0 || speech.peak() == 0.0)
    throw InvalidArgument("silent speech: no active frames");
  const FrameSpec spec = FrameSpec::Default(speech.sample_rate());
  const std::vector<double> energy = energy_contour(speech, spec);
  const double floor_db = Percentile(energy, gate.floor_percentile);
  const double loudest = *std::max_element(energy.begin(), energy.end());
  // Without margin_db of dynamic range above the floor there is nothing to
  // separate; the min() then drops the threshold below every frame.
  const double threshold = std::min(floor_db + gate.margin_db, loudest - gate.margin_db);

  const std::size_t n = speech.num_samples();
  std::vector<bool> mask(n, false);
  bool any = false;
  for (std::size_t k = 0; k < energy.size(); ++k) {
    if (energy[k] < threshold || energy[k] <= kEnergyFloorDb) continue;
    const std::size_t begin = k * spec.hop_length;
    const std::size_t end = std::min(n, begin + spec.hop_length);
    for (std::size_t i = begin; i < end; ++i) mask[i] = true;
    any = true;
  }
  if (!any) throw InvalidArgument("silent speech: no active frames");
  return mask;
}

double MaskedRms(std::span<const double> x, const std::vector<bool>& mask) {
  if (mask.size() != x.size()) throw InvalidArgument("MaskedRms: mask length mismatch");
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!mask[i]) continue;
    acc += x[i] * x[i];
    ++count;
  }
  return count ? std::sqrt(acc / count) : 0.0;
}

double Rms(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return std::sqrt(acc / x.size());
}

MixResult mix_at_snr(const AudioClip& speech, const AudioClip& noise, double snr_db,
                     std::uint64_t seed, const ActivityGate& gate) {
  RequireMono(speech, "mix_at_snr speech");
  RequireMono(noise, "mix_at_snr noise");
  if (!std::isfinite(snr_db)) throw InvalidArgument("mix_at_snr: snr must be finite");
  if (speech.sample_rate() != noise.sample_rate())
    throw InvalidArgument("mix_at_snr: sample rate mismatch (" +
                          std::to_string(speech.sample_rate()) + " vs " +
                          std::to_string(noise.sample_rate()) + ")");
  const std::size_t n = speech.num_samples();
  if (noise.num_samples() < n)
    throw InvalidArgument("mix_at_snr: noise shorter than speech (" +
                          std::to_string(noise.num_samples()) + " < " + std::to_string(n) +
                          " samples)");

  const std::vector<bool> mask = ActiveSampleMask(speech, gate);
  const double speech_rms = MaskedRms(speech.channel(0), mask);

  std::mt19937_64 rng(seed);
  const std::size_t offset = UniformIndex(rng, noise.num_samples() - n + 1);
  auto src = noise.channel(0).subspan(offset, n);
  std::vector<double> crop(src.begin(), src.end());
  const double noise_rms = Rms(crop);
  if (!(noise_rms > 0.0)) throw InvalidArgument("silent noise");

  const double gain = speech_rms / (noise_rms * DbToAmp(snr_db));
  Scale(crop, gain);
  std::vector<double> mix(n);
  auto s = speech.channel(0);
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mix[i] = s[i] + crop[i];
    peak = std::max(peak, std::abs(mix[i]));
  }
  const double headroom = HeadroomGain(peak);
  Scale(mix, headroom);
  Scale(crop, headroom);
  return MixResult{AudioClip::mono(std::move(mix), speech.sample_rate()),
                   AudioClip::mono(std::move(crop), speech.sample_rate()), gain, headroom,
                   offset};
}

std::vector<double> TiltShelfCorners(int sample_rate) {
  std::vector<double> corners;
  for (int k = -1; k <= 5; ++k) {
    const double fc = 250.0 * std::pow(2.0, k + 0.5);
    if (fc < 0.45 * sample_rate) corners.push_back(fc);
  }
  return corners;
}

AudioClip tilt_boost(const AudioClip& speech, double boost_db_per_oct, const ActivityGate& gate) {
  RequireMono(speech, "tilt_boost");
  if (!std::isfinite(boost_db_per_oct) || boost_db_per_oct < 0.0)
    throw InvalidArgument("tilt_boost: boost must be >= 0");
  if (boost_db_per_oct > kMaxTiltBoostDbPerOct)
    throw InvalidArgument("tilt_boost: boost above 12 dB/octave");
  if (boost_db_per_oct == 0.0 || speech.peak() == 0.0) return speech;

  const std::vector<bool> mask = ActiveSampleMask(speech, gate);
  const double before = MaskedRms(speech.channel(0), mask);
  auto in = speech.channel(0);
  std::vector<double> y(in.begin(), in.end());
  // Shelves one octave apart each add ~boost dB over their own octave.
  for (double fc : TiltShelfCorners(speech.sample_rate()))
    ShelfFilter(fc, boost_db_per_oct, speech.sample_rate()).Apply(y);
  const double after = MaskedRms(y, mask);
  if (after > 0.0) Scale(y, before / after);
  return AudioClip::mono(std::move(y), speech.sample_rate(), speech.source_path());
}

double DefaultBoost(double snr_db) {
  return std::clamp(std::max(0.0, 20.0 - snr_db) * 0.15, 0.0, 6.0);
}

namespace {

struct PseudoDraw {
  std::optional<AudioClip> hearing;
  double snr_db = 0.0;
  double boost_db_per_oct = 0.0;
  std::string noise_id;
  std::string prior_id;
  std::size_t noise_offset = 0;
  double noise_gain = 1.0;
  double hearing_headroom_gain = 1.0;
  double target_headroom_gain = 1.0;
};

PseudoPair MakePairUnchecked(std::span<const NamedClip> utterances, std::size_t index,
                             std::span<const NamedClip> noise_bank,
                             std::span<const double> snr_grid, const BoostMap& boost_map,
                             std::uint64_t seed, const PseudoOptions& options) {
  const NamedClip& utt = utterances[index];
  RequireMono(utt.clip, "pseudo utterance");
  const NamedClip* prior = (options.prepend_prior && index > 0) ? &utterances[index - 1] : nullptr;
  if (prior) {
    RequireMono(prior->clip, "pseudo prior utterance");
    if (prior->clip.sample_rate() != utt.clip.sample_rate())
      throw InvalidArgument("prior utterance '" + prior->id + "' has a different sample rate");
  }
  const std::size_t prior_len = prior ? prior->clip.num_samples() : 0;
  const std::size_t hearing_len = prior_len + utt.clip.num_samples();

  std::mt19937_64 rng(DeriveSeed(seed, utt.id));
  PseudoDraw pair;
  pair.snr_db = snr_grid[UniformIndex(rng, snr_grid.size())];

  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < noise_bank.size(); ++i)
    if (noise_bank[i].clip.num_samples() >= hearing_len) eligible.push_back(i);
  if (eligible.empty())
    throw InvalidArgument("no noise clip is long enough (" + std::to_string(hearing_len) +
                          " samples needed)");
  const NamedClip& noise = noise_bank[eligible[UniformIndex(rng, eligible.size())]];
  pair.noise_id = noise.id;
  const std::uint64_t mix_seed = rng();

  if (!prior) {
    MixResult mix = mix_at_snr(utt.clip, noise.clip, pair.snr_db, mix_seed, options.gate);
    pair.hearing = std::move(mix.scaled_noise);
    pair.noise_offset = mix.noise_offset;
    pair.noise_gain = mix.noise_gain;
    pair.hearing_headroom_gain = mix.headroom_gain;
  } else {
    // Noise level is still set against the target utterance; the prior
    // turn is laid over the first part of the crop.
    pair.prior_id = prior->id;
    RequireMono(noise.clip, "pseudo noise");
    if (noise.clip.sample_rate() != utt.clip.sample_rate())
      throw InvalidArgument("noise '" + noise.id + "' has a different sample rate");
    const std::vector<bool> mask = ActiveSampleMask(utt.clip, options.gate);
    const double speech_rms = MaskedRms(utt.clip.channel(0), mask);
    std::mt19937_64 crop_rng(mix_seed);
    pair.noise_offset = UniformIndex(crop_rng, noise.clip.num_samples() - hearing_len + 1);
    auto src = noise.clip.channel(0).subspan(pair.noise_offset, hearing_len);
    std::vector<double> h(src.begin(), src.end());
    const double noise_rms = Rms(h);
    if (!(noise_rms > 0.0)) throw InvalidArgument("silent noise");
    pair.noise_gain = speech_rms / (noise_rms * DbToAmp(pair.snr_db));
    Scale(h, pair.noise_gain);
    auto p = prior->clip.channel(0);
    double peak = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
      if (i < prior_len) h[i] += p[i];
      peak = std::max(peak, std::abs(h[i]));
    }
    pair.hearing_headroom_gain = HeadroomGain(peak);
    Scale(h, pair.hearing_headroom_gain);
    pair.hearing = AudioClip::mono(std::move(h), utt.clip.sample_rate());
  }

  pair.boost_db_per_oct = boost_map(pair.snr_db);
  AudioClip target = tilt_boost(utt.clip, pair.boost_db_per_oct, options.gate);
  pair.target_headroom_gain = HeadroomGain(target.peak());
  if (pair.target_headroom_gain != 1.0) {
    std::vector<double> t(target.channel(0).begin(), target.channel(0).end());
    Scale(t, pair.target_headroom_gain);
    target = AudioClip::mono(std::move(t), target.sample_rate(), target.source_path());
  }
  return PseudoPair{std::move(*pair.hearing),  std::move(target),   pair.snr_db,
                    pair.boost_db_per_oct,     utt.id,              pair.noise_id,
                    pair.prior_id,             pair.noise_offset,   pair.noise_gain,
                    pair.hearing_headroom_gain, pair.target_headroom_gain};
}

}  // namespace

PseudoPair MakePseudoPair(std::span<const NamedClip> utterances, std::size_t index,
                          std::span<const NamedClip> noise_bank,
                          std::span<const double> snr_grid, const BoostMap& boost_map,
                          std::uint64_t seed, const PseudoOptions& options) {
  if (index >= utterances.size()) throw InvalidArgument("MakePseudoPair: index out of range");
  if (noise_bank.empty()) throw InvalidArgument("pseudo dataset: empty noise bank");
  if (snr_grid.empty()) throw InvalidArgument("pseudo dataset: empty snr grid");
  for (double s : snr_grid)
    if (!std::isfinite(s)) throw InvalidArgument("pseudo dataset: snr grid must be finite");
  const BoostMap& map = boost_map ? boost_map : BoostMap(DefaultBoost);
  try {
    return MakePairUnchecked(utterances, index, noise_bank, snr_grid, map, seed, options);
  } catch (const InvalidArgument& e) {
    throw InvalidArgument("utterance '" + utterances[index].id + "': " + e.what());
  } catch (const Error& e) {
    throw Error("utterance '" + utterances[index].id + "': " + e.what());
  }
}

std::vector<PseudoPair> make_pseudo_dataset(std::span<const NamedClip> utterances,
                                            std::span<const NamedClip> noise_bank,
                                            std::span<const double> snr_grid,
                                            const BoostMap& boost_map, std::uint64_t seed,
                                            const PseudoOptions& options) {
  if (utterances.empty()) throw InvalidArgument("pseudo dataset: no utterances");
  std::vector<std::optional<PseudoPair>> slots(utterances.size());
  ParallelFor(utterances.size(), options.threads, [&](std::size_t i) {
    slots[i] = MakePseudoPair(utterances, i, noise_bank, snr_grid, boost_map, seed, options);
  });
  std::vector<PseudoPair> out;
  out.reserve(slots.size());
  for (auto& p : slots) out.push_back(std::move(*p));
  return out;
}

}  // namespace earshot
