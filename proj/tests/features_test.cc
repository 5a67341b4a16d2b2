// tests/features_test.cc

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

#include <gtest/gtest.h>

#include "earshot/error.h"
#include "earshot/features.h"
#include "earshot/fft.h"
#include "test_util.h"

namespace earshot {
namespace {

constexpr int kRate = 16000;

TEST(ExtractF0, SineMeanWithinHalfHertz) {
  for (double hz : {90.0, 150.0, 220.0, 350.0}) {
    const auto clip = AudioClip::mono(testing::Sine(hz, 0.6, kRate, 0.3), kRate);
    const VoicingTrack tr = extract_f0(clip);
    ASSERT_GT(tr.NumVoiced(), tr.num_frames() * 9 / 10) << hz;
    EXPECT_NEAR(*tr.MeanF0(), hz, 0.5) << hz;
  }
}

TEST(ExtractF0, RichHarmonicsGiveNoOctaveError) {
  const auto clip = AudioClip::mono(testing::Sawtooth(110.0, 0.6, kRate, 0.3), kRate);
  const VoicingTrack tr = extract_f0(clip);
  for (std::size_t k = 0; k < tr.num_frames(); ++k)
    if (tr.voiced[k]) EXPECT_NEAR(tr.f0_hz[k], 110.0, 3.0) << "frame " << k;
}

TEST(ExtractF0, SilenceAndNoiseAreUnvoiced) {
  const auto silent = AudioClip::mono(std::vector<double>(8000, 0.0), kRate);
  EXPECT_EQ(extract_f0(silent).NumVoiced(), 0u);
  EXPECT_FALSE(extract_f0(silent).MeanF0());
  const auto noise = AudioClip::mono(testing::WhiteNoise(16000, 4, 0.1), kRate);
  const VoicingTrack tr = extract_f0(noise);
  EXPECT_LT(tr.NumVoiced(), tr.num_frames() / 10);
}

TEST(ExtractF0, FrameGridMatchesDefaultSpec) {
  const auto clip = AudioClip::mono(testing::Sine(200.0, 0.1, kRate), kRate);
  const VoicingTrack tr = extract_f0(clip);
  EXPECT_EQ(tr.num_frames(), FrameSpec::Default(kRate).NumFrames(clip.num_samples()));
  EXPECT_EQ(tr.frame_times.size(), tr.num_frames());
  EXPECT_THROW(tr.CheckGrid(AudioClip::mono(std::vector<double>(10, 0.0), kRate)),
               InvalidArgument);
}

TEST(ExtractRms, ConstantHalfIsMinusSixDb) {
  const auto clip = AudioClip::mono(std::vector<double>(4000, 0.5), kRate);
  const VoicingTrack tr = extract_f0(clip);
  EXPECT_NEAR(*extract_rms(clip, tr, RmsMode::kWholeUtterance), 20.0 * std::log10(0.5), 1e-12);
  VoicingTrack all = tr;
  all.voiced.assign(all.num_frames(), true);
  EXPECT_NEAR(*extract_rms(clip, all), -6.0206, 1e-4);
}

TEST(ExtractRms, SineOverVoicedFrames) {
  const auto clip = AudioClip::mono(testing::Sine(250.0, 0.5, kRate, 0.4), kRate);
  const VoicingTrack tr = extract_f0(clip);
  EXPECT_NEAR(*extract_rms(clip, tr), 20.0 * std::log10(0.4 / std::sqrt(2.0)), 0.05);
  VoicingTrack none = tr;
  none.voiced.assign(none.num_frames(), false);
  EXPECT_FALSE(extract_rms(clip, none));
}

TEST(ExtractF1, FormantVowelWithin50Hz) {
  const int rate = 44100;
  for (double f1 : {350.0, 550.0, 750.0}) {
    const auto clip =
        AudioClip::mono(testing::FormantVowel(f1, 1700.0, 2700.0, 130.0, 0.5, rate, 1), rate);
    const auto got = compute_features(clip).f1_mean_hz;
    ASSERT_TRUE(got) << f1;
    EXPECT_NEAR(*got, f1, 50.0);
  }
}

TEST(ExtractF1, AutocorrelationMethodAlsoFindsLowFormant) {
  const int rate = 16000;
  const auto clip =
      AudioClip::mono(testing::FormantVowel(600.0, 1600.0, 2600.0, 110.0, 0.5, rate, 2), rate);
  F1Config cfg;
  cfg.method = LpcMethod::kAutocorrelation;
  const auto got = extract_f1(clip, extract_f0(clip), cfg);
  ASSERT_TRUE(got);
  EXPECT_NEAR(*got, 600.0, 60.0);
}

TEST(TiltOfBands, RecoversExactSlope) {
  const double centers[] = {250.0, 500.0, 1000.0, 2000.0, 4000.0};
  const FilterBank bank = OctaveBank(centers);
  std::vector<double> e;
  for (std::size_t b = 0; b < 5; ++b) e.push_back(std::pow(10.0, (-4.5 * double(b) + 7.0) / 10.0));
  EXPECT_NEAR(*TiltOfBands(e, bank), -4.5, 1e-12);
  EXPECT_FALSE(TiltOfBands({1.0, 0.0, 0.0, 0.0, 0.0}, bank));
}

TEST(SpectralTilt, FlatSpectrumMatchesBinCountOracle) {
  // Impulses spaced wider than a frame: every frame holding one has a flat
  // power spectrum, so each band's energy is proportional to its bin count.
  const int rate = 44100;
  const FrameSpec spec = FrameSpec::Default(rate);
  std::vector<double> x(rate, 0.0);
  for (std::size_t i = 600; i < x.size(); i += 3 * spec.frame_length) x[i] = 0.5;
  const auto clip = AudioClip::mono(x, rate);
  VoicingTrack tr = extract_f0(clip);
  for (std::size_t k = 0; k < tr.num_frames(); ++k) {
    const std::size_t s0 = k * spec.hop_length;
    bool hit = false;
    for (std::size_t i = s0 + 1; i < std::min(x.size(), s0 + spec.frame_length); ++i)
      hit = hit || x[i] != 0.0;
    tr.voiced[k] = hit;
  }
  ASSERT_GT(tr.NumVoiced(), 10u);

  const FilterBank bank = DefaultFilterBank();
  const double bin_hz = double(rate) / double(NextPowerOfTwo(spec.frame_length));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const Band& b : bank.bands) {
    int count = 0;
    for (int k = 0; k * bin_hz < b.high_hz; ++k) count += k * bin_hz >= b.low_hz;
    const double u = std::log2(b.center_hz), v = 10.0 * std::log10(double(count));
    sx += u;
    sy += v;
    sxx += u * u;
    sxy += u * v;
  }
  const double n = double(bank.bands.size());
  const double oracle = (sxy - sx * sy / n) / (sxx - sx * sx / n);
  EXPECT_NEAR(oracle, 10.0 * std::log10(2.0), 0.2);
  EXPECT_NEAR(*extract_spectral_tilt(clip, tr), oracle, 1e-9);
}

TEST(SpectralTilt, ScaleInvariant) {
  const int rate = 44100;
  const auto x = testing::FormantVowel(500.0, 1500.0, 2500.0, 120.0, 0.4, rate, 3);
  std::vector<double> y(x);
  for (double& v : y) v *= 7.0;
  const auto a = compute_features(AudioClip::mono(x, rate));
  const auto b = compute_features(AudioClip::mono(y, rate));
  EXPECT_NEAR(*a.spectral_tilt_db_per_oct, *b.spectral_tilt_db_per_oct, 1e-9);
  EXPECT_NEAR(*b.rms_db - *a.rms_db, 20.0 * std::log10(7.0), 1e-9);
  EXPECT_EQ(a.voiced_frame_count, b.voiced_frame_count);
}

TEST(EnergyContour, ConstantAndSilence) {
  std::vector<double> x(1600, 0.5);
  x.resize(3200, 0.0);
  const auto e = energy_contour(AudioClip::mono(x, kRate), FrameSpec::Default(kRate));
  EXPECT_NEAR(e[0], -6.0206, 1e-4);
  EXPECT_DOUBLE_EQ(e.back(), kEnergyFloorDb);
}

TEST(ComputeFeatures, SilenceGivesNoValues) {
  const auto f = compute_features(AudioClip::mono(std::vector<double>(8000, 0.0), kRate));
  EXPECT_EQ(f.voiced_frame_count, 0u);
  EXPECT_FALSE(f.rms_db || f.f0_mean_hz || f.f1_mean_hz || f.spectral_tilt_db_per_oct);
}

TEST(ComputeFeatures, RejectsStereoAndTooShort) {
  EXPECT_THROW(compute_features(AudioClip({{0.1}, {0.1}}, 44100)), InvalidArgument);
  EXPECT_THROW(compute_features(AudioClip::mono({0.1, 0.2}, 44100)), InvalidArgument);
}

TEST(Feature, NamesRoundTrip) {
  for (Feature f : kAllFeatures) EXPECT_EQ(ParseFeature(FeatureName(f)), f);
  EXPECT_THROW(ParseFeature("loudness"), InvalidArgument);
}

}  // namespace
}  // namespace earshot
