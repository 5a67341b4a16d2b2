// tests/augment_test.cc

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

#include "earshot/augment.h"
#include "earshot/error.h"
#include "earshot/features.h"
#include "test_util.h"

namespace earshot {
namespace {

constexpr int kRate = 16000;

double RmsOf(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s / double(x.size()));
}

TEST(MixAtSnr, NoiseGainMatchesHandExamples) {
  // Steady sine is active everywhere, so active RMS is the plain RMS.
  const auto speech = AudioClip::mono(testing::Sine(220.0, 0.5, kRate, 0.2), kRate);
  std::vector<double> n = testing::WhiteNoise(kRate, 1, 1.0);
  const double scale = RmsOf(speech.channel(0)) / RmsOf(std::span(n).first(speech.num_samples()));
  for (double& v : n) v *= scale;
  // Same length: the only crop is offset 0 and the noise RMS equals speech RMS.
  n.resize(speech.num_samples());
  const auto noise = AudioClip::mono(n, kRate);
  EXPECT_NEAR(mix_at_snr(speech, noise, 0.0).noise_gain, 1.0, 1e-12);
  EXPECT_NEAR(mix_at_snr(speech, noise, 20.0).noise_gain, 0.1, 1e-12);
  EXPECT_NEAR(mix_at_snr(speech, noise, -6.0).noise_gain, std::pow(10.0, 0.3), 1e-12);
}

TEST(MixAtSnr, MeasuredSnrAndMixtureIdentity) {
  const auto speech = AudioClip::mono(testing::FormantVowel(500, 1500, 2500, 140, 0.6, kRate, 2, 0.1), kRate);
  const auto noise = AudioClip::mono(testing::PinkNoise(3 * kRate, 8), kRate);
  for (double snr : {-5.0, 0.0, 12.5}) {
    const MixResult m = mix_at_snr(speech, noise, snr, 17);
    ASSERT_EQ(m.headroom_gain, 1.0);
    const auto mask = ActiveSampleMask(speech);
    const double measured =
        20.0 * std::log10(MaskedRms(speech.channel(0), mask) / RmsOf(m.scaled_noise.channel(0)));
    EXPECT_NEAR(measured, snr, 1e-9);
    for (std::size_t i = 0; i < speech.num_samples(); ++i) {
      ASSERT_EQ(m.mixture.channel(0)[i], speech.channel(0)[i] + m.scaled_noise.channel(0)[i]);
      ASSERT_EQ(m.scaled_noise.channel(0)[i], noise.channel(0)[m.noise_offset + i] * m.noise_gain);
    }
  }
}

TEST(MixAtSnr, SeededOffsetAndHeadroom) {
  const auto speech = AudioClip::mono(testing::Sine(300.0, 0.3, kRate, 0.9), kRate);
  const auto noise = AudioClip::mono(testing::WhiteNoise(5 * kRate, 3, 0.1), kRate);
  const MixResult a = mix_at_snr(speech, noise, -10.0, 5);
  const MixResult b = mix_at_snr(speech, noise, -10.0, 5);
  EXPECT_EQ(a.noise_offset, b.noise_offset);
  EXPECT_EQ(a.mixture, b.mixture);
  EXPECT_NE(mix_at_snr(speech, noise, -10.0, 6).noise_offset, a.noise_offset);
  EXPECT_LT(a.headroom_gain, 1.0);
  EXPECT_LE(a.mixture.peak(), 1.0);
  // Joint attenuation keeps the commanded ratio.
  EXPECT_NEAR(20.0 * std::log10(RmsOf(speech.channel(0)) * a.headroom_gain /
                                RmsOf(a.scaled_noise.channel(0))),
              -10.0, 1e-9);
}

TEST(MixAtSnr, RejectsBadInputs) {
  const auto speech = AudioClip::mono(testing::Sine(300.0, 0.3, kRate), kRate);
  const auto short_noise = AudioClip::mono(testing::WhiteNoise(100, 3), kRate);
  const auto other_rate = AudioClip::mono(testing::WhiteNoise(kRate, 3), 8000);
  const auto silent = AudioClip::mono(std::vector<double>(4000, 0.0), kRate);
  const auto noise = AudioClip::mono(testing::WhiteNoise(kRate, 3), kRate);
  EXPECT_THROW(mix_at_snr(speech, short_noise, 0.0), InvalidArgument);
  EXPECT_THROW(mix_at_snr(speech, other_rate, 0.0), InvalidArgument);
  EXPECT_THROW(mix_at_snr(speech, noise, INFINITY), InvalidArgument);
  try {
    mix_at_snr(silent, noise, 0.0);
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("silent speech"), std::string::npos);
  }
}

// Mean octave-band tilt over every frame.
double MeasuredTilt(const AudioClip& clip) {
  VoicingTrack tr = extract_f0(clip);
  tr.voiced.assign(tr.num_frames(), true);
  return *extract_spectral_tilt(clip, tr);
}

TEST(TiltBoost, ZeroIsIdentityAndLevelIsKept) {
  const int rate = 44100;
  const auto x = AudioClip::mono(testing::PinkNoise(rate, 4), rate);
  EXPECT_EQ(tilt_boost(x, 0.0), x);
  const auto y = tilt_boost(x, 4.0);
  const auto mask = ActiveSampleMask(x);
  EXPECT_NEAR(MaskedRms(y.channel(0), mask), MaskedRms(x.channel(0), mask), 1e-12);
}

TEST(TiltBoost, MonotoneAndApproximatelyAdditive) {
  const int rate = 44100;
  const auto x = AudioClip::mono(testing::PinkNoise(2 * rate, 6), rate);
  const double base = MeasuredTilt(x);
  double prev = 0.0;
  for (double b : {1.0, 3.0, 6.0, 9.0}) {
    const double d = MeasuredTilt(tilt_boost(x, b)) - base;
    EXPECT_GT(d, prev) << b;
    EXPECT_NEAR(d, b, 0.25 * b) << b;
    prev = d;
  }
  const double twice = MeasuredTilt(tilt_boost(tilt_boost(x, 3.0), 3.0)) - base;
  const double once = MeasuredTilt(tilt_boost(x, 6.0)) - base;
  EXPECT_NEAR(twice, once, 0.1);
}

TEST(TiltBoost, RejectsOutOfRange) {
  const auto x = AudioClip::mono(testing::PinkNoise(kRate, 4), kRate);
  EXPECT_THROW(tilt_boost(x, -1.0), InvalidArgument);
  EXPECT_THROW(tilt_boost(x, 12.5), InvalidArgument);
  EXPECT_NO_THROW(tilt_boost(x, kMaxTiltBoostDbPerOct));
}

TEST(DefaultBoost, ZeroAtHighSnrAndCapped) {
  EXPECT_EQ(DefaultBoost(30.0), 0.0);
  EXPECT_EQ(DefaultBoost(20.0), 0.0);
  EXPECT_NEAR(DefaultBoost(0.0), 3.0, 1e-12);
  EXPECT_EQ(DefaultBoost(-100.0), 6.0);
}

std::vector<NamedClip> Utterances(int n) {
  std::vector<NamedClip> out;
  for (int i = 0; i < n; ++i)
    out.push_back({"u" + std::to_string(i),
                   AudioClip::mono(testing::FormantVowel(450 + 20 * i, 1500, 2500, 120 + 5 * i, 0.4,
                                                         kRate, i, 0.1), kRate)});
  return out;
}

std::vector<NamedClip> Noises() {
  return {{"pink", AudioClip::mono(testing::PinkNoise(3 * kRate, 1), kRate)},
          {"white", AudioClip::mono(testing::WhiteNoise(3 * kRate, 2), kRate)}};
}

TEST(PseudoDataset, HighSnrTargetIsUntouched) {
  const auto utts = Utterances(2);
  const auto noise = Noises();
  const std::vector<double> grid{30.0};
  const auto pairs = make_pseudo_dataset(utts, noise, grid, nullptr, 1);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    EXPECT_EQ(pairs[i].boost_db_per_oct, 0.0);
    EXPECT_EQ(pairs[i].target, utts[i].clip);
    EXPECT_EQ(pairs[i].hearing.num_samples(), utts[i].clip.num_samples());
  }
}

TEST(PseudoDataset, DeterministicAcrossRunsThreadsAndSubsets) {
  const auto utts = Utterances(6);
  const auto noise = Noises();
  const std::vector<double> grid{-5, 0, 5, 10, 20};
  PseudoOptions one, four;
  four.threads = 4;
  const auto a = make_pseudo_dataset(utts, noise, grid, nullptr, 7, one);
  const auto b = make_pseudo_dataset(utts, noise, grid, nullptr, 7, four);
  const auto sub = make_pseudo_dataset(std::span(utts).subspan(3), noise, grid, nullptr, 7, one);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].hearing, b[i].hearing);
    EXPECT_EQ(a[i].target, b[i].target);
    EXPECT_EQ(a[i].snr_db, b[i].snr_db);
    EXPECT_EQ(a[i].noise_id, b[i].noise_id);
  }
  for (std::size_t i = 0; i < sub.size(); ++i) EXPECT_EQ(sub[i].hearing, a[i + 3].hearing);
  const auto c = make_pseudo_dataset(utts, noise, grid, nullptr, 8, one);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.size(); ++i) any_diff = any_diff || !(c[i].hearing == a[i].hearing);
  EXPECT_TRUE(any_diff);
}

TEST(PseudoDataset, PrependPriorLaysPreviousTurnOverNoise) {
  const auto utts = Utterances(3);
  const auto noise = Noises();
  const std::vector<double> grid{10.0};
  PseudoOptions opt;
  opt.prepend_prior = true;
  const auto pairs = make_pseudo_dataset(utts, noise, grid, nullptr, 2, opt);
  EXPECT_TRUE(pairs[0].prior_id.empty());
  EXPECT_EQ(pairs[1].prior_id, "u0");
  EXPECT_EQ(pairs[1].hearing.num_samples(),
            utts[0].clip.num_samples() + utts[1].clip.num_samples());
  const auto& p = pairs[1];
  const auto& src = noise[p.noise_id == "pink" ? 0 : 1].clip;
  for (std::size_t i = 0; i < p.hearing.num_samples(); ++i) {
    const double prior = i < utts[0].clip.num_samples() ? utts[0].clip.channel(0)[i] : 0.0;
    const double want =
        (src.channel(0)[p.noise_offset + i] * p.noise_gain + prior) * p.hearing_headroom_gain;
    ASSERT_NEAR(p.hearing.channel(0)[i], want, 1e-15);
  }
}

TEST(PseudoDataset, ErrorsNameTheUtterance) {
  auto utts = Utterances(2);
  utts[1].clip = AudioClip::mono(std::vector<double>(8000, 0.0), kRate);
  const std::vector<double> grid{0.0};
  try {
    make_pseudo_dataset(utts, Noises(), grid, nullptr, 1);
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("utterance 'u1'"), std::string::npos) << e.what();
  }
  const std::vector<NamedClip> tiny{{"tiny", AudioClip::mono(testing::WhiteNoise(10, 1), kRate)}};
  EXPECT_THROW(make_pseudo_dataset(Utterances(1), tiny, grid, nullptr, 1), InvalidArgument);
}

}  // namespace
}  // namespace earshot
