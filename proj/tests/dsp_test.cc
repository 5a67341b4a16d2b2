// tests/dsp_test.cc

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
#include <complex>
#include <random>

#include <gtest/gtest.h>

#include "earshot/dsp.h"
#include "earshot/error.h"
#include "earshot/fft.h"
#include "test_util.h"

namespace earshot {
namespace {

using testing::kPi;

std::vector<std::complex<double>> NaiveDft(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n / 2 + 1);
  for (std::size_t k = 0; k < out.size(); ++k)
    for (std::size_t t = 0; t < n; ++t)
      out[k] += x[t] * std::polar(1.0, -2.0 * kPi * double(k * t % n) / double(n));
  return out;
}

TEST(Fft, MatchesNaiveDft) {
  for (std::size_t n : {2u, 4u, 8u, 64u, 512u}) {
    const auto x = testing::WhiteNoise(n, n, 1.0);
    std::vector<std::complex<double>> got(n / 2 + 1);
    GetFftPlan(n).Forward(x, got);
    const auto want = NaiveDft(x);
    for (std::size_t k = 0; k < got.size(); ++k)
      EXPECT_LT(std::abs(got[k] - want[k]), 1e-10 * double(n)) << "n=" << n << " k=" << k;
  }
}

TEST(Fft, InverseRoundTrip) {
  const auto x = testing::WhiteNoise(1024, 5, 1.0);
  const FftPlan& plan = GetFftPlan(1024);
  std::vector<std::complex<double>> spec(plan.num_bins());
  std::vector<double> back(1024);
  plan.Forward(x, spec);
  plan.Inverse(spec, back);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(back[i], x[i], 1e-12);
}

TEST(Fft, RejectsNonPowerOfTwo) {
  EXPECT_THROW(FftPlan(12), InvalidArgument);
  EXPECT_EQ(NextPowerOfTwo(1000), 1024u);
  EXPECT_EQ(NextPowerOfTwo(1024), 1024u);
}

TEST(FastConvolve, MatchesDirectSumForManyShapes) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> len(1, 3000);
  for (int trial = 0; trial < 40; ++trial) {
    const auto a = testing::WhiteNoise(len(rng), rng(), 1.0);
    const auto b = testing::WhiteNoise(len(rng) / 4 + 1, rng(), 1.0);
    const auto got = fast_convolve(a, b);
    const auto want = testing::NaiveConvolve(a, b);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) ASSERT_NEAR(got[i], want[i], 1e-9);
  }
}

TEST(FastConvolve, RejectsEmptyInput) {
  const std::vector<double> a{1.0, 2.0}, none;
  EXPECT_THROW(fast_convolve(a, none), InvalidArgument);
  EXPECT_THROW(fast_convolve(none, a), InvalidArgument);
}

TEST(Frames, CountPaddingAndWindow) {
  const FrameSpec spec{4, 2, Window::kRectangular};
  const auto f = frames(AudioClip::mono({1, 2, 3, 4, 5}, 8000), spec);
  ASSERT_EQ(f.size(), 3u);
  EXPECT_EQ(f[0], (std::vector<double>{1, 2, 3, 4}));
  EXPECT_EQ(f[1], (std::vector<double>{3, 4, 5, 0}));
  EXPECT_EQ(f[2], (std::vector<double>{5, 0, 0, 0}));
  EXPECT_TRUE(frames(AudioClip::mono({}, 8000), spec).empty());
}

TEST(Frames, HannWindowIsApplied) {
  const FrameSpec spec{8, 8, Window::kHann};
  const auto w = MakeWindow(Window::kHann, 8);
  const auto f = frames(AudioClip::mono(std::vector<double>(8, 2.0), 8000), spec);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_DOUBLE_EQ(f[0][i], 2.0 * w[i]);
  EXPECT_DOUBLE_EQ(w[0], 0.0);
}

TEST(Frames, DefaultIs25msOn5ms) {
  const FrameSpec spec = FrameSpec::Default(16000);
  EXPECT_EQ(spec.frame_length, 400u);
  EXPECT_EQ(spec.hop_length, 80u);
  EXPECT_THROW(frames(AudioClip({{0.0}, {0.0}}, 16000), spec), InvalidArgument);
}

// Steady-state gain of a sine through the filter, measured on the output.
double MeasuredGainDb(const ShelfFilter& f, double hz, int rate) {
  auto x = testing::Sine(hz, 1.0, rate, 0.5);
  const std::vector<double> in(x);
  f.Apply(x);
  const std::size_t skip = x.size() / 2;
  double ein = 0.0, eout = 0.0;
  for (std::size_t i = skip; i < x.size(); ++i) {
    ein += in[i] * in[i];
    eout += x[i] * x[i];
  }
  return 10.0 * std::log10(eout / ein);
}

TEST(ShelfFilter, DcUnityNyquistFullGainCornerHalfGain) {
  const int rate = 48000;
  const ShelfFilter f(1000.0, 9.0, rate);
  EXPECT_NEAR(f.ResponseDb(0.0), 0.0, 1e-9);
  EXPECT_NEAR(f.ResponseDb(rate / 2.0), 9.0, 1e-9);
  EXPECT_NEAR(f.ResponseDb(1000.0), 4.5, 1e-9);
  for (double hz : {100.0, 1000.0, 5000.0})
    EXPECT_NEAR(MeasuredGainDb(f, hz, rate), f.ResponseDb(hz), 0.02) << hz;
}

TEST(ShelfFilter, RejectsCornerOutsideBand) {
  EXPECT_THROW(ShelfFilter(0.0, 3.0, 16000), InvalidArgument);
  EXPECT_THROW(ShelfFilter(8000.0, 3.0, 16000), InvalidArgument);
  EXPECT_THROW(ShelfFilter(1000.0, NAN, 16000), InvalidArgument);
}

TEST(FilterBank, OctaveEdgesAndValidation) {
  const FilterBank bank = DefaultFilterBank();
  ASSERT_EQ(bank.bands.size(), 6u);
  EXPECT_NEAR(bank.bands[2].low_hz, 1000.0 / std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(bank.bands[2].high_hz, 1000.0 * std::sqrt(2.0), 1e-9);
  EXPECT_NO_THROW(bank.Validate(44100));
  EXPECT_THROW(bank.Validate(16000), InvalidArgument);
  EXPECT_EQ(DefaultFilterBank(44100).bands.size(), 6u);
  EXPECT_EQ(DefaultFilterBank(16000).bands.size(), 5u);
  EXPECT_EQ(DefaultFilterBank(8000).bands.size(), 4u);
  EXPECT_NO_THROW(DefaultFilterBank(16000).Validate(16000));
  FilterBank bad{{{500, 1000, 2000}, {100, 200, 400}}};
  EXPECT_THROW(bad.Validate(0), InvalidArgument);
}

TEST(BandEnergies, ParsevalOverFullBandAndToneLandsInItsBand) {
  const int rate = 16000;
  const std::size_t n = 1024;
  // Tone exactly on bin 64 = 1000 Hz, rectangular window.
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::cos(2.0 * kPi * 64.0 * double(i) / double(n));
  const auto power = PowerSpectrum(x, n);
  const double centers[] = {250.0, 500.0, 1000.0, 2000.0};
  const auto e = band_energies(power, n, OctaveBank(centers), rate);
  EXPECT_NEAR(e[2], double(n * n) / 4.0, 1e-6);
  EXPECT_LT(e[0] + e[1] + e[3], 1e-12 * e[2]);

  FilterBank all{{{0.0, 4000.0, 7999.0}}};
  const auto noise = testing::WhiteNoise(n, 3, 1.0);
  const auto p = PowerSpectrum(noise, n);
  // One-sided sum: DC once, interior bins twice.
  double time_energy = 0.0;
  for (double v : noise) time_energy += v * v;
  double spec = p[0] + p[n / 2];
  for (std::size_t k = 1; k < n / 2; ++k) spec += 2.0 * p[k];
  EXPECT_NEAR(spec / double(n), time_energy, 1e-9 * time_energy);
  const auto whole = band_energies(p, n, all, rate);
  double below = 0.0;
  for (std::size_t k = 0; k < n / 2; ++k) below += p[k];
  EXPECT_NEAR(whole[0], below, 1e-9 * below);
}

TEST(Decimate, KeepsLowToneRemovesHighTone) {
  const int rate = 44100;
  const auto low = testing::Sine(300.0, 0.5, rate, 0.5);
  const auto high = testing::Sine(9000.0, 0.5, rate, 0.5);
  const auto dl = Decimate(low, 4), dh = Decimate(high, 4);
  EXPECT_EQ(dl.size(), (low.size() + 3) / 4);
  double el = 0.0, eh = 0.0;
  for (std::size_t i = 100; i + 100 < dl.size(); ++i) {
    el += dl[i] * dl[i];
    eh += dh[i] * dh[i];
  }
  EXPECT_NEAR(el / double(dl.size() - 200), 0.125, 0.002);
  EXPECT_LT(eh, 1e-4 * el);
}

}  // namespace
}  // namespace earshot
