// tests/test_util.h

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

#ifndef EARSHOT_TESTS_TEST_UTIL_H_
#define EARSHOT_TESTS_TEST_UTIL_H_

// Signal generators and brute-force oracles shared by the tests. Nothing
// here calls into the library under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace earshot::testing {

inline constexpr double kPi = std::numbers::pi;

inline std::vector<double> Sine(double hz, double seconds, int rate, double amp = 0.5,
                                double phase = 0.0) {
  const auto n = static_cast<std::size_t>(std::lround(seconds * rate));
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = amp * std::sin(2 * kPi * hz * i / rate + phase);
  return x;
}

// Band-limited sawtooth: Fourier series up to 0.45 * rate.
inline std::vector<double> Sawtooth(double hz, double seconds, int rate, double amp = 0.5) {
  const auto n = static_cast<std::size_t>(std::lround(seconds * rate));
  std::vector<double> x(n, 0.0);
  const int harmonics = static_cast<int>(0.45 * rate / hz);
  for (int k = 1; k <= harmonics; ++k) {
    const double a = amp * (2.0 / kPi) / k * ((k % 2) ? 1.0 : -1.0);
    const double w = 2 * kPi * hz * k / rate;
    for (std::size_t i = 0; i < n; ++i) x[i] += a * std::sin(w * i);
  }
  return x;
}

inline std::vector<double> WhiteNoise(std::size_t n, std::uint64_t seed, double sd = 0.1) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sd);
  std::vector<double> x(n);
  for (double& v : x) v = g(rng);
  return x;
}

// Pink noise from white noise through Paul Kellet's refined 1/f filter
// (within 0.05 dB of -3 dB/octave above ~10 Hz at 44.1 kHz).
inline std::vector<double> PinkNoise(std::size_t n, std::uint64_t seed, double scale = 0.05) {
  const std::vector<double> w = WhiteNoise(n + 4096, seed, 1.0);
  double b0 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0;
  std::vector<double> x;
  x.reserve(n);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double white = w[i];
    b0 = 0.99886 * b0 + white * 0.0555179;
    b1 = 0.99332 * b1 + white * 0.0750759;
    b2 = 0.96900 * b2 + white * 0.1538520;
    b3 = 0.86650 * b3 + white * 0.3104856;
    b4 = 0.55000 * b4 + white * 0.5329522;
    b5 = -0.7616 * b5 - white * 0.0168980;
    const double pink = b0 + b1 + b2 + b3 + b4 + b5 + b6 + white * 0.5362;
    b6 = white * 0.115926;
    if (i >= 4096) x.push_back(pink * scale);  // skip the filter warm-up
  }
  return x;
}

// Two-pole resonator (Klatt style), unity gain at DC.
struct Resonator {
  double a, b, c, y1 = 0, y2 = 0;
  Resonator(double f, double bw, int rate) {
    const double t = 1.0 / rate;
    c = -std::exp(-2 * kPi * bw * t);
    b = 2 * std::exp(-kPi * bw * t) * std::cos(2 * kPi * f * t);
    a = 1 - b - c;
  }
  double operator()(double x) {
    const double y = a * x + b * y1 + c * y2;
    y2 = y1;
    y1 = y;
    return y;
  }
};

// Cascade formant vowel: impulse train with small jitter through resonators
// at F1..F3, then a first difference for lip radiation.
inline std::vector<double> FormantVowel(double f1, double f2, double f3, double f0,
                                        double seconds, int rate, std::uint64_t seed,
                                        double amp = 0.3) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> jitter(0.0, 0.005);
  const auto n = static_cast<std::size_t>(std::lround(seconds * rate));
  std::vector<double> src(n, 0.0);
  double t = 0.0;
  while (t < n) {
    src[static_cast<std::size_t>(t)] = 1.0;
    t += rate / f0 * (1.0 + jitter(rng));
  }
  Resonator r1(f1, 60 + f1 * 0.05, rate), r2(f2, 90, rate), r3(f3, 120, rate);
  // Glottal roll-off: two real poles near DC.
  double g1 = 0, g2 = 0, prev = 0;
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    g1 = 0.97 * g1 + src[i];
    g2 = 0.97 * g2 + g1;
    const double v = r3(r2(r1(g2)));
    y[i] = v - prev;
    prev = v;
  }
  double peak = 0;
  for (double v : y) peak = std::max(peak, std::abs(v));
  for (double& v : y) v *= amp / peak;
  return y;
}

inline std::vector<double> NaiveConvolve(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> y(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) y[i + j] += a[i] * b[j];
  return y;
}

inline double Mean(const std::vector<double>& x) {
  double s = 0;
  for (double v : x) s += v;
  return s / x.size();
}

// Fresh directory under the system temp dir.
inline std::filesystem::path TempDir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("earshot_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace earshot::testing

#endif  // EARSHOT_TESTS_TEST_UTIL_H_
