// src/dsp.cc

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

#include "earshot/dsp.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "earshot/error.h"
#include "earshot/fft.h"

namespace earshot {

FrameSpec FrameSpec::Default(int sample_rate) {
  return FromSeconds(sample_rate, 0.025, 0.005, Window::kHann);
}

FrameSpec FrameSpec::FromSeconds(int sample_rate, double frame_s, double hop_s,
                                 Window window) {
  if (sample_rate <= 0) throw InvalidArgument("FrameSpec: sample_rate must be positive");
  FrameSpec spec;
  spec.frame_length = static_cast<std::size_t>(std::lround(frame_s * sample_rate));
  spec.hop_length = static_cast<std::size_t>(std::lround(hop_s * sample_rate));
  spec.window = window;
  spec.Validate();
  return spec;
}

void FrameSpec::Validate() const {
  if (hop_length == 0 || hop_length > frame_length)
    throw InvalidArgument("FrameSpec: need 0 < hop_length <= frame_length (hop " +
                          std::to_string(hop_length) + ", frame " +
                          std::to_string(frame_length) + ")");
}

std::size_t FrameSpec::NumFrames(std::size_t num_samples) const {
  return (num_samples + hop_length - 1) / hop_length;
}

double FrameSpec::FrameCenter(std::size_t k, int sample_rate) const {
  return (static_cast<double>(k * hop_length) + 0.5 * static_cast<double>(frame_length)) /
         sample_rate;
}

std::vector<double> MakeWindow(Window window, std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (window == Window::kHann && n > 1) {
    for (std::size_t i = 0; i < n; ++i)
      w[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(i) /
                                  static_cast<double>(n - 1));
  }
  return w;
}

std::vector<std::vector<double>> frames(const AudioClip& clip,
                                        const FrameSpec& spec) {
  RequireMono(clip, "frames");
  spec.Validate();
  const auto x = clip.channel(0);
  const std::size_t count = spec.NumFrames(x.size());
  const auto w = MakeWindow(spec.window, spec.frame_length);
  std::vector<std::vector<double>> out(count, std::vector<double>(spec.frame_length, 0.0));
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t start = k * spec.hop_length;
    const std::size_t n = std::min(spec.frame_length, x.size() - start);
    for (std::size_t i = 0; i < n; ++i) out[k][i] = x[start + i] * w[i];
  }
  return out;
}

namespace {

std::vector<double> DirectConvolve(std::span<const double> a,
                                   std::span<const double> b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ai = a[i];
    double* dst = out.data() + i;
    for (std::size_t j = 0; j < b.size(); ++j) dst[j] += ai * b[j];
  }
  return out;
}

}  // namespace

std::vector<double> fast_convolve(std::span<const double> signal,
                                  std::span<const double> kernel) {
  if (signal.empty() || kernel.empty())
    throw InvalidArgument("fast_convolve: inputs must be non-empty");
  auto longer = signal.size() >= kernel.size() ? signal : kernel;
  auto shorter = signal.size() >= kernel.size() ? kernel : signal;
  if (shorter.size() <= 32) return DirectConvolve(longer, shorter);

  const std::size_t out_len = longer.size() + shorter.size() - 1;
  const std::size_t fft_size =
      std::min(NextPowerOfTwo(out_len), NextPowerOfTwo(4 * shorter.size()));
  const FftPlan& plan = GetFftPlan(fft_size);
  const std::size_t block = fft_size - shorter.size() + 1;

  std::vector<std::complex<double>> kernel_spec(plan.num_bins());
  plan.Forward(shorter, kernel_spec);

  std::vector<double> out(out_len, 0.0);
  std::vector<std::complex<double>> spec(plan.num_bins());
  std::vector<double> buf(fft_size);
  for (std::size_t start = 0; start < longer.size(); start += block) {
    const std::size_t n = std::min(block, longer.size() - start);
    plan.Forward(longer.subspan(start, n), spec);
    for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= kernel_spec[k];
    plan.Inverse(spec, buf);
    const std::size_t valid = std::min(fft_size, out_len - start);
    for (std::size_t i = 0; i < valid; ++i) out[start + i] += buf[i];
  }
  return out;
}

void FilterBank::Validate(int sample_rate) const {
  if (bands.empty()) throw InvalidArgument("FilterBank: no bands");
  for (std::size_t i = 0; i < bands.size(); ++i) {
    const Band& b = bands[i];
    if (!(b.low_hz >= 0.0 && b.low_hz < b.center_hz && b.center_hz < b.high_hz))
      throw InvalidArgument("FilterBank: band " + std::to_string(i) +
                            " must satisfy 0 <= low < center < high");
    if (i > 0) {
      const Band& prev = bands[i - 1];
      if (b.center_hz <= prev.center_hz)
        throw InvalidArgument("FilterBank: centres must be strictly increasing");
      if (shape == BandShape::kRectangular &&
          prev.high_hz > b.low_hz * (1.0 + 1e-12))
        throw InvalidArgument("FilterBank: rectangular bands " + std::to_string(i - 1) +
                              " and " + std::to_string(i) + " overlap");
    }
    if (sample_rate > 0 && b.high_hz >= 0.5 * sample_rate) {
      std::ostringstream msg;
      msg << "FilterBank: band edge " << b.high_hz
          << " Hz is at or above Nyquist (" << 0.5 * sample_rate << " Hz)";
      throw InvalidArgument(msg.str());
    }
  }
}

FilterBank OctaveBank(std::span<const double> centers_hz, BandShape shape) {
  FilterBank bank;
  bank.shape = shape;
  for (double c : centers_hz)
    bank.bands.push_back({c / M_SQRT2, c, c * M_SQRT2});
  bank.Validate(0);
  return bank;
}

FilterBank DefaultFilterBank() {
  static constexpr double kCenters[] = {250.0, 500.0, 1000.0, 2000.0, 4000.0, 8000.0};
  return OctaveBank(kCenters);
}

FilterBank DefaultFilterBank(int sample_rate) {
  FilterBank bank = DefaultFilterBank();
  std::erase_if(bank.bands, [&](const Band& b) { return b.high_hz >= 0.5 * sample_rate; });
  return bank;
}

std::vector<double> PowerSpectrum(std::span<const double> frame,
                                  std::size_t fft_size) {
  const FftPlan& plan = GetFftPlan(fft_size);
  thread_local std::vector<std::complex<double>> spec;
  spec.resize(plan.num_bins());
  plan.Forward(frame, spec);
  std::vector<double> power(spec.size());
  for (std::size_t k = 0; k < spec.size(); ++k)
    power[k] = spec[k].real() * spec[k].real() + spec[k].imag() * spec[k].imag();
  return power;
}

std::vector<double> band_energies(std::span<const double> power_spectrum,
                                  std::size_t fft_size, const FilterBank& bank,
                                  int sample_rate) {
  bank.Validate(sample_rate);
  if (power_spectrum.size() != fft_size / 2 + 1)
    throw InvalidArgument("band_energies: spectrum has " +
                          std::to_string(power_spectrum.size()) + " bins, expected " +
                          std::to_string(fft_size / 2 + 1));
  const double bin_hz = static_cast<double>(sample_rate) / static_cast<double>(fft_size);
  std::vector<double> energy(bank.bands.size(), 0.0);
  for (std::size_t b = 0; b < bank.bands.size(); ++b) {
    const Band& band = bank.bands[b];
    const auto k0 = static_cast<std::size_t>(std::ceil(band.low_hz / bin_hz));
    const auto k1 = std::min(power_spectrum.size() - 1,
                             static_cast<std::size_t>(std::floor(band.high_hz / bin_hz)));
    double sum = 0.0;
    for (std::size_t k = k0; k <= k1; ++k) {
      const double f = static_cast<double>(k) * bin_hz;
      double w = 0.0;
      if (bank.shape == BandShape::kRectangular) {
        w = (f >= band.low_hz && f < band.high_hz) ? 1.0 : 0.0;
      } else if (f > band.low_hz && f <= band.center_hz) {
        w = (f - band.low_hz) / (band.center_hz - band.low_hz);
      } else if (f > band.center_hz && f < band.high_hz) {
        w = (band.high_hz - f) / (band.high_hz - band.center_hz);
      }
      sum += w * power_spectrum[k];
    }
    energy[b] = sum;
  }
  return energy;
}

std::vector<double> FrameBandEnergies(std::span<const double> frame,
                                      const FilterBank& bank, int sample_rate) {
  const std::size_t n = NextPowerOfTwo(std::max<std::size_t>(frame.size(), 2));
  const auto power = PowerSpectrum(frame, n);
  return band_energies(power, n, bank, sample_rate);
}

ShelfFilter::ShelfFilter(double corner_hz, double gain_db, int sample_rate)
    : sample_rate_(sample_rate) {
  if (!(corner_hz > 0.0 && corner_hz < 0.5 * sample_rate)) {
    std::ostringstream msg;
    msg << "first_order_shelf: corner " << corner_hz
        << " Hz must lie in (0, " << 0.5 * sample_rate << ") Hz";
    throw InvalidArgument(msg.str());
  }
  if (!std::isfinite(gain_db)) throw InvalidArgument("first_order_shelf: gain must be finite");
  // Analog prototype G (s + wc/sqrt(G)) / (s + wc sqrt(G)).
  const double g = std::pow(10.0, gain_db / 20.0);
  const double k = std::tan(M_PI * corner_hz / sample_rate);
  const double alpha = k / std::sqrt(g);
  const double beta = k * std::sqrt(g);
  b0_ = g * (1.0 + alpha) / (1.0 + beta);
  b1_ = g * (alpha - 1.0) / (1.0 + beta);
  a1_ = (beta - 1.0) / (1.0 + beta);
}

void ShelfFilter::Apply(std::span<double> samples) const {
  double x1 = 0.0, y1 = 0.0;
  for (double& v : samples) {
    const double y = b0_ * v + b1_ * x1 - a1_ * y1;
    x1 = v;
    y1 = y;
    v = y;
  }
}

double ShelfFilter::ResponseDb(double freq_hz) const {
  const std::complex<double> z1 =
      std::polar(1.0, -2.0 * M_PI * freq_hz / sample_rate_);
  const std::complex<double> h = (b0_ + b1_ * z1) / (1.0 + a1_ * z1);
  return 20.0 * std::log10(std::abs(h));
}

AudioClip first_order_shelf(const AudioClip& clip, double corner_hz,
                            double gain_db) {
  const ShelfFilter filter(corner_hz, gain_db, clip.sample_rate());
  auto channels = clip.channels();
  for (auto& ch : channels) filter.Apply(ch);
  return AudioClip(std::move(channels), clip.sample_rate(), clip.source_path());
}

std::vector<double> Decimate(std::span<const double> x, std::size_t factor) {
  if (factor == 0) throw InvalidArgument("Decimate: factor must be >= 1");
  if (factor == 1) return {x.begin(), x.end()};
  const std::size_t half = 12 * factor;
  const std::size_t taps = 2 * half + 1;
  const double fc = 0.45 / static_cast<double>(factor);
  std::vector<double> h(taps);
  double sum = 0.0;
  for (std::size_t j = 0; j < taps; ++j) {
    const double u = static_cast<double>(j) - static_cast<double>(half);
    const double arg = 2.0 * fc * u;
    const double sinc = arg == 0.0 ? 1.0 : std::sin(M_PI * arg) / (M_PI * arg);
    const double t = static_cast<double>(j) / static_cast<double>(taps - 1);
    const double w = 0.42 - 0.5 * std::cos(2.0 * M_PI * t) + 0.08 * std::cos(4.0 * M_PI * t);
    h[j] = sinc * w;
    sum += h[j];
  }
  for (double& v : h) v /= sum;

  const std::size_t out_len = (x.size() + factor - 1) / factor;
  std::vector<double> y(out_len, 0.0);
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  for (std::size_t m = 0; m < out_len; ++m) {
    const auto center = static_cast<std::ptrdiff_t>(m * factor);
    const std::ptrdiff_t first = center - static_cast<std::ptrdiff_t>(half);
    double acc = 0.0;
    if (first >= 0 && first + static_cast<std::ptrdiff_t>(taps) <= n) {
      const double* src = x.data() + first;
      for (std::size_t j = 0; j < taps; ++j) acc += h[j] * src[j];
    } else {
      for (std::size_t j = 0; j < taps; ++j) {
        const std::ptrdiff_t i = first + static_cast<std::ptrdiff_t>(j);
        if (i >= 0 && i < n) acc += h[j] * x[static_cast<std::size_t>(i)];
      }
    }
    y[m] = acc;
  }
  return y;
}

double SumSquares(std::span<const double> x, std::ptrdiff_t begin,
                  std::ptrdiff_t end) {
  begin = std::max<std::ptrdiff_t>(begin, 0);
  end = std::min<std::ptrdiff_t>(end, static_cast<std::ptrdiff_t>(x.size()));
  double s = 0.0;
  for (std::ptrdiff_t i = begin; i < end; ++i) s += x[i] * x[i];
  return s;
}

}  // namespace earshot
