// src/fft.cc

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

#include "earshot/fft.h"

#include <cmath>
#include <memory>
#include <unordered_map>

#include "earshot/error.h"

namespace earshot {

std::size_t NextPowerOfTwo(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

FftPlan::FftPlan(std::size_t size) : size_(size), half_(size / 2) {
  if (size < 2 || (size & (size - 1)) != 0)
    throw InvalidArgument("FftPlan: size must be a power of two >= 2, got " +
                          std::to_string(size));
  bitrev_.resize(half_);
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < half_) ++bits;
  for (std::size_t i = 0; i < half_; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < bits; ++b)
      if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
    bitrev_[i] = r;
  }
  // Twiddles laid out stage by stage: the stage with span `len` reads
  // e^{-2 pi i j / len}, j < len / 2, from offset len / 2 - 1.
  twiddle_re_.resize(half_ > 1 ? half_ - 1 : 0);
  twiddle_im_.resize(twiddle_re_.size());
  for (std::size_t len = 2; len <= half_; len <<= 1)
    for (std::size_t j = 0; j < len / 2; ++j) {
      const double a = -2.0 * M_PI * static_cast<double>(j) / static_cast<double>(len);
      twiddle_re_[len / 2 - 1 + j] = std::cos(a);
      twiddle_im_[len / 2 - 1 + j] = std::sin(a);
    }
  post_.resize(half_ + 1);
  for (std::size_t k = 0; k <= half_; ++k)
    post_[k] = std::polar(1.0, -2.0 * M_PI * static_cast<double>(k) /
                                   static_cast<double>(size_));
}

void FftPlan::Transform(std::complex<double>* z, bool inverse) const {
  const std::size_t n = half_;
  for (std::size_t i = 0; i < n; ++i)
    if (i < bitrev_[i]) std::swap(z[i], z[bitrev_[i]]);
  // Plain real arithmetic: std::complex multiplication carries NaN
  // recovery branches we do not need.
  auto* d = reinterpret_cast<double*>(z);
  const double sign = inverse ? -1.0 : 1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t h = len / 2;
    const double* wr = twiddle_re_.data() + (h - 1);
    const double* wi = twiddle_im_.data() + (h - 1);
    for (std::size_t start = 0; start < n; start += len) {
      double* a = d + 2 * start;
      double* b = d + 2 * (start + h);
      for (std::size_t j = 0; j < h; ++j) {
        const double cr = wr[j], ci = sign * wi[j];
        const double vr = b[2 * j] * cr - b[2 * j + 1] * ci;
        const double vi = b[2 * j] * ci + b[2 * j + 1] * cr;
        const double ur = a[2 * j], ui = a[2 * j + 1];
        a[2 * j] = ur + vr;
        a[2 * j + 1] = ui + vi;
        b[2 * j] = ur - vr;
        b[2 * j + 1] = ui - vi;
      }
    }
  }
}

namespace {

std::vector<std::complex<double>>& Scratch(std::size_t n) {
  thread_local std::vector<std::complex<double>> buf;
  buf.resize(n);
  return buf;
}

}  // namespace

void FftPlan::Forward(std::span<const double> in,
                      std::span<std::complex<double>> out) const {
  if (in.size() > size_ || out.size() < num_bins())
    throw InvalidArgument("FftPlan::Forward: buffer size mismatch");
  auto& z = Scratch(half_);
  const std::size_t pairs = in.size() / 2;
  for (std::size_t m = 0; m < pairs; ++m) z[m] = {in[2 * m], in[2 * m + 1]};
  for (std::size_t m = pairs; m < half_; ++m)
    z[m] = {2 * m < in.size() ? in[2 * m] : 0.0, 0.0};
  Transform(z.data(), false);
  // Split the half-size result into the spectrum of the real input.
  for (std::size_t k = 0; k <= half_; ++k) {
    const std::complex<double> zk = z[k == half_ ? 0 : k];
    const std::complex<double> zm = z[k == 0 ? 0 : half_ - k];
    const double er = 0.5 * (zk.real() + zm.real()), ei = 0.5 * (zk.imag() - zm.imag());
    const double orr = 0.5 * (zk.imag() + zm.imag()), oi = -0.5 * (zk.real() - zm.real());
    const double pr = post_[k].real(), pi = post_[k].imag();
    out[k] = {er + pr * orr - pi * oi, ei + pr * oi + pi * orr};
  }
}

void FftPlan::Inverse(std::span<const std::complex<double>> in,
                      std::span<double> out) const {
  if (in.size() < num_bins() || out.size() < size_)
    throw InvalidArgument("FftPlan::Inverse: buffer size mismatch");
  auto& z = Scratch(half_);
  for (std::size_t k = 0; k < half_; ++k) {
    const std::complex<double> xk = in[k];
    const std::complex<double> xc = std::conj(in[half_ - k]);
    const std::complex<double> even = 0.5 * (xk + xc);
    const std::complex<double> odd = 0.5 * (xk - xc) * std::conj(post_[k]);
    z[k] = even + std::complex<double>(0.0, 1.0) * odd;
  }
  Transform(z.data(), true);
  const double scale = 1.0 / static_cast<double>(half_);
  for (std::size_t m = 0; m < half_; ++m) {
    out[2 * m] = z[m].real() * scale;
    out[2 * m + 1] = z[m].imag() * scale;
  }
}

const FftPlan& GetFftPlan(std::size_t size) {
  thread_local std::unordered_map<std::size_t, std::unique_ptr<FftPlan>> cache;
  auto& slot = cache[size];
  if (!slot) slot = std::make_unique<FftPlan>(size);
  return *slot;
}

}  // namespace earshot
