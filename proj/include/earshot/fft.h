// include/earshot/fft.h

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

#ifndef EARSHOT_FFT_H_
#define EARSHOT_FFT_H_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace earshot {

// Radix-2 FFT of a real sequence, computed through a half-length complex
// transform. Sizes must be powers of two, at least 2.
class FftPlan {
 public:
  explicit FftPlan(std::size_t size);

  std::size_t size() const { return size_; }
  std::size_t num_bins() const { return size_ / 2 + 1; }

  // `in` may be shorter than size(); it is zero-padded. `out` must hold
  // num_bins() values.
  void Forward(std::span<const double> in,
               std::span<std::complex<double>> out) const;

  // Inverse of Forward, including the 1/size scaling. `out` must hold
  // size() values.
  void Inverse(std::span<const std::complex<double>> in,
               std::span<double> out) const;

 private:
  void Transform(std::complex<double>* z, bool inverse) const;

  std::size_t size_;
  std::size_t half_;
  std::vector<std::size_t> bitrev_;
  std::vector<double> twiddle_re_, twiddle_im_;  // half-size transform, per stage
  std::vector<std::complex<double>> post_;     // real split, e^{-2 pi i k / n}
};

// Per-thread cache of plans keyed by size.
const FftPlan& GetFftPlan(std::size_t size);

std::size_t NextPowerOfTwo(std::size_t n);

}  // namespace earshot

#endif  // EARSHOT_FFT_H_
