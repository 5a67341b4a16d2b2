// include/earshot/dsp.h

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

#ifndef EARSHOT_DSP_H_
#define EARSHOT_DSP_H_

#include <cstddef>
#include <span>
#include <vector>

#include "earshot/audio_io.h"

namespace earshot {

enum class Window { kRectangular, kHann };

// Analysis frame grid. Frame k covers samples [k*hop, k*hop + length).
struct FrameSpec {
  std::size_t frame_length = 0;
  std::size_t hop_length = 0;
  Window window = Window::kHann;

  // 25 ms frames on a 5 ms hop, Hann window.
  static FrameSpec Default(int sample_rate);
  static FrameSpec FromSeconds(int sample_rate, double frame_s, double hop_s,
                               Window window = Window::kHann);

  void Validate() const;
  // ceil(num_samples / hop), or 0 for an empty signal.
  std::size_t NumFrames(std::size_t num_samples) const;
  // Centre of frame k in seconds.
  double FrameCenter(std::size_t k, int sample_rate) const;

  bool operator==(const FrameSpec&) const = default;
};

// Symmetric window of length n.
std::vector<double> MakeWindow(Window window, std::size_t n);

// Windowed frames of a mono clip; the final partial frames are zero-padded.
std::vector<std::vector<double>> frames(const AudioClip& clip,
                                        const FrameSpec& spec);

// Full linear convolution, length a.size() + b.size() - 1. Short kernels run
// directly; longer ones go through FFT overlap-add.
std::vector<double> fast_convolve(std::span<const double> signal,
                                  std::span<const double> kernel);

enum class BandShape { kRectangular, kTriangular };

struct Band {
  double low_hz;
  double center_hz;
  double high_hz;
};

struct FilterBank {
  std::vector<Band> bands;
  BandShape shape = BandShape::kRectangular;

  // Throws if centres are not strictly increasing, a band is inverted,
  // rectangular bands overlap, or any edge reaches `sample_rate` / 2.
  // Pass sample_rate <= 0 to skip the Nyquist check.
  void Validate(int sample_rate) const;
};

// One-octave bands (edges at centre / sqrt(2) and centre * sqrt(2)).
FilterBank OctaveBank(std::span<const double> centers_hz,
                      BandShape shape = BandShape::kRectangular);

// Six octave bands centred at 0.25, 0.5, 1, 2, 4 and 8 kHz.
FilterBank DefaultFilterBank();
// The default bands whose upper edge stays below sample_rate / 2.
FilterBank DefaultFilterBank(int sample_rate);

// One-sided power spectrum |X_k|^2, k = 0..fft_size/2, of `frame`
// zero-padded to fft_size.
std::vector<double> PowerSpectrum(std::span<const double> frame,
                                  std::size_t fft_size);

// Band energies from a one-sided power spectrum computed with `fft_size`.
std::vector<double> band_energies(std::span<const double> power_spectrum,
                                  std::size_t fft_size, const FilterBank& bank,
                                  int sample_rate);

// Band energies of a time-domain frame; FFT size is the next power of two
// at or above the frame length. The frame is used as given (apply any
// window beforehand).
std::vector<double> FrameBandEnergies(std::span<const double> frame,
                                      const FilterBank& bank, int sample_rate);

// First-order high shelf, bilinear transform prewarped at the corner. The
// corner is the geometric midpoint of the transition, where the gain is
// gain_db / 2.
class ShelfFilter {
 public:
  ShelfFilter(double corner_hz, double gain_db, int sample_rate);

  void Apply(std::span<double> samples) const;
  // Magnitude response in dB at `freq_hz`.
  double ResponseDb(double freq_hz) const;

 private:
  int sample_rate_;
  double b0_, b1_, a1_;
};

AudioClip first_order_shelf(const AudioClip& clip, double corner_hz,
                            double gain_db);

// Integer-factor decimation with a Blackman-windowed sinc anti-alias
// filter, cutoff at 0.45 of the output rate.
std::vector<double> Decimate(std::span<const double> x, std::size_t factor);

// Sum of squares of x[begin, end), clamped to the signal.
double SumSquares(std::span<const double> x, std::ptrdiff_t begin,
                  std::ptrdiff_t end);

}  // namespace earshot

#endif  // EARSHOT_DSP_H_
