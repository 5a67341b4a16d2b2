// include/earshot/augment.h

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

#ifndef EARSHOT_AUGMENT_H_
#define EARSHOT_AUGMENT_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "earshot/audio_io.h"

namespace earshot {

// Speech-activity gate for SNR and loudness work: frames more than
// margin_db above the noise floor (a percentile of the frame energies) are
// active. A signal without that much dynamic range (stationary noise, a
// steady tone) counts as active throughout.
struct ActivityGate {
  double margin_db = 12.0;
  double floor_percentile = 10.0;
};

// Per-sample activity of a mono clip. Throws InvalidArgument on silence.
std::vector<bool> ActiveSampleMask(const AudioClip& speech, const ActivityGate& gate = {});

// RMS over the samples selected by `mask`.
double MaskedRms(std::span<const double> x, const std::vector<bool>& mask);
double Rms(std::span<const double> x);

struct MixResult {
  AudioClip mixture;
  AudioClip scaled_noise;
  double noise_gain = 1.0;     // applied to the noise crop before headroom
  double headroom_gain = 1.0;  // joint attenuation, 1 when not needed
  std::size_t noise_offset = 0;
};

// Scales a seeded random crop of `noise` so that the speech-active RMS of
// `speech` over the RMS of the scaled crop equals snr_db, then adds them. If
// the mixture would exceed full scale, both outputs are attenuated together.
MixResult mix_at_snr(const AudioClip& speech, const AudioClip& noise, double snr_db,
                     std::uint64_t seed = 0, const ActivityGate& gate = {});

constexpr double kMaxTiltBoostDbPerOct = 12.0;

// Shelf corners used by tilt_boost at this rate.
std::vector<double> TiltShelfCorners(int sample_rate);

// Raises the spectral slope by roughly boost_db_per_oct across 0.25-8 kHz
// with a cascade of one-octave-spaced first-order shelves, then restores
// the input's active RMS.
AudioClip tilt_boost(const AudioClip& speech, double boost_db_per_oct,
                     const ActivityGate& gate = {});

using BoostMap = std::function<double(double snr_db)>;

// clamp((20 - snr_db) * 0.15, 0, 6) dB/octave.
double DefaultBoost(double snr_db);

struct NamedClip {
  std::string id;
  AudioClip clip;
};

struct PseudoOptions {
  // Hearing audio becomes the previous utterance mixed into the noise
  // instead of noise alone.
  bool prepend_prior = false;
  int threads = 1;
  ActivityGate gate;
};

struct PseudoPair {
  AudioClip hearing;
  AudioClip target;
  double snr_db = 0.0;
  double boost_db_per_oct = 0.0;
  std::string utterance_id;
  std::string noise_id;
  std::string prior_id;  // empty unless prepend_prior
  std::size_t noise_offset = 0;
  double noise_gain = 1.0;
  double hearing_headroom_gain = 1.0;
  double target_headroom_gain = 1.0;
};

// Builds the pair for utterances[index]; pure in (inputs, index, seed).
PseudoPair MakePseudoPair(std::span<const NamedClip> utterances, std::size_t index,
                          std::span<const NamedClip> noise_bank,
                          std::span<const double> snr_grid, const BoostMap& boost_map,
                          std::uint64_t seed, const PseudoOptions& options = {});

// One (noise segment, SNR) draw per utterance, seeded per utterance id.
std::vector<PseudoPair> make_pseudo_dataset(std::span<const NamedClip> utterances,
                                            std::span<const NamedClip> noise_bank,
                                            std::span<const double> snr_grid,
                                            const BoostMap& boost_map, std::uint64_t seed,
                                            const PseudoOptions& options = {});

}  // namespace earshot

#endif  // EARSHOT_AUGMENT_H_
