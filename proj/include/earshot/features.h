// include/earshot/features.h

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

#ifndef EARSHOT_FEATURES_H_
#define EARSHOT_FEATURES_H_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "earshot/audio_io.h"
#include "earshot/dsp.h"

namespace earshot {

struct F0Config {
  double min_hz = 70.0;
  double max_hz = 400.0;
  // First lag whose normalized difference drops below this is taken as the
  // period candidate.
  double dip_threshold = 0.15;
  // Frames whose best normalized difference stays above this are unvoiced.
  double voicing_threshold = 0.3;
  // Energy gate: frames more than this far below the loudest frame of the
  // clip are unvoiced.
  double relative_floor_db = 40.0;
  // ... and so are frames below this absolute level (dBFS).
  double absolute_floor_db = -80.0;

  void Validate(int sample_rate) const;
};

// Per-frame voicing decisions and F0 on a shared frame grid. f0_hz is 0 on
// unvoiced frames.
struct VoicingTrack {
  FrameSpec spec;
  int sample_rate = 0;
  std::size_t num_samples = 0;
  std::vector<double> frame_times;  // frame centres, seconds
  std::vector<bool> voiced;
  std::vector<double> f0_hz;

  std::size_t num_frames() const { return voiced.size(); }
  std::size_t NumVoiced() const;
  std::optional<double> MeanF0() const;
  // Throws InvalidArgument unless the track was computed on a clip with
  // this rate and length.
  void CheckGrid(const AudioClip& clip) const;
};

// YIN-style tracker: cumulative-mean-normalized difference on a signal
// decimated to ~10 kHz, with the period refined at the full rate.
VoicingTrack extract_f0(const AudioClip& clip, const F0Config& config = {});
VoicingTrack extract_f0(const AudioClip& clip, const F0Config& config,
                        const FrameSpec& spec);

enum class RmsMode { kVoicedFrames, kWholeUtterance };

// 20 log10 of the RMS over the samples covered by voiced frames (or every
// sample). nullopt when no frame is voiced or the selection is silent.
std::optional<double> extract_rms(const AudioClip& clip,
                                  const VoicingTrack& voicing,
                                  RmsMode mode = RmsMode::kVoicedFrames);

enum class LpcMethod {
  // Covariance-method LP weighted by short-time energy; robust to high F0.
  kWeighted,
  // Hann-windowed autocorrelation with Levinson-Durbin.
  kAutocorrelation,
};

struct F1Config {
  LpcMethod method = LpcMethod::kWeighted;
  // Energy window for the weighted method.
  double weight_window_s = 0.0025;
  double analysis_rate_hz = 10000.0;
  double pre_emphasis_hz = 50.0;
  double window_s = 0.025;
  double min_hz = 150.0;
  double max_hz = 1500.0;
  double max_bandwidth_hz = 400.0;
};

// LPC root-solving formant estimate per voiced frame; returns the median of
// the per-frame lowest accepted resonance, or nullopt if no frame yields one.
std::optional<double> extract_f1(const AudioClip& clip,
                                 const VoicingTrack& voicing,
                                 const F1Config& config = {});

// Per-frame F1 candidates (nullopt where rejected), on voiced frames only.
std::vector<std::optional<double>> F1Track(const AudioClip& clip,
                                           const VoicingTrack& voicing,
                                           const F1Config& config = {});

// Mean over voiced frames of the least-squares slope of band energy (dB)
// against log2(band centre). nullopt when no frame is voiced.
std::optional<double> extract_spectral_tilt(const AudioClip& clip,
                                            const VoicingTrack& voicing,
                                            const FilterBank& bank);
// Uses DefaultFilterBank(clip rate).
std::optional<double> extract_spectral_tilt(const AudioClip& clip,
                                            const VoicingTrack& voicing);

// Slope in dB/octave of one set of band energies; nullopt if fewer than two
// bands carry energy.
std::optional<double> TiltOfBands(const std::vector<double>& energies,
                                  const FilterBank& bank);

// Per-frame 10 log10(mean square + 1e-10) of the channel-averaged clip. The
// window weights the mean; zero padding past the end is excluded.
std::vector<double> energy_contour(const AudioClip& clip, const FrameSpec& spec);

constexpr double kEnergyFloorDb = -100.0;

enum class Feature { kRms, kF0, kF1, kTilt };

const char* FeatureName(Feature f);
Feature ParseFeature(const std::string& name);
inline constexpr Feature kAllFeatures[] = {Feature::kRms, Feature::kF0,
                                           Feature::kF1, Feature::kTilt};

struct UtteranceFeatures {
  std::optional<double> rms_db;
  std::optional<double> f0_mean_hz;
  std::optional<double> f1_mean_hz;
  std::optional<double> spectral_tilt_db_per_oct;
  std::size_t voiced_frame_count = 0;

  std::optional<double> Get(Feature f) const;
  bool operator==(const UtteranceFeatures&) const = default;
};

struct FeatureConfig {
  F0Config f0;
  F1Config f1;
  // Unset: DefaultFilterBank(rate) of each clip.
  std::optional<FilterBank> bank;
  std::size_t min_voiced_frames = 5;
  RmsMode rms_mode = RmsMode::kVoicedFrames;
};

// All four features of a mono utterance. Below min_voiced_frames every
// feature is left undefined.
UtteranceFeatures compute_features(const AudioClip& clip,
                                   const FeatureConfig& config = {});

}  // namespace earshot

#endif  // EARSHOT_FEATURES_H_
