// include/earshot/render.h

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

#ifndef EARSHOT_RENDER_H_
#define EARSHOT_RENDER_H_

#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "earshot/audio_io.h"
#include "earshot/corpus.h"

namespace earshot {

// Talker-to-listener binaural impulse response (left, right).
struct ImpulseResponse {
  AudioClip ir;
  double distance_m = 0.0;
  std::string session_ref;

  // Throws InvalidArgument unless two channels, non-empty, non-silent.
  void Validate() const;
};

constexpr double kAmbienceOff = -std::numeric_limits<double>::infinity();

struct RenderOptions {
  // Ambience level relative to the recording; kAmbienceOff disables it.
  double ambience_gain_db = 0.0;
  // Scale the dry speech to this active RMS before convolution.
  std::optional<double> align_rms_dbfs;
  double crossfade_s = 0.05;
};

struct RenderResult {
  AudioClip audio;             // 2 channels
  double headroom_gain = 1.0;  // joint attenuation, 1 when not needed
  std::optional<double> alignment_gain;
};

// Per ear: speech convolved with the IR, plus the gain-scaled ambience. The
// ambience is looped with a crossfade when shorter than the convolution.
RenderResult render_at_listener(const AudioClip& speech, const ImpulseResponse& ir,
                                const AudioClip* ambience, const RenderOptions& options = {});

// `length` samples built from repeats of x, each seam a linear crossfade of
// `crossfade` samples.
std::vector<double> LoopWithCrossfade(std::span<const double> x, std::size_t length,
                                      std::size_t crossfade);

struct BatchRenderResult {
  std::vector<StimulusRecord> stimuli;  // paths relative to out_dir
  std::vector<std::string> errors;      // one line per failed item
};

// Renders every utterance under every condition record (or under every IR x
// ambience when the manifest has no conditions) into float WAVs in out_dir.
// Failures are collected per item and the batch continues.
BatchRenderResult batch_render(const Corpus& corpus, const std::filesystem::path& out_dir,
                               int threads = 1, const RenderOptions& defaults = {});

}  // namespace earshot

#endif  // EARSHOT_RENDER_H_
