// include/earshot/vad.h

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

#ifndef EARSHOT_VAD_H_
#define EARSHOT_VAD_H_

#include <vector>

#include "earshot/audio_io.h"

namespace earshot {

struct Segment {
  double start_s = 0.0;
  double end_s = 0.0;

  double duration() const { return end_s - start_s; }
  bool operator==(const Segment&) const = default;
};

// Energy-gate segmentation parameters. Thresholds are relative to the noise
// floor, taken as a percentile of the frame-energy contour.
struct VadConfig {
  double onset_margin_db = 12.0;
  double offset_margin_db = 6.0;
  double hangover_s = 0.3;
  double min_duration_s = 0.3;
  double merge_gap_s = 0.2;
  double floor_percentile = 10.0;

  void Validate() const;
};

// Splits a mono close-talk recording into utterances. Segments come back
// sorted and non-overlapping.
std::vector<Segment> segment(const AudioClip& clip, const VadConfig& config = {});

// Value at percentile p (0..100) by linear interpolation between order
// statistics. `values` must be non-empty.
double Percentile(std::vector<double> values, double p);

}  // namespace earshot

#endif  // EARSHOT_VAD_H_
