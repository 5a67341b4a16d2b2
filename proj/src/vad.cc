// src/vad.cc

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

#include "earshot/vad.h"

#include <algorithm>
#include <cmath>

#include "earshot/dsp.h"
#include "earshot/error.h"
#include "earshot/features.h"

namespace earshot {

void VadConfig::Validate() const {
  if (offset_margin_db > onset_margin_db)
    throw InvalidArgument("vad: offset margin must not exceed onset margin");
  if (hangover_s < 0 || min_duration_s < 0 || merge_gap_s < 0)
    throw InvalidArgument("vad: durations must be non-negative");
  if (floor_percentile < 0 || floor_percentile > 100)
    throw InvalidArgument("vad: floor percentile must lie in [0, 100]");
}

double Percentile(std::vector<double> values, double p) {
  if (values.empty()) throw InvalidArgument("Percentile: empty input");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(p, 0.0, 100.0) / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<Segment> segment(const AudioClip& clip, const VadConfig& config) {
  RequireMono(clip, "segment");
  config.Validate();
  if (clip.num_samples() == 0) throw InvalidArgument("segment: empty clip");

  const int rate = clip.sample_rate();
  const FrameSpec spec = FrameSpec::Default(rate);
  const auto energy = energy_contour(clip, spec);
  const double floor_db = Percentile(energy, config.floor_percentile);
  const double onset = floor_db + config.onset_margin_db;
  const double offset = floor_db + config.offset_margin_db;
  const double hop_s = static_cast<double>(spec.hop_length) / rate;
  const auto hangover = static_cast<std::size_t>(std::ceil(config.hangover_s / hop_s));

  std::vector<std::pair<std::size_t, std::size_t>> runs;  // [first, last] frames
  bool open = false;
  std::size_t first = 0, last_above = 0;
  for (std::size_t k = 0; k < energy.size(); ++k) {
    if (!open) {
      if (energy[k] > onset) {
        open = true;
        first = last_above = k;
      }
      continue;
    }
    if (energy[k] > offset) {
      last_above = k;
    } else if (k - last_above >= hangover) {
      runs.emplace_back(first, last_above);
      open = false;
    }
  }
  if (open) runs.emplace_back(first, last_above);

  const double duration = clip.duration_s();
  std::vector<Segment> merged;
  for (const auto& [a, b] : runs) {
    Segment s{std::clamp(spec.FrameCenter(a, rate) - 0.5 * hop_s, 0.0, duration),
              std::clamp(spec.FrameCenter(b, rate) + 0.5 * hop_s, 0.0, duration)};
    if (!merged.empty() && s.start_s - merged.back().end_s < config.merge_gap_s)
      merged.back().end_s = std::max(merged.back().end_s, s.end_s);
    else
      merged.push_back(s);
  }
  std::vector<Segment> out;
  for (const Segment& s : merged)
    if (s.end_s > s.start_s && s.duration() >= config.min_duration_s) out.push_back(s);
  return out;
}

}  // namespace earshot
