// include/earshot/audio_io.h

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

#ifndef EARSHOT_AUDIO_IO_H_
#define EARSHOT_AUDIO_IO_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace earshot {

// Multi-channel audio at a fixed sample rate. Samples are linear amplitude
// relative to digital full scale. Immutable once constructed; the
// constructor enforces equal channel lengths, finite samples and a positive
// rate.
class AudioClip {
 public:
  AudioClip(std::vector<std::vector<double>> channels, int sample_rate,
            std::string source_path = {});

  static AudioClip mono(std::vector<double> samples, int sample_rate,
                        std::string source_path = {});

  int sample_rate() const { return sample_rate_; }
  std::size_t num_channels() const { return channels_.size(); }
  std::size_t num_samples() const {
    return channels_.empty() ? 0 : channels_.front().size();
  }
  double duration_s() const {
    return static_cast<double>(num_samples()) / sample_rate_;
  }
  bool is_mono() const { return channels_.size() == 1; }
  const std::string& source_path() const { return source_path_; }

  std::span<const double> channel(std::size_t c) const {
    return channels_.at(c);
  }
  const std::vector<std::vector<double>>& channels() const {
    return channels_;
  }

  // Largest absolute sample value over all channels.
  double peak() const;

  bool operator==(const AudioClip& other) const {
    return sample_rate_ == other.sample_rate_ && channels_ == other.channels_;
  }

 private:
  std::vector<std::vector<double>> channels_;
  int sample_rate_;
  std::string source_path_;
};

enum class WavEncoding { kPcm16, kPcm24, kPcm32, kFloat32 };

// Parses "pcm16", "pcm24", "pcm32", "float32".
WavEncoding ParseWavEncoding(const std::string& name);

struct WavInfo {
  int sample_rate = 0;
  std::size_t num_channels = 0;
  std::size_t num_samples = 0;
  double duration_s() const {
    return static_cast<double>(num_samples) / sample_rate;
  }
};

// Header-only inspection of a WAV file; same validation as read_wav.
WavInfo read_wav_info(const std::filesystem::path& path);

// Reads a RIFF/WAVE file with 16/24/32-bit integer PCM or 32-bit IEEE float
// samples (plain or WAVE_FORMAT_EXTENSIBLE). Integer full scale maps to +-1.
AudioClip read_wav(const std::filesystem::path& path);

// Writes `clip`. Samples outside [-1, 1] are rejected rather than clipped.
void write_wav(const AudioClip& clip, const std::filesystem::path& path,
               WavEncoding encoding = WavEncoding::kFloat32);

// Arithmetic mean of all channels, per sample index.
AudioClip to_mono(const AudioClip& clip);

// Band-limited resampling with a Kaiser-windowed sinc kernel spanning 64
// zero crossings at the lower of the two rates. Output length is
// round(num_samples * target / source).
AudioClip resample(const AudioClip& clip, int target_rate);

// Requires a mono clip; throws InvalidArgument naming `what` otherwise.
void RequireMono(const AudioClip& clip, const char* what);

}  // namespace earshot

#endif  // EARSHOT_AUDIO_IO_H_
