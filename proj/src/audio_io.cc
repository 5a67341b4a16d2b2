// src/audio_io.cc

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

#include "earshot/audio_io.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include "earshot/error.h"

namespace earshot {

AudioClip::AudioClip(std::vector<std::vector<double>> channels,
                     int sample_rate, std::string source_path)
    : channels_(std::move(channels)),
      sample_rate_(sample_rate),
      source_path_(std::move(source_path)) {
  if (sample_rate_ <= 0)
    throw InvalidArgument("AudioClip: sample_rate must be positive, got " +
                          std::to_string(sample_rate_));
  if (channels_.empty())
    throw InvalidArgument("AudioClip: at least one channel is required");
  const std::size_t n = channels_.front().size();
  for (std::size_t c = 0; c < channels_.size(); ++c) {
    if (channels_[c].size() != n)
      throw InvalidArgument("AudioClip: channel " + std::to_string(c) +
                            " has " + std::to_string(channels_[c].size()) +
                            " samples, expected " + std::to_string(n));
    for (double v : channels_[c])
      if (!std::isfinite(v))
        throw InvalidArgument("AudioClip: non-finite sample in channel " +
                              std::to_string(c));
  }
}

AudioClip AudioClip::mono(std::vector<double> samples, int sample_rate,
                          std::string source_path) {
  std::vector<std::vector<double>> ch;
  ch.push_back(std::move(samples));
  return AudioClip(std::move(ch), sample_rate, std::move(source_path));
}

double AudioClip::peak() const {
  double p = 0.0;
  for (const auto& ch : channels_)
    for (double v : ch) p = std::max(p, std::abs(v));
  return p;
}

void RequireMono(const AudioClip& clip, const char* what) {
  if (!clip.is_mono())
    throw InvalidArgument(std::string(what) + ": expected a mono clip, got " +
                          std::to_string(clip.num_channels()) + " channels");
}

WavEncoding ParseWavEncoding(const std::string& name) {
  if (name == "pcm16") return WavEncoding::kPcm16;
  if (name == "pcm24") return WavEncoding::kPcm24;
  if (name == "pcm32") return WavEncoding::kPcm32;
  if (name == "float32") return WavEncoding::kFloat32;
  throw InvalidArgument("unknown wav encoding '" + name +
                        "' (expected pcm16, pcm24, pcm32 or float32)");
}

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t Le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
std::uint32_t Le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void Put16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}
void Put32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

[[noreturn]] void Malformed(const std::filesystem::path& path,
                            const std::string& field) {
  throw IoError("malformed WAV header in '" + path.string() + "': " + field);
}

}  // namespace

namespace {

struct ParsedWav {
  std::vector<unsigned char> bytes;
  std::uint16_t format = 0, channels = 0, bits = 0, block_align = 0;
  std::uint32_t rate = 0;
  std::size_t data_offset = 0;
  std::size_t data_size = 0;
};

// Reads the whole file when `header_only` is false; otherwise stops at the
// start of the data chunk.
ParsedWav ParseWav(const std::filesystem::path& path, bool header_only) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open audio file '" + path.string() +
                  "': file missing or unreadable");
  ParsedWav w;
  std::vector<unsigned char>& bytes = w.bytes;
  if (header_only) {
    bytes.resize(64 * 1024);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    bytes.resize(static_cast<std::size_t>(in.gcount()));
  } else {
    in.seekg(0, std::ios::end);
    bytes.resize(static_cast<std::size_t>(std::max<std::streamoff>(in.tellg(), 0)));
    in.seekg(0, std::ios::beg);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    bytes.resize(static_cast<std::size_t>(in.gcount()));
  }
  std::error_code ec;
  const auto file_size = static_cast<std::size_t>(std::filesystem::file_size(path, ec));
  if (bytes.size() < 12) Malformed(path, "file shorter than RIFF header");
  if (std::memcmp(bytes.data(), "RIFF", 4) != 0)
    Malformed(path, "missing 'RIFF' tag");
  if (std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    Malformed(path, "missing 'WAVE' tag");

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0, block_align = 0;
  std::uint32_t rate = 0;
  bool have_data = false;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* hdr = bytes.data() + pos;
    const std::uint32_t size = Le32(hdr + 4);
    const std::size_t body = pos + 8;
    const std::size_t avail = (ec ? bytes.size() : std::max(file_size, bytes.size())) - body;
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (size < 16 || size > bytes.size() - body) Malformed(path, "fmt chunk size");
      const unsigned char* f = bytes.data() + body;
      format = Le16(f);
      channels = Le16(f + 2);
      rate = Le32(f + 4);
      block_align = Le16(f + 12);
      bits = Le16(f + 14);
      if (format == kFormatExtensible) {
        if (size < 40) Malformed(path, "extensible fmt chunk size");
        format = Le16(f + 24);  // first two bytes of the subformat GUID
      }
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      have_data = true;
      w.data_offset = body;
      // Streaming writers leave the size unset; take what is present.
      data_size = std::min<std::size_t>(size, avail);
      break;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt) Malformed(path, "no 'fmt ' chunk");
  if (!have_data) Malformed(path, "no 'data' chunk");
  if (channels == 0) Malformed(path, "channel count is 0");
  if (rate == 0) Malformed(path, "sample rate is 0");

  const bool is_int = format == kFormatPcm && (bits == 16 || bits == 24 || bits == 32);
  const bool is_float = format == kFormatFloat && bits == 32;
  if (!is_int && !is_float) {
    std::ostringstream msg;
    msg << "unsupported WAV encoding in '" << path.string()
        << "': format tag " << format << ", bits per sample " << bits;
    throw IoError(msg.str());
  }
  const std::size_t bytes_per_sample = bits / 8;
  if (block_align != bytes_per_sample * channels)
    Malformed(path, "block_align " + std::to_string(block_align) +
                        " inconsistent with channels/bits");

  w.format = format;
  w.channels = channels;
  w.bits = bits;
  w.block_align = block_align;
  w.rate = rate;
  w.data_size = data_size;
  return w;
}

}  // namespace

WavInfo read_wav_info(const std::filesystem::path& path) {
  const ParsedWav w = ParseWav(path, true);
  WavInfo info;
  info.sample_rate = static_cast<int>(w.rate);
  info.num_channels = w.channels;
  info.num_samples = w.data_size / w.block_align;
  return info;
}

AudioClip read_wav(const std::filesystem::path& path) {
  const ParsedWav w = ParseWav(path, false);
  const std::uint16_t channels = w.channels, bits = w.bits, block_align = w.block_align;
  const bool is_float = w.format == kFormatFloat;
  const std::size_t bytes_per_sample = bits / 8;
  const unsigned char* data = w.bytes.data() + w.data_offset;
  const std::size_t frames = std::min(w.data_size, w.bytes.size() - w.data_offset) / block_align;
  std::vector<std::vector<double>> out(channels, std::vector<double>(frames));
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      const unsigned char* p = data + i * block_align + c * bytes_per_sample;
      double v = 0.0;
      if (is_float) {
        float f;
        std::uint32_t u = Le32(p);
        std::memcpy(&f, &u, sizeof f);
        v = f;
      } else if (bits == 16) {
        v = static_cast<std::int16_t>(Le16(p)) / 32768.0;
      } else if (bits == 24) {
        std::int32_t s = p[0] | (p[1] << 8) | (p[2] << 16);
        if (s & 0x800000) s -= 0x1000000;
        v = s / 8388608.0;
      } else {
        v = static_cast<std::int32_t>(Le32(p)) / 2147483648.0;
      }
      if (!std::isfinite(v))
        throw IoError("non-finite sample in '" + path.string() + "'");
      out[c][i] = v;
    }
  }
  return AudioClip(std::move(out), static_cast<int>(w.rate), path.string());
}

void write_wav(const AudioClip& clip, const std::filesystem::path& path,
               WavEncoding encoding) {
  for (std::size_t c = 0; c < clip.num_channels(); ++c) {
    auto ch = clip.channel(c);
    for (std::size_t i = 0; i < ch.size(); ++i)
      if (ch[i] < -1.0 || ch[i] > 1.0) {
        std::ostringstream msg;
        msg << "write_wav: sample out of range [-1, 1] (value " << ch[i]
            << " at channel " << c << ", index " << i << ")";
        throw InvalidArgument(msg.str());
      }
  }

  std::uint16_t bits = 32;
  std::uint16_t format = kFormatPcm;
  switch (encoding) {
    case WavEncoding::kPcm16: bits = 16; break;
    case WavEncoding::kPcm24: bits = 24; break;
    case WavEncoding::kPcm32: bits = 32; break;
    case WavEncoding::kFloat32: bits = 32; format = kFormatFloat; break;
  }
  const auto channels = static_cast<std::uint16_t>(clip.num_channels());
  const std::uint16_t block_align = channels * (bits / 8);
  const std::size_t frames = clip.num_samples();
  const std::size_t data_bytes = frames * block_align;
  const bool is_float = format == kFormatFloat;
  const std::uint32_t fmt_size = is_float ? 18 : 16;
  const std::size_t riff_size =
      4 + (8 + fmt_size) + (is_float ? 12 : 0) + 8 + data_bytes + (data_bytes & 1u);
  if (riff_size > 0xFFFFFFFFull)
    throw InvalidArgument("write_wav: clip too large for RIFF/WAVE");

  std::string out;
  out.reserve(riff_size + 8);
  out += "RIFF";
  Put32(out, static_cast<std::uint32_t>(riff_size));
  out += "WAVE";
  out += "fmt ";
  Put32(out, fmt_size);
  Put16(out, format);
  Put16(out, channels);
  Put32(out, static_cast<std::uint32_t>(clip.sample_rate()));
  Put32(out, static_cast<std::uint32_t>(clip.sample_rate()) * block_align);
  Put16(out, block_align);
  Put16(out, bits);
  if (is_float) {
    Put16(out, 0);  // cbSize
    out += "fact";
    Put32(out, 4);
    Put32(out, static_cast<std::uint32_t>(frames));
  }
  out += "data";
  Put32(out, static_cast<std::uint32_t>(data_bytes));
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      const double v = clip.channel(c)[i];
      switch (encoding) {
        case WavEncoding::kPcm16: {
          const long q = std::clamp(std::lround(v * 32768.0), -32768L, 32767L);
          Put16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
          break;
        }
        case WavEncoding::kPcm24: {
          const long q = std::clamp(std::lround(v * 8388608.0), -8388608L, 8388607L);
          const auto u = static_cast<std::uint32_t>(q);
          out.push_back(static_cast<char>(u & 0xFF));
          out.push_back(static_cast<char>((u >> 8) & 0xFF));
          out.push_back(static_cast<char>((u >> 16) & 0xFF));
          break;
        }
        case WavEncoding::kPcm32: {
          const long long q = std::clamp(std::llround(v * 2147483648.0),
                                         -2147483648LL, 2147483647LL);
          Put32(out, static_cast<std::uint32_t>(static_cast<std::int32_t>(q)));
          break;
        }
        case WavEncoding::kFloat32: {
          const float f = static_cast<float>(v);
          std::uint32_t u;
          std::memcpy(&u, &f, sizeof u);
          Put32(out, u);
          break;
        }
      }
    }
  }
  if (data_bytes & 1u) out.push_back('\0');

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file)
    throw IoError("cannot open '" + path.string() + "' for writing");
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("failed writing '" + path.string() + "'");
}

AudioClip to_mono(const AudioClip& clip) {
  if (clip.is_mono()) return clip;
  const std::size_t n = clip.num_samples();
  const double scale = 1.0 / static_cast<double>(clip.num_channels());
  std::vector<double> out(n, 0.0);
  for (std::size_t c = 0; c < clip.num_channels(); ++c) {
    auto ch = clip.channel(c);
    for (std::size_t i = 0; i < n; ++i) out[i] += ch[i];
  }
  for (double& v : out) v *= scale;
  return AudioClip::mono(std::move(out), clip.sample_rate(), clip.source_path());
}

namespace {

double BesselI0(double x) {
  double sum = 1.0, term = 1.0;
  const double q = x * x / 4.0;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

// Tabulated low-pass interpolation kernel, indexed by |offset| in input
// samples and linearly interpolated between table points.
class SincTable {
 public:
  static constexpr int kZeroCrossings = 32;  // per side, at the lower rate
  static constexpr int kResolution = 512;    // table points per input sample
  static constexpr double kBeta = 8.6;
  static constexpr double kCutoff = 0.9;     // fraction of the lower Nyquist

  SincTable(int source_rate, int target_rate) {
    const double lower = std::min(source_rate, target_rate);
    // Normalized cutoff in cycles per input sample.
    const double fc = kCutoff * 0.5 * lower / source_rate;
    half_width_ = kZeroCrossings * static_cast<double>(source_rate) / lower;
    const auto n = static_cast<std::size_t>(std::ceil(half_width_ * kResolution)) + 2;
    table_.resize(n);
    const double i0_beta = BesselI0(kBeta);
    for (std::size_t k = 0; k < n; ++k) {
      const double u = static_cast<double>(k) / kResolution;
      if (u >= half_width_) {
        table_[k] = 0.0;
        continue;
      }
      const double x = 2.0 * fc * u;
      const double sinc = x == 0.0 ? 1.0 : std::sin(M_PI * x) / (M_PI * x);
      const double r = u / half_width_;
      const double w = BesselI0(kBeta * std::sqrt(1.0 - r * r)) / i0_beta;
      table_[k] = 2.0 * fc * sinc * w;
    }
  }

  double half_width() const { return half_width_; }

  double operator()(double offset) const {
    const double pos = std::abs(offset) * kResolution;
    const auto k = static_cast<std::size_t>(pos);
    if (k + 1 >= table_.size()) return 0.0;
    const double frac = pos - static_cast<double>(k);
    return table_[k] + frac * (table_[k + 1] - table_[k]);
  }

 private:
  double half_width_ = 0.0;
  std::vector<double> table_;
};

}  // namespace

AudioClip resample(const AudioClip& clip, int target_rate) {
  if (target_rate <= 0)
    throw InvalidArgument("resample: target rate must be positive, got " +
                          std::to_string(target_rate));
  const int source_rate = clip.sample_rate();
  if (target_rate == source_rate) return clip;

  const SincTable kernel(source_rate, target_rate);
  const double hw = kernel.half_width();
  const std::size_t in_len = clip.num_samples();
  const auto out_len = static_cast<std::size_t>(std::llround(
      static_cast<double>(in_len) * target_rate / source_rate));

  std::vector<std::vector<double>> out(clip.num_channels(),
                                       std::vector<double>(out_len, 0.0));
  const auto src = static_cast<std::uint64_t>(source_rate);
  const auto tgt = static_cast<std::uint64_t>(target_rate);
  for (std::size_t n = 0; n < out_len; ++n) {
    // Exact rational position avoids drift over long clips.
    const std::uint64_t num = n * src;
    const double t = static_cast<double>(num / tgt) +
                     static_cast<double>(num % tgt) / static_cast<double>(tgt);
    const auto lo = static_cast<std::int64_t>(std::ceil(t - hw));
    const auto hi = static_cast<std::int64_t>(std::floor(t + hw));
    const std::int64_t first = std::max<std::int64_t>(lo, 0);
    const std::int64_t last =
        std::min<std::int64_t>(hi, static_cast<std::int64_t>(in_len) - 1);
    for (std::size_t c = 0; c < clip.num_channels(); ++c) {
      auto x = clip.channel(c);
      double acc = 0.0;
      for (std::int64_t i = first; i <= last; ++i)
        acc += x[static_cast<std::size_t>(i)] * kernel(t - static_cast<double>(i));
      out[c][n] = acc;
    }
  }
  return AudioClip(std::move(out), target_rate, clip.source_path());
}

}  // namespace earshot
