// src/render.cc

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

#include "earshot/render.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include "earshot/augment.h"
#include "earshot/dsp.h"
#include "earshot/error.h"
#include "earshot/parallel.h"

namespace earshot {

void ImpulseResponse::Validate() const {
  if (ir.num_channels() != 2)
    throw InvalidArgument("impulse response must have 2 channels, got " +
                          std::to_string(ir.num_channels()));
  if (ir.num_samples() == 0) throw InvalidArgument("impulse response is empty");
  double energy = 0.0;
  for (const auto& ch : ir.channels())
    for (double v : ch) energy += v * v;
  if (!(energy > 0.0)) throw InvalidArgument("impulse response is silent");
}

std::vector<double> LoopWithCrossfade(std::span<const double> x, std::size_t length,
                                      std::size_t crossfade) {
  if (x.empty()) throw InvalidArgument("cannot loop an empty signal");
  std::vector<double> out(length, 0.0);
  if (length <= x.size()) {
    std::copy_n(x.begin(), length, out.begin());
    return out;
  }
  const std::size_t n = x.size();
  const std::size_t xf = std::min(crossfade, n / 2);
  const std::size_t period = n - xf;
  for (std::size_t start = 0, copy = 0; start < length; start += period, ++copy) {
    for (std::size_t j = 0; j < n && start + j < length; ++j) {
      double w = 1.0;
      if (xf > 0) {
        if (copy > 0 && j < xf) w *= (j + 0.5) / xf;
        if (j >= n - xf) w *= 1.0 - (j - (n - xf) + 0.5) / xf;
      }
      out[start + j] += w * x[j];
    }
  }
  return out;
}

RenderResult render_at_listener(const AudioClip& speech, const ImpulseResponse& ir,
                                const AudioClip* ambience, const RenderOptions& options) {
  RequireMono(speech, "render speech");
  ir.Validate();
  if (speech.num_samples() == 0) throw InvalidArgument("render: empty speech");
  const int rate = speech.sample_rate();
  if (ir.ir.sample_rate() != rate)
    throw InvalidArgument("render: IR rate " + std::to_string(ir.ir.sample_rate()) +
                          " differs from speech rate " + std::to_string(rate));
  const bool use_ambience = ambience != nullptr && options.ambience_gain_db != kAmbienceOff;
  if (std::isnan(options.ambience_gain_db) || options.ambience_gain_db == -kAmbienceOff)
    throw InvalidArgument("render: bad ambience gain");
  if (use_ambience) {
    if (ambience->sample_rate() != rate)
      throw InvalidArgument("render: ambience rate " + std::to_string(ambience->sample_rate()) +
                            " differs from speech rate " + std::to_string(rate));
    if (ambience->num_channels() != 2)
      throw InvalidArgument("render: ambience must have 2 channels");
    if (ambience->num_samples() == 0) throw InvalidArgument("render: empty ambience");
  }
  if (!(options.crossfade_s >= 0.0)) throw InvalidArgument("render: negative crossfade");

  std::optional<double> alignment;
  std::span<const double> dry = speech.channel(0);
  std::vector<double> aligned;
  if (options.align_rms_dbfs) {
    const double rms = MaskedRms(dry, ActiveSampleMask(speech));
    alignment = std::pow(10.0, *options.align_rms_dbfs / 20.0) / rms;
    aligned.assign(dry.begin(), dry.end());
    for (double& v : aligned) v *= *alignment;
    dry = aligned;
  }

  std::vector<std::vector<double>> out(2);
  for (std::size_t c = 0; c < 2; ++c) out[c] = fast_convolve(dry, ir.ir.channel(c));
  const std::size_t length = out[0].size();
  if (use_ambience) {
    const double g = std::pow(10.0, options.ambience_gain_db / 20.0);
    const auto xf = static_cast<std::size_t>(std::lround(options.crossfade_s * rate));
    for (std::size_t c = 0; c < 2; ++c) {
      const std::vector<double> amb = LoopWithCrossfade(ambience->channel(c), length, xf);
      for (std::size_t i = 0; i < length; ++i) out[c][i] += g * amb[i];
    }
  }
  double peak = 0.0;
  for (const auto& ch : out)
    for (double v : ch) peak = std::max(peak, std::abs(v));
  double headroom = 1.0;
  if (peak > 1.0) {
    // One gain for both ears keeps the interaural level difference.
    headroom = (1.0 - 1e-12) / peak;
    for (auto& ch : out)
      for (double& v : ch) v *= headroom;
  }
  return RenderResult{AudioClip(std::move(out), rate), headroom, alignment};
}

namespace {

std::string SafeName(const std::string& id) {
  std::string s = id;
  for (char& c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '.' || c == '_';
    if (!ok) c = '_';
  }
  return s;
}

// IRs and ambiences are shared across stimuli: read each file once and
// resample per speech rate on demand.
class ClipCache {
 public:
  explicit ClipCache(const Corpus& corpus) : corpus_(corpus) {}

  std::shared_ptr<const AudioClip> Get(const std::string& rel, int rate) {
    const auto key = std::make_pair(rel, rate);
    std::lock_guard lock(mu_);
    auto it = clips_.find(key);
    if (it != clips_.end()) return it->second;
    auto raw = raw_.find(rel);
    if (raw == raw_.end())
      raw = raw_.emplace(rel, std::make_shared<AudioClip>(read_wav(corpus_.Resolve(rel)))).first;
    auto clip = raw->second->sample_rate() == rate
                    ? raw->second
                    : std::make_shared<AudioClip>(resample(*raw->second, rate));
    clips_.emplace(key, clip);
    return clip;
  }

 private:
  const Corpus& corpus_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<const AudioClip>> raw_;
  std::map<std::pair<std::string, int>, std::shared_ptr<const AudioClip>> clips_;
};

}  // namespace

BatchRenderResult batch_render(const Corpus& corpus, const std::filesystem::path& out_dir,
                               int threads, const RenderOptions& defaults) {
  std::vector<ConditionRecord> conditions = corpus.conditions;
  if (conditions.empty()) {
    for (const auto& ir : corpus.irs) {
      if (corpus.ambiences.empty()) conditions.push_back({ir.ir_id, "", 0.0});
      for (const auto& a : corpus.ambiences)
        conditions.push_back({ir.ir_id, a.ambience_id, defaults.ambience_gain_db});
    }
  }
  if (conditions.empty()) throw InvalidArgument("batch_render: manifest has no IRs");
  if (corpus.utterances.empty()) throw InvalidArgument("batch_render: manifest has no utterances");
  std::filesystem::create_directories(out_dir);

  std::map<std::string, const IrRecord*> irs;
  for (const auto& ir : corpus.irs) irs[ir.ir_id] = &ir;
  std::map<std::string, const AmbienceRecord*> ambiences;
  for (const auto& a : corpus.ambiences) ambiences[a.ambience_id] = &a;

  const std::size_t nc = conditions.size();
  const std::size_t total = corpus.utterances.size() * nc;
  std::vector<std::optional<StimulusRecord>> rows(total);
  std::vector<std::string> errors(total);
  ClipCache cache(corpus);

  ParallelFor(total, threads, [&](std::size_t item) {
    const Utterance& u = corpus.utterances[item / nc];
    const std::size_t ci = item % nc;
    const ConditionRecord& cond = conditions[ci];
    const std::string amb_name = cond.ambience_id.empty() ? "dry" : cond.ambience_id;
    const std::string stem = SafeName(u.utterance_id) + "__c" + std::to_string(ci) + "_" +
                             SafeName(cond.ir_id) + "_" + SafeName(amb_name);
    try {
      const AudioClip speech = LoadUtterance(corpus, u);
      const int rate = speech.sample_rate();
      auto it = irs.find(cond.ir_id);
      if (it == irs.end()) throw InvalidArgument("unknown ir '" + cond.ir_id + "'");
      ImpulseResponse ir{*cache.Get(it->second->path, rate), it->second->distance_m,
                         it->second->session_id};
      std::shared_ptr<const AudioClip> amb;
      if (!cond.ambience_id.empty()) {
        auto a = ambiences.find(cond.ambience_id);
        if (a == ambiences.end()) throw InvalidArgument("unknown ambience '" + cond.ambience_id + "'");
        amb = cache.Get(a->second->path, rate);
      }
      RenderOptions opt = defaults;
      opt.ambience_gain_db = amb ? cond.ambience_gain_db : kAmbienceOff;
      RenderResult r = render_at_listener(speech, ir, amb.get(), opt);
      const std::string file = stem + ".wav";
      write_wav(r.audio, out_dir / file, WavEncoding::kFloat32);
      StimulusRecord st;
      st.stimulus_id = stem;
      st.utterance_id = u.utterance_id;
      st.ir_id = cond.ir_id;
      st.ambience_id = cond.ambience_id;
      if (amb && opt.ambience_gain_db != kAmbienceOff) st.ambience_gain_db = opt.ambience_gain_db;
      st.headroom_gain = r.headroom_gain;
      st.alignment_gain = r.alignment_gain;
      st.path = file;
      rows[item] = std::move(st);
    } catch (const std::exception& e) {
      errors[item] = stem + ": " + e.what();
    }
  });

  BatchRenderResult result;
  for (std::size_t i = 0; i < total; ++i) {
    if (rows[i]) result.stimuli.push_back(std::move(*rows[i]));
    if (!errors[i].empty()) result.errors.push_back(std::move(errors[i]));
  }
  return result;
}

}  // namespace earshot
