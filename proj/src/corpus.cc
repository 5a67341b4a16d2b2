// src/corpus.cc

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

#include "earshot/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "earshot/error.h"

namespace earshot {

using nlohmann::json;

const char* EnvLabelName(EnvLabel label) {
  switch (label) {
    case EnvLabel::kQuiet: return "quiet";
    case EnvLabel::kModerate: return "moderate";
    case EnvLabel::kNoisy: return "noisy";
  }
  return "?";
}

EnvLabel ParseEnvLabel(const std::string& name) {
  for (EnvLabel l : kAllEnvLabels)
    if (name == EnvLabelName(l)) return l;
  throw InvalidArgument("unknown env-label '" + name + "' (expected quiet, moderate or noisy)");
}

EnvLabel assign_env_label(double ambient_db, const EnvThresholds& t) {
  if (!(t.low_db < t.high_db))
    throw InvalidArgument("assign_env_label: thresholds inverted (low must be < high)");
  if (ambient_db < t.low_db) return EnvLabel::kQuiet;
  if (ambient_db < t.high_db) return EnvLabel::kModerate;
  return EnvLabel::kNoisy;
}

bool SessionManifest::HasSpeaker(const std::string& id) const {
  return std::find(speakers.begin(), speakers.end(), id) != speakers.end();
}

const SessionManifest* Corpus::FindSession(const std::string& id) const {
  for (const auto& s : sessions)
    if (s.session_id == id) return &s;
  return nullptr;
}

std::filesystem::path Corpus::Resolve(const std::string& relative) const {
  const std::filesystem::path p(relative);
  if (p.is_absolute()) return p;
  return (base_dir / p).lexically_normal();
}

std::filesystem::path Corpus::UtteranceSource(const Utterance& u) const {
  if (!u.audio.empty()) return Resolve(u.audio);
  const SessionManifest* s = FindSession(u.session_id);
  if (s == nullptr)
    throw InvalidArgument("utterance '" + u.utterance_id + "': unknown session '" +
                          u.session_id + "'");
  const auto it = s->files.find(SessionManifest::CloseTalkRole(u.speaker_id));
  if (it == s->files.end())
    throw InvalidArgument("session '" + s->session_id + "' has no close-talk file for '" +
                          u.speaker_id + "'");
  return Resolve(it->second);
}

AudioClip CutSegment(const AudioClip& recording, const Segment& segment) {
  const int rate = recording.sample_rate();
  const auto n = recording.num_samples();
  const auto begin = std::min<std::size_t>(
      n, static_cast<std::size_t>(std::max(0L, std::lround(segment.start_s * rate))));
  const auto end = std::min<std::size_t>(
      n, static_cast<std::size_t>(std::max(0L, std::lround(segment.end_s * rate))));
  if (end <= begin)
    throw InvalidArgument("segment [" + std::to_string(segment.start_s) + ", " +
                          std::to_string(segment.end_s) + "] is empty in the recording");
  // Channel average over the span only; same arithmetic as to_mono.
  std::vector<double> y(end - begin, 0.0);
  for (const auto& ch : recording.channels())
    for (std::size_t i = begin; i < end; ++i) y[i - begin] += ch[i];
  if (recording.num_channels() > 1) {
    const double scale = 1.0 / static_cast<double>(recording.num_channels());
    for (double& v : y) v *= scale;
  }
  return AudioClip::mono(std::move(y), rate, recording.source_path());
}

AudioClip LoadUtterance(const Corpus& corpus, const Utterance& u) {
  const AudioClip recording = read_wav(corpus.UtteranceSource(u));
  if (!u.segment) return to_mono(recording);
  return CutSegment(recording, *u.segment);
}

std::vector<TurnPair> turn_pairs(std::span<const Utterance> utterances) {
  for (std::size_t i = 1; i < utterances.size(); ++i)
    if (utterances[i].start_s() < utterances[i - 1].start_s())
      throw InvalidArgument("turn_pairs: utterances must be sorted by start time");

  std::vector<TurnPair> pairs;
  // latest: most recent utterance; other: most recent one whose speaker
  // differs from latest's. Only utterances with strictly earlier starts
  // are folded in.
  std::optional<std::size_t> latest, other;
  std::size_t folded = 0;
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    while (folded < i && utterances[folded].start_s() < utterances[i].start_s()) {
      if (latest && utterances[*latest].speaker_id != utterances[folded].speaker_id)
        other = latest;
      latest = folded;
      ++folded;
    }
    const std::string& spk = utterances[i].speaker_id;
    if (latest && utterances[*latest].speaker_id != spk)
      pairs.push_back({i, *latest});
    else if (other)
      pairs.push_back({i, *other});
  }
  return pairs;
}

std::vector<Utterance> SessionUtterances(const Corpus& corpus, const std::string& session_id) {
  std::vector<Utterance> out;
  for (const auto& u : corpus.utterances)
    if (u.session_id == session_id) out.push_back(u);
  std::stable_sort(out.begin(), out.end(), [](const Utterance& a, const Utterance& b) {
    return a.start_s() < b.start_s();
  });
  return out;
}

std::string DefaultUtteranceId(const Utterance& u) {
  if (u.session_id.empty() && !u.audio.empty())
    return std::filesystem::path(u.audio).stem().string();
  std::ostringstream id;
  id << u.session_id << '_' << u.speaker_id << '_' << std::setw(7) << std::setfill('0')
     << std::llround(u.start_s() * 1000.0);
  return id.str();
}

namespace {

json OptionalNumber(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

// Field accessors that report the manifest location on failure.
class RecordReader {
 public:
  RecordReader(const json& record, const std::filesystem::path& file, std::size_t line)
      : record_(record), file_(file), line_(line) {}

  [[noreturn]] void Fail(const std::string& field, const std::string& what) const {
    throw InvalidArgument(file_.string() + ":" + std::to_string(line_) + ": field '" + field +
                          "': " + what);
  }

  bool Has(const std::string& field) const {
    return record_.contains(field) && !record_.at(field).is_null();
  }

  std::string String(const std::string& field, bool required = true) const {
    if (!Has(field)) {
      if (required) Fail(field, "missing");
      return {};
    }
    const json& v = record_.at(field);
    if (!v.is_string()) Fail(field, "expected a string");
    return v.get<std::string>();
  }

  double Number(const std::string& field) const {
    if (!Has(field)) Fail(field, "missing");
    const json& v = record_.at(field);
    if (!v.is_number()) Fail(field, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) Fail(field, "must be finite");
    return d;
  }

  std::optional<double> OptionalNumber(const std::string& field) const {
    if (!Has(field)) return std::nullopt;
    return Number(field);
  }

  const json& Raw(const std::string& field) const { return record_.at(field); }
  std::size_t line() const { return line_; }

 private:
  const json& record_;
  const std::filesystem::path& file_;
  std::size_t line_;
};

std::optional<double> FeatureField(const json& j, const char* name) {
  if (!j.contains(name) || j.at(name).is_null()) return std::nullopt;
  return j.at(name).get<double>();
}

}  // namespace

json FeaturesToJson(const UtteranceFeatures& f) {
  return json{{"rms_db", OptionalNumber(f.rms_db)},
              {"f0_mean_hz", OptionalNumber(f.f0_mean_hz)},
              {"f1_mean_hz", OptionalNumber(f.f1_mean_hz)},
              {"spectral_tilt_db_per_oct", OptionalNumber(f.spectral_tilt_db_per_oct)},
              {"voiced_frame_count", f.voiced_frame_count}};
}

UtteranceFeatures FeaturesFromJson(const json& j) {
  if (!j.is_object()) throw InvalidArgument("features: expected an object");
  UtteranceFeatures f;
  f.rms_db = FeatureField(j, "rms_db");
  f.f0_mean_hz = FeatureField(j, "f0_mean_hz");
  f.f1_mean_hz = FeatureField(j, "f1_mean_hz");
  f.spectral_tilt_db_per_oct = FeatureField(j, "spectral_tilt_db_per_oct");
  if (j.contains("voiced_frame_count")) f.voiced_frame_count = j.at("voiced_frame_count").get<std::size_t>();
  return f;
}

Corpus load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
  Corpus corpus;
  corpus.base_dir = std::filesystem::absolute(path).parent_path();

  std::vector<std::size_t> session_lines, utterance_lines;
  std::set<std::string> session_ids, utterance_ids;
  std::string text;
  std::size_t line_no = 0;
  const auto require_file = [&](const RecordReader& r, const std::string& field,
                                const std::string& rel) {
    if (!std::filesystem::exists(corpus.Resolve(rel)))
      r.Fail(field, "referenced file '" + corpus.Resolve(rel).string() + "' does not exist");
  };

  while (std::getline(in, text)) {
    ++line_no;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(text);
    } catch (const json::parse_error& e) {
      throw InvalidArgument(path.string() + ":" + std::to_string(line_no) +
                            ": invalid JSON: " + e.what());
    }
    if (!record.is_object())
      throw InvalidArgument(path.string() + ":" + std::to_string(line_no) +
                            ": expected a JSON object");
    const RecordReader r(record, path, line_no);
    const std::string kind = r.String("kind");

    if (kind == "session") {
      SessionManifest s;
      s.session_id = r.String("session_id");
      if (!session_ids.insert(s.session_id).second) r.Fail("session_id", "duplicate id");
      if (!r.Has("speakers") || !r.Raw("speakers").is_array()) r.Fail("speakers", "expected an array");
      for (const auto& v : r.Raw("speakers")) {
        if (!v.is_string()) r.Fail("speakers", "expected strings");
        s.speakers.push_back(v.get<std::string>());
      }
      if (s.speakers.size() != 2 || s.speakers[0] == s.speakers[1])
        r.Fail("speakers", "a session needs exactly two distinct speakers");
      s.ambient_db = r.Number("ambient_db");
      if (!(s.ambient_db > 0.0)) r.Fail("ambient_db", "must be > 0");
      try {
        s.env_label = r.Has("env_label") ? ParseEnvLabel(r.String("env_label"))
                                         : assign_env_label(s.ambient_db);
      } catch (const InvalidArgument& e) {
        r.Fail("env_label", e.what());
      }
      s.distance_m = r.OptionalNumber("distance_m").value_or(0.0);
      if (s.distance_m < 0.0) r.Fail("distance_m", "must be >= 0");
      s.noise_source = r.String("noise_source", false);
      if (r.Has("files")) {
        if (!r.Raw("files").is_object()) r.Fail("files", "expected an object");
        for (const auto& [role, v] : r.Raw("files").items()) {
          if (!v.is_string()) r.Fail("files." + role, "expected a path string");
          s.files[role] = v.get<std::string>();
          require_file(r, "files." + role, s.files[role]);
        }
      }
      corpus.sessions.push_back(std::move(s));
      session_lines.push_back(line_no);
    } else if (kind == "utterance") {
      Utterance u;
      u.session_id = r.String("session_id", false);
      u.speaker_id = r.String("speaker_id", false);
      u.transcript = r.String("transcript", false);
      u.audio = r.String("audio", false);
      const bool has_start = r.Has("start_s"), has_end = r.Has("end_s");
      if (has_start != has_end) r.Fail(has_start ? "end_s" : "start_s", "start_s and end_s go together");
      if (has_start) {
        u.segment = Segment{r.Number("start_s"), r.Number("end_s")};
        if (!(u.segment->start_s >= 0.0 && u.segment->start_s < u.segment->end_s))
          r.Fail("end_s", "need 0 <= start_s < end_s");
      }
      if (u.audio.empty()) {
        if (u.session_id.empty()) r.Fail("session_id", "required when 'audio' is absent");
        if (u.speaker_id.empty()) r.Fail("speaker_id", "required when 'audio' is absent");
        if (!u.segment) r.Fail("start_s", "required when 'audio' is absent");
      } else {
        require_file(r, "audio", u.audio);
      }
      if (r.Has("features")) {
        try {
          u.features = FeaturesFromJson(r.Raw("features"));
        } catch (const std::exception& e) {
          r.Fail("features", e.what());
        }
      }
      if (r.Has("provenance")) u.provenance = r.Raw("provenance");
      u.utterance_id = r.Has("utterance_id") ? r.String("utterance_id") : DefaultUtteranceId(u);
      if (!utterance_ids.insert(u.utterance_id).second) r.Fail("utterance_id", "duplicate id '" + u.utterance_id + "'");
      corpus.utterances.push_back(std::move(u));
      utterance_lines.push_back(line_no);
    } else if (kind == "ir") {
      IrRecord ir;
      ir.ir_id = r.String("ir_id");
      ir.path = r.String("path");
      require_file(r, "path", ir.path);
      ir.distance_m = r.OptionalNumber("distance_m").value_or(0.0);
      ir.session_id = r.String("session_id", false);
      corpus.irs.push_back(std::move(ir));
    } else if (kind == "ambience") {
      AmbienceRecord a;
      a.ambience_id = r.String("ambience_id");
      a.path = r.String("path");
      require_file(r, "path", a.path);
      corpus.ambiences.push_back(std::move(a));
    } else if (kind == "condition") {
      ConditionRecord c;
      c.ir_id = r.String("ir_id");
      c.ambience_id = r.String("ambience_id", false);
      c.ambience_gain_db = r.OptionalNumber("ambience_gain_db").value_or(0.0);
      corpus.conditions.push_back(std::move(c));
    } else if (kind == "stimulus") {
      StimulusRecord st;
      st.stimulus_id = r.String("stimulus_id");
      st.utterance_id = r.String("utterance_id");
      st.ir_id = r.String("ir_id");
      st.ambience_id = r.String("ambience_id", false);
      st.ambience_gain_db = r.OptionalNumber("ambience_gain_db");
      st.headroom_gain = r.OptionalNumber("headroom_gain").value_or(1.0);
      st.alignment_gain = r.OptionalNumber("alignment_gain");
      st.path = r.String("path");
      require_file(r, "path", st.path);
      corpus.stimuli.push_back(std::move(st));
    } else {
      r.Fail("kind", "unknown record kind '" + kind + "'");
    }
  }

  // Cross-record checks.
  for (std::size_t i = 0; i < corpus.utterances.size(); ++i) {
    const Utterance& u = corpus.utterances[i];
    const std::string where = path.string() + ":" + std::to_string(utterance_lines[i]) + ": ";
    if (!u.session_id.empty()) {
      const SessionManifest* s = corpus.FindSession(u.session_id);
      if (s == nullptr)
        throw InvalidArgument(where + "field 'session_id': unknown session '" + u.session_id + "'");
      if (!s->HasSpeaker(u.speaker_id))
        throw InvalidArgument(where + "field 'speaker_id': '" + u.speaker_id +
                              "' is not a speaker of session '" + u.session_id + "'");
    }
    if (u.segment) {
      const auto source = corpus.UtteranceSource(u);
      const WavInfo info = read_wav_info(source);
      if (u.segment->end_s > info.duration_s() + 1.0 / info.sample_rate)
        throw InvalidArgument(where + "field 'end_s': segment ends after the recording (" +
                              std::to_string(info.duration_s()) + " s in '" + source.string() + "')");
    }
  }
  for (const auto& c : corpus.conditions) {
    const bool ir_ok = std::any_of(corpus.irs.begin(), corpus.irs.end(),
                                   [&](const IrRecord& ir) { return ir.ir_id == c.ir_id; });
    if (!ir_ok) throw InvalidArgument(path.string() + ": condition references unknown ir '" + c.ir_id + "'");
    if (!c.ambience_id.empty() &&
        std::none_of(corpus.ambiences.begin(), corpus.ambiences.end(),
                     [&](const AmbienceRecord& a) { return a.ambience_id == c.ambience_id; }))
      throw InvalidArgument(path.string() + ": condition references unknown ambience '" +
                            c.ambience_id + "'");
  }
  return corpus;
}

void save_manifest(const Corpus& corpus, const std::filesystem::path& path) {
  const auto new_dir = std::filesystem::absolute(path).parent_path();
  const auto rebase = [&](const std::string& rel) -> std::string {
    if (rel.empty()) return rel;
    const std::filesystem::path p(rel);
    if (p.is_absolute()) return rel;
    const auto abs = std::filesystem::absolute(corpus.Resolve(rel)).lexically_normal();
    return abs.lexically_relative(new_dir.lexically_normal()).generic_string();
  };

  std::ostringstream out;
  for (const auto& s : corpus.sessions) {
    json files = json::object();
    for (const auto& [role, p] : s.files) files[role] = rebase(p);
    json j{{"kind", "session"},        {"session_id", s.session_id},
           {"speakers", s.speakers},   {"ambient_db", s.ambient_db},
           {"env_label", EnvLabelName(s.env_label)},
           {"distance_m", s.distance_m}, {"noise_source", s.noise_source},
           {"files", files}};
    out << j.dump() << '\n';
  }
  for (const auto& u : corpus.utterances) {
    json j{{"kind", "utterance"}, {"utterance_id", u.utterance_id}};
    if (!u.session_id.empty()) j["session_id"] = u.session_id;
    if (!u.speaker_id.empty()) j["speaker_id"] = u.speaker_id;
    if (u.segment) {
      j["start_s"] = u.segment->start_s;
      j["end_s"] = u.segment->end_s;
    }
    j["transcript"] = u.transcript;
    if (!u.audio.empty()) j["audio"] = rebase(u.audio);
    if (u.features) j["features"] = FeaturesToJson(*u.features);
    if (!u.provenance.is_null()) j["provenance"] = u.provenance;
    out << j.dump() << '\n';
  }
  for (const auto& ir : corpus.irs) {
    json j{{"kind", "ir"}, {"ir_id", ir.ir_id}, {"path", rebase(ir.path)},
           {"distance_m", ir.distance_m}};
    if (!ir.session_id.empty()) j["session_id"] = ir.session_id;
    out << j.dump() << '\n';
  }
  for (const auto& a : corpus.ambiences)
    out << json{{"kind", "ambience"}, {"ambience_id", a.ambience_id}, {"path", rebase(a.path)}}.dump()
        << '\n';
  for (const auto& c : corpus.conditions) {
    json j{{"kind", "condition"}, {"ir_id", c.ir_id}, {"ambience_gain_db", c.ambience_gain_db}};
    if (!c.ambience_id.empty()) j["ambience_id"] = c.ambience_id;
    out << j.dump() << '\n';
  }
  for (const auto& st : corpus.stimuli) {
    json j{{"kind", "stimulus"},
           {"stimulus_id", st.stimulus_id},
           {"utterance_id", st.utterance_id},
           {"ir_id", st.ir_id},
           {"ambience_id", st.ambience_id},
           {"ambience_gain_db", OptionalNumber(st.ambience_gain_db)},
           {"headroom_gain", st.headroom_gain},
           {"alignment_gain", OptionalNumber(st.alignment_gain)},
           {"path", rebase(st.path)}};
    out << j.dump() << '\n';
  }

  std::ofstream file(path, std::ios::trunc);
  if (!file) throw IoError("cannot open '" + path.string() + "' for writing");
  file << out.str();
  if (!file) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace earshot
