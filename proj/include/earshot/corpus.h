// include/earshot/corpus.h

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

#ifndef EARSHOT_CORPUS_H_
#define EARSHOT_CORPUS_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "earshot/audio_io.h"
#include "earshot/features.h"
#include "earshot/vad.h"

namespace earshot {

// Ordered quiet < moderate < noisy.
enum class EnvLabel { kQuiet = 0, kModerate = 1, kNoisy = 2 };

inline constexpr EnvLabel kAllEnvLabels[] = {EnvLabel::kQuiet, EnvLabel::kModerate,
                                             EnvLabel::kNoisy};

const char* EnvLabelName(EnvLabel label);
EnvLabel ParseEnvLabel(const std::string& name);

struct EnvThresholds {
  double low_db = 55.0;
  double high_db = 70.0;
};

// quiet below low, moderate in [low, high), noisy at or above high.
EnvLabel assign_env_label(double ambient_db, const EnvThresholds& thresholds = {});

struct SessionManifest {
  std::string session_id;
  std::vector<std::string> speakers;  // exactly two
  double ambient_db = 0.0;
  EnvLabel env_label = EnvLabel::kQuiet;
  double distance_m = 0.0;
  std::string noise_source;
  // Role -> path relative to the manifest. Roles: "close:<speaker>",
  // "binaural:<speaker>", "noise_only", "ir".
  std::map<std::string, std::string> files;

  bool HasSpeaker(const std::string& id) const;
  static std::string CloseTalkRole(const std::string& speaker) { return "close:" + speaker; }

  bool operator==(const SessionManifest&) const = default;
};

struct Utterance {
  std::string utterance_id;
  std::string session_id;  // may be empty for standalone (audio-backed) items
  std::string speaker_id;
  // Position inside the source recording. Absent means the whole file given
  // by `audio`.
  std::optional<Segment> segment;
  std::string transcript;
  std::string audio;  // standalone WAV, relative to the manifest
  std::optional<UtteranceFeatures> features;
  nlohmann::json provenance;  // free-form object, null when absent

  double start_s() const { return segment ? segment->start_s : 0.0; }
  bool operator==(const Utterance&) const = default;
};

struct IrRecord {
  std::string ir_id;
  std::string path;
  double distance_m = 0.0;
  std::string session_id;
  bool operator==(const IrRecord&) const = default;
};

struct AmbienceRecord {
  std::string ambience_id;
  std::string path;
  bool operator==(const AmbienceRecord&) const = default;
};

// One rendering condition of an evaluation manifest.
struct ConditionRecord {
  std::string ir_id;
  std::string ambience_id;  // empty: no ambience
  double ambience_gain_db = 0.0;
  bool operator==(const ConditionRecord&) const = default;
};

struct StimulusRecord {
  std::string stimulus_id;
  std::string utterance_id;
  std::string ir_id;
  std::string ambience_id;
  std::optional<double> ambience_gain_db;  // nullopt: ambience disabled
  double headroom_gain = 1.0;
  std::optional<double> alignment_gain;  // set when level alignment ran
  std::string path;
  bool operator==(const StimulusRecord&) const = default;
};

// Everything one manifest file holds. Paths in records are kept as written
// and resolved against base_dir.
struct Corpus {
  std::filesystem::path base_dir;
  std::vector<SessionManifest> sessions;
  std::vector<Utterance> utterances;
  std::vector<IrRecord> irs;
  std::vector<AmbienceRecord> ambiences;
  std::vector<ConditionRecord> conditions;
  std::vector<StimulusRecord> stimuli;

  const SessionManifest* FindSession(const std::string& id) const;
  std::filesystem::path Resolve(const std::string& relative) const;
  // File holding the utterance's audio: `audio` when set, else the
  // speaker's close-talk recording.
  std::filesystem::path UtteranceSource(const Utterance& u) const;
};

// Reads `u` as a mono clip (channel-averaged), cut to its segment.
AudioClip LoadUtterance(const Corpus& corpus, const Utterance& u);
// Cuts `segment` out of an already loaded recording.
AudioClip CutSegment(const AudioClip& recording, const Segment& segment);

struct TurnPair {
  std::size_t target;    // index of the speaker's utterance
  std::size_t previous;  // index of the interlocutor's last utterance before it
  bool operator==(const TurnPair&) const = default;
};

// Pairs every utterance with the latest earlier-starting utterance by a
// different speaker. `utterances` must be sorted by start time.
std::vector<TurnPair> turn_pairs(std::span<const Utterance> utterances);

// Time-ordered utterances of one session.
std::vector<Utterance> SessionUtterances(const Corpus& corpus, const std::string& session_id);

// JSON-lines manifest. Relative paths resolve against the manifest's
// directory. Referenced files must exist; schema violations name the line
// and field.
Corpus load_manifest(const std::filesystem::path& path);

// Writes `corpus`, rebasing relative paths onto the new manifest location.
void save_manifest(const Corpus& corpus, const std::filesystem::path& path);

nlohmann::json FeaturesToJson(const UtteranceFeatures& f);
UtteranceFeatures FeaturesFromJson(const nlohmann::json& j);

// Deterministic id for utterances that do not carry one.
std::string DefaultUtteranceId(const Utterance& u);

}  // namespace earshot

#endif  // EARSHOT_CORPUS_H_
