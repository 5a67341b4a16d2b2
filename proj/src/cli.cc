// src/cli.cc

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

#include "earshot/cli.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "earshot/augment.h"
#include "earshot/error.h"
#include "earshot/parallel.h"
#include "earshot/render.h"
#include "earshot/stats.h"
#include "earshot/vad.h"

namespace earshot {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string Num(std::optional<double> v) {
  if (!v) return "";
  std::ostringstream s;
  s.precision(10);
  s << *v;
  return s.str();
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f << text;
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

// Rethrows e with `prefix` in front of the message, keeping the category.
[[noreturn]] void Rethrow(const std::string& prefix) {
  try {
    throw;
  } catch (const IoError& e) {
    throw IoError(prefix + e.what());
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(prefix + e.what());
  } catch (const std::exception& e) {
    throw Error(prefix + e.what());
  }
}

struct Common {
  std::string manifest;
  std::string out_dir;
  std::uint64_t seed = 0;
  int threads = 1;
};

void AddCommon(CLI::App* sub, Common& c) {
  sub->add_option("--manifest", c.manifest, "JSON-lines corpus manifest");
  sub->add_option("--out-dir", c.out_dir, "output directory");
  sub->add_option("--seed", c.seed, "seed for all randomness")->capture_default_str();
  sub->add_option("--threads", c.threads, "worker threads")
      ->check(CLI::Range(1, 1024))
      ->capture_default_str();
}

void AddFeatureFlags(CLI::App* sub, FeatureConfig& fc, std::string& rms_mode) {
  sub->add_option("--f0-min", fc.f0.min_hz, "F0 search floor (Hz)")->capture_default_str();
  sub->add_option("--f0-max", fc.f0.max_hz, "F0 search ceiling (Hz)")->capture_default_str();
  sub->add_option("--min-voiced-frames", fc.min_voiced_frames,
                  "utterances with fewer voiced frames get no features")
      ->capture_default_str();
  sub->add_option("--rms-mode", rms_mode, "voiced | whole")
      ->check(CLI::IsMember({"voiced", "whole"}))
      ->capture_default_str();
}

RmsMode ParseRmsMode(const std::string& s) {
  return s == "whole" ? RmsMode::kWholeUtterance : RmsMode::kVoicedFrames;
}

std::vector<Feature> ParseFeatureList(const std::vector<std::string>& names) {
  std::vector<Feature> out;
  for (const auto& n : names) out.push_back(ParseFeature(n));
  return out;
}

Corpus RequireManifest(const Common& c, const char* cmd) {
  if (c.manifest.empty()) throw InvalidArgument(std::string(cmd) + ": --manifest is required");
  return load_manifest(c.manifest);
}

fs::path RequireOutDir(const Common& c, const char* cmd) {
  if (c.out_dir.empty()) throw InvalidArgument(std::string(cmd) + ": --out-dir is required");
  fs::create_directories(c.out_dir);
  return c.out_dir;
}

bool NeedsFeatures(const Corpus& corpus) {
  return std::any_of(corpus.utterances.begin(), corpus.utterances.end(),
                     [](const Utterance& u) { return !u.features.has_value(); });
}

}  // namespace

void AttachFeatures(Corpus& corpus, const FeatureConfig& config, int threads) {
  // Group by source file so each recording is read once.
  std::map<std::string, std::vector<std::size_t>> by_source;
  for (std::size_t i = 0; i < corpus.utterances.size(); ++i)
    by_source[corpus.UtteranceSource(corpus.utterances[i]).string()].push_back(i);
  std::vector<const std::vector<std::size_t>*> groups;
  for (const auto& [path, idx] : by_source) groups.push_back(&idx);

  std::vector<UtteranceFeatures> results(corpus.utterances.size());
  ParallelFor(groups.size(), threads, [&](std::size_t g) {
    const auto& idx = *groups[g];
    const fs::path source = corpus.UtteranceSource(corpus.utterances[idx.front()]);
    const AudioClip recording = read_wav(source);
    for (std::size_t i : idx) {
      const Utterance& u = corpus.utterances[i];
      try {
        const AudioClip clip = u.segment ? CutSegment(recording, *u.segment) : to_mono(recording);
        results[i] = compute_features(clip, config);
      } catch (...) {
        Rethrow("utterance '" + u.utterance_id + "': ");
      }
    }
  });
  for (std::size_t i = 0; i < results.size(); ++i) corpus.utterances[i].features = results[i];
}

std::string FeaturesCsv(const Corpus& corpus) {
  std::ostringstream out;
  out << "utterance_id,session_id,speaker_id,env_label,rms_db,f0_mean_hz,f1_mean_hz,"
         "spectral_tilt_db_per_oct,voiced_frames\n";
  for (const auto& u : corpus.utterances) {
    const SessionManifest* s = corpus.FindSession(u.session_id);
    const UtteranceFeatures f = u.features.value_or(UtteranceFeatures{});
    out << u.utterance_id << ',' << u.session_id << ',' << u.speaker_id << ','
        << (s ? EnvLabelName(s->env_label) : "") << ',' << Num(f.rms_db) << ','
        << Num(f.f0_mean_hz) << ',' << Num(f.f1_mean_hz) << ',' << Num(f.spectral_tilt_db_per_oct)
        << ',' << f.voiced_frame_count << '\n';
  }
  return out.str();
}

namespace {

// --- subcommands ---

int RunSegment(const Common& c, const std::string& input, const VadConfig& vad,
               std::ostream& out) {
  vad.Validate();
  if (input.empty() == c.manifest.empty())
    throw InvalidArgument("segment: give exactly one of --input or --manifest");
  if (!input.empty()) {
    const AudioClip clip = to_mono(read_wav(input));
    std::ostringstream rows;
    for (const Segment& s : segment(clip, vad))
      rows << json{{"start_s", s.start_s}, {"end_s", s.end_s}}.dump() << '\n';
    if (c.out_dir.empty()) {
      out << rows.str();
    } else {
      fs::create_directories(c.out_dir);
      WriteText(fs::path(c.out_dir) / "segments.jsonl", rows.str());
    }
    return kExitOk;
  }

  Corpus corpus = load_manifest(c.manifest);
  const fs::path out_dir = RequireOutDir(c, "segment");
  const std::size_t ns = corpus.sessions.size();
  std::vector<std::vector<Utterance>> found(ns);
  ParallelFor(ns, c.threads, [&](std::size_t k) {
    const SessionManifest& s = corpus.sessions[k];
    for (const auto& spk : s.speakers) {
      auto it = s.files.find(SessionManifest::CloseTalkRole(spk));
      if (it == s.files.end())
        throw InvalidArgument("session '" + s.session_id + "' has no close-talk file for '" +
                              spk + "'");
      const AudioClip clip = to_mono(read_wav(corpus.Resolve(it->second)));
      for (const Segment& seg : segment(clip, vad)) {
        Utterance u;
        u.session_id = s.session_id;
        u.speaker_id = spk;
        u.segment = seg;
        u.utterance_id = DefaultUtteranceId(u);
        found[k].push_back(std::move(u));
      }
    }
    std::stable_sort(found[k].begin(), found[k].end(),
                     [](const Utterance& a, const Utterance& b) { return a.start_s() < b.start_s(); });
  });
  corpus.utterances.clear();
  for (auto& f : found)
    for (auto& u : f) corpus.utterances.push_back(std::move(u));
  save_manifest(corpus, out_dir / "segments.jsonl");
  out << corpus.utterances.size() << " utterances in " << ns << " sessions\n";
  return kExitOk;
}

int RunFeatures(const Common& c, const FeatureConfig& fc, std::ostream& out) {
  Corpus corpus = RequireManifest(c, "features");
  AttachFeatures(corpus, fc, c.threads);
  const std::string csv = FeaturesCsv(corpus);
  if (c.out_dir.empty()) {
    out << csv;
    return kExitOk;
  }
  const fs::path dir = RequireOutDir(c, "features");
  WriteText(dir / "features.csv", csv);
  save_manifest(corpus, dir / "features_manifest.jsonl");
  return kExitOk;
}

int RunAnalyze(const Common& c, const FeatureConfig& fc, const std::vector<Feature>& features,
               double alpha, std::ostream& out) {
  Corpus corpus = RequireManifest(c, "analyze");
  if (NeedsFeatures(corpus)) AttachFeatures(corpus, fc, c.threads);
  const EnvEffectReport report = env_effect_report(corpus, features, alpha);
  if (c.out_dir.empty()) {
    out << EnvEffectTestsCsv(report);
    return kExitOk;
  }
  const fs::path dir = RequireOutDir(c, "analyze");
  WriteText(dir / "env_effect.json", ToJson(report).dump(2) + "\n");
  WriteText(dir / "env_summary.csv", EnvEffectSummaryCsv(report));
  WriteText(dir / "env_tests.csv", EnvEffectTestsCsv(report));
  return kExitOk;
}

int RunEntrain(const Common& c, const FeatureConfig& fc, const std::vector<Feature>& features,
               double alpha, std::ostream& out) {
  Corpus corpus = RequireManifest(c, "entrain");
  if (NeedsFeatures(corpus)) AttachFeatures(corpus, fc, c.threads);
  const auto rows = entrainment_report(corpus, features, alpha);
  if (c.out_dir.empty()) {
    out << EntrainmentCsv(rows);
    return kExitOk;
  }
  const fs::path dir = RequireOutDir(c, "entrain");
  WriteText(dir / "entrainment.json", ToJson(rows).dump(2) + "\n");
  WriteText(dir / "entrainment.csv", EntrainmentCsv(rows));
  return kExitOk;
}

struct PseudoFlags {
  std::string noise_dir;
  std::vector<double> snr_grid{-5.0, 0.0, 5.0, 10.0, 20.0};
  double boost_ref_snr = 20.0;
  double boost_slope = 0.15;
  double boost_max = 6.0;
  bool prepend_prior = false;
};

std::vector<NamedClip> LoadNoiseBank(const std::string& dir, int rate) {
  if (dir.empty()) throw InvalidArgument("pseudo: --noise-dir is required");
  if (!fs::is_directory(dir)) throw InvalidArgument("pseudo: noise directory '" + dir + "' not found");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (e.is_regular_file() && ext == ".wav") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw InvalidArgument("pseudo: no .wav files in '" + dir + "'");
  std::vector<NamedClip> bank;
  for (const auto& f : files) {
    AudioClip clip = to_mono(read_wav(f));
    if (clip.sample_rate() != rate) clip = resample(clip, rate);
    bank.push_back({f.stem().string(), std::move(clip)});
  }
  return bank;
}

int RunPseudo(const Common& c, const PseudoFlags& p, std::ostream& out) {
  const Corpus corpus = RequireManifest(c, "pseudo");
  const fs::path dir = RequireOutDir(c, "pseudo");
  if (corpus.utterances.empty()) throw InvalidArgument("pseudo: manifest has no utterances");
  if (!(p.boost_slope >= 0.0) || !(p.boost_max >= 0.0) || !std::isfinite(p.boost_ref_snr))
    throw InvalidArgument("pseudo: bad boost map parameters");

  std::vector<std::optional<NamedClip>> loaded(corpus.utterances.size());
  ParallelFor(loaded.size(), c.threads, [&](std::size_t i) {
    loaded[i] = NamedClip{corpus.utterances[i].utterance_id, LoadUtterance(corpus, corpus.utterances[i])};
  });
  std::vector<NamedClip> utts;
  for (auto& u : loaded) utts.push_back(std::move(*u));
  const int rate = utts.front().clip.sample_rate();
  for (const auto& u : utts)
    if (u.clip.sample_rate() != rate)
      throw InvalidArgument("pseudo: utterance '" + u.id + "' is at " +
                            std::to_string(u.clip.sample_rate()) + " Hz, expected " +
                            std::to_string(rate));
  const std::vector<NamedClip> noise = LoadNoiseBank(p.noise_dir, rate);

  const BoostMap map = [p](double snr) {
    return std::clamp(std::max(0.0, p.boost_ref_snr - snr) * p.boost_slope, 0.0, p.boost_max);
  };
  PseudoOptions opt;
  opt.prepend_prior = p.prepend_prior;
  opt.threads = c.threads;

  fs::create_directories(dir / "hearing");
  fs::create_directories(dir / "target");
  Corpus result;
  result.base_dir = dir;
  result.utterances.resize(utts.size());
  ParallelFor(utts.size(), c.threads, [&](std::size_t i) {
    PseudoPair pair = MakePseudoPair(utts, i, noise, p.snr_grid, map, c.seed, opt);
    const std::string stem = pair.utterance_id;
    const std::string hearing = "hearing/" + stem + ".wav";
    const std::string target = "target/" + stem + ".wav";
    write_wav(pair.hearing, dir / hearing);
    write_wav(pair.target, dir / target);
    const Utterance& src = corpus.utterances[i];
    Utterance u;
    u.utterance_id = stem;
    u.speaker_id = src.speaker_id;
    u.transcript = src.transcript;
    u.audio = target;
    u.provenance = json{{"source_utterance", src.utterance_id},
                        {"hearing", hearing},
                        {"noise_id", pair.noise_id},
                        {"noise_offset", pair.noise_offset},
                        {"noise_gain", pair.noise_gain},
                        {"snr_db", pair.snr_db},
                        {"boost_db_per_oct", pair.boost_db_per_oct},
                        {"hearing_headroom_gain", pair.hearing_headroom_gain},
                        {"target_headroom_gain", pair.target_headroom_gain},
                        {"seed", c.seed}};
    if (!pair.prior_id.empty()) u.provenance["prior_utterance"] = pair.prior_id;
    result.utterances[i] = std::move(u);
  });
  save_manifest(result, dir / "pseudo_manifest.jsonl");
  out << result.utterances.size() << " pseudo pairs\n";
  return kExitOk;
}

int RunRender(const Common& c, const RenderOptions& opt, std::ostream& out, std::ostream& err) {
  const Corpus corpus = RequireManifest(c, "render-eval");
  const fs::path dir = RequireOutDir(c, "render-eval");
  const BatchRenderResult r = batch_render(corpus, dir, c.threads, opt);
  Corpus stimuli;
  stimuli.base_dir = dir;
  stimuli.stimuli = r.stimuli;
  save_manifest(stimuli, dir / "stimuli.jsonl");
  out << r.stimuli.size() << " stimuli written\n";
  if (!r.errors.empty()) {
    err << "render-eval: " << r.errors.size() << " item(s) failed\n";
    for (const auto& e : r.errors) err << "  " << e << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

int RunLabels(const Common& c, const EnvThresholds& th, std::ostream& out) {
  Corpus corpus = RequireManifest(c, "labels");
  std::ostringstream csv;
  csv << "session_id,ambient_db,env_label\n";
  for (auto& s : corpus.sessions) {
    s.env_label = assign_env_label(s.ambient_db, th);
    csv << s.session_id << ',' << Num(s.ambient_db) << ',' << EnvLabelName(s.env_label) << '\n';
  }
  if (c.out_dir.empty()) {
    out << csv.str();
    return kExitOk;
  }
  const fs::path dir = RequireOutDir(c, "labels");
  WriteText(dir / "labels.csv", csv.str());
  save_manifest(corpus, dir / "labels_manifest.jsonl");
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"earshot: conversational speech corpus toolkit", "earshot"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key = value config file(s); later files win")
      ->expected(0, 16);

  Common common;
  FeatureConfig fc;
  std::string rms_mode = "voiced";
  std::vector<std::string> feature_names{"rms", "f0", "f1", "tilt"};
  double alpha = 0.05;

  auto* seg = app.add_subcommand("segment", "split close-talk audio into utterances");
  std::string input;
  VadConfig vad;
  AddCommon(seg, common);
  seg->add_option("--input", input, "single WAV file");
  seg->add_option("--onset-db", vad.onset_margin_db, "onset margin above floor")->capture_default_str();
  seg->add_option("--offset-db", vad.offset_margin_db, "offset margin above floor")->capture_default_str();
  seg->add_option("--hangover", vad.hangover_s, "seconds")->capture_default_str();
  seg->add_option("--min-dur", vad.min_duration_s, "seconds")->capture_default_str();
  seg->add_option("--merge-gap", vad.merge_gap_s, "seconds")->capture_default_str();

  auto* feat = app.add_subcommand("features", "per-utterance prosodic features");
  AddCommon(feat, common);
  AddFeatureFlags(feat, fc, rms_mode);

  auto* analyze = app.add_subcommand("analyze", "environment effect report");
  AddCommon(analyze, common);
  AddFeatureFlags(analyze, fc, rms_mode);
  analyze->add_option("--features", feature_names, "features to test")->delimiter(',')->capture_default_str();
  analyze->add_option("--alpha", alpha, "significance level")->check(CLI::Range(0.0, 1.0))->capture_default_str();

  auto* entrain = app.add_subcommand("entrain", "entrainment correlations");
  AddCommon(entrain, common);
  AddFeatureFlags(entrain, fc, rms_mode);
  entrain->add_option("--features", feature_names, "features to correlate")->delimiter(',')->capture_default_str();
  entrain->add_option("--alpha", alpha, "significance level")->check(CLI::Range(0.0, 1.0))->capture_default_str();

  auto* pseudo = app.add_subcommand("pseudo", "noise-mixed / tilt-boosted training pairs");
  PseudoFlags pf;
  AddCommon(pseudo, common);
  pseudo->add_option("--noise-dir", pf.noise_dir, "directory of noise WAVs");
  pseudo->add_option("--snr", pf.snr_grid, "SNR grid (dB)")->delimiter(',')->capture_default_str();
  pseudo->add_option("--boost-ref-snr", pf.boost_ref_snr, "SNR at and above which no boost is applied")
      ->capture_default_str();
  pseudo->add_option("--boost-slope", pf.boost_slope, "dB/octave of boost per dB below the reference")
      ->capture_default_str();
  pseudo->add_option("--boost-max", pf.boost_max, "boost ceiling (dB/octave)")->capture_default_str();
  pseudo->add_flag("--prepend-prior", pf.prepend_prior, "put the previous utterance in the hearing audio");

  auto* render = app.add_subcommand("render-eval", "listener-position evaluation stimuli");
  RenderOptions ro;
  std::optional<double> align;
  AddCommon(render, common);
  render->add_option("--ambience-gain-db", ro.ambience_gain_db, "default ambience gain")
      ->capture_default_str();
  render->add_option("--align-rms-dbfs", align, "align dry speech to this active RMS first");
  render->add_option("--crossfade", ro.crossfade_s, "ambience loop crossfade (s)")->capture_default_str();

  auto* labels = app.add_subcommand("labels", "recompute environment labels");
  EnvThresholds th;
  AddCommon(labels, common);
  labels->add_option("--low-db", th.low_db, "quiet/moderate boundary")->capture_default_str();
  labels->add_option("--high-db", th.high_db, "moderate/noisy boundary")->capture_default_str();

  try {
    std::vector<std::string> rev(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
    std::reverse(rev.begin(), rev.end());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    fc.rms_mode = ParseRmsMode(rms_mode);
    if (!common.out_dir.empty()) {
      fs::create_directories(common.out_dir);
      WriteText(fs::path(common.out_dir) / "run_config.toml", app.config_to_str(true, false));
    }
    if (seg->parsed()) return RunSegment(common, input, vad, out);
    if (feat->parsed()) return RunFeatures(common, fc, out);
    if (analyze->parsed()) return RunAnalyze(common, fc, ParseFeatureList(feature_names), alpha, out);
    if (entrain->parsed()) return RunEntrain(common, fc, ParseFeatureList(feature_names), alpha, out);
    if (pseudo->parsed()) return RunPseudo(common, pf, out);
    if (render->parsed()) {
      ro.align_rms_dbfs = align;
      return RunRender(common, ro, out, err);
    }
    if (labels->parsed()) return RunLabels(common, th, out);
    err << "no subcommand\n";
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace earshot
