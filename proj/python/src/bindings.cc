// python/src/bindings.cc

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

#include <sstream>
#include <string>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "earshot/audio_io.h"
#include "earshot/augment.h"
#include "earshot/cli.h"
#include "earshot/dsp.h"
#include "earshot/error.h"
#include "earshot/features.h"
#include "earshot/render.h"
#include "earshot/stats.h"
#include "earshot/vad.h"

namespace py = pybind11;
using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

namespace earshot {
namespace {

std::vector<double> ToVector(const Array& a, const char* what) {
  if (a.ndim() != 1) throw InvalidArgument(std::string(what) + ": expected a 1-D array");
  return {a.data(), a.data() + a.size()};
}

// 1-D array is mono; 2-D is (channels, samples).
AudioClip ToClip(const Array& a, int rate, const char* what) {
  if (a.ndim() == 1) return AudioClip::mono(ToVector(a, what), rate);
  if (a.ndim() != 2) throw InvalidArgument(std::string(what) + ": expected 1-D or 2-D audio");
  std::vector<std::vector<double>> ch(a.shape(0));
  for (py::ssize_t c = 0; c < a.shape(0); ++c)
    ch[c].assign(a.data(c, 0), a.data(c, 0) + a.shape(1));
  return AudioClip(std::move(ch), rate);
}

Array FromVector(std::span<const double> x) {
  Array out(std::vector<py::ssize_t>{static_cast<py::ssize_t>(x.size())});
  std::copy(x.begin(), x.end(), out.mutable_data());
  return out;
}

Array FromClip(const AudioClip& clip) {
  Array out({static_cast<py::ssize_t>(clip.num_channels()),
             static_cast<py::ssize_t>(clip.num_samples())});
  for (std::size_t c = 0; c < clip.num_channels(); ++c)
    std::copy(clip.channel(c).begin(), clip.channel(c).end(), out.mutable_data(c, 0));
  return out;
}

py::dict FeaturesDict(const UtteranceFeatures& f) {
  py::dict d;
  d["rms_db"] = f.rms_db;
  d["f0_mean_hz"] = f.f0_mean_hz;
  d["f1_mean_hz"] = f.f1_mean_hz;
  d["spectral_tilt_db_per_oct"] = f.spectral_tilt_db_per_oct;
  d["voiced_frames"] = f.voiced_frame_count;
  return d;
}

py::dict TestDict(const TestResult& r) {
  py::dict d;
  d["statistic"] = r.statistic;
  d["dof"] = r.dof;
  d["p_value"] = r.p_value;
  d["significant"] = r.significant;
  return d;
}

}  // namespace
}  // namespace earshot

PYBIND11_MODULE(_earshot, m) {
  using namespace earshot;
  m.doc() = "Speech corpus analysis and augmentation core";
  // Later registrations are tried first, so the base class goes first.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def("read_wav", [](const std::filesystem::path& path) {
    const AudioClip clip = read_wav(path);
    return py::make_tuple(FromClip(clip), clip.sample_rate());
  }, py::arg("path"), "Returns (samples[channels, n], sample_rate).");

  m.def("write_wav", [](const std::filesystem::path& path, const Array& samples, int rate,
                        const std::string& encoding) {
    write_wav(ToClip(samples, rate, "write_wav"), path, ParseWavEncoding(encoding));
  }, py::arg("path"), py::arg("samples"), py::arg("sample_rate"), py::arg("encoding") = "pcm16");

  m.def("resample", [](const Array& x, int rate, int target) {
    return FromVector(resample(ToClip(x, rate, "resample"), target).channel(0));
  }, py::arg("samples"), py::arg("sample_rate"), py::arg("target_rate"));

  m.def("fast_convolve", [](const Array& a, const Array& b) {
    return FromVector(fast_convolve(ToVector(a, "fast_convolve"), ToVector(b, "fast_convolve")));
  }, py::arg("signal"), py::arg("kernel"));

  m.def("compute_features", [](const Array& x, int rate) {
    return FeaturesDict(compute_features(ToClip(x, rate, "compute_features")));
  }, py::arg("samples"), py::arg("sample_rate"));

  m.def("segment", [](const Array& x, int rate, double onset_db, double offset_db,
                      double hangover_s, double min_duration_s, double merge_gap_s) {
    VadConfig c;
    c.onset_margin_db = onset_db;
    c.offset_margin_db = offset_db;
    c.hangover_s = hangover_s;
    c.min_duration_s = min_duration_s;
    c.merge_gap_s = merge_gap_s;
    std::vector<std::pair<double, double>> out;
    for (const Segment& s : segment(ToClip(x, rate, "segment"), c)) out.emplace_back(s.start_s, s.end_s);
    return out;
  }, py::arg("samples"), py::arg("sample_rate"), py::arg("onset_db") = 12.0,
     py::arg("offset_db") = 6.0, py::arg("hangover_s") = 0.3, py::arg("min_duration_s") = 0.3,
     py::arg("merge_gap_s") = 0.2);

  m.def("mix_at_snr", [](const Array& speech, const Array& noise, int rate, double snr_db,
                         std::uint64_t seed) {
    const MixResult r = mix_at_snr(ToClip(speech, rate, "speech"), ToClip(noise, rate, "noise"),
                                   snr_db, seed);
    py::dict d;
    d["mixture"] = FromVector(r.mixture.channel(0));
    d["scaled_noise"] = FromVector(r.scaled_noise.channel(0));
    d["noise_gain"] = r.noise_gain;
    d["headroom_gain"] = r.headroom_gain;
    d["noise_offset"] = r.noise_offset;
    return d;
  }, py::arg("speech"), py::arg("noise"), py::arg("sample_rate"), py::arg("snr_db"),
     py::arg("seed") = 0);

  m.def("tilt_boost", [](const Array& x, int rate, double boost) {
    return FromVector(tilt_boost(ToClip(x, rate, "tilt_boost"), boost).channel(0));
  }, py::arg("samples"), py::arg("sample_rate"), py::arg("boost_db_per_oct"));

  m.def("render_at_listener", [](const Array& speech, const Array& ir, int rate,
                                 std::optional<Array> ambience, double ambience_gain_db) {
    const ImpulseResponse imp{ToClip(ir, rate, "ir"), 0.0, ""};
    std::optional<AudioClip> amb;
    if (ambience) amb = ToClip(*ambience, rate, "ambience");
    RenderOptions opt;
    opt.ambience_gain_db = ambience_gain_db;
    const RenderResult r =
        render_at_listener(ToClip(speech, rate, "speech"), imp, amb ? &*amb : nullptr, opt);
    return py::make_tuple(FromClip(r.audio), r.headroom_gain);
  }, py::arg("speech"), py::arg("ir"), py::arg("sample_rate"), py::arg("ambience") = py::none(),
     py::arg("ambience_gain_db") = 0.0);

  m.def("welch_t_test", [](const Array& a, const Array& b, double alpha) {
    return TestDict(welch_t_test(ToVector(a, "a"), ToVector(b, "b"), alpha));
  }, py::arg("a"), py::arg("b"), py::arg("alpha") = 0.05);

  m.def("pearson", [](const Array& x, const Array& y, double alpha) -> py::object {
    const auto r = pearson(ToVector(x, "x"), ToVector(y, "y"), alpha);
    if (!r) return py::none();
    py::dict d;
    d["r"] = r->r;
    d["n"] = r->n;
    d["p_value"] = r->p_value;
    d["significant"] = r->significant;
    return d;
  }, py::arg("x"), py::arg("y"), py::arg("alpha") = 0.05);

  m.def("run_cli", [](std::vector<std::string> args) {
    args.insert(args.begin(), "earshot");
    std::ostringstream out, err;
    int code;
    {
      py::gil_scoped_release release;
      code = RunCli(args, out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"), "Runs the command line; returns (exit_code, stdout, stderr).");
}
