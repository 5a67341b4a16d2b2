// src/features.cc

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

#include "earshot/features.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "earshot/error.h"
#include "earshot/fft.h"

namespace earshot {

namespace {

constexpr double kAnalysisRateHz = 10000.0;

double ToDb(double power) { return 10.0 * std::log10(power + 1e-10); }

// Mono signal decimated to roughly kAnalysisRateHz.
struct AnalysisSignal {
  std::vector<double> samples;
  std::size_t factor = 1;
  double rate = 0.0;
};

std::size_t AnalysisFactor(int sample_rate, double target_hz) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(sample_rate / target_hz));
}

AnalysisSignal MakeAnalysisSignal(const AudioClip& clip, double target_hz) {
  AnalysisSignal a;
  a.factor = AnalysisFactor(clip.sample_rate(), target_hz);
  a.samples = Decimate(clip.channel(0), a.factor);
  a.rate = static_cast<double>(clip.sample_rate()) / static_cast<double>(a.factor);
  return a;
}

// Copies x[start, start + n) into out, zero-filling outside the signal.
void CopyPadded(std::span<const double> x, std::ptrdiff_t start,
                std::span<double> out) {
  const auto len = static_cast<std::ptrdiff_t>(x.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    const std::ptrdiff_t i = start + static_cast<std::ptrdiff_t>(j);
    out[j] = (i >= 0 && i < len) ? x[static_cast<std::size_t>(i)] : 0.0;
  }
}

// Vertex offset in [-1, 1] of the parabola through (-1, a), (0, b), (1, c).
double ParabolicOffset(double a, double b, double c) {
  const double denom = a - 2.0 * b + c;
  if (denom <= 0.0) return 0.0;
  return std::clamp(0.5 * (a - c) / denom, -1.0, 1.0);
}

VoicingTrack TrackF0(const AudioClip& clip, const AnalysisSignal& dec,
                     const F0Config& cfg, const FrameSpec& spec) {
  const auto full = clip.channel(0);
  const int fs = clip.sample_rate();
  const std::size_t factor = dec.factor;
  const double fd = dec.rate;
  const auto& xd = dec.samples;

  const std::size_t tau_min =
      std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(fd / cfg.max_hz)));
  const std::size_t tau_max = static_cast<std::size_t>(std::ceil(fd / cfg.min_hz)) + 1;
  const std::size_t width = tau_max;
  const std::size_t span_len = width + tau_max;
  const FftPlan& plan = GetFftPlan(NextPowerOfTwo(span_len));

  VoicingTrack track;
  track.spec = spec;
  track.sample_rate = fs;
  track.num_samples = full.size();
  const std::size_t count = spec.NumFrames(full.size());
  track.frame_times.resize(count);
  track.voiced.assign(count, false);
  track.f0_hz.assign(count, 0.0);

  std::vector<double> prefix(xd.size() + 1, 0.0);
  for (std::size_t i = 0; i < xd.size(); ++i) prefix[i + 1] = prefix[i] + xd[i] * xd[i];
  const auto clamp_idx = [&](std::ptrdiff_t i) {
    return static_cast<std::size_t>(
        std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(xd.size())));
  };

  std::vector<std::ptrdiff_t> starts(count);
  std::vector<double> energy_db(count, kEnergyFloorDb);
  std::vector<bool> covered(count, false);
  double loudest = kEnergyFloorDb;
  for (std::size_t k = 0; k < count; ++k) {
    track.frame_times[k] = spec.FrameCenter(k, fs);
    const double center_d =
        (static_cast<double>(k * spec.hop_length) + 0.5 * spec.frame_length) / factor;
    const std::ptrdiff_t s = std::lround(center_d - 0.5 * static_cast<double>(span_len));
    starts[k] = s;
    const std::size_t lo = clamp_idx(s);
    const std::size_t hi = clamp_idx(s + static_cast<std::ptrdiff_t>(span_len));
    const std::size_t valid = hi - lo;
    // Frames hanging mostly off either end of the clip are never voiced.
    covered[k] = 4 * valid >= 3 * span_len;
    if (valid > 0) energy_db[k] = ToDb((prefix[hi] - prefix[lo]) / static_cast<double>(valid));
    if (covered[k]) loudest = std::max(loudest, energy_db[k]);
  }
  const double gate = std::max(loudest - cfg.relative_floor_db, cfg.absolute_floor_db);

  std::vector<double> seg(span_len);
  std::vector<std::complex<double>> spec_a(plan.num_bins()), spec_b(plan.num_bins());
  std::vector<double> corr(plan.size());
  std::vector<double> diff(tau_max + 1), cmnd(tau_max + 1);
  std::vector<double> seg_prefix(span_len + 1);
  std::vector<double> fine;

  for (std::size_t k = 0; k < count; ++k) {
    if (!covered[k] || energy_db[k] < gate) continue;
    CopyPadded(xd, starts[k], seg);
    plan.Forward(std::span<const double>(seg).first(width), spec_a);
    plan.Forward(seg, spec_b);
    for (std::size_t b = 0; b < spec_a.size(); ++b) spec_b[b] *= std::conj(spec_a[b]);
    plan.Inverse(spec_b, corr);

    seg_prefix[0] = 0.0;
    for (std::size_t j = 0; j < span_len; ++j) seg_prefix[j + 1] = seg_prefix[j] + seg[j] * seg[j];
    const double e0 = seg_prefix[width];
    diff[0] = 0.0;
    cmnd[0] = 1.0;
    double running = 0.0;
    for (std::size_t tau = 1; tau <= tau_max; ++tau) {
      const double et = seg_prefix[tau + width] - seg_prefix[tau];
      diff[tau] = std::max(0.0, e0 + et - 2.0 * corr[tau]);
      running += diff[tau];
      cmnd[tau] = running > 0.0 ? diff[tau] * static_cast<double>(tau) / running : 1.0;
    }

    std::size_t best = 0;
    for (std::size_t tau = tau_min; tau < tau_max; ++tau) {
      if (cmnd[tau] < cfg.dip_threshold) {
        while (tau + 1 < tau_max && cmnd[tau + 1] < cmnd[tau]) ++tau;
        best = tau;
        break;
      }
    }
    if (best == 0) {
      best = tau_min;
      for (std::size_t tau = tau_min; tau < tau_max; ++tau)
        if (cmnd[tau] < cmnd[best]) best = tau;
    }
    if (cmnd[best] >= cfg.voicing_threshold) continue;

    double coarse = static_cast<double>(best);
    if (best > 1 && best + 1 <= tau_max)
      coarse += ParabolicOffset(cmnd[best - 1], cmnd[best], cmnd[best + 1]);

    // Refine on the full-rate signal around factor * coarse.
    const double guess = coarse * static_cast<double>(factor);
    const auto radius = static_cast<std::ptrdiff_t>(factor) + 1;
    const std::ptrdiff_t t0 = std::max<std::ptrdiff_t>(std::lround(guess) - radius, 1);
    const std::ptrdiff_t t1 = std::lround(guess) + radius;
    const auto wf = static_cast<std::ptrdiff_t>(width * factor);
    const double center = static_cast<double>(k * spec.hop_length) + 0.5 * spec.frame_length;
    const std::ptrdiff_t sf = std::lround(center - 0.5 * (static_cast<double>(wf) + guess));
    fine.resize(static_cast<std::size_t>(wf + t1));
    CopyPadded(full, sf, fine);
    std::vector<double> dfine(static_cast<std::size_t>(t1 - t0 + 1));
    for (std::ptrdiff_t tau = t0; tau <= t1; ++tau) {
      const double* a = fine.data();
      const double* b = fine.data() + tau;
      double acc = 0.0;
      for (std::ptrdiff_t j = 0; j < wf; ++j) {
        const double d = a[j] - b[j];
        acc += d * d;
      }
      dfine[static_cast<std::size_t>(tau - t0)] = acc;
    }
    const auto it = std::min_element(dfine.begin(), dfine.end());
    const auto idx = static_cast<std::size_t>(it - dfine.begin());
    double period = static_cast<double>(t0) + static_cast<double>(idx);
    if (idx > 0 && idx + 1 < dfine.size())
      period += ParabolicOffset(dfine[idx - 1], dfine[idx], dfine[idx + 1]);

    const double f0 = fs / period;
    if (f0 < cfg.min_hz || f0 > cfg.max_hz) continue;
    track.voiced[k] = true;
    track.f0_hz[k] = f0;
  }
  return track;
}

constexpr std::size_t kMaxLpcOrder = 32;
using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxLpcOrder, kMaxLpcOrder>;

// Eigenvalues with positive imaginary part of an upper Hessenberg matrix
// (the companion matrix already is one, so the reduction step is skipped).
bool UpperRoots(const SmallMatrix& h, Eigen::RealSchur<SmallMatrix>& schur,
                std::vector<std::complex<double>>& roots) {
  roots.clear();
  const Eigen::Index n = h.rows();
  schur.computeFromHessenberg(h, SmallMatrix::Identity(n, n), false);
  if (schur.info() != Eigen::Success) return false;
  const SmallMatrix& t = schur.matrixT();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i + 1 == n || t(i + 1, i) == 0.0) continue;  // real root
    const double p = 0.5 * (t(i, i) - t(i + 1, i + 1));
    const double z = p * p + t(i + 1, i) * t(i, i + 1);
    if (z < 0.0) roots.emplace_back(t(i + 1, i + 1) + p, std::sqrt(-z));
    ++i;
  }
  return true;
}

std::vector<std::optional<double>> F1FromAnalysis(const AnalysisSignal& dec,
                                                  const VoicingTrack& voicing,
                                                  const F1Config& cfg) {
  if (!(cfg.window_s > 0.0) || !(cfg.weight_window_s >= 0.0) || !(cfg.min_hz < cfg.max_hz) ||
      !(cfg.max_bandwidth_hz > 0.0) || !(cfg.pre_emphasis_hz >= 0.0))
    throw InvalidArgument("extract_f1: bad configuration");
  const double fd = dec.rate;
  const std::size_t order = 2 + static_cast<std::size_t>(fd / 1000.0);
  const auto win_len = static_cast<std::size_t>(std::lround(cfg.window_s * fd));
  if (win_len <= order) throw InvalidArgument("extract_f1: analysis window too short");
  const auto window = MakeWindow(Window::kHann, win_len);

  std::vector<double> emph(dec.samples.size());
  const double alpha = std::exp(-2.0 * M_PI * cfg.pre_emphasis_hz / fd);
  for (std::size_t i = 0; i < emph.size(); ++i)
    emph[i] = dec.samples[i] - (i > 0 ? alpha * dec.samples[i - 1] : 0.0);

  // Weighted LP looks back `ste` samples for the weight and `order` for the
  // predictor, so its segment starts that much earlier.
  const bool weighted = cfg.method == LpcMethod::kWeighted;
  const auto ste = static_cast<std::size_t>(std::lround(cfg.weight_window_s * fd));
  const std::size_t lead = weighted ? order + ste : 0;

  std::vector<std::optional<double>> out(voicing.num_frames());
  std::vector<double> seg(win_len + lead), r(order + 1), a(order + 1), tmp(order + 1);
  if (order > kMaxLpcOrder) throw InvalidArgument("extract_f1: analysis rate too high");
  Eigen::MatrixXd normal(order, order);
  SmallMatrix companion(order, order);
  Eigen::RealSchur<SmallMatrix> schur(static_cast<Eigen::Index>(order));
  std::vector<std::complex<double>> roots;
  Eigen::VectorXd rhs(order);
  std::vector<double> acc(order * (order + 1)), hist(order + 1);
  for (std::size_t k = 0; k < voicing.num_frames(); ++k) {
    if (!voicing.voiced[k]) continue;
    const double center_d =
        (static_cast<double>(k * voicing.spec.hop_length) + 0.5 * voicing.spec.frame_length) /
        static_cast<double>(dec.factor);
    const std::ptrdiff_t start = std::lround(center_d - 0.5 * static_cast<double>(win_len));
    CopyPadded(emph, start - static_cast<std::ptrdiff_t>(lead), seg);

    if (weighted) {
      // Minimise sum_n w_n e_n^2, w_n = energy of the `ste` samples before
      // n. This favours the stretch after each glottal closure and pulls
      // the poles off the harmonics.
      std::fill(acc.begin(), acc.end(), 0.0);
      double w = ste == 0 ? 1.0 : 0.0;
      for (std::size_t j = lead - ste; j < lead; ++j) w += seg[j] * seg[j];
      for (std::size_t n = lead; n < seg.size(); ++n) {
        // hist[i] = x[n - i], i = 0..order.
        for (std::size_t i = 0; i <= order; ++i) hist[i] = seg[n - i];
        // acc row i (0..order-1 for lag i+1) holds sum w x[n-i-1] x[n-m],
        // m = 0..order; column 0 is the right-hand side.
        for (std::size_t i = 1; i <= order; ++i) {
          const double wi = w * hist[i];
          double* row = acc.data() + (i - 1) * (order + 1);
          for (std::size_t m = 0; m <= order; ++m) row[m] += wi * hist[m];
        }
        if (ste > 0) w = std::max(0.0, w + seg[n] * seg[n] - seg[n - ste] * seg[n - ste]);
      }
      for (std::size_t i = 1; i <= order; ++i) {
        const double* row = acc.data() + (i - 1) * (order + 1);
        rhs(static_cast<Eigen::Index>(i - 1)) = -row[0];
        for (std::size_t m = 1; m <= order; ++m)
          normal(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(m - 1)) = row[m];
      }
      const double trace = normal.trace();
      if (!(trace > 0.0)) continue;
      normal.diagonal().array() += 1e-9 * trace / static_cast<double>(order);
      const Eigen::VectorXd sol = normal.ldlt().solve(rhs);
      if (!sol.allFinite()) continue;
      a[0] = 1.0;
      for (std::size_t i = 1; i <= order; ++i) a[i] = sol(static_cast<Eigen::Index>(i - 1));
    } else {
      for (std::size_t i = 0; i < win_len; ++i) seg[i] *= window[i];
      for (std::size_t lag = 0; lag <= order; ++lag) {
        double acc = 0.0;
        for (std::size_t i = lag; i < win_len; ++i) acc += seg[i] * seg[i - lag];
        r[lag] = acc;
      }
      if (r[0] <= 0.0) continue;

      // Levinson-Durbin: A(z) = 1 + a1 z^-1 + ... + ap z^-p.
      std::fill(a.begin(), a.end(), 0.0);
      a[0] = 1.0;
      double err = r[0] * (1.0 + 1e-9);  // slight white-noise correction
      bool ok = true;
      for (std::size_t i = 1; i <= order; ++i) {
        double acc = r[i];
        for (std::size_t j = 1; j < i; ++j) acc += a[j] * r[i - j];
        const double refl = -acc / err;
        tmp = a;
        for (std::size_t j = 1; j < i; ++j) a[j] = tmp[j] + refl * tmp[i - j];
        a[i] = refl;
        err *= 1.0 - refl * refl;
        if (err <= 0.0) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
    }

    companion.setZero();
    for (std::size_t j = 0; j < order; ++j) companion(0, static_cast<Eigen::Index>(j)) = -a[j + 1];
    for (std::size_t j = 1; j < order; ++j)
      companion(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j - 1)) = 1.0;
    if (!UpperRoots(companion, schur, roots)) continue;

    std::optional<double> lowest;
    for (const auto& z : roots) {
      if (z.imag() <= 0.0) continue;
      const double radius = std::abs(z);
      if (radius <= 0.0 || radius >= 1.0) continue;
      const double freq = std::arg(z) * fd / (2.0 * M_PI);
      const double bw = -std::log(radius) * fd / M_PI;
      if (bw >= cfg.max_bandwidth_hz || freq < cfg.min_hz || freq > cfg.max_hz) continue;
      if (!lowest || freq < *lowest) lowest = freq;
    }
    out[k] = lowest;
  }
  return out;
}

std::optional<double> Median(std::vector<double> v) {
  if (v.empty()) return std::nullopt;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

std::optional<double> MedianF1(const std::vector<std::optional<double>>& track) {
  std::vector<double> vals;
  for (const auto& v : track)
    if (v) vals.push_back(*v);
  return Median(std::move(vals));
}

}  // namespace

void F0Config::Validate(int sample_rate) const {
  if (!(min_hz > 0.0 && min_hz < max_hz && max_hz < 0.25 * sample_rate)) {
    std::ostringstream msg;
    msg << "extract_f0: need 0 < min_hz < max_hz < Nyquist/2 (got " << min_hz
        << ", " << max_hz << " at " << sample_rate << " Hz)";
    throw InvalidArgument(msg.str());
  }
}

std::size_t VoicingTrack::NumVoiced() const {
  return static_cast<std::size_t>(std::count(voiced.begin(), voiced.end(), true));
}

std::optional<double> VoicingTrack::MeanF0() const {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < voiced.size(); ++k)
    if (voiced[k]) {
      sum += f0_hz[k];
      ++n;
    }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

void VoicingTrack::CheckGrid(const AudioClip& clip) const {
  if (clip.sample_rate() != sample_rate || clip.num_samples() != num_samples ||
      voiced.size() != spec.NumFrames(num_samples) || f0_hz.size() != voiced.size())
    throw InvalidArgument(
        "voicing track grid does not match the clip (rate/length/frame count)");
}

VoicingTrack extract_f0(const AudioClip& clip, const F0Config& config) {
  return extract_f0(clip, config, FrameSpec::Default(clip.sample_rate()));
}

VoicingTrack extract_f0(const AudioClip& clip, const F0Config& config,
                        const FrameSpec& spec) {
  RequireMono(clip, "extract_f0");
  config.Validate(clip.sample_rate());
  spec.Validate();
  if (clip.num_samples() < spec.frame_length)
    throw InvalidArgument("extract_f0: clip shorter than one frame (" +
                          std::to_string(clip.num_samples()) + " < " +
                          std::to_string(spec.frame_length) + " samples)");
  const auto dec = MakeAnalysisSignal(clip, kAnalysisRateHz);
  return TrackF0(clip, dec, config, spec);
}

std::optional<double> extract_rms(const AudioClip& clip,
                                  const VoicingTrack& voicing, RmsMode mode) {
  RequireMono(clip, "extract_rms");
  voicing.CheckGrid(clip);
  const auto x = clip.channel(0);
  double sum = 0.0;
  std::size_t n = 0;
  if (mode == RmsMode::kWholeUtterance) {
    for (double v : x) sum += v * v;
    n = x.size();
  } else {
    // Union of voiced frame spans; overlapping frames count a sample once.
    std::size_t covered_to = 0;
    for (std::size_t k = 0; k < voicing.num_frames(); ++k) {
      if (!voicing.voiced[k]) continue;
      const std::size_t begin = std::max(k * voicing.spec.hop_length, covered_to);
      const std::size_t end = std::min(k * voicing.spec.hop_length + voicing.spec.frame_length, x.size());
      for (std::size_t i = begin; i < end; ++i) sum += x[i] * x[i];
      if (end > begin) n += end - begin;
      covered_to = std::max(covered_to, end);
    }
  }
  if (n == 0 || sum <= 0.0) return std::nullopt;
  return 10.0 * std::log10(sum / static_cast<double>(n));
}

std::vector<std::optional<double>> F1Track(const AudioClip& clip,
                                           const VoicingTrack& voicing,
                                           const F1Config& config) {
  RequireMono(clip, "extract_f1");
  voicing.CheckGrid(clip);
  return F1FromAnalysis(MakeAnalysisSignal(clip, config.analysis_rate_hz), voicing, config);
}

std::optional<double> extract_f1(const AudioClip& clip,
                                 const VoicingTrack& voicing,
                                 const F1Config& config) {
  return MedianF1(F1Track(clip, voicing, config));
}

std::optional<double> TiltOfBands(const std::vector<double>& energies,
                                  const FilterBank& bank) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (std::size_t b = 0; b < energies.size(); ++b) {
    if (!(energies[b] > 0.0)) continue;
    const double x = std::log2(bank.bands[b].center_hz);
    const double y = 10.0 * std::log10(energies[b]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return std::nullopt;
  const double dn = static_cast<double>(n);
  const double denom = sxx - sx * sx / dn;
  if (denom <= 0.0) return std::nullopt;
  return (sxy - sx * sy / dn) / denom;
}

std::optional<double> extract_spectral_tilt(const AudioClip& clip,
                                            const VoicingTrack& voicing,
                                            const FilterBank& bank) {
  RequireMono(clip, "extract_spectral_tilt");
  voicing.CheckGrid(clip);
  bank.Validate(clip.sample_rate());
  if (bank.bands.size() < 2)
    throw InvalidArgument("extract_spectral_tilt: filter bank needs at least 2 bands");
  const auto x = clip.channel(0);
  const FrameSpec& spec = voicing.spec;
  const auto window = MakeWindow(spec.window, spec.frame_length);
  const std::size_t fft_size = NextPowerOfTwo(spec.frame_length);
  std::vector<double> frame(spec.frame_length);
  double sum = 0.0;
  std::size_t n = 0, voiced = 0;
  for (std::size_t k = 0; k < voicing.num_frames(); ++k) {
    if (!voicing.voiced[k]) continue;
    ++voiced;
    CopyPadded(x, static_cast<std::ptrdiff_t>(k * spec.hop_length), frame);
    for (std::size_t i = 0; i < frame.size(); ++i) frame[i] *= window[i];
    const auto power = PowerSpectrum(frame, fft_size);
    const auto slope = TiltOfBands(band_energies(power, fft_size, bank, clip.sample_rate()), bank);
    if (!slope) continue;
    sum += *slope;
    ++n;
  }
  if (voiced == 0) return std::nullopt;
  if (n == 0)
    throw InvalidArgument(
        "extract_spectral_tilt: no voiced frame has energy in at least 2 bands");
  return sum / static_cast<double>(n);
}

std::optional<double> extract_spectral_tilt(const AudioClip& clip,
                                            const VoicingTrack& voicing) {
  return extract_spectral_tilt(clip, voicing, DefaultFilterBank(clip.sample_rate()));
}

std::vector<double> energy_contour(const AudioClip& clip, const FrameSpec& spec) {
  spec.Validate();
  const AudioClip mono = to_mono(clip);
  const auto x = mono.channel(0);
  const auto w = MakeWindow(spec.window, spec.frame_length);
  std::vector<double> w2(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) w2[i] = w[i] * w[i];
  const std::size_t count = spec.NumFrames(x.size());
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t start = k * spec.hop_length;
    const std::size_t n = std::min(spec.frame_length, x.size() - start);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      num += w2[i] * x[start + i] * x[start + i];
      den += w2[i];
    }
    out[k] = ToDb(den > 0.0 ? num / den : 0.0);
  }
  return out;
}

const char* FeatureName(Feature f) {
  switch (f) {
    case Feature::kRms: return "rms";
    case Feature::kF0: return "f0";
    case Feature::kF1: return "f1";
    case Feature::kTilt: return "tilt";
  }
  return "?";
}

Feature ParseFeature(const std::string& name) {
  for (Feature f : kAllFeatures)
    if (name == FeatureName(f)) return f;
  throw InvalidArgument("unknown feature '" + name + "' (expected rms, f0, f1 or tilt)");
}

std::optional<double> UtteranceFeatures::Get(Feature f) const {
  switch (f) {
    case Feature::kRms: return rms_db;
    case Feature::kF0: return f0_mean_hz;
    case Feature::kF1: return f1_mean_hz;
    case Feature::kTilt: return spectral_tilt_db_per_oct;
  }
  return std::nullopt;
}

UtteranceFeatures compute_features(const AudioClip& clip, const FeatureConfig& config) {
  RequireMono(clip, "compute_features");
  config.f0.Validate(clip.sample_rate());
  const FrameSpec spec = FrameSpec::Default(clip.sample_rate());
  if (clip.num_samples() < spec.frame_length)
    throw InvalidArgument("compute_features: clip shorter than one frame");
  const auto dec = MakeAnalysisSignal(clip, kAnalysisRateHz);
  const VoicingTrack voicing = TrackF0(clip, dec, config.f0, spec);

  UtteranceFeatures out;
  out.voiced_frame_count = voicing.NumVoiced();
  if (out.voiced_frame_count < config.min_voiced_frames) return out;
  out.rms_db = extract_rms(clip, voicing, config.rms_mode);
  out.f0_mean_hz = voicing.MeanF0();
  if (AnalysisFactor(clip.sample_rate(), config.f1.analysis_rate_hz) == dec.factor)
    out.f1_mean_hz = MedianF1(F1FromAnalysis(dec, voicing, config.f1));
  else
    out.f1_mean_hz = extract_f1(clip, voicing, config.f1);
  out.spectral_tilt_db_per_oct = config.bank ? extract_spectral_tilt(clip, voicing, *config.bank)
                                              : extract_spectral_tilt(clip, voicing);
  return out;
}

}  // namespace earshot
