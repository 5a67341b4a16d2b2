# python/tests/test_smoke.py

# Copyright 2026  The earshot Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#  http://www.apache.org/licenses/LICENSE-2.0
#
# THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
# KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
# WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
# MERCHANTABLITY OR NON-INFRINGEMENT.
# See the Apache 2 License for the specific language governing permissions and
# limitations under the License.

import numpy as np
import pytest

import earshot

RATE = 16000


def sine(hz, seconds, amp=0.3, rate=RATE):
    t = np.arange(int(seconds * rate)) / rate
    return amp * np.sin(2 * np.pi * hz * t)


def test_fast_convolve_matches_numpy():
    rng = np.random.default_rng(1)
    a, b = rng.standard_normal(1000), rng.standard_normal(77)
    np.testing.assert_allclose(earshot.fast_convolve(a, b), np.convolve(a, b), atol=1e-10)


def test_wav_round_trip(tmp_path):
    x = np.stack([sine(200, 0.1), sine(300, 0.1)])
    earshot.write_wav(tmp_path / "x.wav", x, RATE, "float32")
    y, rate = earshot.read_wav(tmp_path / "x.wav")
    assert rate == RATE
    np.testing.assert_array_equal(y, x.astype(np.float32).astype(np.float64))


def test_features_of_a_sine():
    f = earshot.compute_features(sine(180, 0.5, amp=0.5), RATE)
    assert abs(f["f0_mean_hz"] - 180) < 1
    assert abs(f["rms_db"] - 20 * np.log10(0.5 / np.sqrt(2))) < 0.05
    silent = earshot.compute_features(np.zeros(8000), RATE)
    assert silent["voiced_frames"] == 0 and silent["rms_db"] is None


def test_segment_finds_burst():
    x = np.random.default_rng(2).standard_normal(3 * RATE) * 1e-3
    x[RATE:2 * RATE] += sine(200, 1.0)
    (start, end), = earshot.segment(x, RATE)
    assert abs(start - 1.0) < 0.03 and abs(end - 2.0) < 0.03


def test_mix_at_snr_hits_target():
    speech = sine(220, 0.5)
    noise = np.random.default_rng(3).standard_normal(RATE) * 0.1
    r = earshot.mix_at_snr(speech, noise, RATE, 5.0, seed=4)
    snr = 20 * np.log10(np.sqrt(np.mean(speech**2)) / np.sqrt(np.mean(r["scaled_noise"]**2)))
    assert abs(snr - 5.0) < 1e-9
    np.testing.assert_array_equal(r["mixture"], speech + r["scaled_noise"])


def test_tilt_boost_zero_is_identity():
    x = sine(300, 0.3)
    np.testing.assert_array_equal(earshot.tilt_boost(x, RATE, 0.0), x)


def test_render_identity():
    x = sine(250, 0.2)
    out, headroom = earshot.render_at_listener(x, np.ones((2, 1)), RATE)
    assert headroom == 1.0
    np.testing.assert_array_equal(out, np.stack([x, x]))


def test_stats_match_scipy():
    stats = pytest.importorskip("scipy.stats")
    rng = np.random.default_rng(5)
    a, b = rng.normal(0, 1, 12), rng.normal(0.8, 2, 9)
    w = earshot.welch_t_test(a, b)
    ref = stats.ttest_ind(a, b, equal_var=False)
    assert abs(w["statistic"] - ref.statistic) < 1e-10
    assert abs(w["p_value"] - ref.pvalue) < 1e-10
    x, y = rng.standard_normal(20), rng.standard_normal(20)
    r = earshot.pearson(x, y)
    ref = stats.pearsonr(x, y)
    assert abs(r["r"] - ref.statistic) < 1e-12
    assert abs(r["p_value"] - ref.pvalue) < 1e-10


def test_errors_map_to_python_exceptions(tmp_path):
    with pytest.raises(earshot.IoError):
        earshot.read_wav(tmp_path / "missing.wav")
    with pytest.raises(ValueError):
        earshot.mix_at_snr(sine(200, 1.0), np.ones(10), RATE, 0.0)


def test_run_cli_exit_codes(tmp_path):
    code, out, err = earshot.run_cli(["features", "--manifest", str(tmp_path / "none.jsonl")])
    assert code == 2 and "none.jsonl" in err
    earshot.write_wav(tmp_path / "s.wav", np.zeros(RATE), RATE)
    code, out, err = earshot.run_cli(["segment", "--input", str(tmp_path / "s.wav")])
    assert (code, out) == (0, "")
