"""Agreement metrics against brute-force oracles and hand values."""

import numpy as np
import pytest

from ppgmorph.core import Window
from ppgmorph.metrics import (FEATURE_NAMES, MetricReport, dtw, feature_mape,
                              mae, pcc, report)
from ppgmorph.synth import (CANONICAL_CYCLE, DistortionProfile,
                            apply_cp_distortion, synth_cycle, synth_recording)


def brute_dtw(a, b):
    """Exhaustive enumeration of all monotone boundary-to-boundary paths.

    Minimizes total cost, then path length; returns mean per-step cost. Only
    viable for tiny inputs, which is the point.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n, m = a.size, b.size
    best = [np.inf, np.inf]  # cost, length

    def walk(i, j, cost, length):
        cost += abs(a[i] - b[j])
        length += 1
        if cost > best[0]:
            return
        if i == n - 1 and j == m - 1:
            if cost < best[0] or (cost == best[0] and length < best[1]):
                best[0], best[1] = cost, length
            return
        if i + 1 < n:
            walk(i + 1, j, cost, length)
        if j + 1 < m:
            walk(i, j + 1, cost, length)
        if i + 1 < n and j + 1 < m:
            walk(i + 1, j + 1, cost, length)

    walk(0, 0, 0.0, 0)
    return best[0] / best[1]


def test_mae_hand_values():
    assert mae([1.0, 2.0], [2.0, 4.0]) == 1.5
    assert mae(np.zeros(5), np.zeros(5)) == 0.0
    with pytest.raises(ValueError, match="equal shapes"):
        mae(np.zeros(3), np.zeros(4))


def test_pcc_properties():
    a = np.random.default_rng(0).normal(0, 1, 50)
    assert np.isclose(pcc(a, 2.0 * a + 3.0), 1.0)
    assert np.isclose(pcc(a, -a), -1.0)
    with pytest.raises(ValueError, match="undefined correlation"):
        pcc(a, np.zeros(50))
    with pytest.raises(ValueError, match="equal shapes"):
        pcc(np.zeros(3), np.zeros(4))


def test_dtw_hand_values():
    assert dtw([0.0], [5.0]) == 5.0
    assert dtw([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 0.0
    # single path (0,0)->(1,0): total 1, two cells
    assert dtw([0.0, 1.0], [0.0]) == 0.5
    # three equal-cost paths of lengths 2, 3, 3: the shortest normalizes
    assert dtw([0.0, 1.0], [1.0, 0.0]) == 1.0


def test_dtw_shift_invariance_of_alignment():
    # a delayed copy aligns nearly perfectly, unlike pointwise error
    t = np.linspace(0, 2 * np.pi, 64)
    a = np.sin(t)
    b = np.roll(a, 3)
    assert dtw(a, b) < 0.1 * mae(a, b)


def test_dtw_matches_exhaustive_enumeration():
    rng = np.random.default_rng(7)
    for _ in range(200):
        n = int(rng.integers(1, 9))
        m = int(rng.integers(1, 9))
        a = rng.normal(0, 1, n)
        b = rng.normal(0, 1, m)
        got = dtw(a, b)
        want = brute_dtw(a, b)
        assert abs(got - want) < 1e-12, (a, b)


def test_dtw_validation():
    with pytest.raises(ValueError, match="non-empty"):
        dtw(np.array([]), np.array([1.0]))


def _tiled_window(n_cycles=10, cycle_n=80, fs=100.0, subject="u"):
    seg = synth_cycle(CANONICAL_CYCLE, cycle_n)
    return Window(samples=np.tile(seg, n_cycles), sample_rate_hz=fs,
                  origin_offset=0, subject_id=subject)


def test_feature_mape_identical_windows_is_zero():
    w = _tiled_window()
    mape, excluded, n_matched = feature_mape([w], [w])
    assert n_matched >= 8
    for name in FEATURE_NAMES:
        assert mape[name] == 0.0, name
        assert excluded[name] == 0, name


def test_feature_mape_counts_missing_landmarks():
    rec, truth = synth_recording(duration_s=12.0, hr_bpm=75.0,
                                 hrv_jitter_ms=0.0, seed=9)
    fs = rec.sample_rate_hz
    ref = Window(samples=rec.samples[:1024].copy(), sample_rate_hz=fs,
                 origin_offset=0, subject_id="u")
    filled, _ = apply_cp_distortion(
        rec, truth,
        DistortionProfile(diastolic_attenuation=0.0, notch_fill=1.0,
                          peak_shift_ms=0.0, amplitude_gain=1.0,
                          additive_noise_sigma=0.0), seed=0)
    enh = Window(samples=filled.samples[:1024], sample_rate_hz=fs,
                 origin_offset=0, subject_id="u")
    mape, excluded, n_matched = feature_mape([enh], [ref])
    assert n_matched >= 8
    # every matched cycle lost its notch and diastolic landmarks
    assert excluded["notch_amplitude"] == n_matched
    assert excluded["diastolic_amplitude"] == n_matched
    assert mape["notch_amplitude"] is None
    assert mape["systolic_amplitude"] is not None
    assert mape["systolic_amplitude"] > 0.0


def test_feature_mape_validation():
    w = _tiled_window()
    with pytest.raises(ValueError, match="must align"):
        feature_mape([w, w], [w])
    ramp = Window(samples=np.linspace(0.0, 1.0, 800), sample_rate_hz=100.0,
                  origin_offset=0, subject_id="u")
    with pytest.raises(ValueError, match="no comparable cycles"):
        feature_mape([ramp], [ramp])


def test_report_identity():
    w = _tiled_window()
    rep = report([w], [w])
    assert rep.n_windows == 1
    assert rep.mae == 0.0
    assert np.isclose(rep.pcc, 1.0)
    assert rep.dtw == 0.0
    assert rep.skewness_mae == 0.0 and rep.kurtosis_mae == 0.0
    assert rep.n_cycles_matched >= 8
    d = rep.to_json_dict()
    assert set(d) == {"n_windows", "mae", "pcc", "dtw", "skewness_mae",
                      "kurtosis_mae", "feature_mape", "feature_excluded",
                      "n_cycles_matched"}


def test_report_orders_degradation():
    # metrics must rank a mild distortion better than a severe one
    rec, truth = synth_recording(duration_s=20.0, hr_bpm=72.0,
                                 hrv_jitter_ms=0.0, seed=5)
    ref = Window(samples=rec.samples[:1024].copy(),
                 sample_rate_hz=rec.sample_rate_hz, origin_offset=0,
                 subject_id="u")
    mild_p = DistortionProfile(diastolic_attenuation=0.2, notch_fill=0.1,
                               peak_shift_ms=5.0, amplitude_gain=1.0,
                               additive_noise_sigma=0.0)
    severe_p = DistortionProfile(diastolic_attenuation=0.9, notch_fill=0.9,
                                 peak_shift_ms=40.0, amplitude_gain=0.75,
                                 additive_noise_sigma=0.0)
    windows = {}
    for name, prof in (("mild", mild_p), ("severe", severe_p)):
        d, _ = apply_cp_distortion(rec, truth, prof, seed=0)
        windows[name] = Window(samples=d.samples[:1024],
                               sample_rate_hz=rec.sample_rate_hz,
                               origin_offset=0, subject_id="u")
    rep_mild = report([windows["mild"]], [ref])
    rep_severe = report([windows["severe"]], [ref])
    assert rep_mild.mae < rep_severe.mae
    assert rep_mild.pcc > rep_severe.pcc
    assert rep_mild.dtw < rep_severe.dtw
