"""HR/HRV/spectral estimators and the boosted-stump pressure regressor."""

import numpy as np
import pytest

from ppgmorph.downstream import (BoostModel, BpFeatureVector, IbiSeries, Stump,
                                 boost_predict, boost_train, bp_features,
                                 estimate_hr, extract_ibis, hf_power,
                                 hrv_metrics)
from ppgmorph.synth import (CANONICAL_CYCLE, DistortionProfile,
                            apply_cp_distortion, synth_cycle, synth_recording)


def _cycle_train(cycle_s, fs=100.0):
    parts = [synth_cycle(CANONICAL_CYCLE, int(round(s * fs))) for s in cycle_s]
    return np.concatenate(parts), fs


def test_extract_ibis_steady_train():
    samples, fs = _cycle_train([0.8] * 10)
    ibis = extract_ibis(samples, fs)
    assert ibis.ibis_ms.size == 9
    # the record-edge interval may sit one sample short
    np.testing.assert_allclose(ibis.ibis_ms, 800.0, atol=1000.0 / fs)
    assert ibis.n_rejected == 0
    assert np.isclose(ibis.duration_s, np.sum(ibis.ibis_ms) / 1000.0)


def test_extract_ibis_rejects_out_of_band():
    samples, fs = _cycle_train([0.8, 0.8, 2.0, 0.8, 0.8])
    ibis = extract_ibis(samples, fs)
    assert ibis.n_rejected == 1
    np.testing.assert_allclose(ibis.ibis_ms, 800.0, atol=1000.0 / fs)
    with pytest.raises(ValueError, match="insufficient beats"):
        extract_ibis(np.linspace(0, 1, 200), fs)


def test_estimate_hr_oracles():
    assert estimate_hr(np.array([600.0, 600.0, 600.0])) == 100.0
    assert np.isclose(estimate_hr(np.array([800.0, 860.0])), 60000.0 / 830.0)
    with pytest.raises(ValueError, match="no valid intervals"):
        estimate_hr(np.array([]))


def test_hrv_metrics_oracles():
    m = hrv_metrics(np.array([800.0, 810.0, 790.0]))
    assert np.isclose(m.rmssd_ms, np.sqrt(250.0))
    assert np.isclose(m.sdrr_ms, 10.0)
    assert m.pnn50 == 0.0
    assert m.mean_rr_ms == 800.0
    m2 = hrv_metrics(np.array([800.0, 860.0]))
    assert np.isclose(m2.rmssd_ms, 60.0)
    assert m2.pnn50 == 100.0
    with pytest.raises(ValueError, match="too few intervals"):
        hrv_metrics(np.array([800.0]))


def _modulated_ibis(mod_hz, duration_s=120.0, base_ms=800.0, depth_ms=50.0):
    times = [0.0]
    ibis = []
    while times[-1] < duration_s:
        ibi = base_ms + depth_ms * np.sin(2 * np.pi * mod_hz * times[-1])
        times.append(times[-1] + ibi / 1000.0)
        ibis.append(ibi)
    t = np.asarray(times[1:])
    return IbiSeries(t, np.asarray(ibis), np.zeros(len(ibis) + 1, dtype=int))


def test_hf_power_band_selectivity():
    in_band = hf_power(_modulated_ibis(0.25))
    below_band = hf_power(_modulated_ibis(0.05))
    assert in_band > 5.0 * below_band
    assert in_band > 0.0


def test_hf_power_requires_duration():
    short = _modulated_ibis(0.25, duration_s=10.0)
    with pytest.raises(ValueError, match="record too short"):
        hf_power(short)


def test_bp_features_on_clean_window():
    samples, fs = _cycle_train([0.8] * 10)
    vec = bp_features(samples, fs)
    assert 0.9 < vec.sp < 1.1
    assert 0.15 < vec.sw < 0.3
    assert 0.5 < vec.dw < 0.65
    assert np.isclose(vec.mean_rr_ms, 800.0, atol=1000.0 / fs)
    assert vec.has_diastolic
    assert vec.dt_minus_sw == vec.dt - vec.sw
    assert vec.to_array(False).shape == (10,)
    full = vec.to_array(True)
    assert full.shape == (15,)
    assert np.all(np.isfinite(full))


def test_bp_features_without_notch():
    rec, truth = synth_recording(duration_s=12.0, hr_bpm=75.0,
                                 hrv_jitter_ms=0.0, seed=2)
    filled, _ = apply_cp_distortion(
        rec, truth,
        DistortionProfile(notch_fill=1.0, additive_noise_sigma=0.0), seed=0)
    vec = bp_features(filled.samples[:1024], rec.sample_rate_hz)
    assert not vec.has_diastolic
    assert vec.dn is None and vec.dt_minus_sw is None
    with pytest.raises(ValueError, match="diastolic features absent"):
        vec.to_array(True)


def test_bp_features_needs_cycles():
    samples, fs = _cycle_train([0.8, 0.8])
    with pytest.raises(ValueError, match="too few cycles"):
        bp_features(samples, fs)


def test_boost_constant_target():
    x = np.random.default_rng(0).normal(0, 1, (12, 3))
    y = np.full(12, 5.0)
    model = boost_train(x, y)
    assert model.is_constant
    np.testing.assert_array_equal(boost_predict(model, x), 5.0)


def test_boost_perfectly_separable_step():
    x = np.arange(12, dtype=float).reshape(-1, 1)
    y = np.where(x[:, 0] < 6, 0.0, 10.0)
    model = boost_train(x, y)
    np.testing.assert_array_equal(boost_predict(model, x), y)
    # a zero-residual round ends training with a dominant stump
    assert model.log_weights[-1] == np.log(1e10)


def test_boost_reduces_training_error():
    rng = np.random.default_rng(1)
    x = rng.uniform(-1, 1, (80, 4))
    y = 2.0 * x[:, 0] + np.sin(3.0 * x[:, 1])
    few = boost_train(x, y, n_estimators=1)
    many = boost_train(x, y, n_estimators=50)
    mae_few = np.abs(boost_predict(few, x) - y).mean()
    mae_many = np.abs(boost_predict(many, x) - y).mean()
    assert mae_many < mae_few


def test_boost_determinism_and_validation():
    rng = np.random.default_rng(2)
    x = rng.uniform(0, 1, (40, 3))
    y = x @ np.array([1.0, -2.0, 0.5])
    m1 = boost_train(x, y, n_estimators=20)
    m2 = boost_train(x, y, n_estimators=20)
    assert [(s.feature, s.threshold, s.left_value, s.right_value)
            for s in m1.stumps] == \
           [(s.feature, s.threshold, s.left_value, s.right_value)
            for s in m2.stumps]
    assert m1.log_weights == m2.log_weights
    with pytest.raises(ValueError, match="at least 10"):
        boost_train(x[:5], y[:5])
    with pytest.raises(ValueError, match="non-finite"):
        boost_train(np.full((12, 2), np.nan), np.zeros(12))
    with pytest.raises(ValueError, match="matching y"):
        boost_train(x, y[:-1])


def test_boost_predict_weighted_median():
    def const_stump(v):
        return Stump(feature=0, threshold=np.inf, left_value=v, right_value=v)

    x = np.zeros((4, 1))
    model = BoostModel(stumps=[const_stump(1.0), const_stump(3.0),
                               const_stump(9.0)],
                       log_weights=[1.0, 1.0, 1.0])
    np.testing.assert_array_equal(boost_predict(model, x), 3.0)
    model.log_weights = [1.0, 1.0, 10.0]
    np.testing.assert_array_equal(boost_predict(model, x), 9.0)


def test_bp_feature_vector_roundtrip_fields():
    vec = BpFeatureVector(sp=1.0, pa=0.5, pa_over_sp=0.5, sw=0.2, dw=0.6,
                          mean_rr_ms=800.0, sdrr_ms=10.0, rmssd_ms=12.0,
                          pnn50=0.0, hf=1.5)
    assert not vec.has_diastolic
    arr = vec.to_array(False)
    np.testing.assert_allclose(
        arr, [1.0, 0.5, 0.5, 0.2, 0.6, 800.0, 10.0, 12.0, 0.0, 1.5])
