"""Shared fixtures: small synthetic recordings reused across test modules."""

import numpy as np
import pytest

from ppgmorph.core import Dataset
from ppgmorph.sigproc import pair_and_clean, preprocess_series
from ppgmorph.synth import distort_recording, sample_subject_params, synth_recording

FS = 128.0


@pytest.fixture(scope="session")
def steady_recording():
    """70 s at a constant 72 bpm, canonical morphology, no jitter."""
    return synth_recording(duration_s=70.0, hr_bpm=72.0, hrv_jitter_ms=0.0, seed=11,
                           subject_id="steady")


@pytest.fixture(scope="session")
def jittered_recording():
    """70 s at 68 bpm with 30 ms onset jitter, subject-specific morphology."""
    rng = np.random.default_rng(21)
    params = sample_subject_params(rng)
    return synth_recording(duration_s=70.0, hr_bpm=68.0, hrv_jitter_ms=30.0, seed=22,
                           cycle_params=params, subject_id="jit")


@pytest.fixture(scope="session")
def small_dataset():
    """Two subjects' worth of cleaned window pairs, ~60 pairs at L=1024."""
    pairs = []
    for k in range(2):
        rng = np.random.default_rng(200 + k)
        params = sample_subject_params(rng)
        rec, truth = synth_recording(duration_s=60.0, hr_bpm=float(rng.uniform(60, 80)),
                                     hrv_jitter_ms=30.0, seed=300 + k,
                                     cycle_params=params, subject_id=f"u{k}")
        dist, _ = distort_recording(rec, truth, seed=400 + k)
        pairs += pair_and_clean(preprocess_series(dist), preprocess_series(rec))
    return Dataset(tuple(pairs))
