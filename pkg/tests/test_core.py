import numpy as np
import pytest

from ppgmorph.core import (Dataset, TimeSeries, Window, WindowPair,
                           split_by_subject)


def _window(n=16, subject="a", offset=0):
    return Window(np.linspace(0.0, 1.0, n), 128.0, offset, subject_id=subject)


def _pair(subject="a", offset=0):
    return WindowPair(_window(subject=subject, offset=offset),
                      _window(subject=subject, offset=offset))


def test_series_validation():
    with pytest.raises(ValueError):
        TimeSeries(np.array([]))
    with pytest.raises(ValueError):
        TimeSeries(np.array([1.0, np.nan]))
    with pytest.raises(ValueError):
        TimeSeries(np.ones(4), sample_rate_hz=0.0)
    s = TimeSeries(np.ones(256))
    assert s.duration_s == 2.0
    assert s.samples.dtype == np.float64


def test_window_validation():
    with pytest.raises(ValueError):
        Window(np.array([1.0]), 128.0, 0)
    with pytest.raises(ValueError):
        Window(np.ones(4), 128.0, -1)
    w = _window()
    w2 = w.replace_samples(np.zeros(16), degenerate=True)
    assert w2.degenerate and not w.degenerate
    assert w2.origin_offset == w.origin_offset


def test_pair_alignment_checks():
    a = _window(16)
    with pytest.raises(ValueError):
        WindowPair(a, _window(32))
    with pytest.raises(ValueError):
        WindowPair(a, Window(np.ones(16), 64.0, 0))
    with pytest.raises(ValueError):
        WindowPair(a, _window(16, offset=5))
    p = WindowPair(a, _window(16, subject="z"))
    assert p.subject_id == "z"


def test_dataset_invariants():
    with pytest.raises(ValueError):
        Dataset([_pair()], split_tag="bogus")
    with pytest.raises(ValueError):
        Dataset([WindowPair(_window(16), _window(16)),
                 WindowPair(_window(32), _window(32))])
    ds = Dataset([_pair("b"), _pair("a"), _pair("b")])
    assert len(ds) == 3
    assert ds.subjects == ["a", "b"]


def test_split_by_subject_partitions_cleanly():
    pairs = [_pair(f"s{i}") for i in range(14) for _ in range(3)]
    ds = Dataset(pairs)
    tr, va, te = split_by_subject(ds, (0.7, 0.15, 0.15), seed=5)
    assert (tr.split_tag, va.split_tag, te.split_tag) == ("train", "val", "test")
    assert len(va.subjects) == 2 and len(te.subjects) == 2
    assert len(tr.subjects) == 10
    assert not (set(tr.subjects) & set(va.subjects))
    assert not (set(tr.subjects) & set(te.subjects))
    assert not (set(va.subjects) & set(te.subjects))
    assert len(tr) + len(va) + len(te) == len(ds)
    # same seed, same partition
    tr2, va2, te2 = split_by_subject(ds, (0.7, 0.15, 0.15), seed=5)
    assert tr2.subjects == tr.subjects and te2.subjects == te.subjects


def test_split_rejects_thin_data():
    ds = Dataset([_pair("a"), _pair("b")])
    with pytest.raises(ValueError, match="insufficient subjects"):
        split_by_subject(ds, (0.7, 0.15, 0.15), seed=0)
    with pytest.raises(ValueError, match="sum to 1"):
        split_by_subject(Dataset([_pair(f"s{i}") for i in range(4)]),
                         (0.5, 0.3, 0.3), seed=0)
