"""Container types shared across the pipeline, plus subject-level splitting."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

SPLIT_TAGS = ("unsplit", "train", "val", "test")


class DataFormatError(ValueError):
    """Raised when an input file violates the documented format."""


class DivergenceError(RuntimeError):
    """Raised when training produces a non-finite loss."""


def require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


@dataclass
class TimeSeries:
    """A uniformly sampled signal with provenance.

    Args:
        samples: 1-D float array.
        sample_rate_hz: sampling rate, > 0.
        subject_id: optional recording identity used for split bookkeeping.
    """

    samples: np.ndarray
    sample_rate_hz: float = 128.0
    subject_id: str | None = None

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        require(self.samples.ndim == 1 and self.samples.size >= 1,
                "series must be a non-empty 1-D array")
        require(self.sample_rate_hz > 0, "sample rate must be positive")
        require(bool(np.isfinite(self.samples).all()), "non-finite sample")

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate_hz


@dataclass
class Window:
    """A fixed-length slice of a series; origin_offset indexes samples[0] in the source."""

    samples: np.ndarray
    sample_rate_hz: float
    origin_offset: int
    subject_id: str | None = None
    degenerate: bool = False  # set by min-max normalization of a constant window

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        require(self.samples.ndim == 1 and self.samples.size >= 2,
                "window must hold at least two samples")
        require(self.sample_rate_hz > 0, "sample rate must be positive")
        require(self.origin_offset >= 0, "origin offset must be non-negative")
        require(bool(np.isfinite(self.samples).all()), "non-finite sample")

    def replace_samples(self, samples: np.ndarray, degenerate: bool | None = None) -> "Window":
        return replace(self, samples=samples,
                       degenerate=self.degenerate if degenerate is None else degenerate)


@dataclass
class WindowPair:
    """Aligned (distorted, reference) windows from the same instant of one subject."""

    distorted: Window
    reference: Window
    subject_id: str | None = None

    def __post_init__(self):
        d, r = self.distorted, self.reference
        require(d.samples.size == r.samples.size, "pair windows must share length")
        require(d.sample_rate_hz == r.sample_rate_hz, "pair windows must share sample rate")
        require(d.origin_offset == r.origin_offset, "pair windows must share origin")
        if self.subject_id is None:
            self.subject_id = r.subject_id or d.subject_id


@dataclass
class Dataset:
    pairs: list[WindowPair] = field(default_factory=list)
    split_tag: str = "unsplit"

    def __post_init__(self):
        require(self.split_tag in SPLIT_TAGS, f"unknown split tag {self.split_tag!r}")
        lengths = {p.distorted.samples.size for p in self.pairs}
        require(len(lengths) <= 1, "all pairs in a dataset must share window length")

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def subjects(self) -> list[str]:
        return sorted({p.subject_id for p in self.pairs})


def split_by_subject(dataset: Dataset, fractions: tuple[float, float, float],
                     seed: int) -> tuple[Dataset, Dataset, Dataset]:
    """Partition pairs into train/val/test with no subject straddling splits.

    Subject ids are sorted, shuffled by a generator seeded with `seed`, and dealt
    out with val/test counts rounded to nearest and train absorbing the remainder.
    """
    f_train, f_val, f_test = fractions
    require(f_train > 0 and f_val > 0 and f_test > 0, "fractions must be positive")
    require(abs(f_train + f_val + f_test - 1.0) <= 1e-9, "fractions must sum to 1")
    subjects = dataset.subjects
    if len(subjects) < 3:
        raise ValueError("insufficient subjects")
    rng = np.random.default_rng(seed)
    order = [subjects[i] for i in rng.permutation(len(subjects))]
    n = len(subjects)
    n_val = int(round(f_val * n))
    n_test = int(round(f_test * n))
    n_train = n - n_val - n_test
    if min(n_train, n_val, n_test) < 1:
        raise ValueError("insufficient subjects")
    groups = {
        "train": set(order[:n_train]),
        "val": set(order[n_train:n_train + n_val]),
        "test": set(order[n_train + n_val:]),
    }

    def take(tag: str) -> Dataset:
        return Dataset([p for p in dataset.pairs if p.subject_id in groups[tag]], split_tag=tag)

    return take("train"), take("val"), take("test")
