"""Per-cycle landmark detection and morphology features."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from .core import TimeSeries, Window, require
from .sigproc import detect_troughs

CYCLE_BOUNDS_S = (0.33, 1.5)
MIN_PROMINENCE = 0.01  # of the normalized amplitude range


@dataclass
class Cycle:
    """One trough-to-trough segment; indices are relative to the source window."""

    samples: np.ndarray
    onset_index: int
    end_index: int            # exclusive; the next cycle's onset
    sample_rate_hz: float

    def __post_init__(self):
        require(self.end_index - self.onset_index == self.samples.size,
                "cycle bounds do not match samples")
        lo, hi = CYCLE_BOUNDS_S
        require(lo <= self.duration_s <= hi, "cycle duration out of bounds")

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate_hz


@dataclass
class FiducialSet:
    """Landmark indices/amplitudes for one cycle, window-relative.

    dicrotic_notch and diastolic_peak are None when absent (prominence below
    MIN_PROMINENCE or no local extremum in the admissible range).
    """

    onset: int
    systolic_peak: tuple[int, float]
    dicrotic_notch: tuple[int, float] | None
    diastolic_peak: tuple[int, float] | None

    def __post_init__(self):
        seq = [self.onset, self.systolic_peak[0]]
        if self.dicrotic_notch is not None:
            seq.append(self.dicrotic_notch[0])
        if self.diastolic_peak is not None:
            require(self.dicrotic_notch is not None,
                    "diastolic peak requires a notch")
            seq.append(self.diastolic_peak[0])
        require(all(a < b for a, b in zip(seq, seq[1:])),
                "landmarks must be ordered onset < systolic < notch < diastolic")


@dataclass
class FeatureVector:
    """Per-cycle morphology features plus window-level shape statistics.

    Amplitudes are in normalized units, widths/times in seconds, areas are
    trapezoidal sums over sample index (dimensionless). Notch-dependent fields
    are None when the landmark is absent.
    """

    systolic_amplitude: float
    systolic_width_s: float
    diastolic_width_s: float
    notch_amplitude: float | None
    notch_time_s: float | None
    diastolic_amplitude: float | None
    diastolic_time_s: float | None
    systolic_area: float
    diastolic_area: float
    skewness: float
    kurtosis: float


def segment_cycles(samples: np.ndarray, sample_rate_hz: float,
                   bounds_s: tuple[float, float] = CYCLE_BOUNDS_S,
                   return_dropped: bool = False):
    """Split a window into trough-to-trough cycles within duration bounds.

    Out-of-bounds segments (pauses, splits) are dropped; pass return_dropped to
    also get their count.
    """
    samples = np.asarray(samples, dtype=np.float64)
    troughs = detect_troughs(TimeSeries(samples, sample_rate_hz))
    cycles: list[Cycle] = []
    dropped = 0
    for a, b in zip(troughs[:-1], troughs[1:]):
        dur = (b - a) / sample_rate_hz
        if bounds_s[0] <= dur <= bounds_s[1]:
            cycles.append(Cycle(samples[a:b].copy(), int(a), int(b), sample_rate_hz))
        else:
            dropped += 1
    if return_dropped:
        return cycles, dropped
    return cycles


def detect_cycles(window: Window, bounds_s: tuple[float, float] = CYCLE_BOUNDS_S,
                  return_dropped: bool = False):
    return segment_cycles(window.samples, window.sample_rate_hz, bounds_s,
                          return_dropped)


def _most_prominent(seg: np.ndarray, lo: int, hi: int):
    """Most prominent interior local maximum of seg with lo < index < hi."""
    peaks, props = find_peaks(seg, prominence=0.0)
    mask = (peaks > lo) & (peaks < hi)
    peaks, prom = peaks[mask], props["prominences"][mask]
    if peaks.size == 0:
        return None, 0.0
    best = int(np.argmax(prom))
    return int(peaks[best]), float(prom[best])


def detect_fiducials(cycle: Cycle) -> FiducialSet:
    """Locate systolic peak, dicrotic notch, and diastolic peak in one cycle.

    Systolic: global maximum (earliest on ties). Notch: most prominent local
    minimum strictly between the systolic peak and 85% of the cycle. Diastolic:
    most prominent local maximum after the notch. The latter two are absent
    below MIN_PROMINENCE.
    """
    seg = cycle.samples
    n = seg.size
    sp_rel = int(np.argmax(seg))
    sp = (cycle.onset_index + sp_rel, float(seg[sp_rel]))
    hi = int(np.floor(0.85 * n))
    dn_rel, dn_prom = _most_prominent(-seg, sp_rel, hi)
    notch = None
    diastolic = None
    if dn_rel is not None and dn_prom >= MIN_PROMINENCE:
        notch = (cycle.onset_index + dn_rel, float(seg[dn_rel]))
        dp_rel, dp_prom = _most_prominent(seg, dn_rel, n - 1)
        if dp_rel is not None and dp_prom >= MIN_PROMINENCE:
            diastolic = (cycle.onset_index + dp_rel, float(seg[dp_rel]))
    return FiducialSet(onset=cycle.onset_index, systolic_peak=sp,
                       dicrotic_notch=notch, diastolic_peak=diastolic)


def count_peaks(samples: np.ndarray, prominence_threshold: float) -> int:
    """Number of interior local maxima with at least the given prominence."""
    require(prominence_threshold > 0, "prominence threshold must be positive")
    peaks, _ = find_peaks(np.asarray(samples, dtype=float),
                          prominence=prominence_threshold)
    return int(peaks.size)


def sqi(samples: np.ndarray) -> tuple[float, float]:
    """(skewness, excess kurtosis) of a window; constant input is degenerate."""
    x = np.asarray(samples, dtype=np.float64)
    m = x.mean()
    c = x - m
    m2 = float((c * c).mean())
    if m2 == 0.0:
        raise ValueError("degenerate window")
    m3 = float((c ** 3).mean())
    m4 = float((c ** 4).mean())
    return m3 / m2 ** 1.5, m4 / (m2 * m2) - 3.0


def extract_features(fid: FiducialSet, cycle: Cycle,
                     window_samples: np.ndarray) -> FeatureVector:
    """Features of one cycle; skewness/kurtosis come from the whole window."""
    seg = cycle.samples
    fs = cycle.sample_rate_hz
    sp_idx, sp_amp = fid.systolic_peak
    sp_rel = sp_idx - cycle.onset_index
    skew, kurt = sqi(window_samples)
    notch_amp = notch_t = dia_amp = dia_t = None
    if fid.dicrotic_notch is not None:
        dn_idx, notch_amp = fid.dicrotic_notch
        notch_t = (dn_idx - cycle.onset_index) / fs
    if fid.diastolic_peak is not None:
        dp_idx, dia_amp = fid.diastolic_peak
        dia_t = (dp_idx - cycle.onset_index) / fs
    return FeatureVector(
        systolic_amplitude=sp_amp,
        systolic_width_s=sp_rel / fs,
        diastolic_width_s=(seg.size - sp_rel) / fs,
        notch_amplitude=notch_amp,
        notch_time_s=notch_t,
        diastolic_amplitude=dia_amp,
        diastolic_time_s=dia_t,
        systolic_area=float(np.trapezoid(seg[:sp_rel + 1])),
        diastolic_area=float(np.trapezoid(seg[sp_rel:])),
        skewness=skew,
        kurtosis=kurt,
    )
