"""Signal conditioning: lowpass filtering, baseline removal, windowing,
pair cleaning, and training-time augmentation."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline, PchipInterpolator
from scipy.signal import butter, sosfiltfilt

from .core import DataFormatError, TimeSeries, Window, WindowPair, require

DEFAULT_CUTOFF_HZ = 10.0
DEFAULT_ORDER = 5
MIN_BEAT_INTERVAL_S = 0.33


@dataclass(frozen=True)
class FilterSpec:
    """Lowpass realized as a cascade of second-order sections, a0 normalized to 1."""

    order: int
    cutoff_hz: float
    sections: tuple[tuple[float, float, float, float, float], ...]  # (b0, b1, b2, a1, a2)

    def __post_init__(self):
        require(len(self.sections) >= 1, "filter needs at least one section")
        for _, _, _, a1, a2 in self.sections:
            roots = np.roots([1.0, a1, a2])
            require(bool(np.all(np.abs(roots) < 1.0)), "unstable filter section")
        require(abs(self.dc_gain() - 1.0) <= 1e-6, "DC gain must be unity")

    def dc_gain(self) -> float:
        g = 1.0
        for b0, b1, b2, a1, a2 in self.sections:
            g *= (b0 + b1 + b2) / (1.0 + a1 + a2)
        return g

    def as_sos(self) -> np.ndarray:
        return np.array([[b0, b1, b2, 1.0, a1, a2] for b0, b1, b2, a1, a2 in self.sections])

    def response_magnitude(self, freq_hz, sample_rate_hz: float) -> np.ndarray:
        """|H| at the given frequencies, straight from the coefficients."""
        w = 2.0 * np.pi * np.atleast_1d(np.asarray(freq_hz, dtype=float)) / sample_rate_hz
        z1 = np.exp(-1j * w)  # z^-1 on the unit circle
        h = np.ones_like(z1)
        for b0, b1, b2, a1, a2 in self.sections:
            h = h * (b0 + b1 * z1 + b2 * z1 ** 2) / (1.0 + a1 * z1 + a2 * z1 ** 2)
        return np.abs(h)


def design_lowpass(sample_rate_hz: float, cutoff_hz: float = DEFAULT_CUTOFF_HZ,
                   order: int = DEFAULT_ORDER) -> FilterSpec:
    if not sample_rate_hz > 2.0 * cutoff_hz:
        raise ValueError("cutoff above Nyquist")
    sos = butter(order, cutoff_hz, btype="low", fs=sample_rate_hz, output="sos")
    sections = tuple((float(s[0]), float(s[1]), float(s[2]), float(s[4]), float(s[5]))
                     for s in sos)
    return FilterSpec(order=order, cutoff_hz=cutoff_hz, sections=sections)


def filter_zero_phase(spec: FilterSpec, series: TimeSeries) -> TimeSeries:
    """Forward-backward filtering with reflective edge padding of 3*(2*order)."""
    pad = 3 * (2 * spec.order)
    if series.samples.size <= pad:
        raise ValueError("series shorter than filter warm-up")
    out = sosfiltfilt(spec.as_sos(), series.samples, padtype="even", padlen=pad)
    return TimeSeries(out, series.sample_rate_hz, series.subject_id)


DEPTH_GATE_SPAN_S = 0.75
DEPTH_GATE_PERCENTILE = 10.0
DEPTH_GATE_TOLERANCE = 0.05


def detect_troughs(series: TimeSeries,
                   min_beat_interval_s: float = MIN_BEAT_INTERVAL_S) -> np.ndarray:
    """Pulse onset indices: waveform minima at least min_beat_interval apart.

    Each reported index is the minimum of its +-interval/2 neighborhood; when
    candidates collide within the interval the deeper one wins, earlier index
    on exact ties.

    A candidate must also sit near the local floor: at or below the 10th
    percentile of its +-0.75 s surroundings plus 5% of the local amplitude
    spread (90th minus 10th percentile). Pulse onsets occupy the bottom of the
    local amplitude distribution while secondary dips (dicrotic notches) ride
    part-way up the pulse, so this rejects notch minima without any absolute
    threshold and stays valid under baseline wander; the spread-relative
    tolerance keeps onsets whose valleys vary slightly in depth (reconstructed
    waveforms render the inter-beat floor less evenly than measured ones) from
    being dropped when the floor population straddles the percentile. The last
    sample is never reported (an onset there cannot begin a cycle; the next
    window picks it up), and a first-sample candidate needs interior minima to
    corroborate a rhythm (a monotone ramp yields none).
    """
    x = series.samples
    n = x.size
    d = max(1, int(round(min_beat_interval_s * series.sample_rate_hz)))
    half = d // 2
    span = max(d, int(round(DEPTH_GATE_SPAN_S * series.sample_rate_hz)))
    cand = []
    for i in range(n - 1):
        left_ok = x[i] < x[i - 1] if i > 0 else x[i] < x[i + 1]
        right_ok = x[i] <= x[i + 1]
        if left_ok and right_ok:
            lo, hi = max(0, i - half), min(n, i + half + 1)
            if x[i] <= x[lo:hi].min():
                cand.append(i)
    if not any(i > 0 for i in cand):
        return np.asarray([], dtype=int)
    deep = []
    for i in cand:
        lo, hi = max(0, i - span), min(n, i + span + 1)
        floor, upper = np.percentile(
            x[lo:hi], [DEPTH_GATE_PERCENTILE, 100.0 - DEPTH_GATE_PERCENTILE])
        if x[i] <= floor + DEPTH_GATE_TOLERANCE * (upper - floor) + 1e-12:
            deep.append(i)
    accepted: list[int] = []
    for i in sorted(deep, key=lambda j: (x[j], j)):
        if all(abs(i - j) >= d for j in accepted):
            accepted.append(i)
    return np.asarray(sorted(accepted), dtype=int)


def remove_dc(series: TimeSeries, troughs: np.ndarray) -> TimeSeries:
    """Subtract a natural cubic spline through the troughs (linear for 2 knots).

    The baseline holds its end values constant outside the outermost troughs, so
    the output is exactly zero at every trough.
    """
    troughs = np.asarray(troughs, dtype=int)
    if troughs.size < 2:
        raise ValueError("insufficient troughs for baseline")
    x = series.samples
    require(bool(np.all(np.diff(troughs) > 0)), "troughs must be strictly increasing")
    require(troughs[0] >= 0 and troughs[-1] < x.size, "trough index out of range")
    t = np.arange(x.size, dtype=float)
    knots_t = troughs.astype(float)
    knots_v = x[troughs]
    if troughs.size == 2:
        baseline = np.interp(t, knots_t, knots_v)
    else:
        baseline = CubicSpline(knots_t, knots_v, bc_type="natural")(t)
    baseline[: troughs[0]] = knots_v[0]
    baseline[troughs[-1]:] = knots_v[-1]
    return TimeSeries(x - baseline, series.sample_rate_hz, series.subject_id)


def window_signal(series: TimeSeries, window_s: float = 8.0,
                  step_s: float = 1.6) -> list[Window]:
    """Fixed windows of round(window_s*fs) samples every round(step_s*fs) samples."""
    fs = series.sample_rate_hz
    length = int(round(window_s * fs))
    step = int(round(step_s * fs))
    require(length >= 2, "window must span at least two samples")
    require(step >= 1, "step must span at least one sample")
    n = series.samples.size
    if n < length:
        return []
    count = (n - length) // step + 1
    return [Window(series.samples[k * step:k * step + length].copy(), fs,
                   origin_offset=k * step, subject_id=series.subject_id)
            for k in range(count)]


def normalize_minmax(window: Window) -> Window:
    """Map the window onto [0, 1]; a constant window becomes all 0.5, flagged."""
    x = window.samples
    lo = float(x.min())
    hi = float(x.max())
    if hi == lo:
        return window.replace_samples(np.full(x.size, 0.5), degenerate=True)
    return window.replace_samples((x - lo) / (hi - lo), degenerate=False)


def _pcc(a: np.ndarray, b: np.ndarray) -> float:
    a = a - a.mean()
    b = b - b.mean()
    denom = np.sqrt((a * a).sum() * (b * b).sum())
    if denom == 0.0:
        return 0.0
    return float((a * b).sum() / denom)


def pair_and_clean(wrist_windows: list[Window], finger_windows: list[Window],
                   similarity_threshold: float = 0.8) -> list[WindowPair]:
    """Keep aligned pairs whose reference window shows ideal morphology throughout.

    Every detected reference cycle must correlate with the ideal cycle template
    (PCC >= threshold against the canonical shape resampled to the cycle length)
    and carry two peaks plus one notch. Degenerate windows are dropped.

    The template is circularly shifted so its systolic peak lines up with the
    cycle's before correlating; onset placement within the flat inter-beat
    valley is arbitrary by a few samples and must not count against similarity.
    """
    from .fiducials import detect_fiducials, segment_cycles  # cycle deps on this module
    from .synth import CANONICAL_CYCLE, synth_cycle

    if len(wrist_windows) != len(finger_windows):
        raise ValueError("pair misalignment")
    out: list[WindowPair] = []
    for w, f in zip(wrist_windows, finger_windows):
        if (w.samples.size != f.samples.size or w.sample_rate_hz != f.sample_rate_hz
                or w.origin_offset != f.origin_offset):
            raise ValueError("pair misalignment")
        if w.degenerate or f.degenerate:
            continue
        cycles = segment_cycles(f.samples, f.sample_rate_hz)
        if not cycles:
            continue
        keep = True
        for c in cycles:
            template = synth_cycle(CANONICAL_CYCLE, c.samples.size)
            offset = int(np.argmax(c.samples)) - int(np.argmax(template))
            if _pcc(c.samples, np.roll(template, offset)) < similarity_threshold:
                keep = False
                break
            fid = detect_fiducials(c)
            if fid.dicrotic_notch is None or fid.diastolic_peak is None:
                keep = False
                break
        if keep:
            out.append(WindowPair(w, f))
    return out


AUGMENT_KINDS = ("jitter", "baseline_drift", "time_warp", "amplitude_scale")


def augment(pair: WindowPair, kind: str, seed: int, *,
            jitter_sigma: float = 0.01,
            drift_max_amplitude: float = 0.05,
            drift_max_freq_hz: float = 0.2,
            warp_max_knots: int = 4,
            warp_max_displacement: float = 0.05,
            scale_range: tuple[float, float] = (0.8, 1.2)) -> WindowPair:
    """Deterministic augmentation of one pair; windows are re-normalized.

    time_warp resamples both windows through the same monotone mapping; the
    other kinds perturb only the distorted window.
    """
    require(kind in AUGMENT_KINDS, f"unknown augmentation kind {kind!r}")
    rng = np.random.default_rng(seed)
    d, r = pair.distorted, pair.reference
    L = d.samples.size
    if kind == "jitter":
        noisy = d.samples + rng.normal(0.0, jitter_sigma, L)
        d2 = normalize_minmax(d.replace_samples(noisy))
        return WindowPair(d2, r, pair.subject_id)
    if kind == "baseline_drift":
        amp = rng.uniform(0.0, drift_max_amplitude)
        freq = rng.uniform(0.02, drift_max_freq_hz)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        t = np.arange(L) / d.sample_rate_hz
        d2 = normalize_minmax(d.replace_samples(
            d.samples + amp * np.sin(2.0 * np.pi * freq * t + phase)))
        return WindowPair(d2, r, pair.subject_id)
    if kind == "amplitude_scale":
        s = rng.uniform(*scale_range)
        d2 = normalize_minmax(d.replace_samples(d.samples * s))
        return WindowPair(d2, r, pair.subject_id)
    # time_warp: evenly spaced interior knots keep the mapping monotone as long
    # as displacement < half the knot gap
    k = int(rng.integers(2, warp_max_knots + 1))
    u = np.arange(1, k + 1) / (k + 1)
    disp = rng.uniform(-warp_max_displacement, warp_max_displacement, k)
    xs = np.concatenate(([0.0], u, [1.0]))
    ys = np.concatenate(([0.0], u + disp, [1.0]))
    require(bool(np.all(np.diff(ys) > 0)), "warp lost monotonicity")
    warp = PchipInterpolator(xs, ys)
    pos = warp(np.arange(L) / (L - 1)) * (L - 1)
    base = np.arange(L, dtype=float)
    d2 = normalize_minmax(d.replace_samples(np.interp(pos, base, d.samples)))
    r2 = normalize_minmax(r.replace_samples(np.interp(pos, base, r.samples)))
    return WindowPair(d2, r2, pair.subject_id)


def _fail(row: int, why: str):
    raise DataFormatError(f"row {row}: {why}")


def read_signal_csv(path) -> dict[str, TimeSeries]:
    """Read a `t,value` or `t,wrist,finger` CSV into named series.

    Timestamps are seconds, strictly increasing, uniform within +-1% of the
    median interval; the first offending row is named in the error. Row numbers
    count from 1 (the header row).
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError("row 1: missing header") from None
        cols = [c.strip().lower() for c in header]
        if cols == ["t", "value"]:
            names = ["value"]
        elif cols == ["t", "wrist", "finger"]:
            names = ["wrist", "finger"]
        else:
            _fail(1, f"unrecognized header {','.join(cols)!r}")
        t: list[float] = []
        values: list[list[float]] = [[] for _ in names]
        for rownum, row in enumerate(reader, start=2):
            if len(row) != len(names) + 1:
                _fail(rownum, f"expected {len(names) + 1} fields, got {len(row)}")
            try:
                parsed = [float(field) for field in row]
            except ValueError:
                _fail(rownum, "malformed numeric field")
            if not all(np.isfinite(parsed)):
                _fail(rownum, "non-finite sample")
            t.append(parsed[0])
            for i in range(len(names)):
                values[i].append(parsed[i + 1])
    if len(t) < 3:
        raise DataFormatError(f"row {len(t) + 1}: need at least 3 data rows")
    tv = np.asarray(t)
    dt = np.diff(tv)
    bad = np.nonzero(dt <= 0)[0]
    if bad.size:
        _fail(int(bad[0]) + 3, "non-monotone timestamp")
    nominal = float(np.median(dt))
    off = np.nonzero(np.abs(dt - nominal) > 0.01 * nominal)[0]
    if off.size:
        _fail(int(off[0]) + 3, "non-uniform timestamp")
    fs = 1.0 / nominal
    return {name: TimeSeries(np.asarray(vals), fs) for name, vals in zip(names, values)}


def preprocess_series(series: TimeSeries, window_s: float = 8.0, step_s: float = 1.6,
                      cutoff_hz: float = DEFAULT_CUTOFF_HZ,
                      order: int = DEFAULT_ORDER) -> list[Window]:
    """Full conditioning chain: lowpass, baseline removal, windowing, normalization."""
    spec = design_lowpass(series.sample_rate_hz, cutoff_hz, order)
    filtered = filter_zero_phase(spec, series)
    troughs = detect_troughs(filtered)
    flat = remove_dc(filtered, troughs)
    return [normalize_minmax(w) for w in window_signal(flat, window_s, step_s)]
