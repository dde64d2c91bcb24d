"""Synthetic paired recordings: ideal pulse waveforms, contact-pressure style
distortion, and exact per-cycle ground truth for downstream scoring."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .core import TimeSeries, require

# Cycle segments shorter/longer than this are physiologically implausible.
CYCLE_BOUNDS_S = (0.33, 1.5)


@dataclass(frozen=True)
class GaussianBump:
    center: float     # fraction of the cycle, in [0, 1)
    width: float      # Gaussian sigma, same units
    amplitude: float

    def __post_init__(self):
        require(0.0 <= self.center < 1.0, "bump center must lie within the cycle")
        require(self.width > 0, "bump width must be positive")


@dataclass(frozen=True)
class CycleParams:
    """One pulse cycle: systolic and diastolic bumps minus a narrow notch dip.

    The notch sits midway between the two bump centers; its width is a fixed
    narrow fraction of the cycle.
    """

    systolic: GaussianBump
    diastolic: GaussianBump
    notch_depth: float
    notch_width: float = 0.03

    def __post_init__(self):
        require(self.systolic.amplitude > self.diastolic.amplitude,
                "systolic amplitude must exceed diastolic amplitude")
        require(self.systolic.center < self.notch_center < self.diastolic.center,
                "centers must be ordered systolic < notch < diastolic")
        require(self.notch_depth >= 0, "notch depth must be non-negative")

    @property
    def notch_center(self) -> float:
        return 0.5 * (self.systolic.center + self.diastolic.center)


CANONICAL_CYCLE = CycleParams(
    systolic=GaussianBump(center=0.23, width=0.08, amplitude=1.0),
    diastolic=GaussianBump(center=0.55, width=0.12, amplitude=0.45),
    notch_depth=0.12,
)


@dataclass(frozen=True)
class DistortionProfile:
    """Contact-pressure style morphology corruption, constant within a segment.

    diastolic_attenuation and notch_fill are in [0, 1]; peak_shift_ms moves the
    systolic bump later (positive) or earlier within its cycle; amplitude_gain
    scales the whole cycle; additive_noise_sigma is the std of band-limited
    noise in normalized units.
    """

    diastolic_attenuation: float = 0.0
    notch_fill: float = 0.0
    peak_shift_ms: float = 0.0
    amplitude_gain: float = 1.0
    additive_noise_sigma: float = 0.0

    def __post_init__(self):
        require(0.0 <= self.diastolic_attenuation <= 1.0, "attenuation must be in [0, 1]")
        require(0.0 <= self.notch_fill <= 1.0, "notch fill must be in [0, 1]")
        require(self.amplitude_gain > 0, "amplitude gain must be positive")
        require(self.additive_noise_sigma >= 0, "noise sigma must be non-negative")

    @property
    def is_identity(self) -> bool:
        return (self.diastolic_attenuation == 0.0 and self.notch_fill == 0.0
                and self.peak_shift_ms == 0.0 and self.amplitude_gain == 1.0
                and self.additive_noise_sigma == 0.0)


IDENTITY_PROFILE = DistortionProfile()


def _render(params: CycleParams, n: int, shift_frac: float = 0.0,
            fill: float = 0.0, attenuation: float = 0.0, gain: float = 1.0) -> np.ndarray:
    """Render one cycle at n samples; neutral arguments reproduce the ideal shape.

    Filling the notch also suppresses the diastolic bump and widens the systolic
    one, so fill = 1 is a single merged bump; attenuation partially flattens the
    notch with the diastolic bump since pressure squashes both. The systolic
    center is clamped to keep the bump 2.5 widths inside the cycle frame, so
    every rendered cycle starts and ends near the onset level and concatenation
    never produces a step.
    """
    t = np.arange(n, dtype=np.float64) / n
    sys_w = params.systolic.width * (1.0 + 0.5 * fill)
    sys_c = float(np.clip(params.systolic.center + shift_frac,
                          2.5 * sys_w, 1.0 - 2.5 * sys_w))
    dia_amp = params.diastolic.amplitude * (1.0 - attenuation) * (1.0 - fill)
    depth = params.notch_depth * (1.0 - fill) * (1.0 - 0.6 * attenuation)
    y = params.systolic.amplitude * np.exp(-0.5 * ((t - sys_c) / sys_w) ** 2)
    y += dia_amp * np.exp(-0.5 * ((t - params.diastolic.center) / params.diastolic.width) ** 2)
    y -= depth * np.exp(-0.5 * ((t - params.notch_center) / params.notch_width) ** 2)
    return gain * y


def synth_cycle(params: CycleParams, n_samples: int) -> np.ndarray:
    """One ideal cycle sampled at n points starting at the onset."""
    require(n_samples >= 8, "cycle must span at least 8 samples")
    return _render(params, n_samples)


def _scan_fiducials(cycle: np.ndarray, min_prominence: float = 0.01):
    """(systolic, notch, diastolic) sample indices within one noiseless cycle.

    Notch: deepest interior local minimum strictly after the systolic peak and
    before 85% of the cycle; diastolic: highest interior local maximum after the
    notch. Either is None when missing or shallower than min_prominence.
    """
    n = cycle.size
    sp = int(np.argmax(cycle))
    hi = int(np.floor(0.85 * n))
    notch = None
    for i in range(sp + 1, min(hi, n - 1)):
        if cycle[i] <= cycle[i - 1] and cycle[i] <= cycle[i + 1]:
            if notch is None or cycle[i] < cycle[notch]:
                notch = i
    if notch is not None:
        # prominence proxy: rise from the dip to the lower flanking maximum
        left = cycle[sp:notch + 1].max()
        right = cycle[notch:].max()
        if min(left, right) - cycle[notch] < min_prominence:
            notch = None
    dia = None
    if notch is not None:
        for i in range(notch + 1, n - 1):
            if cycle[i] >= cycle[i - 1] and cycle[i] >= cycle[i + 1]:
                if dia is None or cycle[i] > cycle[dia]:
                    dia = i
        if dia is not None:
            drop = cycle[dia] - min(cycle[notch:dia + 1].min(), cycle[dia:].min())
            if drop < min_prominence:
                dia = None
    return sp, notch, dia


@dataclass
class GroundTruth:
    """Per-cycle truth emitted alongside a synthetic recording.

    Index arrays are absolute sample positions; notch/diastolic use -1 where the
    waveform genuinely lacks the landmark. ibis_ms[k] spans onsets k -> k+1.
    """

    sample_rate_hz: float
    onsets: np.ndarray
    ibis_ms: np.ndarray
    systolic: np.ndarray
    notch: np.ndarray
    diastolic: np.ndarray
    cycle_params: CycleParams

    def to_json_dict(self) -> dict:
        p = self.cycle_params
        return {
            "sample_rate_hz": self.sample_rate_hz,
            "onsets": self.onsets.tolist(),
            "ibis_ms": self.ibis_ms.tolist(),
            "systolic": self.systolic.tolist(),
            "notch": self.notch.tolist(),
            "diastolic": self.diastolic.tolist(),
            "cycle_params": {
                "systolic": [p.systolic.center, p.systolic.width, p.systolic.amplitude],
                "diastolic": [p.diastolic.center, p.diastolic.width, p.diastolic.amplitude],
                "notch_depth": p.notch_depth,
                "notch_width": p.notch_width,
            },
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "GroundTruth":
        cp = d["cycle_params"]
        params = CycleParams(
            systolic=GaussianBump(*cp["systolic"]),
            diastolic=GaussianBump(*cp["diastolic"]),
            notch_depth=cp["notch_depth"],
            notch_width=cp.get("notch_width", 0.03),
        )
        return cls(
            sample_rate_hz=d["sample_rate_hz"],
            onsets=np.asarray(d["onsets"], dtype=int),
            ibis_ms=np.asarray(d["ibis_ms"], dtype=float),
            systolic=np.asarray(d["systolic"], dtype=int),
            notch=np.asarray(d["notch"], dtype=int),
            diastolic=np.asarray(d["diastolic"], dtype=int),
            cycle_params=params,
        )

    def ibis_in_window(self, origin_offset: int, length: int) -> np.ndarray:
        """True IBIs whose two defining onsets both fall inside the window."""
        lo, hi = origin_offset, origin_offset + length
        inside = (self.onsets >= lo) & (self.onsets < hi)
        keep = inside[:-1] & inside[1:]
        return self.ibis_ms[keep]


def _cycle_lengths(duration_s: float, hr_bpm, hrv_jitter_ms: float,
                   sample_rate_hz: float, rng: np.random.Generator) -> list[int]:
    total = int(round(duration_s * sample_rate_hz))
    lengths, acc, t = [], 0, 0.0
    while True:
        bpm = float(hr_bpm(t)) if callable(hr_bpm) else float(hr_bpm)
        require(40.0 <= bpm <= 180.0, "heart rate must lie in [40, 180] bpm")
        ibi = 60.0 / bpm + rng.normal(0.0, hrv_jitter_ms / 1000.0)
        ibi = float(np.clip(ibi, CYCLE_BOUNDS_S[0] + 0.01, CYCLE_BOUNDS_S[1] - 0.01))
        n = int(round(ibi * sample_rate_hz))
        if acc + n > total:
            break
        lengths.append(n)
        acc += n
        t += n / sample_rate_hz
    return lengths


def _truth_from_cycles(cycles: list[np.ndarray], sample_rate_hz: float,
                       params: CycleParams) -> GroundTruth:
    onsets, sp, dn, dp = [], [], [], []
    pos = 0
    for c in cycles:
        s, n_, d_ = _scan_fiducials(c)
        onsets.append(pos)
        sp.append(pos + s)
        dn.append(pos + n_ if n_ is not None else -1)
        dp.append(pos + d_ if d_ is not None else -1)
        pos += c.size
    onsets = np.asarray(onsets, dtype=int)
    ibis = np.diff(onsets) / sample_rate_hz * 1000.0
    return GroundTruth(sample_rate_hz, onsets, ibis, np.asarray(sp), np.asarray(dn),
                       np.asarray(dp), params)


def synth_recording(duration_s: float, hr_bpm, hrv_jitter_ms: float, seed: int,
                    sample_rate_hz: float = 128.0,
                    cycle_params: CycleParams = CANONICAL_CYCLE,
                    subject_id: str | None = None) -> tuple[TimeSeries, GroundTruth]:
    """Ideal recording of whole cycles plus its ground truth.

    hr_bpm is a constant or a callable of elapsed seconds. Only whole cycles are
    rendered, so the series may run up to one cycle short of duration_s.
    """
    require(duration_s >= 10.0, "duration must be at least 10 s")
    rng = np.random.default_rng(seed)
    lengths = _cycle_lengths(duration_s, hr_bpm, hrv_jitter_ms, sample_rate_hz, rng)
    require(len(lengths) >= 2, "duration too short for two cycles")
    cycles = [_render(cycle_params, n) for n in lengths]
    series = TimeSeries(np.concatenate(cycles), sample_rate_hz, subject_id)
    return series, _truth_from_cycles(cycles, sample_rate_hz, cycle_params)


def _smoothed_noise(rng: np.random.Generator, n: int, sigma: float) -> np.ndarray:
    """Band-limited additive noise with std ~= sigma (5-sample moving average)."""
    raw = rng.normal(0.0, sigma, n + 4)
    sm = np.convolve(raw, np.ones(5) / 5.0, mode="valid")
    return sm * np.sqrt(5.0)


def apply_cp_distortion(series: TimeSeries, truth: GroundTruth,
                        profile: DistortionProfile, seed: int,
                        ) -> tuple[TimeSeries, GroundTruth]:
    """Re-render every cycle under the profile; cycle frames are preserved.

    Returns the distorted series plus truth recomputed from the noiseless
    distorted rendering (the systolic index moves with peak_shift_ms; a filled
    notch removes the notch/diastolic truth entirely). The identity profile
    reproduces the input exactly.
    """
    fs = series.sample_rate_hz
    onsets = truth.onsets
    require(onsets.size >= 1 and onsets[0] == 0, "truth does not match series framing")
    bounds = list(onsets) + [series.samples.size]
    cycles = []
    for a, b in zip(bounds[:-1], bounds[1:]):
        n = b - a
        shift_frac = (profile.peak_shift_ms / 1000.0) * fs / n
        cycles.append(_render(truth.cycle_params, n, shift_frac=shift_frac,
                              fill=profile.notch_fill,
                              attenuation=profile.diastolic_attenuation,
                              gain=profile.amplitude_gain))
    clean = np.concatenate(cycles)
    out = clean
    if profile.additive_noise_sigma > 0:
        rng = np.random.default_rng(seed)
        out = clean + _smoothed_noise(rng, clean.size, profile.additive_noise_sigma)
    distorted_truth = _truth_from_cycles(cycles, fs, truth.cycle_params)
    return TimeSeries(out, fs, series.subject_id), distorted_truth


def sample_profile(rng: np.random.Generator) -> DistortionProfile:
    """Default per-segment profile distribution used by distort_recording."""
    return DistortionProfile(
        diastolic_attenuation=float(rng.uniform(0.0, 1.0)),
        notch_fill=float(rng.uniform(0.0, 1.0)),
        peak_shift_ms=float(rng.uniform(-50.0, 50.0)),
        amplitude_gain=float(rng.uniform(0.7, 1.3)),
        additive_noise_sigma=float(rng.uniform(0.005, 0.03)),
    )


def distort_recording(series: TimeSeries, truth: GroundTruth, seed: int,
                      segment_s: float = 30.0,
                      profile_sampler=sample_profile) -> tuple[TimeSeries, GroundTruth]:
    """Distort with a fresh profile per segment, held constant within the segment.

    Each cycle takes the profile of the segment containing its onset, so profile
    changes land on cycle boundaries and the waveform stays free of jumps.
    """
    fs = series.sample_rate_hz
    rng = np.random.default_rng(seed)
    total = series.samples.size
    n_segments = int(np.ceil(total / (segment_s * fs)))
    profiles = [profile_sampler(rng) for _ in range(n_segments)]

    onsets = truth.onsets
    bounds = list(onsets) + [total]
    pieces, sp, dn, dp = [], [], [], []
    pos = 0
    for a, b in zip(bounds[:-1], bounds[1:]):
        seg = min(int(a / (segment_s * fs)), n_segments - 1)
        prof = profiles[seg]
        n = b - a
        shift_frac = (prof.peak_shift_ms / 1000.0) * fs / n
        cyc = _render(truth.cycle_params, n, shift_frac=shift_frac,
                      fill=prof.notch_fill, attenuation=prof.diastolic_attenuation,
                      gain=prof.amplitude_gain)
        s, n_, d_ = _scan_fiducials(cyc)
        sp.append(pos + s)
        dn.append(pos + n_ if n_ is not None else -1)
        dp.append(pos + d_ if d_ is not None else -1)
        pieces.append(cyc)
        pos += n
    out = np.concatenate(pieces)
    # one continuous noise stream for the whole record, scaled by a per-segment
    # sigma envelope smoothed over ~1 s so segment changes add no seam
    seg_of = np.minimum((np.arange(total) / (segment_s * fs)).astype(int),
                        n_segments - 1)
    envelope = np.asarray([profiles[s].additive_noise_sigma for s in range(n_segments)])
    env = envelope[seg_of]
    k = int(round(fs)) | 1
    env = np.convolve(env, np.ones(k) / k, mode="same")
    out = out + env * _smoothed_noise(rng, total, 1.0)
    distorted_truth = GroundTruth(fs, onsets.copy(), truth.ibis_ms.copy(),
                                  np.asarray(sp), np.asarray(dn), np.asarray(dp),
                                  truth.cycle_params)
    return TimeSeries(out, fs, series.subject_id), distorted_truth


def sample_subject_params(rng: np.random.Generator) -> CycleParams:
    """Per-subject morphology variation around the canonical cycle.

    The notch depth is clamped from the analytic bump-sum at the notch center
    so the rendered dip bottoms out at least 0.16 above the onset level (the
    onset detector's depth gate must never mistake a notch for a beat) and at
    least 0.07 below the diastolic peak (so both fiducials stay detectable).
    """
    # Lower center bound stays above 2.5 * width so clean renders never clamp.
    sys_c = float(rng.uniform(0.22, 0.26))
    sys_w = float(rng.uniform(0.07, 0.085))
    dia_c = sys_c + float(rng.uniform(0.26, 0.30))
    dia_w = float(rng.uniform(0.12, 0.13))
    dia_a = float(rng.uniform(0.38, 0.50))
    half = 0.5 * (dia_c - sys_c)
    saddle = float(np.exp(-0.5 * (half / sys_w) ** 2)
                   + dia_a * np.exp(-0.5 * (half / dia_w) ** 2))
    dia_peak = dia_a + float(np.exp(-0.5 * ((dia_c - sys_c) / sys_w) ** 2))
    depth = float(rng.uniform(0.08, 0.14))
    depth = min(max(depth, saddle - (dia_peak - 0.07)), saddle - 0.16)
    return CycleParams(
        systolic=GaussianBump(center=sys_c, width=sys_w, amplitude=1.0),
        diastolic=GaussianBump(center=dia_c, width=dia_w, amplitude=dia_a),
        notch_depth=depth,
    )
