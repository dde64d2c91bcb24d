"""Vital-sign estimation from waveform windows.

Beat intervals come from valley (trough) onsets; heart rate and variability
statistics follow standard definitions over the valid-interval series.
Frequency-domain power integrates a Welch estimate of the 4 Hz resampled
tachogram. A fixed 15-field feature vector per window feeds a boosted-stump
regressor for cuffless pressure estimation experiments.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import welch

from .core import TimeSeries, require
from .fiducials import detect_fiducials, extract_features, segment_cycles
from .sigproc import detect_troughs

IBI_VALID_MS = (333.0, 1500.0)
HF_BAND_HZ = (0.15, 0.4)
TACHOGRAM_FS = 4.0
MIN_HF_DURATION_S = 30.0
PNN_THRESHOLD_MS = 50.0


@dataclass
class IbiSeries:
    """Inter-beat intervals in ms, each closed by the valley at onset_times_s.

    valley_indices holds every detected valley; intervals outside the valid
    band are dropped and counted in n_rejected.
    """

    onset_times_s: np.ndarray
    ibis_ms: np.ndarray
    valley_indices: np.ndarray
    n_rejected: int = 0

    @property
    def duration_s(self) -> float:
        return float(np.sum(self.ibis_ms) / 1000.0)


def extract_ibis(samples: np.ndarray, sample_rate_hz: float) -> IbiSeries:
    """Valley-to-valley intervals, keeping only those inside [333, 1500] ms."""
    samples = np.asarray(samples, dtype=float)
    valleys = detect_troughs(TimeSeries(samples, sample_rate_hz))
    require(len(valleys) >= 2, "insufficient beats")
    ibis = np.diff(valleys) / sample_rate_hz * 1000.0
    ok = (ibis >= IBI_VALID_MS[0]) & (ibis <= IBI_VALID_MS[1])
    times = valleys[1:][ok] / sample_rate_hz
    return IbiSeries(times.astype(float), ibis[ok], valleys, int(np.sum(~ok)))


def estimate_hr(ibis_ms: np.ndarray) -> float:
    """Beats per minute from the mean interval."""
    ibis_ms = np.asarray(ibis_ms, dtype=float)
    require(ibis_ms.size >= 1, "no valid intervals")
    return 60000.0 / float(np.mean(ibis_ms))


@dataclass
class HrvMetrics:
    rmssd_ms: float
    sdrr_ms: float
    pnn50: float  # percent, 0-100
    mean_rr_ms: float


def hrv_metrics(ibis_ms: np.ndarray) -> HrvMetrics:
    """RMSSD, SDRR (n-1 divisor), PNN50 as a percentage, and the mean interval.

    Two intervals are the hard minimum (one successive difference); three or
    more are recommended for RMSSD/SDRR to mean much.
    """
    ibis_ms = np.asarray(ibis_ms, dtype=float)
    require(ibis_ms.size >= 2, "too few intervals")
    diffs = np.diff(ibis_ms)
    return HrvMetrics(
        rmssd_ms=float(np.sqrt(np.mean(diffs ** 2))),
        sdrr_ms=float(np.std(ibis_ms, ddof=1)),
        pnn50=100.0 * float(np.mean(np.abs(diffs) > PNN_THRESHOLD_MS)),
        mean_rr_ms=float(np.mean(ibis_ms)),
    )


def _tachogram_psd(ibis: IbiSeries, nperseg: int):
    grid = np.arange(ibis.onset_times_s[0], ibis.onset_times_s[-1],
                     1.0 / TACHOGRAM_FS)
    series = np.interp(grid, ibis.onset_times_s, ibis.ibis_ms)
    nper = min(nperseg, len(series))
    return welch(series, fs=TACHOGRAM_FS, window="hann", nperseg=nper,
                 noverlap=nper // 2, detrend="constant")


def hf_power(ibis: IbiSeries) -> float:
    """High-frequency tachogram power (0.15-0.4 Hz band integral, ms^2).

    The interval series is linearly resampled onto a 4 Hz grid, mean-removed,
    and Welch averaged (hann, 64-sample segments, half overlap); the band is
    integrated with the trapezoid rule. Needs at least 30 s of intervals.
    """
    require(ibis.duration_s >= MIN_HF_DURATION_S, "record too short for HF")
    freqs, psd = _tachogram_psd(ibis, 64)
    mask = (freqs >= HF_BAND_HZ[0]) & (freqs <= HF_BAND_HZ[1])
    require(int(np.sum(mask)) >= 2, "spectral resolution too coarse for HF")
    return float(np.trapezoid(psd[mask], freqs[mask]))


# ---- pressure feature vector ---------------------------------------------------

BP_BASE_FIELDS = ("sp", "pa", "pa_over_sp", "sw", "dw",
                  "mean_rr_ms", "sdrr_ms", "rmssd_ms", "pnn50", "hf")
BP_DIASTOLIC_FIELDS = ("dn", "nt", "dp", "dt", "dt_minus_sw")


@dataclass
class BpFeatureVector:
    """Window-averaged descriptor: always the 10 base fields; the 5
    notch/diastolic fields only when at least half the cycles expose them.

    sp: systolic amplitude; pa: full-cycle trapezoidal pulse area; sw/dw:
    onset-to-peak and peak-to-end durations (s); rhythm stats in ms (pnn50 in
    percent); hf: shortened-segment within-window band-power proxy; dn/nt and
    dp/dt: notch and diastolic amplitude/time; dt_minus_sw: dt - sw.
    """

    sp: float
    pa: float
    pa_over_sp: float
    sw: float
    dw: float
    mean_rr_ms: float
    sdrr_ms: float
    rmssd_ms: float
    pnn50: float
    hf: float
    dn: float | None = None
    nt: float | None = None
    dp: float | None = None
    dt: float | None = None
    dt_minus_sw: float | None = None

    @property
    def has_diastolic(self) -> bool:
        return self.dn is not None

    def to_array(self, include_diastolic: bool = False) -> np.ndarray:
        vals = [getattr(self, f) for f in BP_BASE_FIELDS]
        if include_diastolic:
            require(self.has_diastolic, "diastolic features absent")
            vals += [getattr(self, f) for f in BP_DIASTOLIC_FIELDS]
        return np.array(vals, dtype=float)


def bp_features(samples: np.ndarray, sample_rate_hz: float) -> BpFeatureVector:
    """Per-cycle morphology averaged across one window plus rhythm statistics.

    Needs at least 3 cycles. The hf field integrates the same band as hf_power
    but from a Welch estimate whose segment length shrinks to the window's
    tachogram, making it a within-window proxy rather than the long-record
    measurement.
    """
    samples = np.asarray(samples, dtype=float)
    cycles = segment_cycles(samples, sample_rate_hz)
    require(len(cycles) >= 3, "too few cycles")
    ibis = extract_ibis(samples, sample_rate_hz)
    hrv = hrv_metrics(ibis.ibis_ms)
    freqs, psd = _tachogram_psd(ibis, 64)
    mask = (freqs >= HF_BAND_HZ[0]) & (freqs <= HF_BAND_HZ[1])
    hf = float(np.trapezoid(psd[mask], freqs[mask])) if mask.sum() >= 2 else 0.0

    sp_vals, pa_vals, ratio_vals, sw_vals, dw_vals = [], [], [], [], []
    dn_vals, nt_vals, dp_vals, dt_vals = [], [], [], []
    n_full = 0
    for cyc in cycles:
        fid = detect_fiducials(cyc)
        fv = extract_features(fid, cyc, samples)
        sp_vals.append(fv.systolic_amplitude)
        pa = float(np.trapezoid(cyc.samples)) / sample_rate_hz
        pa_vals.append(pa)
        ratio_vals.append(pa / fv.systolic_amplitude)
        sw_vals.append(fv.systolic_width_s)
        dw_vals.append(fv.diastolic_width_s)
        if fv.notch_amplitude is not None:
            dn_vals.append(fv.notch_amplitude)
            nt_vals.append(fv.notch_time_s)
        if fv.diastolic_amplitude is not None:
            dp_vals.append(fv.diastolic_amplitude)
            dt_vals.append(fv.diastolic_time_s)
        if fv.notch_amplitude is not None and fv.diastolic_amplitude is not None:
            n_full += 1

    sp = float(np.mean(sp_vals))
    sw = float(np.mean(sw_vals))
    out = BpFeatureVector(
        sp=sp, pa=float(np.mean(pa_vals)),
        pa_over_sp=float(np.mean(ratio_vals)),
        sw=sw, dw=float(np.mean(dw_vals)),
        mean_rr_ms=hrv.mean_rr_ms, sdrr_ms=hrv.sdrr_ms,
        rmssd_ms=hrv.rmssd_ms, pnn50=hrv.pnn50, hf=hf,
    )
    if n_full * 2 >= len(cycles):
        out.dn = float(np.mean(dn_vals))
        out.nt = float(np.mean(nt_vals))
        out.dp = float(np.mean(dp_vals))
        out.dt = float(np.mean(dt_vals))
        out.dt_minus_sw = out.dt - sw
    return out


# ---- boosted stump regressor ---------------------------------------------------


@dataclass
class Stump:
    feature: int
    threshold: float
    left_value: float
    right_value: float

    def predict(self, x: np.ndarray) -> np.ndarray:
        return np.where(x[:, self.feature] <= self.threshold,
                        self.left_value, self.right_value)


@dataclass
class BoostModel:
    stumps: list[Stump] = field(default_factory=list)
    log_weights: list[float] = field(default_factory=list)
    is_constant: bool = False
    constant_value: float = 0.0


def _fit_stump(x: np.ndarray, y: np.ndarray, w: np.ndarray) -> Stump:
    """Exact weighted least-squares depth-1 split over all features."""
    n, d = x.shape
    total_w = w.sum()
    total_wy = float(w @ y)
    base_value = total_wy / total_w
    best = (np.inf, 0, 0.0, base_value, base_value)
    for j in range(d):
        order = np.argsort(x[:, j], kind="stable")
        xs = x[order, j]
        ws = w[order]
        wy = ws * y[order]
        cw = np.cumsum(ws)
        cwy = np.cumsum(wy)
        valid = np.nonzero(xs[:-1] < xs[1:])[0]
        if valid.size == 0:
            continue
        lw = cw[valid]
        lwy = cwy[valid]
        rw = total_w - lw
        rwy = total_wy - lwy
        # maximizing explained weighted sum of squares is equivalent to
        # minimizing SSE; the y^2 term is split-independent
        gain = lwy ** 2 / lw + rwy ** 2 / rw
        k = int(np.argmax(gain))
        score = -float(gain[k])
        if score < best[0]:
            i = valid[k]
            best = (score, j, float((xs[i] + xs[i + 1]) / 2.0),
                    float(lwy[k] / lw[k]), float(rwy[k] / rw[k]))
    _, j, thr, lv, rv = best
    return Stump(j, thr, lv, rv)


def boost_train(x: np.ndarray, y: np.ndarray, n_estimators: int = 50) -> BoostModel:
    """Boosted regression via multiplicative reweighting of a stump ensemble.

    Linear loss on residuals scaled by the round's worst residual; rounds with
    weighted average loss >= 0.5 are discarded (kept only when the model would
    otherwise be empty); a zero worst residual ends training with a dominant
    final stump. Deterministic: stumps fit against the weight vector directly,
    no resampling.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    require(x.ndim == 2 and len(x) == len(y), "x must be [n, d] matching y")
    require(len(y) >= 10, "need at least 10 training rows")
    require(np.all(np.isfinite(x)) and np.all(np.isfinite(y)),
            "non-finite training values")
    if np.ptp(y) == 0.0:
        return BoostModel(is_constant=True, constant_value=float(y[0]))
    model = BoostModel()
    w = np.full(len(y), 1.0 / len(y))
    for _ in range(n_estimators):
        p = w / w.sum()
        stump = _fit_stump(x, y, p)
        err = np.abs(stump.predict(x) - y)
        worst = err.max()
        if worst == 0.0:
            model.stumps.append(stump)
            model.log_weights.append(float(np.log(1e10)))
            break
        loss = err / worst
        eps = float(p @ loss)
        if eps >= 0.5:
            if not model.stumps:
                model.stumps.append(stump)
                model.log_weights.append(1.0)
            break
        beta = eps / (1.0 - eps)
        model.stumps.append(stump)
        model.log_weights.append(float(np.log(1.0 / beta)))
        w = w * beta ** (1.0 - loss)
    return model


def boost_predict(model: BoostModel, x: np.ndarray) -> np.ndarray:
    """Weighted-median combination of the stump predictions."""
    x = np.asarray(x, dtype=float)
    if model.is_constant or not model.stumps:
        return np.full(len(x), model.constant_value)
    preds = np.stack([s.predict(x) for s in model.stumps], axis=1)  # [n, T]
    weights = np.asarray(model.log_weights)
    order = np.argsort(preds, axis=1)
    sorted_preds = np.take_along_axis(preds, order, axis=1)
    sorted_w = weights[order]
    cum = np.cumsum(sorted_w, axis=1)
    half = 0.5 * cum[:, -1:]
    idx = np.argmax(cum >= half, axis=1)
    return sorted_preds[np.arange(len(x)), idx]
