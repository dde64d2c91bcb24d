"""Waveform agreement metrics: MAE, correlation, normalized DTW, and
fiducial-feature error aggregation."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Window, require
from .fiducials import detect_fiducials, segment_cycles, sqi

FEATURE_NAMES = ("systolic_amplitude", "systolic_width_s", "diastolic_width_s",
                 "notch_amplitude", "notch_time_s", "diastolic_amplitude",
                 "diastolic_time_s", "systolic_area", "diastolic_area")
MATCH_TOLERANCE_S = 0.25


def mae(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    require(a.shape == b.shape, "mae requires equal shapes")
    return float(np.abs(a - b).mean())


def pcc(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    require(a.shape == b.shape, "pcc requires equal shapes")
    a = a - a.mean()
    b = b - b.mean()
    denom = np.sqrt((a * a).sum() * (b * b).sum())
    if denom == 0.0:
        raise ValueError("undefined correlation")
    return float((a * b).sum() / denom)


def dtw(a: np.ndarray, b: np.ndarray) -> float:
    """Mean per-step cost along the best monotone alignment path.

    Steps are (1,0), (0,1), (1,1) with local cost |a_i - b_j|, boundary to
    boundary. Among minimum-cost paths the shortest is used for the
    normalization; path length counts visited cells. The recursion runs over
    anti-diagonals so the arrays stay vectorized.
    """
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    require(a.size >= 1 and b.size >= 1, "dtw requires non-empty inputs")
    n, m = a.size, b.size
    inf = np.inf
    # rows indexed by i; diag k holds cells (i, k - i)
    prev2 = np.full(n, inf)
    prev2_len = np.zeros(n)
    prev = np.full(n, inf)
    prev_len = np.zeros(n)
    for k in range(n + m - 1):
        i_lo = max(0, k - (m - 1))
        i_hi = min(n - 1, k)
        ii = np.arange(i_lo, i_hi + 1)
        cost = np.abs(a[ii] - b[k - ii])
        cur = np.full(n, inf)
        cur_len = np.zeros(n)
        if k == 0:
            cur[0] = cost[0]
            cur_len[0] = 1.0
        else:
            # (i-1, j) lives at index i-1 on diag k-1; (i, j-1) at index i
            c_up = np.where(ii >= 1, np.take(prev, ii - 1, mode="clip"), inf)
            l_up = np.where(ii >= 1, np.take(prev_len, ii - 1, mode="clip"), 0.0)
            c_left = np.where(k - ii >= 1, prev[ii], inf)
            l_left = np.where(k - ii >= 1, prev_len[ii], 0.0)
            c_diag = np.where((ii >= 1) & (k - ii >= 1),
                              np.take(prev2, ii - 1, mode="clip"), inf)
            l_diag = np.where((ii >= 1) & (k - ii >= 1),
                              np.take(prev2_len, ii - 1, mode="clip"), 0.0)
            best = np.minimum(np.minimum(c_up, c_left), c_diag)
            # among equal-cost predecessors take the fewest cells
            lens = np.full(ii.size, inf)
            for c_cand, l_cand in ((c_up, l_up), (c_left, l_left), (c_diag, l_diag)):
                hit = c_cand == best
                lens = np.where(hit, np.minimum(lens, l_cand), lens)
            start = (ii == 0) & (k - ii == 0)
            cur[ii] = np.where(start, cost, best + cost)
            cur_len[ii] = np.where(start, 1.0, lens + 1.0)
        prev2, prev2_len = prev, prev_len
        prev, prev_len = cur, cur_len
    total = prev[n - 1]
    length = prev_len[n - 1]
    return float(total / length)


@dataclass
class MetricReport:
    """Aggregate agreement between enhanced and reference window lists."""

    n_windows: int
    mae: float
    pcc: float
    dtw: float
    skewness_mae: float
    kurtosis_mae: float
    feature_mape: dict[str, float | None] = field(default_factory=dict)
    feature_excluded: dict[str, int] = field(default_factory=dict)
    n_cycles_matched: int = 0

    def to_json_dict(self) -> dict:
        return {
            "n_windows": self.n_windows,
            "mae": self.mae,
            "pcc": self.pcc,
            "dtw": self.dtw,
            "skewness_mae": self.skewness_mae,
            "kurtosis_mae": self.kurtosis_mae,
            "feature_mape": self.feature_mape,
            "feature_excluded": self.feature_excluded,
            "n_cycles_matched": self.n_cycles_matched,
        }


def _cycle_features(samples: np.ndarray, fs: float):
    """(onset_s, {feature: value}) per detected cycle; landmark gaps are None."""
    out = []
    for c in segment_cycles(samples, fs):
        fid = detect_fiducials(c)
        sp_rel = fid.systolic_peak[0] - c.onset_index
        feats = {
            "systolic_amplitude": fid.systolic_peak[1],
            "systolic_width_s": sp_rel / fs,
            "diastolic_width_s": (c.samples.size - sp_rel) / fs,
            "notch_amplitude": None if fid.dicrotic_notch is None else fid.dicrotic_notch[1],
            "notch_time_s": None if fid.dicrotic_notch is None
                            else (fid.dicrotic_notch[0] - c.onset_index) / fs,
            "diastolic_amplitude": None if fid.diastolic_peak is None else fid.diastolic_peak[1],
            "diastolic_time_s": None if fid.diastolic_peak is None
                                else (fid.diastolic_peak[0] - c.onset_index) / fs,
            "systolic_area": float(np.trapezoid(c.samples[:sp_rel + 1])),
            "diastolic_area": float(np.trapezoid(c.samples[sp_rel:])),
        }
        out.append((c.onset_index / fs, feats))
    return out


def feature_mape(enhanced: list[Window], reference: list[Window],
                 tolerance_s: float = MATCH_TOLERANCE_S):
    """Per-feature MAPE (%) over cycles matched by nearest onset within tolerance.

    Reference features that are missing or zero are excluded and counted, as are
    matched cycles where the enhanced landmark is absent. Raises when no cycle
    anywhere can be matched.
    """
    require(len(enhanced) == len(reference), "window lists must align")
    sums = {k: 0.0 for k in FEATURE_NAMES}
    counts = {k: 0 for k in FEATURE_NAMES}
    excluded = {k: 0 for k in FEATURE_NAMES}
    n_matched = 0
    for e_win, r_win in zip(enhanced, reference):
        fs = r_win.sample_rate_hz
        e_cycles = _cycle_features(e_win.samples, fs)
        r_cycles = _cycle_features(r_win.samples, fs)
        used = set()
        for r_onset, r_feats in r_cycles:
            best, best_gap = None, tolerance_s
            for idx, (e_onset, _) in enumerate(e_cycles):
                gap = abs(e_onset - r_onset)
                if idx not in used and gap <= best_gap:
                    best, best_gap = idx, gap
            if best is None:
                continue
            used.add(best)
            n_matched += 1
            e_feats = e_cycles[best][1]
            for name in FEATURE_NAMES:
                r_val = r_feats[name]
                if r_val is None or r_val == 0.0:
                    excluded[name] += 1
                    continue
                e_val = e_feats[name]
                if e_val is None:
                    excluded[name] += 1
                    continue
                sums[name] += abs(e_val - r_val) / abs(r_val)
                counts[name] += 1
    if n_matched == 0:
        raise ValueError("no comparable cycles")
    mape = {k: (100.0 * sums[k] / counts[k] if counts[k] else None)
            for k in FEATURE_NAMES}
    return mape, excluded, n_matched


def report(enhanced: list[Window], reference: list[Window]) -> MetricReport:
    """Mean per-window MAE/PCC/DTW, SQI errors, and fiducial-feature MAPEs."""
    require(len(enhanced) == len(reference) and len(enhanced) >= 1,
            "window lists must align and be non-empty")
    maes, pccs, dtws, dskew, dkurt = [], [], [], [], []
    for e, r in zip(enhanced, reference):
        maes.append(mae(e.samples, r.samples))
        pccs.append(pcc(e.samples, r.samples))
        dtws.append(dtw(e.samples, r.samples))
        se, ke = sqi(e.samples)
        sr, kr = sqi(r.samples)
        dskew.append(abs(se - sr))
        dkurt.append(abs(ke - kr))
    mape, excluded, n_matched = feature_mape(enhanced, reference)
    return MetricReport(
        n_windows=len(enhanced),
        mae=float(np.mean(maes)),
        pcc=float(np.mean(pccs)),
        dtw=float(np.mean(dtws)),
        skewness_mae=float(np.mean(dskew)),
        kurtosis_mae=float(np.mean(dkurt)),
        feature_mape=mape,
        feature_excluded=excluded,
        n_cycles_matched=n_matched,
    )
