"""Encoder/decoder waveform translator and its adversarial critic.

Both nets are built from one repeated unit: two gated convolutions, each
followed by group norm and relu, closed by a squeeze-excitation gate. The
translator encodes with those units (halving length between them), runs a
bidirectional LSTM over the bottleneck, projects back to channel space, and
decodes with additive skip connections; a sigmoid head keeps outputs in [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tensor as T
from .core import require
from .fiducials import count_peaks, detect_fiducials, segment_cycles
from .tensor import Tensor

PEAK_COUNT_PROMINENCE = 0.05
P2P_WEIGHT = 0.01
ADVERSARIAL_WEIGHT = 0.01
CYCLE_MATCH_TOLERANCE_S = 0.25


@dataclass(frozen=True)
class ModelConfig:
    """Shared shape settings for the translator and critic."""

    model_depth: int = 3
    base_channels: int = 32
    lstm_hidden: int = 128
    norm_groups: int = 8
    dtype: str = "float32"

    def __post_init__(self):
        require(self.model_depth >= 1, "model_depth must be at least 1")
        require(self.base_channels % max(2, self.norm_groups) == 0,
                "base_channels must divide into norm groups and halve cleanly")

    def channels(self) -> list[int]:
        return [1] + [self.base_channels * (2 ** i) for i in range(self.model_depth)]

    @property
    def np_dtype(self):
        return np.dtype(self.dtype)

    @property
    def length_multiple(self) -> int:
        return 2 ** (self.model_depth - 1)

    def to_json_dict(self) -> dict:
        return {"model_depth": self.model_depth, "base_channels": self.base_channels,
                "lstm_hidden": self.lstm_hidden, "norm_groups": self.norm_groups,
                "dtype": self.dtype}

    @classmethod
    def from_json_dict(cls, d: dict) -> "ModelConfig":
        return cls(**{k: d[k] for k in
                      ("model_depth", "base_channels", "lstm_hidden",
                       "norm_groups", "dtype")})


class _Conv:
    def __init__(self, rng, cin: int, cout: int, k: int, padding: int, dtype, name: str):
        std = np.sqrt(2.0 / (cin * k))
        self.w = T.parameter(rng.normal(0.0, std, (cout, cin, k)).astype(dtype),
                             name + ".w")
        self.b = T.parameter(np.zeros(cout, dtype=dtype), name + ".b")
        self.padding = padding

    def __call__(self, x: Tensor) -> Tensor:
        return T.conv1d(x, self.w, self.b, padding=self.padding)

    def params(self):
        return [self.w, self.b]


class GatedConv:
    """conv_a(x) * sigmoid(conv_b(x)), kernel 3, stride 1, same length."""

    def __init__(self, rng, cin: int, cout: int, dtype, name: str):
        self.lin = _Conv(rng, cin, cout, 3, 1, dtype, name + ".lin")
        self.gate = _Conv(rng, cin, cout, 3, 1, dtype, name + ".gate")

    def __call__(self, x: Tensor) -> Tensor:
        return self.lin(x) * T.sigmoid(self.gate(x))

    def params(self):
        return self.lin.params() + self.gate.params()


class _GroupNorm:
    def __init__(self, c: int, groups: int, dtype, name: str):
        self.gain = T.parameter(np.ones(c, dtype=dtype), name + ".gain")
        self.bias = T.parameter(np.zeros(c, dtype=dtype), name + ".bias")
        self.groups = groups

    def __call__(self, x: Tensor) -> Tensor:
        return T.group_norm(x, self.gain, self.bias, self.groups)

    def params(self):
        return [self.gain, self.bias]


class SEBlock:
    """Channel gate: pooled description squeezed to C/2, expanded, sigmoided."""

    def __init__(self, rng, c: int, dtype, name: str):
        require(c % 2 == 0, "squeeze-excitation needs an even channel count")
        self.reduce = _Conv(rng, c, c // 2, 1, 0, dtype, name + ".reduce")
        self.expand = _Conv(rng, c // 2, c, 1, 0, dtype, name + ".expand")

    def __call__(self, x: Tensor) -> Tensor:
        s = T.global_avg_pool(x)
        s = T.relu(self.reduce(s))
        s = T.sigmoid(self.expand(s))
        return x * s

    def params(self):
        return self.reduce.params() + self.expand.params()


class PPGBlock:
    """[gated conv -> group norm -> relu] twice, then squeeze-excitation."""

    def __init__(self, rng, cin: int, cout: int, groups: int, dtype, name: str):
        self.g1 = GatedConv(rng, cin, cout, dtype, name + ".g1")
        self.n1 = _GroupNorm(cout, groups, dtype, name + ".n1")
        self.g2 = GatedConv(rng, cout, cout, dtype, name + ".g2")
        self.n2 = _GroupNorm(cout, groups, dtype, name + ".n2")
        self.se = SEBlock(rng, cout, dtype, name + ".se")

    def __call__(self, x: Tensor) -> Tensor:
        h = T.relu(self.n1(self.g1(x)))
        h = T.relu(self.n2(self.g2(h)))
        return self.se(h)

    def params(self):
        return (self.g1.params() + self.n1.params() + self.g2.params()
                + self.n2.params() + self.se.params())


def _init_lstm_dir(rng, c: int, hidden: int, dtype, name: str):
    k = 1.0 / np.sqrt(hidden)
    w_ih = T.parameter(rng.uniform(-k, k, (4 * hidden, c)).astype(dtype), name + ".w_ih")
    w_hh = T.parameter(rng.uniform(-k, k, (4 * hidden, hidden)).astype(dtype),
                       name + ".w_hh")
    b = np.zeros(4 * hidden, dtype=dtype)
    b[hidden:2 * hidden] = 1.0  # open forget gates at the start of training
    return w_ih, w_hh, T.parameter(b, name + ".b")


class Generator:
    """Maps a [B, 1, L] window batch to same-shaped waveforms in [0, 1].

    L must be a multiple of 2**(model_depth - 1) so the pool/upsample pairs
    line up with the skip connections.
    """

    def __init__(self, config: ModelConfig, rng: np.random.Generator):
        self.config = config
        dt = config.np_dtype
        ch = config.channels()
        md = config.model_depth
        g = config.norm_groups
        self.enc = [PPGBlock(rng, ch[i], ch[i + 1], g, dt, f"enc{i}")
                    for i in range(md)]
        c_lat = ch[-1]
        h = config.lstm_hidden
        self.lstm = (_init_lstm_dir(rng, c_lat, h, dt, "lstm.fwd")
                     + _init_lstm_dir(rng, c_lat, h, dt, "lstm.bwd"))
        lim = np.sqrt(6.0 / (2 * h + c_lat))
        self.proj_w = T.parameter(rng.uniform(-lim, lim, (2 * h, c_lat)).astype(dt),
                                  "proj.w")
        self.proj_b = T.parameter(np.zeros(c_lat, dtype=dt), "proj.b")
        self.dec = []
        prev = c_lat
        for j in range(md):
            idx = md - j - 1
            cout = ch[idx] if idx >= 1 else ch[1]
            self.dec.append(PPGBlock(rng, prev, cout, g, dt, f"dec{j}"))
            prev = cout
        self.head = _Conv(rng, prev, 1, 1, 0, dt, "head")

    def __call__(self, x: Tensor) -> Tensor:
        md = self.config.model_depth
        length = x.data.shape[2]
        require(length % self.config.length_multiple == 0,
                "window length incompatible with model depth")
        skips = []
        h = x
        for i, blk in enumerate(self.enc):
            h = blk(h)
            skips.append(h)
            if i < md - 1:
                h = T.avg_pool2(h)
        seq = T.bilstm(h, *self.lstm)
        seq = T.transpose_cl(seq)
        seq = T.dense(seq, self.proj_w, self.proj_b)
        h = T.transpose_cl(seq) + skips[-1]
        for j, blk in enumerate(self.dec):
            if j > 0:
                h = T.upsample2(h)
                h = h + skips[md - 1 - j]
            h = blk(h)
        return T.sigmoid(self.head(h))

    def param_items(self) -> list[tuple[str, Tensor]]:
        params = []
        for blk in self.enc:
            params.extend(blk.params())
        params.extend(self.lstm)
        params.extend([self.proj_w, self.proj_b])
        for blk in self.dec:
            params.extend(blk.params())
        params.extend(self.head.params())
        return [(p.name, p) for p in params]

    def parameters(self) -> list[Tensor]:
        return [p for _, p in self.param_items()]


class Discriminator:
    """Encoder stack, global average pool, and a single-score affine head."""

    def __init__(self, config: ModelConfig, rng: np.random.Generator):
        self.config = config
        dt = config.np_dtype
        ch = config.channels()
        md = config.model_depth
        self.blocks = [PPGBlock(rng, ch[i], ch[i + 1], config.norm_groups, dt, f"blk{i}")
                       for i in range(md)]
        lim = np.sqrt(6.0 / (ch[-1] + 1))
        self.head_w = T.parameter(rng.uniform(-lim, lim, (ch[-1], 1)).astype(dt),
                                  "score.w")
        self.head_b = T.parameter(np.zeros(1, dtype=dt), "score.b")

    def __call__(self, x: Tensor) -> Tensor:
        md = self.config.model_depth
        h = x
        for i, blk in enumerate(self.blocks):
            h = blk(h)
            if i < md - 1:
                h = T.avg_pool2(h)
        s = T.transpose_cl(T.global_avg_pool(h))
        return T.dense(s, self.head_w, self.head_b)  # [B, 1, 1]

    def param_items(self) -> list[tuple[str, Tensor]]:
        params = []
        for blk in self.blocks:
            params.extend(blk.params())
        params.extend([self.head_w, self.head_b])
        return [(p.name, p) for p in params]

    def parameters(self) -> list[Tensor]:
        return [p for _, p in self.param_items()]


def count_parameters(net) -> int:
    return int(sum(p.data.size for _, p in net.param_items()))


# ---- losses ------------------------------------------------------------------


def hinge_d_loss(d_real: Tensor, d_fake: Tensor) -> Tensor:
    """mean(relu(1 - d_real)) + mean(relu(1 + d_fake))."""
    return T.relu(1.0 - d_real).mean() + T.relu(1.0 + d_fake).mean()


def generator_loss(composite: Tensor, d_fake: Tensor,
                   theta: float = ADVERSARIAL_WEIGHT) -> Tensor:
    """composite - theta * mean(d_fake); the critic term pushes scores up."""
    return composite - d_fake.mean() * theta


def _cycle_points(samples: np.ndarray, fs: float):
    """Per cycle: (onset, [(index, amplitude), ...]) fiducial points.

    Fiducial indices are already window-absolute; the point list is ordered
    systolic, notch, diastolic, with trailing entries absent when undetected.
    """
    out = []
    for cyc in segment_cycles(samples, fs):
        fid = detect_fiducials(cyc)
        pts = [fid.systolic_peak]
        if fid.dicrotic_notch is not None:
            pts.append(fid.dicrotic_notch)
        if fid.diastolic_peak is not None:
            pts.append(fid.diastolic_peak)
        out.append((cyc.onset_index, pts))
    return out


def _match_onsets(ref_onsets, est_onsets, tol: float) -> dict[int, int]:
    """Greedy nearest-match in reference order, one estimate used at most once."""
    used: set[int] = set()
    pairs: dict[int, int] = {}
    for ri, ro in enumerate(ref_onsets):
        best, best_d = None, tol
        for ei, eo in enumerate(est_onsets):
            if ei in used:
                continue
            d = abs(eo - ro)
            if d <= best_d and (best is None or d < best_d):
                best, best_d = ei, d
        if best is not None:
            used.add(best)
            pairs[ri] = best
    return pairs


def composite_loss(z: Tensor, reference: np.ndarray, fs: float, *,
                   prominence: float = PEAK_COUNT_PROMINENCE,
                   beta: float = P2P_WEIGHT,
                   match_tolerance_s: float = CYCLE_MATCH_TOLERANCE_S) -> Tensor:
    """Peak-count-gated reconstruction loss over a batch.

    Per window: alpha = |peak count difference| between estimate and reference
    at the given prominence. alpha != 0 scales that window's MSE by (1 + alpha);
    alpha == 0 adds beta times a point-to-point term instead: mean absolute
    error over reference fiducial amplitudes, where cycles pair greedily by
    onset within the tolerance, matched points compare the estimate sampled at
    its own fiducial location against the reference amplitude, and unmatched
    reference points contribute their full amplitude. Gradients flow through
    the MSE and the gathered estimate samples only.
    """
    bsz, _, length = z.data.shape
    require(reference.shape == (bsz, length), "reference must be [batch, length]")
    dt = z.data.dtype
    tol = match_tolerance_s * fs
    weights = np.ones(bsz, dtype=dt)
    gather_b: list[int] = []
    gather_t: list[int] = []
    gather_ref: list[float] = []
    gather_w: list[float] = []
    const_term = 0.0
    for b in range(bsz):
        est = z.data[b, 0]
        ref = reference[b]
        alpha = abs(count_peaks(est, prominence) - count_peaks(ref, prominence))
        if alpha:
            weights[b] = 1.0 + alpha
            continue
        ref_cycles = _cycle_points(ref, fs)
        n_ref = sum(len(pts) for _, pts in ref_cycles)
        if n_ref == 0:
            continue
        est_cycles = _cycle_points(est, fs)
        pairs = _match_onsets([o for o, _ in ref_cycles],
                              [o for o, _ in est_cycles], tol)
        scale = beta / (n_ref * bsz)
        for ri, (_, ref_pts) in enumerate(ref_cycles):
            ei = pairs.get(ri)
            est_pts = est_cycles[ei][1] if ei is not None else []
            for k, (_, ref_amp) in enumerate(ref_pts):
                if k < len(est_pts):
                    gather_b.append(b)
                    gather_t.append(est_pts[k][0])
                    gather_ref.append(ref_amp)
                    gather_w.append(scale)
                else:
                    const_term += scale * abs(ref_amp)
    diff = z - Tensor(reference.reshape(bsz, 1, length).astype(dt))
    per_window = (diff * diff).mean(axis=(1, 2))
    loss = (per_window * Tensor(weights)).mean()
    if gather_b:
        got = T.gather_bt(z, gather_b, gather_t)
        term = T.absolute(got - Tensor(np.asarray(gather_ref, dtype=dt)))
        loss = loss + (term * Tensor(np.asarray(gather_w, dtype=dt))).sum()
    if const_term:
        loss = loss + float(const_term)
    return loss
