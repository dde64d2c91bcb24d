"""Adversarial training loop, optimizer, scheduler, and checkpoint format.

One epoch alternates critic and translator updates 1:1 per batch: the critic
steps on detached translator output, then the translator steps against the
freshly updated critic, reusing the same forward graph. Validation tracks the
composite reconstruction loss; the best-validation weights are checkpointed.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field

import numpy as np

from .core import Dataset, DivergenceError, require
from .model import (Discriminator, Generator, ModelConfig, composite_loss,
                    generator_loss, hinge_d_loss)
from .sigproc import AUGMENT_KINDS, augment
from .tensor import Tensor, zero_grads

CHECKPOINT_MAGIC = b"PPGM"
CHECKPOINT_VERSION = 1


class CheckpointError(ValueError):
    """Raised when a checkpoint file cannot be parsed or applied."""


@dataclass
class TrainConfig:
    learning_rate: float = 1e-3
    weight_decay: float = 0.005
    batch_size: int = 32
    max_epochs: int = 300
    plateau_factor: float = 0.5
    plateau_patience: int = 10
    min_learning_rate: float = 1e-5
    early_stop_patience: int = 25
    seed: int = 0

    def to_json_dict(self) -> dict:
        return {k: getattr(self, k) for k in (
            "learning_rate", "weight_decay", "batch_size", "max_epochs",
            "plateau_factor", "plateau_patience", "min_learning_rate",
            "early_stop_patience", "seed")}


class AdamW:
    """Adam with decoupled weight decay.

    Per step: p -= lr * wd * p, then p -= lr * m_hat / (sqrt(v_hat) + eps),
    with bias-corrected first/second moments.
    """

    def __init__(self, params, lr: float = 1e-3, betas=(0.9, 0.999),
                 eps: float = 1e-8, weight_decay: float = 0.0):
        self.params = list(params)
        self.lr = lr
        self.betas = betas
        self.eps = eps
        self.weight_decay = weight_decay
        self.t = 0
        self._m = [np.zeros_like(p.data) for p in self.params]
        self._v = [np.zeros_like(p.data) for p in self.params]

    def step(self) -> None:
        self.t += 1
        b1, b2 = self.betas
        c1 = 1.0 - b1 ** self.t
        c2 = 1.0 - b2 ** self.t
        for p, m, v in zip(self.params, self._m, self._v):
            if p.grad is None:
                continue
            g = p.grad
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * (g * g)
            if self.weight_decay:
                p.data -= self.lr * self.weight_decay * p.data
            p.data -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)

    def zero_grad(self) -> None:
        zero_grads(self.params)


class ReduceOnPlateau:
    """Halve (by `factor`) the lr of every optimizer after `patience`
    consecutive epochs without strict improvement; floor at min_lr."""

    def __init__(self, optimizers, factor: float = 0.5, patience: int = 10,
                 min_lr: float = 1e-5):
        self.optimizers = list(optimizers)
        self.factor = factor
        self.patience = patience
        self.min_lr = min_lr
        self.best = np.inf
        self.bad_epochs = 0

    @property
    def lr(self) -> float:
        return self.optimizers[0].lr

    def step(self, metric: float) -> bool:
        if metric < self.best:
            self.best = metric
            self.bad_epochs = 0
            return False
        self.bad_epochs += 1
        if self.bad_epochs < self.patience:
            return False
        self.bad_epochs = 0
        new_lr = max(self.lr * self.factor, self.min_lr)
        if new_lr == self.lr:
            return False
        for opt in self.optimizers:
            opt.lr = new_lr
        return True


# ---- checkpoint format -------------------------------------------------------
#
# Layout: 4-byte magic, uint32 little-endian manifest length, UTF-8 JSON
# manifest, then every parameter as little-endian float32 in manifest order.


def _all_items(generator: Generator, discriminator: Discriminator):
    return ([("gen." + n, p) for n, p in generator.param_items()]
            + [("disc." + n, p) for n, p in discriminator.param_items()])


def save_checkpoint(path: str, generator: Generator, discriminator: Discriminator,
                    epoch: int, val_loss: float) -> None:
    items = _all_items(generator, discriminator)
    manifest = {
        "format_version": CHECKPOINT_VERSION,
        "config": generator.config.to_json_dict(),
        "epoch": int(epoch),
        "val_loss": float(val_loss),
        "parameters": [[name, list(p.data.shape)] for name, p in items],
    }
    body = json.dumps(manifest).encode("utf-8")
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(len(body).to_bytes(4, "little"))
        fh.write(body)
        for _, p in items:
            fh.write(np.ascontiguousarray(p.data, dtype="<f4").tobytes())
    os.replace(tmp, path)


def load_checkpoint(path: str, seed: int = 0):
    """Rebuild (generator, discriminator, manifest) from a checkpoint file."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint: {exc}") from exc
    if len(raw) < 8 or raw[:4] != CHECKPOINT_MAGIC:
        raise CheckpointError("not a checkpoint file")
    body_len = int(np.frombuffer(raw[4:8], dtype="<u4")[0])
    if len(raw) < 8 + body_len:
        raise CheckpointError("truncated manifest")
    try:
        manifest = json.loads(raw[8:8 + body_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"malformed manifest: {exc}") from exc
    if manifest.get("format_version") != CHECKPOINT_VERSION:
        raise CheckpointError(
            f"unknown version {manifest.get('format_version')!r}")
    config = ModelConfig.from_json_dict(manifest["config"])
    rng = np.random.default_rng(seed)
    generator = Generator(config, rng)
    discriminator = Discriminator(config, rng)
    items = dict(_all_items(generator, discriminator))
    blob = raw[8 + body_len:]
    expected = sum(int(np.prod(s)) for _, s in manifest["parameters"]) * 4
    if len(blob) != expected:
        raise CheckpointError("blob size mismatch")
    offset = 0
    for name, shape in manifest["parameters"]:
        if name not in items:
            raise CheckpointError(f"unknown parameter {name}")
        p = items[name]
        if list(p.data.shape) != list(shape):
            raise CheckpointError(f"shape mismatch at {name}")
        n = int(np.prod(shape))
        vals = np.frombuffer(blob, dtype="<f4", count=n, offset=offset)
        p.data = vals.reshape(p.data.shape).astype(config.np_dtype)
        offset += n * 4
    return generator, discriminator, manifest


# ---- data plumbing -----------------------------------------------------------


def pairs_to_arrays(dataset: Dataset):
    """Stack a paired dataset into (distorted [N, L], reference [N, L], fs)."""
    require(len(dataset.pairs) > 0, "empty dataset")
    dist = np.stack([p.distorted.samples for p in dataset.pairs])
    ref = np.stack([p.reference.samples for p in dataset.pairs])
    return dist, ref, dataset.pairs[0].distorted.sample_rate_hz


def augment_dataset(dataset: Dataset, n_extra: int, seed: int) -> Dataset:
    """Append n_extra augmented copies, cycling the augmentation kinds."""
    rng = np.random.default_rng(seed)
    pairs = list(dataset.pairs)
    n = len(pairs)
    require(n > 0, "empty dataset")
    for i in range(n_extra):
        src = pairs[int(rng.integers(n))]
        kind = AUGMENT_KINDS[i % len(AUGMENT_KINDS)]
        pairs.append(augment(src, kind, int(rng.integers(2 ** 31))))
    return Dataset(pairs=pairs, split_tag=dataset.split_tag)


# ---- loop --------------------------------------------------------------------


@dataclass
class EpochStats:
    epoch: int
    train_lg: float
    train_ld: float
    val_lc: float
    lr: float


@dataclass
class TrainResult:
    history: list[EpochStats] = field(default_factory=list)
    best_epoch: int = -1
    best_val: float = np.inf
    stopped_reason: str = ""


HISTORY_FIELDS = ("epoch", "train_LG", "train_LD", "val_LC", "lr")


def _write_history_row(fh, stats: EpochStats) -> None:
    csv.writer(fh).writerow([stats.epoch, f"{stats.train_lg:.6f}",
                             f"{stats.train_ld:.6f}", f"{stats.val_lc:.6f}",
                             f"{stats.lr:.6g}"])
    fh.flush()


def evaluate_lc(generator: Generator, dist: np.ndarray, ref: np.ndarray,
                fs: float, batch_size: int) -> float:
    """Size-weighted mean composite loss over a set, no gradient bookkeeping."""
    dt = generator.config.np_dtype
    total, count = 0.0, 0
    for lo in range(0, len(dist), batch_size):
        xb = dist[lo:lo + batch_size]
        rb = ref[lo:lo + batch_size]
        z = generator(Tensor(xb[:, None, :].astype(dt)))
        lc = composite_loss(z, rb, fs)
        total += lc.item() * len(xb)
        count += len(xb)
    return total / count


def train(generator: Generator, discriminator: Discriminator,
          train_set: Dataset, val_set: Dataset, config: TrainConfig,
          checkpoint_path: str, history_path: str | None = None,
          log=None) -> TrainResult:
    """Run the alternating loop until early stop or the epoch cap.

    Raises DivergenceError the moment either loss goes non-finite. The best
    validation epoch's weights are saved to checkpoint_path and restored into
    the passed models before returning.
    """
    dist_tr, ref_tr, fs = pairs_to_arrays(train_set)
    dist_va, ref_va, _ = pairs_to_arrays(val_set)
    dt = generator.config.np_dtype
    g_params = generator.parameters()
    d_params = discriminator.parameters()
    opt_g = AdamW(g_params, lr=config.learning_rate,
                  weight_decay=config.weight_decay)
    opt_d = AdamW(d_params, lr=config.learning_rate,
                  weight_decay=config.weight_decay)
    scheduler = ReduceOnPlateau([opt_g, opt_d], factor=config.plateau_factor,
                                patience=config.plateau_patience,
                                min_lr=config.min_learning_rate)
    rng = np.random.default_rng(np.random.SeedSequence(config.seed))
    result = TrainResult()
    bad_epochs = 0
    hist_fh = None
    if history_path is not None:
        hist_fh = open(history_path, "w", newline="")
        csv.writer(hist_fh).writerow(HISTORY_FIELDS)
    try:
        for epoch in range(config.max_epochs):
            order = rng.permutation(len(dist_tr))
            lg_sum = ld_sum = 0.0
            seen = 0
            for lo in range(0, len(order), config.batch_size):
                idx = order[lo:lo + config.batch_size]
                xb = dist_tr[idx]
                rb = ref_tr[idx]
                x = Tensor(xb[:, None, :].astype(dt))
                r = Tensor(rb[:, None, :].astype(dt))
                z = generator(x)

                # critic step on frozen translator output
                d_real = discriminator(r)
                d_fake = discriminator(z.detach())
                ld = hinge_d_loss(d_real, d_fake)
                opt_d.zero_grad()
                ld.backward()
                opt_d.step()

                # translator step against the updated critic; skip critic
                # weight grads, only the path back into z matters here
                for p in d_params:
                    p.requires_grad = False
                d_fake_g = discriminator(z)
                for p in d_params:
                    p.requires_grad = True
                lc = composite_loss(z, rb, fs)
                lg = generator_loss(lc, d_fake_g)
                opt_g.zero_grad()
                lg.backward()
                opt_g.step()

                ld_val, lg_val = ld.item(), lg.item()
                if not (np.isfinite(ld_val) and np.isfinite(lg_val)):
                    raise DivergenceError(
                        f"non-finite loss at epoch {epoch}: "
                        f"lg={lg_val}, ld={ld_val}")
                lg_sum += lg_val * len(idx)
                ld_sum += ld_val * len(idx)
                seen += len(idx)

            val_lc = evaluate_lc(generator, dist_va, ref_va, fs,
                                 config.batch_size)
            if not np.isfinite(val_lc):
                raise DivergenceError(
                    f"non-finite validation loss at epoch {epoch}")
            stats = EpochStats(epoch, lg_sum / seen, ld_sum / seen, val_lc,
                               scheduler.lr)
            result.history.append(stats)
            if hist_fh is not None:
                _write_history_row(hist_fh, stats)
            if log is not None:
                log(f"epoch {epoch}: lg={stats.train_lg:.4f} "
                    f"ld={stats.train_ld:.4f} val_lc={val_lc:.4f} "
                    f"lr={stats.lr:.2e}")
            if val_lc < result.best_val:
                result.best_val = val_lc
                result.best_epoch = epoch
                bad_epochs = 0
                save_checkpoint(checkpoint_path, generator, discriminator,
                                epoch, val_lc)
            else:
                bad_epochs += 1
                if bad_epochs >= config.early_stop_patience:
                    result.stopped_reason = "early_stop"
                    break
            scheduler.step(val_lc)
        else:
            result.stopped_reason = "max_epochs"
    finally:
        if hist_fh is not None:
            hist_fh.close()
    # restore best weights into the live models
    best_g, best_d, _ = load_checkpoint(checkpoint_path)
    for (_, live), (_, saved) in zip(generator.param_items(),
                                     best_g.param_items()):
        live.data = saved.data
    for (_, live), (_, saved) in zip(discriminator.param_items(),
                                     best_d.param_items()):
        live.data = saved.data
    return result


def enhance_windows(generator: Generator, windows: np.ndarray,
                    batch_size: int = 32) -> np.ndarray:
    """Run [N, L] windows through the translator, returning [N, L] float64."""
    dt = generator.config.np_dtype
    out = np.empty_like(windows, dtype=np.float64)
    for lo in range(0, len(windows), batch_size):
        xb = windows[lo:lo + batch_size]
        z = generator(Tensor(xb[:, None, :].astype(dt)))
        out[lo:lo + batch_size] = z.data[:, 0, :].astype(np.float64)
    return out
