"""Reverse-mode automatic differentiation over numpy arrays.

Graph nodes hold parent references and a backward closure; backward() walks the
graph once in reverse topological order, accumulating into .grad. Arrays keep
whatever floating dtype they were built with (float32 for training, float64 in
gradient checks); explicit reductions accumulate in float64 and cast back.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit


def _as_array(x) -> np.ndarray:
    return x if isinstance(x, np.ndarray) else np.asarray(x, dtype=np.float64)


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "name", "_parents", "_backward_fn")

    def __init__(self, data, requires_grad: bool = False, name: str | None = None,
                 _parents: tuple = (), _backward_fn=None):
        self.data = _as_array(data)
        self.grad: np.ndarray | None = None
        self.requires_grad = bool(requires_grad) or any(p.requires_grad for p in _parents)
        self.name = name
        self._parents = _parents
        self._backward_fn = _backward_fn

    # ---- graph plumbing -------------------------------------------------

    def backward(self) -> None:
        """Seed d(self)/d(self) = 1 and propagate to every reachable leaf."""
        if self.data.size != 1:
            raise ValueError("backward requires a scalar loss")
        topo: list[Tensor] = []
        visited: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, processed = stack.pop()
            if processed:
                topo.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if id(p) not in visited and p.requires_grad:
                    stack.append((p, False))
        self.grad = np.ones_like(self.data)
        for node in reversed(topo):
            if node._backward_fn is not None and node.grad is not None:
                node._backward_fn(node.grad)

    def zero_grad(self) -> None:
        self.grad = None

    def detach(self) -> "Tensor":
        return Tensor(self.data, requires_grad=False)

    def item(self) -> float:
        return float(self.data)

    # ---- operator sugar --------------------------------------------------

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return mul(self, -1.0)

    def __sub__(self, other):
        return add(self, mul(_coerce(other, self.data.dtype), -1.0))

    def __rsub__(self, other):
        return add(_coerce(other, self.data.dtype), mul(self, -1.0))

    def __truediv__(self, other):
        if isinstance(other, Tensor):
            raise TypeError("division only by constants")
        return mul(self, 1.0 / other)

    def sum(self, axis=None, keepdims=False):
        return tsum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims=False):
        return tmean(self, axis=axis, keepdims=keepdims)

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"


def parameter(data, name: str | None = None) -> Tensor:
    return Tensor(data, requires_grad=True, name=name)


def _coerce(x, dtype) -> Tensor:
    if isinstance(x, Tensor):
        return x
    return Tensor(np.asarray(x, dtype=dtype))


def _acc(t: Tensor, g: np.ndarray) -> None:
    if not t.requires_grad:
        return
    g = np.asarray(g, dtype=t.data.dtype)
    if t.grad is None:
        t.grad = g.copy() if g.base is not None or g is t.data else g
    else:
        t.grad = t.grad + g


def _unbroadcast(g: np.ndarray, shape: tuple) -> np.ndarray:
    if g.shape == shape:
        return g
    extra = g.ndim - len(shape)
    if extra > 0:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and g.shape[i] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g


# ---- elementwise -----------------------------------------------------------

def add(a: Tensor, b) -> Tensor:
    b = _coerce(b, a.data.dtype)
    out = a.data + b.data

    def fn(g):
        _acc(a, _unbroadcast(g, a.data.shape))
        _acc(b, _unbroadcast(g, b.data.shape))

    return Tensor(out, _parents=(a, b), _backward_fn=fn)


def mul(a: Tensor, b) -> Tensor:
    b = _coerce(b, a.data.dtype)
    out = a.data * b.data

    def fn(g):
        _acc(a, _unbroadcast(g * b.data, a.data.shape))
        _acc(b, _unbroadcast(g * a.data, b.data.shape))

    return Tensor(out, _parents=(a, b), _backward_fn=fn)


def absolute(a: Tensor) -> Tensor:
    """|a|; the subgradient at 0 is taken as 0."""
    out = np.abs(a.data)

    def fn(g):
        _acc(a, g * np.sign(a.data))

    return Tensor(out, _parents=(a,), _backward_fn=fn)


def relu(a: Tensor) -> Tensor:
    """max(a, 0); the subgradient at the kink is taken as 0."""
    out = np.maximum(a.data, 0.0)

    def fn(g):
        _acc(a, g * (a.data > 0))

    return Tensor(out, _parents=(a,), _backward_fn=fn)


def sigmoid(a: Tensor) -> Tensor:
    out = expit(a.data)

    def fn(g):
        _acc(a, g * out * (1.0 - out))

    return Tensor(out, _parents=(a,), _backward_fn=fn)


def tanh(a: Tensor) -> Tensor:
    out = np.tanh(a.data)

    def fn(g):
        _acc(a, g * (1.0 - out * out))

    return Tensor(out, _parents=(a,), _backward_fn=fn)


# ---- reductions -------------------------------------------------------------

def tsum(a: Tensor, axis=None, keepdims=False) -> Tensor:
    out = a.data.sum(axis=axis, keepdims=keepdims, dtype=np.float64).astype(a.data.dtype)

    def fn(g):
        gg = g
        if axis is not None and not keepdims:
            gg = np.expand_dims(g, axis)
        _acc(a, np.broadcast_to(gg, a.data.shape))

    return Tensor(out, _parents=(a,), _backward_fn=fn)


def tmean(a: Tensor, axis=None, keepdims=False) -> Tensor:
    count = a.data.size if axis is None else np.prod(
        [a.data.shape[i] for i in np.atleast_1d(axis)])
    out = a.data.mean(axis=axis, keepdims=keepdims, dtype=np.float64).astype(a.data.dtype)

    def fn(g):
        gg = g
        if axis is not None and not keepdims:
            gg = np.expand_dims(g, axis)
        _acc(a, np.broadcast_to(gg, a.data.shape) / count)

    return Tensor(out, _parents=(a,), _backward_fn=fn)


# ---- shaped / structural ----------------------------------------------------

def dense(x: Tensor, w: Tensor, b: Tensor | None = None) -> Tensor:
    """Affine map over the last axis: x @ w (+ b); w is [fan_in, fan_out]."""
    fan_in, fan_out = w.data.shape
    x2 = x.data.reshape(-1, fan_in)
    out = x2 @ w.data
    if b is not None:
        out = out + b.data
    out = out.reshape(x.data.shape[:-1] + (fan_out,))

    def fn(g):
        g2 = g.reshape(-1, fan_out)
        if w.requires_grad:
            _acc(w, x2.T @ g2)
        if b is not None and b.requires_grad:
            _acc(b, g2.sum(axis=0, dtype=np.float64))
        if x.requires_grad:
            _acc(x, (g2 @ w.data.T).reshape(x.data.shape))

    parents = (x, w) if b is None else (x, w, b)
    return Tensor(out, _parents=parents, _backward_fn=fn)


def transpose_cl(x: Tensor) -> Tensor:
    """Swap the channel and length axes of a [B, C, L] tensor."""
    out = np.ascontiguousarray(x.data.transpose(0, 2, 1))

    def fn(g):
        _acc(x, g.transpose(0, 2, 1))

    return Tensor(out, _parents=(x,), _backward_fn=fn)


def _im2col(xp: np.ndarray, k: int, stride: int):
    view = np.lib.stride_tricks.sliding_window_view(xp, k, axis=2)[:, :, ::stride, :]
    b, c, lout, _ = view.shape
    cols = np.ascontiguousarray(view.transpose(0, 2, 1, 3)).reshape(b * lout, c * k)
    return cols, lout


def conv1d(x: Tensor, w: Tensor, b: Tensor | None = None,
           stride: int = 1, padding: int = 0) -> Tensor:
    """Cross-correlation of [B, Cin, L] with [Cout, Cin, K] filters.

    Output length is (L + 2*padding - K)//stride + 1.
    """
    bsz, cin, length = x.data.shape
    cout, cin_w, k = w.data.shape
    if cin != cin_w:
        raise ValueError("channel mismatch between input and filters")
    if length + 2 * padding < k:
        raise ValueError("kernel longer than padded input")
    w2 = w.data.reshape(cout, cin * k)

    def padded(arr):
        return np.pad(arr, ((0, 0), (0, 0), (padding, padding))) if padding else arr

    cols, lout = _im2col(padded(x.data), k, stride)
    out = (cols @ w2.T).reshape(bsz, lout, cout).transpose(0, 2, 1)
    if b is not None:
        out = out + b.data[None, :, None]

    def fn(g):
        g2 = np.ascontiguousarray(g.transpose(0, 2, 1)).reshape(bsz * lout, cout)
        if b is not None and b.requires_grad:
            _acc(b, g.sum(axis=(0, 2), dtype=np.float64))
        if w.requires_grad:
            cols_b, _ = _im2col(padded(x.data), k, stride)  # rebuilt, not cached
            _acc(w, (g2.T @ cols_b).reshape(cout, cin, k))
        if x.requires_grad:
            dcols = (g2 @ w2).reshape(bsz, lout, cin, k)
            dxp = np.zeros((bsz, cin, length + 2 * padding), dtype=x.data.dtype)
            for kk in range(k):
                dxp[:, :, kk:kk + stride * (lout - 1) + 1:stride] += \
                    dcols[:, :, :, kk].transpose(0, 2, 1)
            _acc(x, dxp[:, :, padding:padding + length] if padding else dxp)

    parents = (x, w) if b is None else (x, w, b)
    return Tensor(np.ascontiguousarray(out), _parents=parents, _backward_fn=fn)


def global_avg_pool(x: Tensor) -> Tensor:
    """[B, C, L] -> [B, C, 1] mean over length."""
    length = x.data.shape[2]
    out = x.data.mean(axis=2, keepdims=True, dtype=np.float64).astype(x.data.dtype)

    def fn(g):
        _acc(x, np.broadcast_to(g / length, x.data.shape))

    return Tensor(out, _parents=(x,), _backward_fn=fn)


def avg_pool2(x: Tensor) -> Tensor:
    """Halve the length axis by averaging adjacent pairs; length must be even."""
    bsz, c, length = x.data.shape
    if length % 2:
        raise ValueError("avg_pool2 requires an even length")
    out = x.data.reshape(bsz, c, length // 2, 2).mean(
        axis=3, dtype=np.float64).astype(x.data.dtype)

    def fn(g):
        _acc(x, np.repeat(g / 2.0, 2, axis=2))

    return Tensor(out, _parents=(x,), _backward_fn=fn)


def upsample2(x: Tensor) -> Tensor:
    """Double the length axis by nearest-neighbour repetition."""
    out = np.repeat(x.data, 2, axis=2)

    def fn(g):
        bsz, c, length2 = g.shape
        _acc(x, g.reshape(bsz, c, length2 // 2, 2).sum(axis=3))

    return Tensor(out, _parents=(x,), _backward_fn=fn)


def gather_bt(x: Tensor, batch_idx, time_idx) -> Tensor:
    """Pick x[b, 0, t] for paired index arrays; backward scatter-adds."""
    batch_idx = np.asarray(batch_idx, dtype=int)
    time_idx = np.asarray(time_idx, dtype=int)
    out = x.data[batch_idx, 0, time_idx]

    def fn(g):
        if x.requires_grad:
            dx = np.zeros_like(x.data)
            np.add.at(dx, (batch_idx, 0, time_idx), g)
            _acc(x, dx)

    return Tensor(out, _parents=(x,), _backward_fn=fn)


# ---- recurrence -------------------------------------------------------------

def _lstm_forward(x_t: np.ndarray, w_ih: np.ndarray, w_hh: np.ndarray, b: np.ndarray):
    """One direction over [L, B, C]; returns hidden sequence plus BPTT caches."""
    length, bsz, _ = x_t.shape
    hidden = w_hh.shape[1]
    gates_in = (x_t.reshape(length * bsz, -1) @ w_ih.T).reshape(length, bsz, 4 * hidden)
    gates_in += b
    h = np.zeros((bsz, hidden), dtype=x_t.dtype)
    c = np.zeros((bsz, hidden), dtype=x_t.dtype)
    hs = np.empty((length, bsz, hidden), dtype=x_t.dtype)
    cache = {k: np.empty((length, bsz, hidden), dtype=x_t.dtype)
             for k in ("i", "f", "g", "o", "tc", "cprev")}
    for t in range(length):
        z = gates_in[t] + h @ w_hh.T
        i = expit(z[:, :hidden])
        f = expit(z[:, hidden:2 * hidden])
        g = np.tanh(z[:, 2 * hidden:3 * hidden])
        o = expit(z[:, 3 * hidden:])
        cache["cprev"][t] = c
        c = f * c + i * g
        tc = np.tanh(c)
        h = o * tc
        hs[t] = h
        cache["i"][t], cache["f"][t], cache["g"][t], cache["o"][t] = i, f, g, o
        cache["tc"][t] = tc
    return hs, cache


def _lstm_backward(dhs: np.ndarray, hs: np.ndarray, cache: dict, x_t: np.ndarray,
                   w_ih: np.ndarray, w_hh: np.ndarray):
    length, bsz, hidden = dhs.shape
    dgates = np.empty((length, bsz, 4 * hidden), dtype=dhs.dtype)
    dh = np.zeros((bsz, hidden), dtype=dhs.dtype)
    dc = np.zeros((bsz, hidden), dtype=dhs.dtype)
    i, f, g, o, tc, cprev = (cache[k] for k in ("i", "f", "g", "o", "tc", "cprev"))
    for t in range(length - 1, -1, -1):
        dh_t = dhs[t] + dh
        do = dh_t * tc[t]
        dc_t = dc + dh_t * o[t] * (1.0 - tc[t] * tc[t])
        di = dc_t * g[t]
        dg = dc_t * i[t]
        df = dc_t * cprev[t]
        dc = dc_t * f[t]
        dz = np.concatenate([di * i[t] * (1 - i[t]),
                             df * f[t] * (1 - f[t]),
                             dg * (1 - g[t] * g[t]),
                             do * o[t] * (1 - o[t])], axis=1)
        dgates[t] = dz
        dh = dz @ w_hh
    flat = dgates.reshape(length * bsz, 4 * hidden)
    dw_ih = flat.T @ x_t.reshape(length * bsz, -1)
    if length > 1:
        dw_hh = dgates[1:].reshape(-1, 4 * hidden).T @ hs[:-1].reshape(-1, hidden)
    else:
        dw_hh = np.zeros_like(w_hh)
    db = flat.sum(axis=0, dtype=np.float64).astype(dhs.dtype)
    dx = (flat @ w_ih).reshape(x_t.shape)
    return dx, dw_ih, dw_hh, db


def bilstm(x: Tensor, wf_ih: Tensor, wf_hh: Tensor, bf: Tensor,
           wb_ih: Tensor, wb_hh: Tensor, bb: Tensor) -> Tensor:
    """Bidirectional LSTM over [B, C, L] -> [B, 2H, L].

    Per direction the weights are w_ih [4H, C], w_hh [4H, H], bias [4H], gate
    order (input, forget, cell, output), zero initial states. The reverse half
    processes time back-to-front and is re-reversed so both halves align.
    """
    x_t = np.ascontiguousarray(x.data.transpose(2, 0, 1))  # [L, B, C]
    hs_f, cache_f = _lstm_forward(x_t, wf_ih.data, wf_hh.data, bf.data)
    x_r = x_t[::-1]
    hs_b, cache_b = _lstm_forward(x_r, wb_ih.data, wb_hh.data, bb.data)
    hidden = wf_hh.data.shape[1]
    out = np.concatenate([hs_f.transpose(1, 2, 0), hs_b[::-1].transpose(1, 2, 0)],
                         axis=1)  # [B, 2H, L]

    def fn(g):
        dh_f = np.ascontiguousarray(g[:, :hidden, :].transpose(2, 0, 1))
        dh_b = np.ascontiguousarray(g[:, hidden:, :].transpose(2, 0, 1))[::-1]
        dx_f, dwf_ih, dwf_hh, dbf = _lstm_backward(dh_f, hs_f, cache_f, x_t,
                                                   wf_ih.data, wf_hh.data)
        dx_b, dwb_ih, dwb_hh, dbb = _lstm_backward(dh_b, hs_b, cache_b, x_r,
                                                   wb_ih.data, wb_hh.data)
        _acc(wf_ih, dwf_ih)
        _acc(wf_hh, dwf_hh)
        _acc(bf, dbf)
        _acc(wb_ih, dwb_ih)
        _acc(wb_hh, dwb_hh)
        _acc(bb, dbb)
        if x.requires_grad:
            _acc(x, (dx_f + dx_b[::-1]).transpose(1, 2, 0))

    return Tensor(out, _parents=(x, wf_ih, wf_hh, bf, wb_ih, wb_hh, bb),
                  _backward_fn=fn)


def group_norm(x: Tensor, gain: Tensor, bias: Tensor, num_groups: int,
               eps: float = 1e-5) -> Tensor:
    """Normalize [B, C, L] per (batch, channel-group) then scale/shift per channel."""
    bsz, c, length = x.data.shape
    if c % num_groups:
        raise ValueError("channels must divide evenly into groups")
    span = (c // num_groups) * length
    xr = x.data.reshape(bsz, num_groups, span).astype(np.float64)
    mu = xr.mean(axis=2, keepdims=True)
    var = ((xr - mu) ** 2).mean(axis=2, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = ((xr - mu) * inv).astype(x.data.dtype).reshape(bsz, c, length)
    out = xhat * gain.data[None, :, None] + bias.data[None, :, None]

    def fn(g):
        if bias.requires_grad:
            _acc(bias, g.sum(axis=(0, 2), dtype=np.float64))
        if gain.requires_grad:
            _acc(gain, (g * xhat).sum(axis=(0, 2), dtype=np.float64))
        if x.requires_grad:
            dxh = (g * gain.data[None, :, None]).reshape(bsz, num_groups, span)
            dxh = dxh.astype(np.float64)
            xh = xhat.reshape(bsz, num_groups, span).astype(np.float64)
            t1 = dxh.mean(axis=2, keepdims=True)
            t2 = (dxh * xh).mean(axis=2, keepdims=True)
            dx = ((dxh - t1 - xh * t2) * inv).astype(x.data.dtype)
            _acc(x, dx.reshape(bsz, c, length))

    return Tensor(out, _parents=(x, gain, bias), _backward_fn=fn)


# ---- finite-difference checking ---------------------------------------------

@dataclass
class GradCheckResult:
    max_rel_err: float
    n_checked: int
    n_skipped: int

    def __float__(self) -> float:
        return self.max_rel_err


def grad_check(f, x: Tensor, epsilon: float = 1e-4) -> GradCheckResult:
    """Compare analytic gradients of scalar f(x) with central differences.

    Per coordinate: relative error = |a - n| / max(|a|, |n|, 1e-8). Coordinates
    whose one-sided differences disagree by more than 10% sit on a kink (or a
    vanishing gradient) under the stencil; they are flagged, skipped, and
    counted rather than checked. Run with float64 data.
    """
    x.grad = None
    out = f(x)
    if out.data.size != 1:
        raise ValueError("grad_check needs a scalar-valued function")
    out.backward()
    analytic = np.zeros_like(x.data) if x.grad is None else x.grad.copy()
    base = float(f(x).data)
    flat = x.data.reshape(-1)
    a_flat = analytic.reshape(-1)
    max_err, checked, skipped = 0.0, 0, 0
    for idx in range(flat.size):
        orig = flat[idx]
        flat[idx] = orig + epsilon
        f_plus = float(f(x).data)
        flat[idx] = orig - epsilon
        f_minus = float(f(x).data)
        flat[idx] = orig
        d_plus = (f_plus - base) / epsilon
        d_minus = (base - f_minus) / epsilon
        if abs(d_plus - d_minus) > 0.1 * max(abs(d_plus), abs(d_minus), 1e-8):
            skipped += 1
            continue
        numeric = (f_plus - f_minus) / (2.0 * epsilon)
        a = a_flat[idx]
        err = abs(a - numeric) / max(abs(a), abs(numeric), 1e-8)
        max_err = max(max_err, err)
        checked += 1
    return GradCheckResult(max_err, checked, skipped)


def zero_grads(tensors) -> None:
    for t in tensors:
        t.grad = None
