"""Batched transforms over many signals: numba kernels, numpy fallback.

Applying one kernel or one plan to a large batch of signals is the hot
loop of this package.  Both code paths compute identical exact results;
the backend is selected by the FFHT_BACKEND environment variable
("numba" or "numpy"), defaulting to numba when it is importable.

Signals travel as int64 arrays of shape (batch, N, 2) holding (re, im)
residue pairs; helpers convert from the scalar Signal tuples.  All
arithmetic stays below 2**63 because moduli are capped at 2**31.
"""

from __future__ import annotations

import os
from functools import lru_cache
from typing import Sequence

import numpy as np

from .core import Signal, build_matrix
from .errors import LengthMismatch
from .fastplan import Combine, FastPlan, Pass
from .fftrig import KernelSpec
from .modfield import FieldCtx, GaussInt

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

BACKEND_ENV = "FFHT_BACKEND"


def active_backend() -> str:
    """Backend chosen by the FFHT_BACKEND env flag ("numba" or "numpy")."""
    choice = os.environ.get(BACKEND_ENV, "").strip().lower()
    if choice == "numpy":
        return "numpy"
    if choice == "numba":
        if not HAS_NUMBA:
            raise RuntimeError("FFHT_BACKEND=numba but numba is not importable")
        return "numba"
    if choice:
        raise ValueError(f"{BACKEND_ENV} must be 'numba' or 'numpy', got {choice!r}")
    return "numba" if HAS_NUMBA else "numpy"


# ----------------------------------------------------------- array helpers


def signals_to_array(signals: Sequence[Signal]) -> np.ndarray:
    """Stack Signal tuples into an int64 (batch, N, 2) array."""
    batch = len(signals)
    n = len(signals[0]) if batch else 0
    out = np.empty((batch, n, 2), dtype=np.int64)
    for t, sig in enumerate(signals):
        for i, x in enumerate(sig):
            out[t, i, 0] = x.re
            out[t, i, 1] = x.im
    return out


def array_to_signals(arr: np.ndarray) -> list[Signal]:
    return [
        tuple(GaussInt(int(re), int(im)) for re, im in row) for row in arr
    ]


def _coerce(signals, n: int, p: int) -> np.ndarray:
    if not isinstance(signals, np.ndarray):
        signals = signals_to_array(list(signals))
    if signals.ndim == 2:
        stacked = np.zeros(signals.shape + (2,), dtype=np.int64)
        stacked[:, :, 0] = signals
        signals = stacked
    if signals.ndim != 3 or signals.shape[2] != 2:
        raise ValueError("expected shape (batch, N) or (batch, N, 2)")
    if signals.shape[1] != n:
        raise LengthMismatch(f"signal length {signals.shape[1]} != N = {n}")
    return signals.astype(np.int64) % p


# ------------------------------------------------------------ numpy kernels


def _forward_batch_numpy(t_re, t_im, x_re, x_im, p):
    batch = x_re.shape[0]
    n = t_re.shape[0]
    out_re = np.empty((batch, n), dtype=np.int64)
    out_im = np.empty((batch, n), dtype=np.int64)
    for k in range(n):
        out_re[:, k] = ((x_re * t_re[k] - x_im * t_im[k]) % p).sum(axis=1) % p
        out_im[:, k] = ((x_re * t_im[k] + x_im * t_re[k]) % p).sum(axis=1) % p
    return out_re, out_im


def _plan_batch_numpy(cp: "CompiledPlan", x_re, x_im):
    p = cp.p
    cur_re, cur_im = x_re % p, x_im % p
    for l in range(cp.kind.shape[0]):
        nxt_re = np.empty_like(cur_re)
        nxt_im = np.empty_like(cur_im)
        for i in range(cp.n):
            a = cp.src_a[l, i]
            if cp.kind[l, i] == 0:
                nxt_re[:, i] = cur_re[:, a]
                nxt_im[:, i] = cur_im[:, a]
                continue
            b = cp.src_b[l, i]
            sa_re, sa_im = cp.sa_re[l, i], cp.sa_im[l, i]
            sb_re, sb_im = cp.sb_re[l, i], cp.sb_im[l, i]
            nxt_re[:, i] = (
                sa_re * cur_re[:, a]
                - sa_im * cur_im[:, a]
                + sb_re * cur_re[:, b]
                - sb_im * cur_im[:, b]
            ) % p
            nxt_im[:, i] = (
                sa_re * cur_im[:, a]
                + sa_im * cur_re[:, a]
                + sb_re * cur_im[:, b]
                + sb_im * cur_re[:, b]
            ) % p
        cur_re, cur_im = nxt_re, nxt_im
    out_re = np.zeros_like(cur_re)
    out_im = np.zeros_like(cur_im)
    for r in range(cp.n):
        acc_re = np.zeros(cur_re.shape[0], dtype=np.int64)
        acc_im = np.zeros(cur_re.shape[0], dtype=np.int64)
        for idx in range(cp.indptr[r], cp.indptr[r + 1]):
            c = cp.cols[idx]
            c_re, c_im = cp.c_re[idx], cp.c_im[idx]
            acc_re = (acc_re + c_re * cur_re[:, c] - c_im * cur_im[:, c]) % p
            acc_im = (acc_im + c_re * cur_im[:, c] + c_im * cur_re[:, c]) % p
        out_re[:, r] = acc_re
        out_im[:, r] = acc_im
    return out_re, out_im


# ------------------------------------------------------------ numba kernels

if HAS_NUMBA:

    @njit(cache=True)
    def _forward_batch_numba(t_re, t_im, x_re, x_im, out_re, out_im, p):
        batch, n = x_re.shape
        for t in range(batch):
            for k in range(n):
                acc_re = 0
                acc_im = 0
                for i in range(n):
                    xr = x_re[t, i]
                    xi = x_im[t, i]
                    cr = t_re[k, i]
                    ci = t_im[k, i]
                    acc_re = (acc_re + xr * cr - xi * ci) % p
                    acc_im = (acc_im + xr * ci + xi * cr) % p
                out_re[t, k] = acc_re % p
                out_im[t, k] = acc_im % p

    @njit(cache=True)
    def _plan_batch_numba(
        kind, src_a, sa_re, sa_im, src_b, sb_re, sb_im,
        indptr, cols, c_re, c_im,
        x_re, x_im, out_re, out_im, p,
    ):
        batch, n = x_re.shape
        layers = kind.shape[0]
        cur_re = np.empty(n, dtype=np.int64)
        cur_im = np.empty(n, dtype=np.int64)
        nxt_re = np.empty(n, dtype=np.int64)
        nxt_im = np.empty(n, dtype=np.int64)
        for t in range(batch):
            for i in range(n):
                cur_re[i] = x_re[t, i]
                cur_im[i] = x_im[t, i]
            for l in range(layers):
                for i in range(n):
                    a = src_a[l, i]
                    if kind[l, i] == 0:
                        nxt_re[i] = cur_re[a]
                        nxt_im[i] = cur_im[a]
                    else:
                        b = src_b[l, i]
                        ar = cur_re[a]
                        ai = cur_im[a]
                        br = cur_re[b]
                        bi = cur_im[b]
                        nxt_re[i] = (
                            sa_re[l, i] * ar - sa_im[l, i] * ai
                            + sb_re[l, i] * br - sb_im[l, i] * bi
                        ) % p
                        nxt_im[i] = (
                            sa_re[l, i] * ai + sa_im[l, i] * ar
                            + sb_re[l, i] * bi + sb_im[l, i] * br
                        ) % p
                for i in range(n):
                    cur_re[i] = nxt_re[i]
                    cur_im[i] = nxt_im[i]
            for r in range(n):
                acc_re = 0
                acc_im = 0
                for idx in range(indptr[r], indptr[r + 1]):
                    c = cols[idx]
                    cr = c_re[idx]
                    ci = c_im[idx]
                    acc_re = (acc_re + cr * cur_re[c] - ci * cur_im[c]) % p
                    acc_im = (acc_im + cr * cur_im[c] + ci * cur_re[c]) % p
                out_re[t, r] = acc_re % p
                out_im[t, r] = acc_im % p


# --------------------------------------------------------------- public API


class CompiledPlan:
    """Array form of a FastPlan, shared by both backends."""

    def __init__(self, plan: FastPlan):
        n = plan.n
        layers = len(plan.layers)
        self.p = plan.spec.ctx.p
        self.n = n
        self.kind = np.zeros((layers, n), dtype=np.int8)
        self.src_a = np.zeros((layers, n), dtype=np.int32)
        self.sa_re = np.zeros((layers, n), dtype=np.int64)
        self.sa_im = np.zeros((layers, n), dtype=np.int64)
        self.src_b = np.zeros((layers, n), dtype=np.int32)
        self.sb_re = np.zeros((layers, n), dtype=np.int64)
        self.sb_im = np.zeros((layers, n), dtype=np.int64)
        for l, layer in enumerate(plan.layers):
            for i, node in enumerate(layer.nodes):
                if isinstance(node, Pass):
                    self.src_a[l, i] = node.src
                else:
                    self.kind[l, i] = 1
                    self.src_a[l, i] = node.src_a
                    self.sa_re[l, i] = node.sigma_a.re
                    self.sa_im[l, i] = node.sigma_a.im
                    self.src_b[l, i] = node.src_b
                    self.sb_re[l, i] = node.sigma_b.re
                    self.sb_im[l, i] = node.sigma_b.im
        indptr = [0]
        cols = []
        coeffs = []
        for row in plan.post:
            for col, coeff in row:
                cols.append(col)
                coeffs.append((coeff.re, coeff.im))
            indptr.append(len(cols))
        self.indptr = np.asarray(indptr, dtype=np.int32)
        self.cols = np.asarray(cols, dtype=np.int32)
        self.c_re = np.asarray([c[0] for c in coeffs], dtype=np.int64)
        self.c_im = np.asarray([c[1] for c in coeffs], dtype=np.int64)


@lru_cache(maxsize=None)
def compile_plan(plan: FastPlan) -> CompiledPlan:
    return CompiledPlan(plan)


@lru_cache(maxsize=None)
def _matrix_arrays(spec: KernelSpec) -> tuple[np.ndarray, np.ndarray]:
    entries = build_matrix(spec).entries
    n = spec.n
    t_re = np.empty((n, n), dtype=np.int64)
    t_im = np.empty((n, n), dtype=np.int64)
    for k in range(n):
        for i in range(n):
            t_re[k, i] = entries[k][i].re
            t_im[k, i] = entries[k][i].im
    return t_re, t_im


def ffht_forward_batch(signals, spec: KernelSpec) -> np.ndarray:
    """Dense forward transform of a batch; returns (batch, N, 2) int64."""
    p = spec.ctx.p
    arr = _coerce(signals, spec.n, p)
    t_re, t_im = _matrix_arrays(spec)
    x_re = np.ascontiguousarray(arr[:, :, 0])
    x_im = np.ascontiguousarray(arr[:, :, 1])
    if active_backend() == "numba":
        out_re = np.empty_like(x_re)
        out_im = np.empty_like(x_im)
        _forward_batch_numba(t_re, t_im, x_re, x_im, out_re, out_im, p)
    else:
        out_re, out_im = _forward_batch_numpy(t_re, t_im, x_re, x_im, p)
    return np.stack([out_re, out_im], axis=2)


def apply_plan_batch(plan: FastPlan, signals) -> np.ndarray:
    """Fast-plan transform of a batch; returns (batch, N, 2) int64."""
    p = plan.spec.ctx.p
    arr = _coerce(signals, plan.n, p)
    cp = compile_plan(plan)
    x_re = np.ascontiguousarray(arr[:, :, 0])
    x_im = np.ascontiguousarray(arr[:, :, 1])
    if active_backend() == "numba":
        out_re = np.empty_like(x_re)
        out_im = np.empty_like(x_im)
        _plan_batch_numba(
            cp.kind, cp.src_a, cp.sa_re, cp.sa_im, cp.src_b, cp.sb_re, cp.sb_im,
            cp.indptr, cp.cols, cp.c_re, cp.c_im,
            x_re, x_im, out_re, out_im, p,
        )
    else:
        out_re, out_im = _plan_batch_numpy(cp, x_re, x_im)
    return np.stack([out_re, out_im], axis=2)
