"""Reference (naive) finite-field Hartley transform.

The forward transform of a length-N signal v is

    V[k] = sum_i v[i] * cas(i*k mod N)

and the inverse divides by N mod p (Theorem: applying the transform twice
multiplies by N mod p, so the map is an involution up to that scale).
Everything here is exact and serves as the oracle for the fast plans.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import LengthMismatch, NonInvertibleLength, RealInputRequired
from .fftrig import KernelSpec, build_cas_table
from .modfield import FieldCtx, GaussInt, gi_inv, gi_mul

Signal = tuple[GaussInt, ...]


def as_signal(values: Iterable[GaussInt | int], ctx: FieldCtx) -> Signal:
    """Coerce ints and elements into a reduced GaussInt tuple."""
    out = []
    for v in values:
        if isinstance(v, GaussInt):
            out.append(GaussInt(v.re % ctx.p, v.im % ctx.p))
        else:
            out.append(GaussInt(int(v) % ctx.p, 0))
    return tuple(out)


@dataclass(frozen=True)
class TransformMatrix:
    """Dense N x N matrix with entries[k][i] = cas(i*k mod N)."""

    spec: KernelSpec
    entries: tuple[tuple[GaussInt, ...], ...]

    @property
    def n(self) -> int:
        return self.spec.n


@lru_cache(maxsize=None)
def build_matrix(spec: KernelSpec) -> TransformMatrix:
    table = build_cas_table(spec).cas
    n = spec.n
    rows = tuple(
        tuple(table[(i * k) % n] for i in range(n)) for k in range(n)
    )
    return TransformMatrix(spec, rows)


def _check_length(v: Sequence[GaussInt], spec: KernelSpec) -> None:
    if len(v) != spec.n:
        raise LengthMismatch(f"signal length {len(v)} != N = {spec.n}")


def ffht_forward(v: Sequence[GaussInt], spec: KernelSpec, require_real: bool = False) -> Signal:
    """Exact matrix-vector product V[k] = sum_i v[i] * cas(i*k)."""
    _check_length(v, spec)
    if require_real and any(x.im != 0 for x in v):
        raise RealInputRequired("forward input must be real-valued here")
    ctx = spec.ctx
    p = ctx.p
    table = build_cas_table(spec).cas
    n = spec.n
    out = []
    for k in range(n):
        acc_re = 0
        acc_im = 0
        for i, x in enumerate(v):
            c = table[(i * k) % n]
            acc_re += x.re * c.re - x.im * c.im
            acc_im += x.re * c.im + x.im * c.re
        out.append(GaussInt(acc_re % p, acc_im % p))
    return tuple(out)


def ffht_inverse(V: Sequence[GaussInt], spec: KernelSpec) -> Signal:
    """Exact inverse: v[i] = (N mod p)**-1 * sum_k V[k] * cas(i*k)."""
    _check_length(V, spec)
    ctx = spec.ctx
    if spec.n % ctx.p == 0:
        raise NonInvertibleLength(f"p = {ctx.p} divides N = {spec.n}")
    scale = gi_inv(GaussInt(spec.n % ctx.p, 0), ctx)
    return tuple(gi_mul(x, scale, ctx) for x in ffht_forward(V, spec))


# Dense-matrix helpers shared by the plan validator and the decomposer.

DenseMatrix = tuple[tuple[GaussInt, ...], ...]


def dense_identity(n: int) -> DenseMatrix:
    return tuple(
        tuple(GaussInt(1 if i == k else 0, 0) for i in range(n)) for k in range(n)
    )


def dense_mul(a: DenseMatrix, b: DenseMatrix, ctx: FieldCtx) -> DenseMatrix:
    """Exact product of two dense GaussInt matrices."""
    p = ctx.p
    n = len(a)
    m = len(b[0])
    inner = len(b)
    out = []
    for r in range(n):
        row = []
        for c in range(m):
            acc_re = 0
            acc_im = 0
            for k in range(inner):
                x = a[r][k]
                y = b[k][c]
                acc_re += x.re * y.re - x.im * y.im
                acc_im += x.re * y.im + x.im * y.re
            row.append(GaussInt(acc_re % p, acc_im % p))
        out.append(tuple(row))
    return tuple(out)


def dense_matvec(a: DenseMatrix, v: Sequence[GaussInt], ctx: FieldCtx) -> Signal:
    p = ctx.p
    out = []
    for row in a:
        acc_re = 0
        acc_im = 0
        for x, y in zip(row, v):
            acc_re += x.re * y.re - x.im * y.im
            acc_im += x.re * y.im + x.im * y.re
        out.append(GaussInt(acc_re % p, acc_im % p))
    return tuple(out)


def dense_inverse(a: DenseMatrix, ctx: FieldCtx) -> DenseMatrix:
    """Gauss-Jordan inverse over GI(p); raises on singular input."""
    n = len(a)
    work = [list(row) for row in a]
    inv = [list(row) for row in dense_identity(n)]
    zero = GaussInt(0, 0)
    for col in range(n):
        pivot = next((r for r in range(col, n) if work[r][col] != zero), None)
        if pivot is None:
            raise ZeroDivisionError("matrix is singular over GI(p)")
        work[col], work[pivot] = work[pivot], work[col]
        inv[col], inv[pivot] = inv[pivot], inv[col]
        scale = gi_inv(work[col][col], ctx)
        for c in range(n):
            work[col][c] = gi_mul(work[col][c], scale, ctx)
            inv[col][c] = gi_mul(inv[col][c], scale, ctx)
        for r in range(n):
            if r == col or work[r][col] == zero:
                continue
            factor = work[r][col]
            p = ctx.p
            for c in range(n):
                fx = factor
                wx = work[col][c]
                ix = inv[col][c]
                work[r][c] = GaussInt(
                    (work[r][c].re - (fx.re * wx.re - fx.im * wx.im)) % p,
                    (work[r][c].im - (fx.re * wx.im + fx.im * wx.re)) % p,
                )
                inv[r][c] = GaussInt(
                    (inv[r][c].re - (fx.re * ix.re - fx.im * ix.im)) % p,
                    (inv[r][c].im - (fx.re * ix.im + fx.im * ix.re)) % p,
                )
    return tuple(tuple(row) for row in inv)
