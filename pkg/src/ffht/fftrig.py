"""Finite-field trigonometry: sin, cos and the Hartley kernel cas.

For a kernel zeta of multiplicative order N in GI(p):

    sin(i) = (zeta**i - zeta**-i) / 2j
    cos(i) = (zeta**i + zeta**-i) / 2
    cas(i) = sin(i) + cos(i)

Indices are accepted as arbitrary signed integers and reduced mod N.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import NonInvertibleLength, OrderMismatch
from .modfield import FieldCtx, GaussInt, gi_add, gi_inv, gi_mul, gi_pow, order


@dataclass(frozen=True)
class KernelSpec:
    """A kernel zeta of multiplicative order n over a field context."""

    ctx: FieldCtx
    zeta: GaussInt
    n: int


def kernel_spec(ctx: FieldCtx, zeta: GaussInt, n: int | None = None) -> KernelSpec:
    """Build a KernelSpec, computing and checking the order of zeta.

    When n is supplied it must equal the true multiplicative order.
    """
    true_n = order(zeta, ctx)
    if n is not None and n != true_n:
        raise OrderMismatch(f"claimed order {n} but order(zeta) = {true_n}")
    if true_n % ctx.p == 0:
        # Unreachable for true kernels (N divides p**2 - 1), kept as a guard.
        raise NonInvertibleLength(f"p = {ctx.p} divides N = {true_n}")
    return KernelSpec(ctx, zeta, true_n)


@lru_cache(maxsize=None)
def _inv_two(ctx: FieldCtx) -> tuple[GaussInt, GaussInt]:
    # (2**-1, (2j)**-1): both appear in every table entry.
    inv2 = gi_inv(GaussInt(2, 0), ctx)
    inv2j = gi_inv(GaussInt(0, 2), ctx)
    return inv2, inv2j


def ff_sin(spec: KernelSpec, i: int) -> GaussInt:
    """sin(i) = (zeta**i - zeta**-i) * (2j)**-1, exact in GI(p)."""
    ctx = spec.ctx
    i %= spec.n
    _, inv2j = _inv_two(ctx)
    zi = gi_pow(spec.zeta, i, ctx)
    zmi = gi_pow(spec.zeta, (spec.n - i) % spec.n, ctx)
    diff = GaussInt((zi.re - zmi.re) % ctx.p, (zi.im - zmi.im) % ctx.p)
    return gi_mul(diff, inv2j, ctx)


def ff_cos(spec: KernelSpec, i: int) -> GaussInt:
    """cos(i) = (zeta**i + zeta**-i) * 2**-1, exact in GI(p)."""
    ctx = spec.ctx
    i %= spec.n
    inv2, _ = _inv_two(ctx)
    zi = gi_pow(spec.zeta, i, ctx)
    zmi = gi_pow(spec.zeta, (spec.n - i) % spec.n, ctx)
    return gi_mul(gi_add(zi, zmi, ctx), inv2, ctx)


def ff_cas(spec: KernelSpec, i: int) -> GaussInt:
    """cas(i) = sin(i) + cos(i)."""
    return gi_add(ff_sin(spec, i), ff_cos(spec, i), spec.ctx)


@dataclass(frozen=True)
class CasTable:
    """Precomputed cas(0..N-1) for a kernel."""

    spec: KernelSpec
    cas: tuple[GaussInt, ...]

    def __getitem__(self, i: int) -> GaussInt:
        return self.cas[i % self.spec.n]


@lru_cache(maxsize=None)
def build_cas_table(spec: KernelSpec) -> CasTable:
    """Table of N cas values, built from an incremental power ladder."""
    ctx = spec.ctx
    p = ctx.p
    inv2, inv2j = _inv_two(ctx)
    zeta_inv = gi_inv(spec.zeta, ctx)
    values = []
    zi = GaussInt(1, 0)
    zmi = GaussInt(1, 0)
    for _ in range(spec.n):
        diff = GaussInt((zi.re - zmi.re) % p, (zi.im - zmi.im) % p)
        s = gi_mul(diff, inv2j, ctx)
        c = gi_mul(gi_add(zi, zmi, ctx), inv2, ctx)
        values.append(gi_add(s, c, ctx))
        zi = gi_mul(zi, spec.zeta, ctx)
        zmi = gi_mul(zmi, zeta_inv, ctx)
    return CasTable(spec, tuple(values))
