"""Exact arithmetic in GF(p) and its Gaussian-integer extension GI(p).

GI(p) is the set of elements a + b*j with j*j = -1 and both components
reduced mod p.  For p = 3 (mod 4) the value -1 is a quadratic nonresidue,
so GI(p) is a field with multiplicative group of order p**2 - 1.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

from .errors import (
    BadResidueClass,
    DivisionByZero,
    ModulusTooLarge,
    NoSuchOrder,
    NotPrime,
    ParseError,
)

# Products of two reduced residues must fit in a signed 64-bit word.
MODULUS_CAP = 1 << 31

# Witness set that makes Miller-Rabin deterministic below 2**64.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test for n < 2**64."""
    if n < 2:
        return False
    for small in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n == small:
            return True
        if n % small == 0:
            return False
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class GaussInt(NamedTuple):
    """Element a + b*j of GI(p); both components reduced into [0, p)."""

    re: int
    im: int

    def __str__(self) -> str:
        return format_element(self)


ZERO = GaussInt(0, 0)
ONE = GaussInt(1, 0)
J = GaussInt(0, 1)


@dataclass(frozen=True)
class FieldCtx:
    """A validated prime modulus p with p = 3 (mod 4)."""

    p: int

    def __str__(self) -> str:
        return f"GI({self.p})"


def make_field(p: int) -> FieldCtx:
    """Validate p and return the arithmetic context for GI(p).

    Raises NotPrime, BadResidueClass or ModulusTooLarge, naming the
    violated condition.
    """
    if p >= MODULUS_CAP:
        raise ModulusTooLarge(f"p = {p} exceeds the 2**31 modulus cap")
    if not is_prime(p):
        raise NotPrime(f"p = {p} is not prime")
    if p % 4 != 3:
        raise BadResidueClass(f"p = {p} is not congruent to 3 mod 4")
    return FieldCtx(p)


def gi(ctx: FieldCtx, re: int, im: int = 0) -> GaussInt:
    """Build a reduced element from (possibly unreduced) integers."""
    return GaussInt(re % ctx.p, im % ctx.p)


def gi_add(x: GaussInt, y: GaussInt, ctx: FieldCtx) -> GaussInt:
    return GaussInt((x.re + y.re) % ctx.p, (x.im + y.im) % ctx.p)


def gi_sub(x: GaussInt, y: GaussInt, ctx: FieldCtx) -> GaussInt:
    return GaussInt((x.re - y.re) % ctx.p, (x.im - y.im) % ctx.p)


def gi_neg(x: GaussInt, ctx: FieldCtx) -> GaussInt:
    return GaussInt(-x.re % ctx.p, -x.im % ctx.p)


def gi_mul(x: GaussInt, y: GaussInt, ctx: FieldCtx) -> GaussInt:
    """(a+bj)(c+dj) = (ac - bd) + (ad + bc)j, all mod p."""
    p = ctx.p
    return GaussInt((x.re * y.re - x.im * y.im) % p, (x.re * y.im + x.im * y.re) % p)


def gi_inv(x: GaussInt, ctx: FieldCtx) -> GaussInt:
    """Multiplicative inverse via the conjugate over the norm."""
    if x == ZERO:
        raise DivisionByZero("0 has no multiplicative inverse")
    p = ctx.p
    norm_inv = pow((x.re * x.re + x.im * x.im) % p, p - 2, p)
    return GaussInt(x.re * norm_inv % p, -x.im * norm_inv % p)


def gi_pow(x: GaussInt, e: int, ctx: FieldCtx) -> GaussInt:
    """Square-and-multiply exponentiation; negative e routes through gi_inv."""
    if e < 0:
        if x == ZERO:
            raise DivisionByZero("0 cannot be raised to a negative power")
        x = gi_inv(x, ctx)
        e = -e
    result = ONE
    base = x
    while e:
        if e & 1:
            result = gi_mul(result, base, ctx)
        base = gi_mul(base, base, ctx)
        e >>= 1
    return result


@lru_cache(maxsize=None)
def _factor(n: int) -> tuple[int, ...]:
    """Prime factors of n (without multiplicity), by trial division."""
    factors = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            factors.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        factors.append(n)
    return tuple(factors)


@lru_cache(maxsize=None)
def _group_prime_factors(p: int) -> tuple[int, ...]:
    # p**2 - 1 = (p - 1)(p + 1); factor the halves so trial division
    # stays below sqrt(p) instead of p.
    return tuple(sorted(set(_factor(p - 1)) | set(_factor(p + 1))))


def order(x: GaussInt, ctx: FieldCtx) -> int:
    """Least N >= 1 with x**N = 1, by descending through prime factors."""
    if x == ZERO:
        raise DivisionByZero("0 has no multiplicative order")
    n = ctx.p * ctx.p - 1
    for q in _group_prime_factors(ctx.p):
        while n % q == 0 and gi_pow(x, n // q, ctx) == ONE:
            n //= q
    return n


def find_kernel(ctx: FieldCtx, n: int, smallest: bool = False) -> GaussInt:
    """Some element zeta of multiplicative order n in GI(p)*.

    The default path picks a generator of GI(p)* by seeded random sampling
    and returns generator**((p**2-1)/n).  With smallest=True the element
    space is scanned in ascending (re, im) order instead, which always
    yields the canonical smallest kernel.
    """
    group = ctx.p * ctx.p - 1
    if n < 1 or group % n != 0:
        raise NoSuchOrder(f"N = {n} does not divide p**2 - 1 = {group}")
    if smallest:
        for re in range(ctx.p):
            for im in range(ctx.p):
                x = GaussInt(re, im)
                if x != ZERO and order(x, ctx) == n:
                    return x
        raise NoSuchOrder(f"no element of order {n} in GI({ctx.p})")  # unreachable
    rng = random.Random(ctx.p)
    while True:
        g = GaussInt(rng.randrange(ctx.p), rng.randrange(ctx.p))
        if g != ZERO and order(g, ctx) == group:
            return gi_pow(g, group // n, ctx)


def format_element(x: GaussInt) -> str:
    """Canonical element text: 'a', 'bj' or 'a+bj' with zeros elided."""
    if x.im == 0:
        return str(x.re)
    jpart = "j" if x.im == 1 else f"{x.im}j"
    if x.re == 0:
        return jpart
    return f"{x.re}+{jpart}"


def parse_element(text: str, ctx: FieldCtx) -> GaussInt:
    """Parse element text: 'a', 'bj', 'a+bj', or bare 'j' for 0+1j.

    Components must be decimal residues already reduced below p.
    """
    s = text.strip().replace(" ", "")
    if not s:
        raise ParseError("empty element text")
    re_part, plus, im_part = s.partition("+")
    if plus:
        if not im_part.endswith("j"):
            raise ParseError(f"expected imaginary part after '+' in {text!r}")
        re_s, im_s = re_part, im_part[:-1]
    elif s.endswith("j"):
        re_s, im_s = "0", s[:-1]
    else:
        re_s, im_s = s, "0"
    if im_s == "":
        im_s = "1"
    if not (re_s.isdigit() and im_s.isdigit()):
        raise ParseError(f"malformed element text {text!r}")
    re_v, im_v = int(re_s), int(im_s)
    if re_v >= ctx.p or im_v >= ctx.p:
        raise ParseError(f"{text!r} has a component >= p = {ctx.p}")
    return GaussInt(re_v, im_v)
