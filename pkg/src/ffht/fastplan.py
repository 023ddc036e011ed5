"""Fast-transform plans: pre-addition layers feeding a sparse post-matrix.

A plan factors the dense transform matrix T into

    T = post * L_k * ... * L_1

where every layer L is built from Pass nodes (copy a slot) and Combine
nodes (sigma_a * x[a] + sigma_b * x[b]), and `post` is sparse.  Executing
the layers then the post-matrix computes the transform with far fewer
operations than the dense product; validate_plan checks the factorization
against build_matrix entrywise.

The operation-cost model lives here as well, see count_ops.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Union

from .core import (
    DenseMatrix,
    Signal,
    build_matrix,
    dense_mul,
)
from .errors import ImpurePlan, LengthMismatch, ParseError, UnvalidatedPlan
from .fftrig import KernelSpec, kernel_spec
from .modfield import (
    FieldCtx,
    GaussInt,
    format_element,
    gi_mul,
    make_field,
    parse_element,
)


@dataclass(frozen=True)
class Pass:
    """Copy slot `src` through unchanged."""

    src: int


@dataclass(frozen=True)
class Combine:
    """sigma_a * x[src_a] + sigma_b * x[src_b]."""

    src_a: int
    sigma_a: GaussInt
    src_b: int
    sigma_b: GaussInt


Node = Union[Pass, Combine]


@dataclass(frozen=True)
class Layer:
    nodes: tuple[Node, ...]

    def __len__(self) -> int:
        return len(self.nodes)


# Sparse post-matrix: one tuple of (column, coefficient) pairs per row.
PostRow = tuple[tuple[int, GaussInt], ...]


@dataclass(frozen=True, eq=False)
class FastPlan:
    spec: KernelSpec
    layers: tuple[Layer, ...]
    post: tuple[PostRow, ...]

    @property
    def n(self) -> int:
        return self.spec.n

    def __eq__(self, other) -> bool:
        if not isinstance(other, FastPlan):
            return NotImplemented
        return (
            self.spec == other.spec
            and self.layers == other.layers
            and self.post == other.post
        )

    def __hash__(self) -> int:
        return hash((self.spec, self.layers, self.post))


def make_plan(
    spec: KernelSpec,
    layers: Sequence[Sequence[Node]],
    post: Sequence[Sequence[tuple[int, GaussInt]]],
) -> FastPlan:
    """Build a FastPlan, checking structural invariants.

    Every layer must have exactly N nodes with source indices in [0, N);
    Combine sigmas and post coefficients must be nonzero and reduced.
    """
    n = spec.n
    p = spec.ctx.p
    zero = GaussInt(0, 0)
    packed_layers = []
    for layer_nodes in layers:
        nodes = tuple(layer_nodes)
        if len(nodes) != n:
            raise ValueError(f"layer has {len(nodes)} slots, expected {n}")
        for node in nodes:
            if isinstance(node, Pass):
                srcs = (node.src,)
            else:
                srcs = (node.src_a, node.src_b)
                for sigma in (node.sigma_a, node.sigma_b):
                    if sigma == zero:
                        raise ValueError("Combine sigma must be nonzero")
                    if sigma.re >= p or sigma.im >= p:
                        raise ValueError(f"sigma {sigma} not reduced mod {p}")
            for s in srcs:
                if not 0 <= s < n:
                    raise ValueError(f"source index {s} out of range [0, {n})")
        packed_layers.append(Layer(nodes))
    if len(post) != n:
        raise ValueError(f"post matrix has {len(post)} rows, expected {n}")
    packed_post = []
    for row in post:
        cells = sorted(row)
        for col, coeff in cells:
            if not 0 <= col < n:
                raise ValueError(f"post column {col} out of range")
            if coeff == zero:
                raise ValueError("post coefficients must be nonzero")
            if coeff.re >= p or coeff.im >= p:
                raise ValueError(f"coefficient {coeff} not reduced mod {p}")
        packed_post.append(tuple(cells))
    return FastPlan(spec, tuple(packed_layers), tuple(packed_post))


def sparsify(dense: DenseMatrix) -> tuple[PostRow, ...]:
    """Dense rows to sorted (column, coefficient) pairs, zeros dropped."""
    zero = GaussInt(0, 0)
    return tuple(
        tuple((c, x) for c, x in enumerate(row) if x != zero) for row in dense
    )


def post_dense(plan: FastPlan) -> DenseMatrix:
    zero = GaussInt(0, 0)
    out = []
    for row in plan.post:
        cells = dict(row)
        out.append(tuple(cells.get(c, zero) for c in range(plan.n)))
    return tuple(out)


def layer_dense(layer: Layer, n: int, ctx: FieldCtx) -> DenseMatrix:
    zero = GaussInt(0, 0)
    one = GaussInt(1, 0)
    rows = []
    for node in layer.nodes:
        row = [zero] * n
        if isinstance(node, Pass):
            row[node.src] = one
        else:
            p = ctx.p
            a, b = node.src_a, node.src_b
            row[a] = GaussInt(
                (row[a].re + node.sigma_a.re) % p, (row[a].im + node.sigma_a.im) % p
            )
            row[b] = GaussInt(
                (row[b].re + node.sigma_b.re) % p, (row[b].im + node.sigma_b.im) % p
            )
        rows.append(tuple(row))
    return tuple(rows)


def compose_plan(plan: FastPlan) -> DenseMatrix:
    """Dense composition post * L_k * ... * L_1."""
    ctx = plan.spec.ctx
    acc = None
    for layer in plan.layers:
        mat = layer_dense(layer, plan.n, ctx)
        acc = mat if acc is None else dense_mul(mat, acc, ctx)
    posted = post_dense(plan)
    return posted if acc is None else dense_mul(posted, acc, ctx)


@dataclass(frozen=True)
class ValidationReport:
    equal: bool
    row: int | None = None
    col: int | None = None
    expected: GaussInt | None = None
    actual: GaussInt | None = None

    def __str__(self) -> str:
        if self.equal:
            return "equal"
        return (
            f"mismatch at ({self.row}, {self.col}): "
            f"expected {self.expected}, got {self.actual}"
        )


def validate_plan(plan: FastPlan) -> ValidationReport:
    """Compare the composed plan with build_matrix, entry by entry."""
    want = build_matrix(plan.spec).entries
    got = compose_plan(plan)
    for r in range(plan.n):
        for c in range(plan.n):
            if got[r][c] != want[r][c]:
                report = ValidationReport(False, r, c, want[r][c], got[r][c])
                object.__setattr__(plan, "_valid", False)
                return report
    object.__setattr__(plan, "_valid", True)
    return ValidationReport(True)


def _is_validated(plan: FastPlan) -> bool:
    cached = getattr(plan, "_valid", None)
    if cached is None:
        return validate_plan(plan).equal
    return cached


def apply_plan(plan: FastPlan, v: Sequence[GaussInt], strict: bool = False) -> Signal:
    """Evaluate the layers in order, then the sparse post-matrix.

    With strict=True the plan must validate against build_matrix first.
    The executor is linear, so equality with ffht_forward on validated
    plans holds for any input; the cost model additionally assumes
    real-valued inputs.
    """
    if len(v) != plan.n:
        raise LengthMismatch(f"signal length {len(v)} != N = {plan.n}")
    if strict and not _is_validated(plan):
        raise UnvalidatedPlan(str(validate_plan(plan)))
    p = plan.spec.ctx.p
    x = list(v)
    for layer in plan.layers:
        nxt = []
        for node in layer.nodes:
            if isinstance(node, Pass):
                nxt.append(x[node.src])
            else:
                ta = gi_mul(node.sigma_a, x[node.src_a], plan.spec.ctx)
                tb = gi_mul(node.sigma_b, x[node.src_b], plan.spec.ctx)
                nxt.append(GaussInt((ta.re + tb.re) % p, (ta.im + tb.im) % p))
        x = nxt
    out = []
    for row in plan.post:
        acc_re = 0
        acc_im = 0
        for col, coeff in row:
            s = x[col]
            acc_re += coeff.re * s.re - coeff.im * s.im
            acc_im += coeff.re * s.im + coeff.im * s.re
        out.append(GaussInt(acc_re % p, acc_im % p))
    return tuple(out)


# --------------------------------------------------------------- cost model


@dataclass(frozen=True)
class OpCount:
    pre_adds: int
    post_adds: int
    pre_mults: int
    post_mults: int

    @property
    def total_adds(self) -> int:
        return self.pre_adds + self.post_adds

    @property
    def total_mults(self) -> int:
        return self.pre_mults + self.post_mults

    @property
    def total(self) -> int:
        return self.total_adds + self.total_mults

    def __str__(self) -> str:
        return (
            f"pre_adds={self.pre_adds} post_adds={self.post_adds} "
            f"adds={self.total_adds} pre_mults={self.pre_mults} "
            f"post_mults={self.post_mults} mults={self.total_mults} "
            f"total={self.total}"
        )


def _is_pure(c: GaussInt) -> bool:
    return (c.re == 0) != (c.im == 0)


def scalar_class(c: GaussInt, p: int) -> int:
    """Canonical class representative of a pure scalar.

    Scalars sharing one physical product are grouped into the class
    {c, -c, cj, -cj, 1/c, -1/c, j/c, -j/c}: sign flips and factors of j
    are compartment manipulations, and a reciprocal scale is absorbed by
    rescaling the partner coefficients of the same slot.  The class of 0
    and the class of 1 (so +-1 and +-j) are free.  The representative is
    the smallest magnitude in the class.
    """
    m = c.re if c.im == 0 else c.im
    if m == 0:
        return 0
    m_inv = pow(m, p - 2, p)
    return min(m, p - m, m_inv, p - m_inv)


def _occupancy(plan: FastPlan) -> list[list[bool]]:
    """Slot tags per stage (False = real, True = imaginary).

    Raises ImpurePlan when a Combine would mix components or a sigma /
    post coefficient is not of the form c or c*j.
    """
    tags = [False] * plan.n
    stages = [tags]
    for li, layer in enumerate(plan.layers):
        nxt = []
        for si, node in enumerate(layer.nodes):
            if isinstance(node, Pass):
                nxt.append(tags[node.src])
                continue
            for sigma in (node.sigma_a, node.sigma_b):
                if not _is_pure(sigma):
                    raise ImpurePlan(
                        f"layer {li + 1} slot {si}: sigma {sigma} mixes components"
                    )
            land_a = tags[node.src_a] != (node.sigma_a.im != 0)
            land_b = tags[node.src_b] != (node.sigma_b.im != 0)
            if land_a != land_b:
                raise ImpurePlan(
                    f"layer {li + 1} slot {si}: terms land in different components"
                )
            nxt.append(land_a)
        tags = nxt
        stages.append(tags)
    for r, row in enumerate(plan.post):
        for col, coeff in row:
            if not _is_pure(coeff):
                raise ImpurePlan(
                    f"post row {r} column {col}: coefficient {coeff} mixes components"
                )
    return stages


def count_ops(plan: FastPlan) -> OpCount:
    """The normative operation ledger for a plan under real input.

    Additions: each Combine whose terms land in the same component costs
    one addition (the purity condition makes this every Combine); per post
    row, each component holding t terms costs max(0, t-1) additions, and
    joining a real part with an imaginary part is free.

    Multiplications: per source slot, each distinct non-free scalar class
    (see scalar_class) among its outgoing scalars costs one multiplication,
    whether the scalar occurs as a Combine sigma or a post coefficient.
    """
    stages = _occupancy(plan)
    p = plan.spec.ctx.p
    pre_adds = 0
    pre_mults = 0
    for li, layer in enumerate(plan.layers):
        per_slot: dict[int, set[int]] = {}
        for node in layer.nodes:
            if isinstance(node, Pass):
                continue
            pre_adds += 1
            for src, sigma in ((node.src_a, node.sigma_a), (node.src_b, node.sigma_b)):
                rep = scalar_class(sigma, p)
                if rep > 1:
                    per_slot.setdefault(src, set()).add(rep)
        pre_mults += sum(len(reps) for reps in per_slot.values())
    final_tags = stages[-1]
    post_adds = 0
    per_col: dict[int, set[int]] = {}
    for row in plan.post:
        t_re = 0
        t_im = 0
        for col, coeff in row:
            if final_tags[col] != (coeff.im != 0):
                t_im += 1
            else:
                t_re += 1
            rep = scalar_class(coeff, p)
            if rep > 1:
                per_col.setdefault(col, set()).add(rep)
        post_adds += max(0, t_re - 1) + max(0, t_im - 1)
    post_mults = sum(len(reps) for reps in per_col.values())
    return OpCount(pre_adds, post_adds, pre_mults, post_mults)


def audit_plan(
    plan: FastPlan, v: Sequence[GaussInt]
) -> tuple[OpCount, Signal]:
    """Execute the plan with instrumented arithmetic.

    Counts the operations actually performed: same-component additions,
    and scalar products memoized per (stage, source slot, scalar class) so
    a product is paid for once and reused under sign, compartment and
    reciprocal adjustments.  Returns the ledger and the computed output,
    which equals apply_plan(plan, v).
    """
    if len(v) != plan.n:
        raise LengthMismatch(f"signal length {len(v)} != N = {plan.n}")
    stages = _occupancy(plan)
    ctx = plan.spec.ctx
    p = ctx.p
    pre_adds = 0
    pre_mults = 0
    x = list(v)
    for li, layer in enumerate(plan.layers):
        tags = stages[li]
        paid: dict[int, set[int]] = {}
        nxt = []
        for node in layer.nodes:
            if isinstance(node, Pass):
                nxt.append(x[node.src])
                continue
            terms = []
            lands = []
            for src, sigma in ((node.src_a, node.sigma_a), (node.src_b, node.sigma_b)):
                rep = scalar_class(sigma, p)
                if rep > 1 and rep not in paid.setdefault(src, set()):
                    paid[src].add(rep)
                    pre_mults += 1
                terms.append(gi_mul(sigma, x[src], ctx))
                lands.append(tags[src] != (sigma.im != 0))
            if lands[0] == lands[1]:
                pre_adds += 1
            ta, tb = terms
            nxt.append(GaussInt((ta.re + tb.re) % p, (ta.im + tb.im) % p))
        x = nxt
    final_tags = stages[-1]
    post_adds = 0
    post_mults = 0
    paid_cols: dict[int, set[int]] = {}
    out = []
    for row in plan.post:
        t_re = 0
        t_im = 0
        acc_re = 0
        acc_im = 0
        for col, coeff in row:
            rep = scalar_class(coeff, p)
            if rep > 1 and rep not in paid_cols.setdefault(col, set()):
                paid_cols[col].add(rep)
                post_mults += 1
            if final_tags[col] != (coeff.im != 0):
                t_im += 1
            else:
                t_re += 1
            term = gi_mul(coeff, x[col], ctx)
            acc_re += term.re
            acc_im += term.im
        post_adds += max(0, t_re - 1) + max(0, t_im - 1)
        out.append(GaussInt(acc_re % p, acc_im % p))
    return OpCount(pre_adds, post_adds, pre_mults, post_mults), tuple(out)


# -------------------------------------------------------- plan file format

_HEADER = "ffhtplan v1"


def serialize_plan(plan: FastPlan) -> str:
    """Canonical text form of a plan (columns sorted, rows ascending)."""
    lines = [_HEADER]
    spec = plan.spec
    lines.append(
        f"field p={spec.ctx.p} zeta={format_element(spec.zeta)} n={spec.n}"
    )
    for k, layer in enumerate(plan.layers, start=1):
        lines.append(f"layer {k}")
        for i, node in enumerate(layer.nodes):
            if isinstance(node, Pass):
                lines.append(f"slot {i} = pass {node.src}")
            else:
                lines.append(
                    f"slot {i} = {format_element(node.sigma_a)}*s{node.src_a}"
                    f" + {format_element(node.sigma_b)}*s{node.src_b}"
                )
    lines.append("post")
    for r, row in enumerate(plan.post):
        if not row:
            continue
        cells = ", ".join(f"{col}={format_element(coeff)}" for col, coeff in row)
        lines.append(f"row {r}: {cells}")
    return "\n".join(lines) + "\n"


_SLOT_RE = re.compile(
    r"slot\s+(\d+)\s*=\s*(?:pass\s+(\d+)|(\S+)\s*\*\s*s(\d+)\s*\+\s*(\S+)\s*\*\s*s(\d+))\s*$"
)


def parse_plan(text: str) -> FastPlan:
    """Parse the plan file format; whitespace-tolerant."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0] != _HEADER:
        raise ParseError(f"plan file must start with '{_HEADER}'")
    m = re.match(r"field\s+p=(\d+)\s+zeta=(\S+)\s+n=(\d+)\s*$", lines[1])
    if not m:
        raise ParseError(f"bad field line: {lines[1]!r}")
    ctx = make_field(int(m.group(1)))
    zeta = parse_element(m.group(2), ctx)
    n = int(m.group(3))
    spec = kernel_spec(ctx, zeta, n)

    layers: list[list[Node]] = []
    post_rows: dict[int, list[tuple[int, GaussInt]]] = {}
    section = None
    for ln in lines[2:]:
        if re.match(r"layer\s+\d+\s*$", ln):
            layers.append([])
            section = "layer"
            continue
        if ln == "post":
            section = "post"
            continue
        if section == "layer":
            m = _SLOT_RE.match(ln)
            if not m:
                raise ParseError(f"bad slot line: {ln!r}")
            idx = int(m.group(1))
            if idx != len(layers[-1]):
                raise ParseError(f"slot {idx} out of order in {ln!r}")
            if m.group(2) is not None:
                layers[-1].append(Pass(int(m.group(2))))
            else:
                layers[-1].append(
                    Combine(
                        int(m.group(4)),
                        parse_element(m.group(3), ctx),
                        int(m.group(6)),
                        parse_element(m.group(5), ctx),
                    )
                )
        elif section == "post":
            m = re.match(r"row\s+(\d+)\s*:\s*(.*)$", ln)
            if not m:
                raise ParseError(f"bad post row line: {ln!r}")
            r = int(m.group(1))
            cells = []
            for cell in m.group(2).split(","):
                cell = cell.strip()
                if not cell:
                    continue
                col_s, eq, coeff_s = cell.partition("=")
                if not eq:
                    raise ParseError(f"bad post cell {cell!r}")
                cells.append((int(col_s.strip()), parse_element(coeff_s, ctx)))
            post_rows[r] = cells
        else:
            raise ParseError(f"unexpected line outside any section: {ln!r}")
    post = [post_rows.get(r, []) for r in range(n)]
    return make_plan(spec, layers, post)
