"""Automatic derivation of fast plans by iterated Hadamard column pairing.

One step pairs two columns a, b of the working matrix with a scale s,
producing slots minus = x_b - s*x_a and plus = x_b + s*x_a.  The column
update keeps the factorization exact:

    col_minus = (col_b - col_a * s**-1) * 2**-1
    col_plus  = (col_b + col_a * s**-1) * 2**-1

A pairing pays off when the updated columns hold more zero components
than the old ones (entries may mix components, so zeros are counted per
component); the derivation repeats until no pairing creates net zeros.

Scale candidates come from the entry ratios col_a[r] / col_b[r]: the
update equations show that a new zero appears exactly where s equals
such a ratio (up to sign), so sweeping any other scale cannot gain.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import DenseMatrix, build_matrix
from .errors import OverlappingPairs, SearchSpaceTooLarge
from .fastplan import (
    Combine,
    FastPlan,
    Layer,
    Node,
    OpCount,
    Pass,
    count_ops,
    make_plan,
    post_dense,
    scalar_class,
    sparsify,
)
from .fftrig import KernelSpec
from .modfield import FieldCtx, GaussInt, gi_inv, gi_mul, gi_neg

ZERO = GaussInt(0, 0)

from functools import lru_cache


@lru_cache(maxsize=None)
def _inv_table(p: int) -> tuple[int, ...]:
    # inverses of 1..p-1 (index 0 unused); p is tiny here
    return (0,) + tuple(pow(m, p - 2, p) for m in range(1, p))


@lru_cache(maxsize=None)
def _class_table(p: int) -> tuple[int, ...]:
    # scalar_class of pure magnitudes 0..p-1
    inv = _inv_table(p)
    out = [0]
    for m in range(1, p):
        out.append(min(m, p - m, inv[m], p - inv[m]))
    return tuple(out)


@dataclass(frozen=True)
class PairingStep:
    """Pair column b with column a scaled by s (s != 0, a != b)."""

    a: int
    b: int
    scale: GaussInt


def _column(matrix: DenseMatrix, c: int) -> tuple[GaussInt, ...]:
    return tuple(row[c] for row in matrix)


def _pair_columns(
    col_a: Sequence[GaussInt], col_b: Sequence[GaussInt], s: GaussInt, ctx: FieldCtx
) -> tuple[tuple[GaussInt, ...], tuple[GaussInt, ...]]:
    p = ctx.p
    inv2 = gi_inv(GaussInt(2, 0), ctx)
    s_inv = gi_inv(s, ctx)
    minus = []
    plus = []
    for ca, cb in zip(col_a, col_b):
        scaled = gi_mul(ca, s_inv, ctx)
        diff = GaussInt((cb.re - scaled.re) % p, (cb.im - scaled.im) % p)
        summ = GaussInt((cb.re + scaled.re) % p, (cb.im + scaled.im) % p)
        minus.append(gi_mul(diff, inv2, ctx))
        plus.append(gi_mul(summ, inv2, ctx))
    return tuple(minus), tuple(plus)


def apply_pairing(
    matrix: DenseMatrix, steps: Sequence[PairingStep], ctx: FieldCtx
) -> tuple[DenseMatrix, Layer]:
    """Apply disjoint pairing steps; unpaired columns become Pass nodes.

    Step k occupies slots (2k, 2k+1) as (minus, plus); leftover columns
    follow in ascending order.  Returns the updated matrix and the layer
    whose composition with it reproduces the input matrix exactly.
    """
    n = len(matrix)
    used: set[int] = set()
    for step in steps:
        if step.a == step.b:
            raise OverlappingPairs(f"step pairs column {step.a} with itself")
        for c in (step.a, step.b):
            if c in used:
                raise OverlappingPairs(f"column {c} appears in more than one step")
            used.add(c)
    nodes: list[Node] = []
    new_cols: list[tuple[GaussInt, ...]] = []
    one = GaussInt(1, 0)
    for step in steps:
        minus_col, plus_col = _pair_columns(
            _column(matrix, step.a), _column(matrix, step.b), step.scale, ctx
        )
        nodes.append(Combine(step.a, gi_neg(step.scale, ctx), step.b, one))
        nodes.append(Combine(step.a, step.scale, step.b, one))
        new_cols.append(minus_col)
        new_cols.append(plus_col)
    for c in range(n):
        if c not in used:
            nodes.append(Pass(c))
            new_cols.append(_column(matrix, c))
    new_matrix = tuple(tuple(col[r] for col in new_cols) for r in range(n))
    return new_matrix, Layer(tuple(nodes))


# ------------------------------------------------------------- derivation
#
# Search states are packed integer columns for speed: one state entry is
# ((re, im) per row, imag_tag) for each column/slot.


def _pack(matrix: DenseMatrix, tags: Sequence[bool]) -> tuple:
    n = len(matrix)
    return tuple(
        (tuple((row[c].re, row[c].im) for row in matrix), bool(tags[c]))
        for c in range(n)
    )


def _comps(col: tuple) -> int:
    return sum((re != 0) + (im != 0) for re, im in col)


def _gi_mul_int(a: tuple[int, int], b: tuple[int, int], p: int) -> tuple[int, int]:
    return ((a[0] * b[0] - a[1] * b[1]) % p, (a[0] * b[1] + a[1] * b[0]) % p)


def _gi_inv_int(a: tuple[int, int], p: int) -> tuple[int, int]:
    norm_inv = _inv_table(p)[(a[0] * a[0] + a[1] * a[1]) % p]
    return (a[0] * norm_inv % p, -a[1] * norm_inv % p)


@lru_cache(maxsize=None)
def _gi_inv_map(p: int) -> dict:
    # full inverse lookup for GI(p); p is small here
    out = {}
    for re in range(p):
        for im in range(p):
            if re or im:
                out[(re, im)] = _gi_inv_int((re, im), p)
    return out


def _pair_cols_int(col_a, col_b, s, p, inv2):
    s_inv = _gi_inv_map(p)[s]
    minus = []
    plus = []
    for (are, aim), (bre, bim) in zip(col_a, col_b):
        sre = are * s_inv[0] - aim * s_inv[1]
        sim = are * s_inv[1] + aim * s_inv[0]
        minus.append((((bre - sre) * inv2) % p, ((bim - sim) * inv2) % p))
        plus.append((((bre + sre) * inv2) % p, ((bim + sim) * inv2) % p))
    return tuple(minus), tuple(plus)


def _scale_ok(s: tuple[int, int], tag_a: bool, tag_b: bool) -> bool:
    # sigma must be pure and keep the combined slot pure
    if (s[0] == 0) == (s[1] == 0):
        return False
    return (tag_a != (s[1] != 0)) == tag_b


def _int_candidates(state: tuple, p: int, allow_scaling: bool, ordered: bool) -> list:
    """Positive-gain pairings (gain, a, b, scale) on a packed state.

    ordered=True generates both (a, b) and (b, a) orientations (greedy's
    candidate space); otherwise only a < b with the sign-smaller scale,
    which collapses the mirrored variants that differ by slot order only.

    Rows where only one column is nonzero always lose components (the
    entry splits into both output slots), so candidate pairs must share
    support, and the per-scale work only touches the shared rows.
    """
    n = len(state)
    inv2 = _inv_table(p)[2]
    cols = [col for col, _ in state]
    entry_comps = [
        tuple((re != 0) + (im != 0) for re, im in col) for col in cols
    ]
    comps = [sum(ec) for ec in entry_comps]
    support = [
        frozenset(r for r in range(n) if cols[c][r] != (0, 0)) for c in range(n)
    ]
    out = []
    for a in range(n):
        col_a, tag_a = state[a]
        b_range = range(n) if ordered else range(a + 1, n)
        for b in b_range:
            if a == b:
                continue
            shared = support[a] & support[b]
            if not shared:
                continue
            col_b, tag_b = state[b]
            before_shared = sum(
                entry_comps[a][r] + entry_comps[b][r] for r in shared
            )
            singles = comps[a] + comps[b] - before_shared
            if before_shared - singles <= 0:
                continue  # even a perfect collapse cannot gain
            inv_map = _gi_inv_map(p)
            scales: list[tuple[int, int]] = [(1, 0)]
            if allow_scaling:
                seen = {(1, 0)}
                for r in shared:
                    bre, bim = inv_map[cols[b][r]]
                    are, aim = cols[a][r]
                    ratio = (
                        (are * bre - aim * bim) % p,
                        (are * bim + aim * bre) % p,
                    )
                    if ratio not in seen:
                        seen.add(ratio)
                        scales.append(ratio)
            for s in scales:
                if not ordered and (s[0], s[1]) > ((-s[0]) % p, (-s[1]) % p):
                    continue
                if not _scale_ok(s, tag_a, tag_b):
                    continue
                s_inv = inv_map[s]
                after = 0
                for r in shared:
                    are, aim = col_a[r]
                    bre, bim = col_b[r]
                    sre = are * s_inv[0] - aim * s_inv[1]
                    sim = are * s_inv[1] + aim * s_inv[0]
                    m_re = ((bre - sre) * inv2) % p
                    m_im = ((bim - sim) * inv2) % p
                    p_re = ((bre + sre) * inv2) % p
                    p_im = ((bim + sim) * inv2) % p
                    after += (
                        (m_re != 0) + (m_im != 0) + (p_re != 0) + (p_im != 0)
                    )
                gain = before_shared - after - singles
                if gain > 0:
                    out.append((gain, a, b, s))
    return out


def _apply_step_stable(state: tuple, a: int, b: int, s, p: int) -> tuple:
    """Apply one pairing keeping slot indices stable: minus->a, plus->b."""
    inv2 = _inv_table(p)[2]
    col_a, tag_a = state[a]
    col_b, _ = state[b]
    minus, plus = _pair_cols_int(col_a, col_b, s, p, inv2)
    land = tag_a != (s[1] != 0)
    new_state = list(state)
    new_state[a] = (minus, land)
    new_state[b] = (plus, land)
    return tuple(new_state)


def _apply_chosen_int(state: tuple, chosen: Sequence[tuple], p: int) -> tuple:
    """Apply disjoint (a, b, scale) steps to a packed state."""
    inv2 = _inv_table(p)[2]
    new_state = []
    used: set[int] = set()
    for a, b, s in chosen:
        col_a, tag_a = state[a]
        col_b, _ = state[b]
        minus, plus = _pair_cols_int(col_a, col_b, s, p, inv2)
        land = tag_a != (s[1] != 0)
        new_state.append((minus, land))
        new_state.append((plus, land))
        used.update((a, b))
    new_state.extend(state[c] for c in range(len(state)) if c not in used)
    return tuple(new_state)


def _post_cost_int(state: tuple, p: int) -> tuple[bool, int, int]:
    """(post is pure, post additions, post multiplications) of a state."""
    n = len(state)
    pure = True
    adds = 0
    col_classes: list[set] = [set() for _ in range(n)]
    for r in range(n):
        t_re = 0
        t_im = 0
        for c, (col, tag) in enumerate(state):
            re, im = col[r]
            if re == 0 and im == 0:
                continue
            if re != 0 and im != 0:
                pure = False
                t_re += 1
                t_im += 1
                col_classes[c].add(_full_class_rep_int((re, im), p))
                continue
            if tag != (im != 0):
                t_im += 1
            else:
                t_re += 1
            rep = _class_table(p)[re if im == 0 else im]
            if rep > 1:
                col_classes[c].add(rep)
        adds += max(0, t_re - 1) + max(0, t_im - 1)
    return pure, adds, sum(len(s) for s in col_classes)


def _full_class_rep_int(x: tuple[int, int], p: int):
    members = set()
    for base in (x, _gi_inv_int(x, p)):
        cur = base
        for _ in range(4):
            members.add(cur)
            cur = _gi_mul_int(cur, (0, 1), p)
    return min(members)


def _greedy_layer(cands: list) -> list[tuple[int, int, tuple[int, int]]]:
    chosen = []
    used: set[int] = set()
    for gain, a, b, s in sorted(cands, key=lambda g: (-g[0], g[1], g[2], g[3])):
        if a in used or b in used:
            continue
        chosen.append((a, b, s))
        used.update((a, b))
    return sorted(chosen)


def derive_plan(
    spec: KernelSpec,
    strategy: str = "greedy",
    allow_scaling: bool = False,
    max_layers: int | None = None,
) -> FastPlan:
    """Derive a fast plan for the kernel by iterated column pairing.

    greedy: per layer, collect every pairing that creates net zeros and
    keep a maximal disjoint set, best gain first, ties broken on the
    lowest (a, b, scale) tuple; stop when nothing gains or max_layers is
    reached.  exhaustive (bounded to N <= 8): depth-first search over
    pairing sequences, seeded by both greedy variants and pruned with a
    completion bound and a column-permutation-invariant memo; the result
    carries one pairing per layer, which costs the same as merged layers
    because a pairing consumes both of its columns.  Both strategies are
    deterministic, and the returned plan validates against build_matrix.
    """
    if strategy not in ("greedy", "exhaustive"):
        raise ValueError(f"unknown strategy {strategy!r}")
    n = spec.n
    if strategy == "exhaustive" and n > 8:
        raise SearchSpaceTooLarge(f"exhaustive derivation bounded to N <= 8, got {n}")
    if max_layers is None:
        max_layers = 2 * n
    ctx = spec.ctx
    p = ctx.p
    matrix = build_matrix(spec).entries

    if strategy == "greedy":
        layers: list[Layer] = []
        work = matrix
        state = _pack(matrix, [False] * n)
        while len(layers) < max_layers:
            cands = _int_candidates(state, p, allow_scaling, ordered=True)
            chosen = _greedy_layer(cands)
            if not chosen:
                break
            steps = [PairingStep(a, b, GaussInt(*s)) for a, b, s in chosen]
            work, layer = apply_pairing(work, steps, ctx)
            state = _apply_chosen_int(state, chosen, p)
            layers.append(layer)
        return make_plan(spec, [l.nodes for l in layers], sparsify(work))

    # exhaustive
    seeds = [
        derive_plan(spec, "greedy", allow_scaling, max_layers),
        derive_plan(spec, "greedy", not allow_scaling, max_layers),
    ]
    best: dict = {}
    for seed in seeds:
        cost = relaxed_count(seed)
        rank = (0 if _post_is_pure(seed) else 1, cost.total, cost.total_mults)
        if "rank" not in best or rank < best["rank"]:
            best["rank"] = rank
            best["plan"] = seed
    budget = max_layers * (n // 2)
    seen: dict[tuple, int] = {}

    def replay(steps: tuple) -> FastPlan:
        # Steps use stable slot indices; apply_pairing renumbers (minus,
        # plus at 0,1 then passes ascending), so track the mapping from
        # stable indices to plan columns while replaying.
        work = matrix
        layers = []
        perm = list(range(n))
        for a, b, s in steps:
            pa, pb = perm[a], perm[b]
            work, layer = apply_pairing(work, [PairingStep(pa, pb, GaussInt(*s))], ctx)
            layers.append(layer)
            passes = [c for c in range(n) if c not in (pa, pb)]
            relocate = {old: i + 2 for i, old in enumerate(passes)}
            relocate[pa] = 0
            relocate[pb] = 1
            perm = [relocate[c] for c in perm]
        return make_plan(spec, [l.nodes for l in layers], sparsify(work))

    def search(
        state: tuple,
        steps: tuple,
        pre_adds: int,
        pre_mults: int,
        last: tuple | None,
    ) -> None:
        prefix = pre_adds + pre_mults
        key = tuple(sorted(state))
        if seen.get(key, 1 << 30) <= prefix:
            return
        seen[key] = prefix
        pure, p_adds, p_mults = _post_cost_int(state, p)
        total = prefix + p_adds + p_mults
        rank = (0 if pure else 1, total, pre_mults + p_mults)
        if rank < best["rank"]:
            best["rank"] = rank
            best["plan"] = replay(steps)
        if len(steps) >= budget:
            return
        cands = sorted(
            _int_candidates(state, p, allow_scaling, ordered=False),
            key=lambda g: (-g[0], g[1], g[2], g[3]),
        )
        if not cands:
            return
        # optimistic completion: k more pairings cost 2k additions and
        # remove at most the current best gain from the post cost each
        max_gain = cands[0][0]
        remaining = p_adds + p_mults
        optimistic = total
        k = 0
        while remaining > 0 and k < budget - len(steps):
            k += 1
            remaining -= max_gain
            optimistic = min(optimistic, prefix + 2 * k + max(0, remaining))
        if optimistic >= best["rank"][1]:
            return
        ctab = _class_table(p)
        for gain, a, b, s in cands:
            # commuting steps explored in one canonical order only
            if (
                last is not None
                and (a, b, s) < last
                and a not in (last[0], last[1])
                and b not in (last[0], last[1])
            ):
                continue
            new_state = _apply_step_stable(state, a, b, s, p)
            extra = 1 if ctab[s[0] if s[1] == 0 else s[1]] > 1 else 0
            search(
                new_state,
                steps + ((a, b, s),),
                pre_adds + 2,
                pre_mults + extra,
                (a, b, s),
            )

    search(_pack(matrix, [False] * n), (), 0, 0, None)
    return best["plan"]


def _post_is_pure(plan: FastPlan) -> bool:
    return all(
        (coeff.re == 0) != (coeff.im == 0) for row in plan.post for _, coeff in row
    )


def relaxed_count(plan: FastPlan) -> OpCount:
    """Ledger that tolerates mixed post coefficients.

    Derived plans keep every slot pure (pairing sigmas are pure and
    component-matched), but a search can stop while the post matrix still
    holds mixed entries, where count_ops refuses.  Here a mixed
    coefficient lands in both components and its class is taken over full
    Gaussian scalars; for pure plans this equals count_ops exactly.
    """
    if _post_is_pure(plan):
        return count_ops(plan)
    p = plan.spec.ctx.p
    pre_adds = 0
    pre_mults = 0
    for layer in plan.layers:
        per_slot: dict[int, set[int]] = {}
        for node in layer.nodes:
            if isinstance(node, Combine):
                pre_adds += 1
                for src, sigma in (
                    (node.src_a, node.sigma_a),
                    (node.src_b, node.sigma_b),
                ):
                    rep = scalar_class(sigma, p)
                    if rep > 1:
                        per_slot.setdefault(src, set()).add(rep)
        pre_mults += sum(len(v) for v in per_slot.values())
    tags = [False] * plan.n
    for layer in plan.layers:
        nxt = []
        for node in layer.nodes:
            if isinstance(node, Pass):
                nxt.append(tags[node.src])
            else:
                nxt.append(tags[node.src_a] != (node.sigma_a.im != 0))
        tags = nxt
    state = _pack(post_dense(plan), tags)
    _, post_adds, post_mults = _post_cost_int(state, p)
    return OpCount(pre_adds, post_adds, pre_mults, post_mults)


def dense_cost(matrix: DenseMatrix, ctx: FieldCtx) -> OpCount:
    """Cost of the zero-layer plan: the dense matrix applied directly.

    Entries may mix components, so this counts element-level additions
    (nonzeros minus one per row) and, per column, the distinct non-free
    scalar classes over full Gaussian scalars.  The baseline any derived
    plan must beat.
    """
    p = ctx.p
    adds = 0
    col_classes: dict[int, set] = {}
    for row in matrix:
        nnz = 0
        for c, coeff in enumerate(row):
            if coeff == ZERO:
                continue
            nnz += 1
            rep = _full_class_rep_int((coeff.re, coeff.im), p)
            if rep != (0, 1):  # the class of 1 holds (0,1) = j as its minimum
                col_classes.setdefault(c, set()).add(rep)
        adds += max(0, nnz - 1)
    mults = sum(len(v) for v in col_classes.values())
    return OpCount(0, adds, 0, mults)
