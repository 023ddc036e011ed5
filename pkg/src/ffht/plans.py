"""The builtin fast plans for the six worked kernels.

Each builtin stores its kernel and pre-addition layers; the sparse
post-matrix is computed by peeling build_matrix through the layer
inverses, which makes the dense transform matrix the single source of
truth.  Every builtin passes validate_plan and reproduces its published
operation ledger (see tests).
"""

from __future__ import annotations

from functools import lru_cache

from .core import build_matrix, dense_inverse, dense_mul
from .errors import UnknownPlan
from .fastplan import Combine, FastPlan, Node, Pass, layer_dense, make_plan, sparsify
from .fftrig import kernel_spec
from .modfield import GaussInt, make_field


def _c(a: int, sa: int, b: int, sb: int, p: int) -> Combine:
    return Combine(a, GaussInt(sa % p, 0), b, GaussInt(sb % p, 0))


def _halving_layer(n: int, p: int) -> list[Node]:
    """First layer shared by every builtin: pair slot k with k + n/2."""
    half = n // 2
    nodes: list[Node] = []
    for k in range(1, half):
        nodes.append(_c(half + k, 1, k, -1, p))
        nodes.append(_c(half + k, 1, k, 1, p))
    nodes.append(_c(0, 1, half, -1, p))
    nodes.append(_c(0, 1, half, 1, p))
    return nodes


def _second_layer_16(p: int) -> list[Node]:
    return [
        _c(4, 1, 0, -1, p), _c(4, 1, 0, 1, p),
        _c(9, 1, 1, -1, p), _c(9, 1, 1, 1, p),
        Pass(2), Pass(10),
        _c(11, 1, 3, -1, p), _c(11, 1, 3, 1, p),
        _c(12, 1, 8, -1, p), _c(12, 1, 8, 1, p),
        _c(13, 1, 5, -1, p), _c(13, 1, 5, 1, p),
        _c(14, 1, 6, -1, p), _c(14, 1, 6, 1, p),
        _c(15, 1, 7, -1, p), _c(15, 1, 7, 1, p),
    ]


def _layers_n4(p: int) -> list[list[Node]]:
    return [_halving_layer(4, p)]


def _layers_n6(p: int) -> list[list[Node]]:
    return [
        _halving_layer(6, p),
        [
            _c(2, 1, 0, -1, p), _c(2, 1, 0, 1, p),
            _c(3, 1, 1, -1, p), _c(3, 1, 1, 1, p),
            Pass(4), Pass(5),
        ],
    ]


def _layers_n8(p: int) -> list[list[Node]]:
    return [
        _halving_layer(8, p),
        [
            Pass(0), Pass(4),
            _c(5, 1, 1, -1, p), _c(5, 1, 1, 1, p),
            _c(6, 1, 2, -1, p), _c(6, 1, 2, 1, p),
            _c(7, 1, 3, -1, p), _c(7, 1, 3, 1, p),
        ],
    ]


def _layers_n12(p: int) -> list[list[Node]]:
    return [
        _halving_layer(12, p),
        [
            _c(6, 1, 0, -1, p), _c(6, 1, 0, 1, p),
            _c(7, 1, 1, -1, p), _c(7, 1, 1, 1, p),
            _c(8, 1, 2, -1, p), _c(8, 1, 2, 1, p),
            _c(9, 1, 3, -1, p), _c(9, 1, 3, 1, p),
            _c(10, 1, 4, -1, p), _c(10, 1, 4, 1, p),
            _c(11, 1, 5, -1, p), _c(11, 1, 5, 1, p),
        ],
        [
            _c(4, 1, 1, -1, p), _c(4, 1, 1, 1, p),
            _c(5, 1, 0, -1, p), _c(5, 1, 0, 1, p),
            _c(6, 1, 2, -1, p), _c(6, 1, 2, 1, p),
            _c(7, 1, 3, -1, p), _c(7, 1, 3, 1, p),
            Pass(8), Pass(9), Pass(10), Pass(11),
        ],
    ]


def _layers_n16_p7() -> list[list[Node]]:
    # Third layer keeps the mixed-component slots as passes; the scaled
    # pairs carry sigma +-4 (the scale-by-2 trick: 4 = 2**-1 mod 7).
    p = 7
    return [
        _halving_layer(16, p),
        _second_layer_16(p),
        [
            Pass(0), Pass(1), Pass(8), Pass(9), Pass(2), Pass(10),
            _c(3, -1, 11, 1, p), _c(3, 1, 11, 1, p),
            _c(4, -4, 12, 1, p), _c(4, 4, 12, 1, p),
            _c(5, -4, 13, 1, p), _c(5, 4, 13, 1, p),
            _c(6, -1, 14, 1, p), _c(6, 1, 14, 1, p),
            _c(7, -1, 15, 1, p), _c(7, 1, 15, 1, p),
        ],
    ]


def _layers_n16_p31() -> list[list[Node]]:
    # Third layer: the (1,8) and (0,9) pairs are asymmetric because their
    # column ratios alternate between 7 and 22 = -1/7; the (4,12)/(5,13)
    # pairs take sigma +-8 (the scale-by-4 trick: 8 = 4**-1 mod 31).
    p = 31
    return [
        _halving_layer(16, p),
        _second_layer_16(p),
        [
            _c(3, -1, 7, 1, p), _c(3, 1, 7, 1, p),
            _c(1, 22, 8, 1, p), _c(1, 7, 8, 1, p),
            _c(0, 22, 9, 1, p), _c(0, 7, 9, 1, p),
            Pass(2), Pass(10),
            _c(4, -8, 12, 1, p), _c(4, 8, 12, 1, p),
            _c(5, -8, 13, 1, p), _c(5, 8, 13, 1, p),
            _c(6, -1, 14, 1, p), _c(6, 1, 14, 1, p),
            _c(11, -1, 15, 1, p), _c(11, 1, 15, 1, p),
        ],
    ]


_BUILTINS = {
    "n4_p7": (7, GaussInt(0, 1), lambda: _layers_n4(7)),
    "n6_p7": (7, GaussInt(3, 0), lambda: _layers_n6(7)),
    "n8_p7": (7, GaussInt(2, 2), lambda: _layers_n8(7)),
    "n12_p7": (7, GaussInt(0, 3), lambda: _layers_n12(7)),
    "n16_p7": (7, GaussInt(2, 4), _layers_n16_p7),
    "n16_p31": (31, GaussInt(7, 13), _layers_n16_p31),
}

BUILTIN_NAMES = tuple(_BUILTINS)


@lru_cache(maxsize=None)
def builtin_plan(name: str) -> FastPlan:
    """Return a builtin plan by name; see BUILTIN_NAMES."""
    try:
        p, zeta, layer_fn = _BUILTINS[name]
    except KeyError:
        raise UnknownPlan(
            f"no builtin plan {name!r}; known: {', '.join(BUILTIN_NAMES)}"
        ) from None
    ctx = make_field(p)
    spec = kernel_spec(ctx, zeta)
    layers = layer_fn()
    # Peel the dense matrix through the layer inverses to get the post
    # matrix: post = T * L1^-1 * ... * Lk^-1.
    work = build_matrix(spec).entries
    for nodes in layers:
        from .fastplan import Layer

        dense = layer_dense(Layer(tuple(nodes)), spec.n, ctx)
        work = dense_mul(work, dense_inverse(dense, ctx), ctx)
    return make_plan(spec, layers, sparsify(work))
