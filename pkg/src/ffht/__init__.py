"""Exact finite-field Hartley transforms over Gaussian-integer extensions.

The library computes the transform V[k] = sum_i v[i] * cas(i*k) over
GI(p), the Gaussian integers mod a prime p = 3 (mod 4), and factors it
into fast plans (pre-addition layers plus a sparse post-matrix) with a
formal operation-cost model and an automatic decomposition engine.
"""

from . import errors
from .accel import (
    active_backend,
    apply_plan_batch,
    ffht_forward_batch,
)
from .core import (
    Signal,
    TransformMatrix,
    as_signal,
    build_matrix,
    ffht_forward,
    ffht_inverse,
)
from .decompose import PairingStep, apply_pairing, dense_cost, derive_plan
from .errors import FFHTError
from .fastplan import (
    Combine,
    FastPlan,
    Layer,
    OpCount,
    Pass,
    apply_plan,
    audit_plan,
    count_ops,
    make_plan,
    parse_plan,
    scalar_class,
    serialize_plan,
    validate_plan,
)
from .fftrig import (
    CasTable,
    KernelSpec,
    build_cas_table,
    ff_cas,
    ff_cos,
    ff_sin,
    kernel_spec,
)
from .modfield import (
    FieldCtx,
    GaussInt,
    find_kernel,
    format_element,
    gi_add,
    gi_inv,
    gi_mul,
    gi_neg,
    gi_pow,
    gi_sub,
    make_field,
    order,
    parse_element,
)
from .plans import BUILTIN_NAMES, builtin_plan
from .report import complexity_report, render_report

__all__ = [
    "BUILTIN_NAMES",
    "CasTable",
    "Combine",
    "FFHTError",
    "FastPlan",
    "FieldCtx",
    "GaussInt",
    "KernelSpec",
    "Layer",
    "OpCount",
    "PairingStep",
    "Pass",
    "Signal",
    "TransformMatrix",
    "active_backend",
    "apply_pairing",
    "apply_plan",
    "apply_plan_batch",
    "as_signal",
    "audit_plan",
    "build_cas_table",
    "build_matrix",
    "builtin_plan",
    "complexity_report",
    "count_ops",
    "dense_cost",
    "derive_plan",
    "errors",
    "ff_cas",
    "ff_cos",
    "ff_sin",
    "ffht_forward",
    "ffht_forward_batch",
    "ffht_inverse",
    "find_kernel",
    "format_element",
    "gi_add",
    "gi_inv",
    "gi_mul",
    "gi_neg",
    "gi_pow",
    "gi_sub",
    "kernel_spec",
    "make_field",
    "make_plan",
    "order",
    "parse_element",
    "parse_plan",
    "render_report",
    "scalar_class",
    "serialize_plan",
    "validate_plan",
]
