"""Recover an exponential sum from equispaced samples.

Classical Prony with an SVD null vector of a rectangular Hankel block in place
of the square linear solve, followed by an overdetermined Vandermonde fit for
the weights.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .aak import polynomial_roots
from .core import ComplexPolynomial, ExponentialSum, SampleSequence
from .errors import IllConditionedError, NumericalError, PronyOrderError, ValidationError
from .fit import MAX_CONDITION, vandermonde


@dataclass(frozen=True)
class PronyOptions:
    max_order: int | None = None  # L; None means floor((M + 1) / 2)
    rank_tol: float = 1e-12
    node_filter_tol: float = 1e-8

    def __post_init__(self):
        if self.max_order is not None and self.max_order < 1:
            raise ValidationError("max_order must be at least 1")
        if not 0 < self.rank_tol < 1:
            raise ValidationError("rank_tol must lie in (0, 1)")
        if self.node_filter_tol <= 0:
            raise ValidationError("node_filter_tol must be positive")

    def order_cap(self, n_samples: int) -> int:
        return self.max_order if self.max_order is not None else n_samples // 2


@dataclass(frozen=True)
class PronyResult:
    sum: ExponentialSum
    order: int
    singular_values: np.ndarray  # profile of the order-estimation block
    prony_coefficients: np.ndarray  # b_0..b_N with b_N = 1
    residual: float  # ||V a - f||_2 over all samples
    condition: float  # of the Vandermonde system

    def diagnostics(self) -> dict:
        return {
            "order": self.order,
            "singular_values": [float(x) for x in self.singular_values],
            "residual": self.residual,
            "condition": self.condition,
        }


def _as_values(samples) -> np.ndarray:
    if isinstance(samples, SampleSequence):
        return samples.values
    return SampleSequence(samples).values


def build_hankel(samples, rows: int, cols: int) -> np.ndarray:
    """H[k, j] = f_{k+j}, a rows x cols leading block of the Hankel operator."""
    f = _as_values(samples)
    if rows < 1 or cols < 1:
        raise ValidationError("rows and cols must be positive")
    if rows + cols - 1 > f.size:
        raise ValidationError(
            f"a {rows}x{cols} Hankel block needs {rows + cols - 1} samples, got {f.size}"
        )
    return scipy.linalg.hankel(f[:rows], f[rows - 1 : rows + cols - 1])


def _order_profile(f: np.ndarray, opts: PronyOptions) -> tuple[int, np.ndarray]:
    L = opts.order_cap(f.size)
    if f.size < 2 * L:
        raise ValidationError(f"need at least 2L = {2 * L} samples, got {f.size}")
    H = build_hankel(f, L, f.size + 1 - L)
    sv = scipy.linalg.svdvals(H)
    if sv.size == 0 or sv[0] == 0.0:
        return 0, sv
    N = int(np.count_nonzero(sv > opts.rank_tol * sv[0]))
    if N >= L:
        raise PronyOrderError(
            f"numerical rank reached the order cap L = {L}; the order cannot be certified",
            L=L,
        )
    return N, sv


def estimate_order(samples, opts: PronyOptions | None = None) -> int:
    """Numerical rank of the L x (M + 2 - L) Hankel block."""
    return _order_profile(_as_values(samples), opts or PronyOptions())[0]


def recover_detailed(samples, opts: PronyOptions | None = None) -> PronyResult:
    opts = opts or PronyOptions()
    f = _as_values(samples)
    N, sv = _order_profile(f, opts)
    if N == 0:
        return PronyResult(ExponentialSum(), 0, sv, np.ones(1, complex), float(np.linalg.norm(f)), 1.0)
    H = build_hankel(f, f.size - N, N + 1)
    _, _, Vh = scipy.linalg.svd(H, full_matrices=False)
    # null vector of H is the conjugate of the last right singular row
    b = np.conj(Vh[-1])
    if abs(b[-1]) < 1e-300:
        raise NumericalError("Prony polynomial has a vanishing leading coefficient")
    b = b / b[-1]
    roots = polynomial_roots(ComplexPolynomial(b))
    keep = roots[np.abs(roots) < 1.0 - opts.node_filter_tol]
    keep = keep[np.abs(keep) > 0]
    if keep.size < N:
        raise NumericalError(
            f"only {keep.size} of {N} Prony roots lie inside the unit disc",
            roots=roots.tolist(),
        )
    V = vandermonde(keep, f.size - 1)
    cond = float(np.linalg.cond(V))
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise IllConditionedError(f"Vandermonde system has condition {cond:.2e}", condition=cond)
    weights, *_ = np.linalg.lstsq(V, f, rcond=None)
    residual = float(np.linalg.norm(V @ weights - f))
    return PronyResult(ExponentialSum(weights, keep), N, sv, b, residual, cond)


def recover(samples, opts: PronyOptions | None = None) -> ExponentialSum:
    """Nodes and weights of the exponential sum generating ``samples``."""
    return recover_detailed(samples, opts).sum
