"""Exponential sums f_k = sum_j a_j z_j**k on k = 0, 1, 2, ...

Domain types, evaluation, sampling and the closed-form norms. All types are
immutable; arrays handed out are read-only views.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .errors import TruncationError, ValidationError

NODE_SEP_TOL = 1e-10
WEIGHT_TOL = 1e-14
UNIT_MARGIN = 1e-12
TRIM_TOL = 1e-14
# working precision for closed forms that suffer from cancellation
EXTENDED_DPS = 50
MAX_TRUNCATION = 10_000_000


def _frozen(arr, dtype=complex) -> np.ndarray:
    out = np.array(arr, dtype=dtype).reshape(-1)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class ExponentialSum:
    """Finite sum of decaying exponentials.

    ``weights[j]`` and ``nodes[j]`` form the term a_j z_j**k. Nodes must lie in
    the punctured open unit disc and be pairwise distinct; weights must be
    nonzero. The empty sum is the zero signal.
    """

    weights: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))
    nodes: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))

    def __post_init__(self):
        a = _frozen(self.weights)
        z = _frozen(self.nodes)
        object.__setattr__(self, "weights", a)
        object.__setattr__(self, "nodes", z)
        if a.shape != z.shape:
            raise ValidationError(
                f"{a.size} weights but {z.size} nodes", weights=a.size, nodes=z.size
            )
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(z))):
            raise ValidationError("weights and nodes must be finite")
        if a.size == 0:
            return
        mod = np.abs(z)
        if np.any(mod >= 1.0 - UNIT_MARGIN):
            bad = z[mod >= 1.0 - UNIT_MARGIN]
            raise ValidationError(f"nodes on or outside the unit circle: {bad}")
        if np.any(mod == 0.0):
            raise ValidationError("node z = 0 is not allowed")
        amax = np.max(np.abs(a))
        if np.any(np.abs(a) <= WEIGHT_TOL * amax) or amax == 0.0:
            raise ValidationError("weights must be nonzero")
        if a.size > 1:
            dist = np.abs(z[:, None] - z[None, :])
            dist[np.diag_indices_from(dist)] = np.inf
            if np.min(dist) <= NODE_SEP_TOL:
                raise ValidationError(
                    f"nodes are not pairwise distinct (min distance {np.min(dist):.3e})"
                )

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[complex, complex]]) -> "ExponentialSum":
        terms = list(terms)
        if not terms:
            return cls()
        a, z = zip(*terms)
        return cls(np.asarray(a, complex), np.asarray(z, complex))

    @property
    def terms(self) -> list[tuple[complex, complex]]:
        return [(complex(a), complex(z)) for a, z in zip(self.weights, self.nodes)]

    @property
    def order(self) -> int:
        return int(self.weights.size)

    def __len__(self):
        return self.order

    def scaled(self, c: complex) -> "ExponentialSum":
        if c == 0:
            return ExponentialSum()
        return ExponentialSum(self.weights * c, self.nodes)

    def sorted(self) -> "ExponentialSum":
        """Terms ordered by node modulus, largest first."""
        idx = np.argsort(-np.abs(self.nodes), kind="stable")
        return ExponentialSum(self.weights[idx], self.nodes[idx])

    def __eq__(self, other):
        if not isinstance(other, ExponentialSum):
            return NotImplemented
        return np.array_equal(self.weights, other.weights) and np.array_equal(
            self.nodes, other.nodes
        )

    def __hash__(self):
        return hash((self.weights.tobytes(), self.nodes.tobytes()))


@dataclass(frozen=True)
class SampleSequence:
    """Samples f_0, ..., f_M of a signal on the nonnegative integers."""

    values: np.ndarray

    def __post_init__(self):
        v = _frozen(self.values)
        if v.size < 1:
            raise ValidationError("a sample sequence needs at least one value")
        if not np.all(np.isfinite(v)):
            raise ValidationError("samples must be finite")
        object.__setattr__(self, "values", v)

    @property
    def M(self) -> int:
        return self.values.size - 1

    def __len__(self):
        return self.values.size

    def __eq__(self, other):
        if not isinstance(other, SampleSequence):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash(self.values.tobytes())


@dataclass(frozen=True)
class ComplexPolynomial:
    """Polynomial c_0 + c_1 z + ... + c_d z**d (ascending coefficients).

    Trailing coefficients below ``TRIM_TOL * max|c_i|`` are dropped on
    construction; the zero polynomial has no coefficients and degree -1.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).reshape(-1)
        if not np.all(np.isfinite(c)):
            raise ValidationError("polynomial coefficients must be finite")
        scale = np.max(np.abs(c)) if c.size else 0.0
        n = c.size
        while n > 0 and abs(c[n - 1]) <= TRIM_TOL * scale:
            n -= 1
        object.__setattr__(self, "coeffs", _frozen(c[:n]))

    @classmethod
    def from_roots(cls, roots: Sequence[complex]) -> "ComplexPolynomial":
        """Monic polynomial prod_j (z - r_j)."""
        c = np.ones(1, complex)
        for r in roots:
            c = np.concatenate([[0], c]) - r * np.concatenate([c, [0]])
        return cls(c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def is_zero(self) -> bool:
        return self.coeffs.size == 0

    def __call__(self, z):
        if self.is_zero:
            return np.zeros_like(np.asarray(z, complex))
        return np.polynomial.polynomial.polyval(z, self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, ComplexPolynomial):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(self.coeffs.tobytes())


def evaluate(s: ExponentialSum, k: int) -> complex:
    if k < 0:
        raise ValidationError(f"index k must be nonnegative, got {k}")
    return complex(np.sum(s.weights * s.nodes ** int(k)))


def _values(s: ExponentialSum, start: int, stop: int) -> np.ndarray:
    k = np.arange(start, stop)
    if s.order == 0:
        return np.zeros(k.size, complex)
    return (s.nodes[None, :] ** k[:, None]) @ s.weights


def sample(s: ExponentialSum, M: int) -> SampleSequence:
    """Samples f_0..f_M."""
    if M < 0:
        raise ValidationError(f"M must be nonnegative, got {M}")
    return SampleSequence(_values(s, 0, M + 1))


def _quadratic_form(a1, z1, a2, z2, dps=EXTENDED_DPS):
    """sum_{n,m} a1_n conj(a2_m) / (1 - z1_n conj(z2_m)) in extended precision.

    This is the l2 inner product <f1, f2> of two exponential sums. It is
    evaluated in ``dps`` digits because the norm of a difference of two close
    sums cancels catastrophically in binary64.
    """
    with mpmath.workdps(dps):
        a1 = [mpmath.mpc(x) for x in a1]
        z1 = [mpmath.mpc(x) for x in z1]
        a2c = [mpmath.conj(mpmath.mpc(x)) for x in a2]
        z2c = [mpmath.conj(mpmath.mpc(x)) for x in z2]
        terms = [an * am / (1 - zn * zm) for an, zn in zip(a1, z1) for am, zm in zip(a2c, z2c)]
        total = mpmath.fsum(terms)
        scale = mpmath.fsum(abs(t) for t in terms)
        return complex(total), float(scale)


def inner_product(s1: ExponentialSum, s2: ExponentialSum) -> complex:
    """<s1, s2> = sum_k s1_k conj(s2_k), closed form."""
    value, _ = _quadratic_form(s1.weights, s1.nodes, s2.weights, s2.nodes)
    return value


def l2_norm(s: ExponentialSum) -> float:
    """Closed-form l2 norm via the geometric-series Gram entries."""
    if s.order == 0:
        return 0.0
    value, scale = _quadratic_form(s.weights, s.nodes, s.weights, s.nodes)
    # an imaginary residue means the quadratic form was not Hermitian
    floor = scale * 10.0 ** (-EXTENDED_DPS + 5)
    if abs(value.imag) > max(1e-10 * abs(value.real), floor):
        raise ValidationError(
            f"quadratic form has imaginary part {value.imag:.3e} (real {value.real:.3e})"
        )
    if value.real < -floor:
        raise ValidationError(f"quadratic form is negative: {value.real:.3e}")
    return math.sqrt(max(value.real, 0.0))


def tail_bound(s: ExponentialSum, M: int) -> float:
    """Upper bound on sum_{k > M} |f_k|."""
    if s.order == 0:
        return 0.0
    r = np.abs(s.nodes)
    return float(np.sum(np.abs(s.weights) * r ** (M + 1) / (1.0 - r)))


def truncation_length(s: ExponentialSum, tol: float, cap: int = MAX_TRUNCATION) -> int:
    """Smallest-ish M with ``tail_bound(s, M) < tol``."""
    if tol <= 0:
        raise ValidationError(f"tol must be positive, got {tol}")
    if s.order == 0:
        return 0
    r = np.abs(s.nodes)
    amp = np.abs(s.weights) / (1.0 - r)
    share = tol / (2.0 * s.order)
    # per-term: amp * r**(M+1) < share
    need = np.log(share / amp) / np.log(r) - 1.0
    M = int(max(0, math.ceil(np.max(need))))
    while tail_bound(s, M) >= tol:
        M = M + 1 + M // 8
        if M > cap:
            break
    if M > cap:
        raise TruncationError(
            f"tail below {tol:g} needs M = {M} > cap {cap}; a node is too close to the unit circle",
            required=M,
            cap=cap,
        )
    return M


def l1_norm_truncated(
    s: ExponentialSum, tol: float = 1e-12, cap: int = MAX_TRUNCATION, chunk: int = 65536
) -> float:
    """sum_{k=0}^M |f_k| with M chosen so the analytic tail is below ``tol``."""
    M = truncation_length(s, tol, cap)
    if s.order == 0:
        return 0.0
    total = 0.0
    for start in range(0, M + 1, chunk):
        total += float(np.sum(np.abs(_values(s, start, min(M + 1, start + chunk)))))
    return total


def l1_upper_bound(s: ExponentialSum) -> float:
    """sum_j |a_j| / (1 - |z_j|), the termwise triangle-inequality bound."""
    return float(np.sum(np.abs(s.weights) / (1.0 - np.abs(s.nodes))))


def merge_terms(weights, nodes, scale=None) -> ExponentialSum:
    """Combine terms with coincident nodes and drop cancelled ones."""
    weights = np.asarray(weights, complex)
    nodes = np.asarray(nodes, complex)
    if scale is None:
        scale = np.max(np.abs(weights)) if weights.size else 0.0
    out_a: list[complex] = []
    out_z: list[complex] = []
    for a, z in zip(weights, nodes):
        for i, zz in enumerate(out_z):
            if abs(zz - z) <= NODE_SEP_TOL:
                out_a[i] += a
                break
        else:
            out_a.append(complex(a))
            out_z.append(complex(z))
    keep = [i for i, a in enumerate(out_a) if abs(a) > WEIGHT_TOL * scale]
    return ExponentialSum(
        np.array([out_a[i] for i in keep], complex), np.array([out_z[i] for i in keep], complex)
    )


def difference(s1: ExponentialSum, s2: ExponentialSum) -> ExponentialSum:
    """The exponential sum s1 - s2 with coincident nodes merged."""
    scale = max(
        np.max(np.abs(s1.weights), initial=0.0), np.max(np.abs(s2.weights), initial=0.0)
    )
    return merge_terms(
        np.concatenate([s1.weights, -s2.weights]),
        np.concatenate([s1.nodes, s2.nodes]),
        scale=scale,
    )
