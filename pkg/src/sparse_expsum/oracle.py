"""Brute-force checks of the Hankel operator theory through finite truncations.

Nothing here feeds the reduction pipeline; these are the independent oracles
the other modules are tested against.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
import scipy.linalg

from .aak import hankel_con_eigen, numerator_polynomial, reduce_to_K
from .core import ExponentialSum, _values
from .errors import NumericalError, SigmaClusterError, ValidationError

ALIAS_TOL = 1e-8
VANISH_TOL = 1e-12


def _hankel_block(seq: np.ndarray, m: int) -> np.ndarray:
    return scipy.linalg.hankel(seq[:m], seq[m - 1 : 2 * m - 1])


def truncated_hankel_singular_values(s: ExponentialSum, m: int) -> np.ndarray:
    """All singular values of the m x m block (f_{k+j}), descending."""
    if m < max(s.order, 1):
        raise ValidationError(f"m = {m} must be at least N = {s.order}")
    return scipy.linalg.svdvals(_hankel_block(_values(s, 0, 2 * m - 1), m))


def truncated_rank(s: ExponentialSum, m: int, tol: float = 1e-10, relative: bool = True) -> int:
    """Count of singular values above tol * sigma_max (or above tol itself)."""
    sv = truncated_hankel_singular_values(s, m)
    if sv[0] == 0.0:
        return 0
    return int(np.count_nonzero(sv > (tol * sv[0] if relative else tol)))


def blaschke_coefficients(alphas, n_terms: int) -> np.ndarray:
    """Taylor coefficients of prod_j (z - alpha_j) / (1 - conj(alpha_j) z)."""
    alphas = np.asarray(alphas, complex).reshape(-1)
    if n_terms < 1:
        raise ValidationError("n_terms must be positive")
    if np.any(np.abs(alphas) >= 1.0):
        raise ValidationError("Blaschke zeros must lie in the open unit disc")
    out = np.zeros(n_terms, complex)
    out[0] = 1.0
    k = np.arange(n_terms)
    for al in alphas:
        geo = np.conj(al) ** k
        factor = -al * geo
        factor[1:] += geo[:-1]  # (z - alpha) * sum_k conj(alpha)^k z^k
        out = np.convolve(out, factor)[:n_terms]
    return out


def toeplitz_isometry_defect(b, m: int) -> float:
    """max |T^H T - I| over the first m columns of the Toeplitz operator of b.

    Column j of T is b shifted down by j. All len(b) available rows are kept;
    a square cut would drop the tail of the last columns and can never be an
    isometry.
    """
    b = np.asarray(b, complex).reshape(-1)
    if b.size < m:
        raise ValidationError(f"need at least m = {m} coefficients, got {b.size}")
    T = scipy.linalg.toeplitz(b, np.r_[b[0], np.zeros(m - 1)])
    return float(np.max(np.abs(T.conj().T @ T - np.eye(m))))


def _unimodular_ratio(s: ExponentialSum, K: int, grid: int, system=None):
    if system is None:
        system = hankel_con_eigen(s)
    q = numerator_polynomial(s, system.sigmas[K], system.vector(K))
    w = np.exp(2j * np.pi * np.arange(grid) / grid)
    den = np.prod(1.0 - s.nodes[None, :] * w[:, None], axis=1)
    pv = q(w) / den
    # P_{conj v}(e^{-it}) = conj(P_v(e^{it}))
    pvbar = np.conj(pv)
    if np.min(np.abs(pvbar)) < VANISH_TOL:
        raise NumericalError(
            f"P_conj(v) nearly vanishes on the circle (min {np.min(np.abs(pvbar)):.2e})", K=K
        )
    return pv / pvbar, system


def unimodularity_defect(s: ExponentialSum, K: int, grid: int = 4096, system=None) -> float:
    ratio, _ = _unimodular_ratio(s, K, grid, system)
    return float(np.max(np.abs(np.abs(ratio) - 1.0)))


def g_sequence(
    s: ExponentialSum, K: int, n_terms: int, grid: int | None = None, system=None
) -> np.ndarray:
    """g_l = sigma_K * l-th Fourier coefficient of P_v(e^{it}) / P_{conj v}(e^{-it}).

    Computed with an FFT on ``grid`` points and certified against the same
    computation on twice as many points.
    """
    if n_terms < 1:
        raise ValidationError("n_terms must be positive")
    if grid is None:
        grid = 1 << int(np.ceil(np.log2(8 * n_terms)))
    if grid < 8 * n_terms or grid & (grid - 1):
        raise ValidationError(f"grid must be a power of two >= 8 * n_terms, got {grid}")
    if system is None:
        system = hankel_con_eigen(s)
    if not system.simplicity_flags[K]:
        raise SigmaClusterError(f"sigma_{K} is not simple", K=K, cluster=system.cluster(K))
    coarse, _ = _unimodular_ratio(s, K, grid, system)
    fine, _ = _unimodular_ratio(s, K, 2 * grid, system)
    c1 = np.fft.fft(coarse)[:n_terms] / grid
    c2 = np.fft.fft(fine)[:n_terms] / (2 * grid)
    alias = float(np.max(np.abs(c1 - c2)))
    if alias > ALIAS_TOL:
        raise NumericalError(
            f"Fourier coefficients changed by {alias:.2e} when the grid was doubled; use a finer grid",
            grid=grid,
        )
    return float(system.sigmas[K]) * c2


@dataclass(frozen=True)
class VerificationReport:
    sigma_K: float
    gamma_g_norm_estimate: float
    residual_rank: int
    error_bound_holds: bool
    truncation_size: int

    def as_dict(self) -> dict:
        return asdict(self)


def verify_aak(s: ExponentialSum, K: int, m: int, grid: int | None = None) -> VerificationReport:
    """Check the optimal Hankel perturbation on an m x m truncation."""
    if m < max(4 * s.order, 10):
        raise ValidationError(f"m = {m} must be at least max(4N, 10)")
    system = hankel_con_eigen(s)
    if not 0 <= K < s.order:
        raise ValidationError(f"K must satisfy 0 <= K < N = {s.order}")
    g = g_sequence(s, K, 2 * m - 1, grid, system)
    f = _values(s, 0, 2 * m - 1)
    gamma_g = float(scipy.linalg.svdvals(_hankel_block(g, m))[0])
    sv = scipy.linalg.svdvals(_hankel_block(f - g, m))
    rank = int(np.count_nonzero(sv > 1e-6 * system.sigmas[0]))
    red = reduce_to_K(s, K, system=system)
    return VerificationReport(
        sigma_K=float(system.sigmas[K]),
        gamma_g_norm_estimate=gamma_g,
        residual_rank=rank,
        error_bound_holds=bool(red.bound_satisfied),
        truncation_size=m,
    )
