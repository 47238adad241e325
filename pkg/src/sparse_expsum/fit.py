"""Optimal weights for a fixed set of reduced nodes.

Given the original sum f and nodes w_1..w_K, find weights b_j minimising
||f - sum_j b_j w_j**k|| in l2 (closed form, exact Gram matrix) or in l1
(smoothed Newton iteration on a truncated index range).
"""
from __future__ import annotations

from dataclasses import dataclass

import mpmath
import numpy as np

from .core import (
    EXTENDED_DPS,
    NODE_SEP_TOL,
    ExponentialSum,
    _values,
    difference,
    l1_norm_truncated,
    l2_norm,
    merge_terms,
    tail_bound,
    truncation_length,
)
from .errors import ConvergenceError, IllConditionedError, ValidationError

MAX_CONDITION = 1e14


@dataclass(frozen=True)
class FitReport:
    weights: np.ndarray
    objective: float
    method: str  # "l2-closed-form" | "l2-sampled" | "l1-truncated"
    truncation_M: int | None
    condition_estimate: float
    iterations: int = 0

    def as_sum(self, nodes) -> ExponentialSum:
        return ExponentialSum(self.weights, nodes)


def _check_nodes(nodes) -> np.ndarray:
    nodes = np.asarray(nodes, complex).reshape(-1)
    if np.any(np.abs(nodes) >= 1.0):
        raise ValidationError("fit nodes must lie inside the unit disc")
    if nodes.size > 1:
        d = np.abs(nodes[:, None] - nodes[None, :])
        d[np.diag_indices_from(d)] = np.inf
        if d.min() < NODE_SEP_TOL:
            raise ValidationError(f"fit nodes are not pairwise distinct (min distance {d.min():.2e})")
    return nodes


def gram_matrix(nodes) -> np.ndarray:
    """G[j, i] = <w_i**k, w_j**k> = 1 / (1 - w_i conj(w_j))."""
    nodes = np.asarray(nodes, complex)
    return 1.0 / (1.0 - nodes[None, :] * np.conj(nodes[:, None]))


def fit_l2(original: ExponentialSum, nodes) -> FitReport:
    """Closed-form l2-optimal weights via the normal equations.

    Gram entries and right-hand side are exact geometric series, so there is
    no truncation. The system is solved in extended precision; conditioning is
    still monitored because it governs how sensitive the weights are to the
    nodes.
    """
    nodes = _check_nodes(nodes)
    if nodes.size == 0:
        return FitReport(np.zeros(0, complex), l2_norm(original), "l2-closed-form", None, 1.0)
    G = gram_matrix(nodes)
    cond = float(np.linalg.cond(G))
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise IllConditionedError(
            f"Gram matrix of the reduced nodes has condition {cond:.2e} > {MAX_CONDITION:.0e}",
            condition=cond,
        )
    with mpmath.workdps(EXTENDED_DPS):
        w = [mpmath.mpc(x) for x in nodes]
        a = [mpmath.mpc(x) for x in original.weights]
        z = [mpmath.mpc(x) for x in original.nodes]
        K = len(w)
        Gm = mpmath.matrix(K, K)
        rhs = mpmath.matrix(K, 1)
        for j in range(K):
            wc = mpmath.conj(w[j])
            for i in range(K):
                Gm[j, i] = 1 / (1 - w[i] * wc)
            rhs[j] = mpmath.fsum(av / (1 - zv * wc) for av, zv in zip(a, z))
        sol = mpmath.lu_solve(Gm, rhs)
        weights = np.array([complex(sol[j]) for j in range(K)])
    # merge_terms tolerates weights that vanish to rounding
    reduced = merge_terms(weights, nodes)
    return FitReport(weights, l2_norm(difference(original, reduced)), "l2-closed-form", None, cond)


def vandermonde(nodes, M: int) -> np.ndarray:
    k = np.arange(M + 1)
    return np.asarray(nodes, complex)[None, :] ** k[:, None]


def fit_l2_sampled(original: ExponentialSum, nodes, M: int) -> FitReport:
    """Least squares on the finite samples f_0..f_M only.

    This is the discrete fit used when the approximation is judged on a fixed
    sampling grid rather than on the whole sequence.
    """
    nodes = _check_nodes(nodes)
    f = _values(original, 0, M + 1)
    if nodes.size == 0:
        return FitReport(np.zeros(0, complex), float(np.linalg.norm(f)), "l2-sampled", M, 1.0)
    V = vandermonde(nodes, M)
    cond = float(np.linalg.cond(V))
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise IllConditionedError(
            f"sampled Vandermonde matrix has condition {cond:.2e}", condition=cond
        )
    weights, *_ = np.linalg.lstsq(V, f, rcond=None)
    return FitReport(weights, float(np.linalg.norm(V @ weights - f)), "l2-sampled", M, cond)


def _real_system(V, f):
    # complex x = p + i q acts on [Re r; Im r] as the real matrix below
    A = np.block([[V.real, -V.imag], [V.imag, V.real]])
    return A, np.concatenate([f.real, f.imag])


def _smoothed_l1(V, f, start, damping, max_iter, rtol):
    """Minimise sum_k |f_k - (V x)_k| for complex x.

    Newton iteration on the smoothed objective sum_k sqrt(|r_k|^2 + mu^2).
    Its Hessian is the reweighted least-squares matrix with weights
    1/sqrt(|r_k|^2 + mu^2), corrected for the direction of r_k, which keeps
    the convergence quadratic where plain reweighting crawls. mu starts at
    1e-2 of the largest residual and is cut tenfold after each converged
    stage, down to ``damping`` times it.
    """
    M1, K = V.shape
    A, b = _real_system(V, f)
    x = np.concatenate([start.real, start.imag])

    def residual(x):
        r = b - A @ x
        return r[:M1], r[M1:]

    def smooth(x, mu):
        re, im = residual(x)
        return float(np.sum(np.sqrt(re**2 + im**2 + mu**2)))

    def l1(x):
        re, im = residual(x)
        return float(np.sum(np.hypot(re, im)))

    # objective changes below this are rounding noise in forming r = f - V x
    noise = 16 * np.finfo(float).eps * float(np.sum(np.abs(f)))
    re, im = residual(x)
    rmax = float(np.max(np.hypot(re, im)))
    best = (l1(x), x)
    if rmax <= noise:
        return _complex(x, K), best[0], 0, True
    mu = 1e-2 * rmax
    mu_min = damping * mu
    it = 0
    while it < max_iter:
        it += 1
        re, im = residual(x)
        s = np.sqrt(re**2 + im**2 + mu**2)
        # gradient and Hessian in the stacked real residual coordinates
        g_r = np.concatenate([re / s, im / s])
        s3 = s**3
        h_rr = (im**2 + mu**2) / s3
        h_ii = (re**2 + mu**2) / s3
        h_ri = -re * im / s3
        grad = -A.T @ g_r
        Ar, Ai = A[:M1], A[M1:]
        H = (Ar.T * h_rr) @ Ar + (Ai.T * h_ii) @ Ai + (Ar.T * h_ri) @ Ai + (Ai.T * h_ri) @ Ar
        try:
            step = np.linalg.solve(H, -grad)
        except np.linalg.LinAlgError:
            step, *_ = np.linalg.lstsq(H, -grad, rcond=None)
        phi = smooth(x, mu)
        t = 1.0
        while t > 1e-6 and smooth(x + t * step, mu) > phi + 1e-4 * t * float(grad @ step):
            t *= 0.5
        stalled = t <= 1e-6
        if not stalled:
            x = x + t * step
        cur = l1(x)
        if cur < best[0]:
            best = (cur, x)
        decrement = -float(grad @ step)
        # a failed line search means the objective is flat to rounding here
        if decrement <= max(rtol * phi, noise) or stalled:
            if mu <= mu_min:
                break
            mu = max(0.1 * mu, mu_min)
    else:
        return _complex(best[1], K), best[0], it, False
    return _complex(best[1], K), best[0], it, True


def _complex(x, K):
    return x[:K] + 1j * x[K:]


def fit_l1(
    original: ExponentialSum,
    nodes,
    tol: float = 1e-10,
    damping: float = 1e-8,
    max_iter: int = 200,
    rtol: float = 1e-10,
) -> FitReport:
    """l1-optimal weights on k = 0..M, M chosen so both tails are below ``tol``.

    The reported objective is the truncated l1 residual plus the analytic
    tail bounds of both sums, so it is an upper bound on the full l1 error.
    ``damping`` is the final smoothing level relative to the largest
    starting residual.
    """
    nodes = _check_nodes(nodes)
    if nodes.size == 0:
        M = truncation_length(original, tol)
        return FitReport(np.zeros(0, complex), l1_norm_truncated(original, tol), "l1-truncated", M, 1.0)
    start = fit_l2(original, nodes)
    M = truncation_length(original, tol / 2)
    M = max(M, truncation_length(merge_terms(start.weights, nodes), tol / 2))
    for _ in range(8):
        V = vandermonde(nodes, M)
        f = _values(original, 0, M + 1)
        x, obj, iters, ok = _smoothed_l1(V, f, start.weights, damping, max_iter, rtol)
        reduced = merge_terms(x, nodes)
        tail = tail_bound(original, M) + tail_bound(reduced, M)
        if tail < tol:
            break
        M = max(M + 1, truncation_length(reduced, tol / 2))
    report = FitReport(x, obj + tail, "l1-truncated", M, start.condition_estimate, iters)
    if not ok:
        raise ConvergenceError(
            f"l1 fit did not converge in {max_iter} iterations", best=report, objective=obj + tail
        )
    return report
