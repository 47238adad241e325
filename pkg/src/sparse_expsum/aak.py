"""Singular values of the infinite Hankel operator of an exponential sum and
the AAK-type reduction to a shorter sum.

For f_k = sum_j a_j z_j**k the nonzero singular values of (f_{k+l}) are the
con-eigenvalues of the N x N matrix M[r, j] = a_j / (1 - z_j conj(z_r)); a
con-eigenvector u (M conj(u) = sigma u) holds the values of the generating
function P_v of the Hankel con-eigenvector at conj(z_r). P_v is rational with
numerator q of degree <= N - 1. For a simple sigma_K, q has exactly K zeros in
the unit disc, and their conjugates are the nodes of the reduced sum.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import mpmath
import numpy as np
import scipy.linalg

from .core import (
    EXTENDED_DPS,
    NODE_SEP_TOL,
    ComplexPolynomial,
    ExponentialSum,
    difference,
    l2_norm,
)
from .errors import (
    NumericalError,
    RootCountError,
    SigmaClusterError,
    ValidationError,
)
from .fit import FitReport, fit_l1, fit_l2, fit_l2_sampled

SEP_TOL = 1e-8
DISC_TOL = 1e-10
DISC_MARGIN = 1e-6
BOUND_SLACK = 1e-6


@dataclass(frozen=True)
class ConEigenSystem:
    """Nonzero singular values (descending) and con-eigenvectors.

    Column l of ``node_values`` is u^(l) with u_r = P_{v^(l)}(conj(z_r)),
    normalised to unit 2-norm. When the system comes from the structured
    solver, ``node_values_mp`` keeps the extended-precision columns; the
    numerator polynomial of a small sigma needs them because its partial
    fraction form cancels by a factor of about sigma_0 / sigma_l.
    """

    sigmas: np.ndarray
    node_values: np.ndarray
    simplicity_flags: np.ndarray
    node_values_mp: tuple | None = field(default=None, repr=False, compare=False)

    def __len__(self):
        return self.sigmas.size

    def vector(self, l: int):
        if self.node_values_mp is not None:
            return self.node_values_mp[l]
        return self.node_values[:, l]

    def cluster(self, l: int, sep_tol: float = SEP_TOL) -> list[int]:
        """Indices whose sigma lies within sep_tol * sigma_0 of sigma_l."""
        s = self.sigmas
        return [i for i in range(s.size) if abs(s[i] - s[l]) <= sep_tol * s[0]]


def _simplicity(sigmas: np.ndarray, sep_tol: float) -> np.ndarray:
    n = sigmas.size
    flags = np.ones(n, bool)
    if n == 0:
        return flags
    thresh = sep_tol * sigmas[0]
    for l in range(n):
        gaps = []
        if l > 0:
            gaps.append(sigmas[l - 1] - sigmas[l])
        if l < n - 1:
            gaps.append(sigmas[l] - sigmas[l + 1])
        flags[l] = not gaps or min(gaps) > thresh
    return flags


def build_system_matrix(s: ExponentialSum) -> np.ndarray:
    """M[r, j] = a_j / (1 - z_j conj(z_r))."""
    if s.order == 0:
        raise ValidationError("the system matrix needs at least one term")
    den = 1.0 - s.nodes[None, :] * np.conj(s.nodes[:, None])
    if np.min(np.abs(den)) < 1e-13:
        raise NumericalError("system matrix denominator below 1e-13")
    return s.weights[None, :] / den


def con_eigen(M, sep_tol: float = SEP_TOL, tol: float = 1e-8) -> ConEigenSystem:
    """Con-eigen decomposition of a con-diagonalisable matrix via conj(M) M.

    Generic binary64 route: the eigenvalues of conj(M) M are the squared
    con-eigenvalues and u = M w + sigma conj(w) turns an eigenvector w into a
    con-eigenvector. Squaring limits the attainable accuracy of sigma_l to
    roughly sqrt(eps) * sigma_0; see :func:`hankel_con_eigen` for the
    structured alternative used by the reduction pipeline.
    """
    M = np.asarray(M, complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValidationError("con_eigen needs a square matrix")
    if not np.all(np.isfinite(M)):
        raise ValidationError("matrix entries must be finite")
    B = np.conj(M) @ M
    lam, W = np.linalg.eig(B)
    lmax = max(float(np.max(np.abs(lam))), np.finfo(float).tiny) if lam.size else 1.0
    if np.any(np.abs(lam.imag) > tol * lmax) or np.any(lam.real < -tol * lmax):
        raise NumericalError(
            "conj(M) M has eigenvalues off the nonnegative real axis; the matrix is not con-diagonalisable"
        )
    order = np.argsort(-lam.real, kind="stable")
    sig = np.sqrt(np.maximum(lam.real[order], 0.0))
    U = np.empty_like(W)
    for col, idx in enumerate(order):
        w = W[:, idx]
        u = M @ w + sig[col] * np.conj(w)
        if np.linalg.norm(u) < 1e-10 * np.linalg.norm(w):
            w = 1j * w
            u = M @ w + sig[col] * np.conj(w)
            if np.linalg.norm(u) < 1e-10 * np.linalg.norm(w):
                raise NumericalError(f"no con-eigenvector candidate for sigma = {sig[col]:.3e}")
        U[:, col] = u / np.linalg.norm(u)
    return ConEigenSystem(sig, U, _simplicity(sig, sep_tol))


def hankel_con_eigen(
    s: ExponentialSum, sep_tol: float = SEP_TOL, dps: int = EXTENDED_DPS
) -> ConEigenSystem:
    """Con-eigen decomposition of the system matrix of ``s``, accurately.

    M = G diag(a) with G[r, j] = 1 / (1 - conj(z_r) z_j) Hermitian positive
    definite. With G = L L^H the symmetric matrix C = L^H diag(a) conj(L) has
    the same con-eigenvalues, which are its singular values, and a Takagi
    vector y of C maps to u = L y. Everything runs in ``dps`` digits so that
    the small singular values and their vectors keep full binary64 accuracy.
    """
    if s.order == 0:
        raise ValidationError("the system matrix needs at least one term")
    N = s.order
    with mpmath.workdps(dps):
        z = [mpmath.mpc(x) for x in s.nodes]
        a = [mpmath.mpc(x) for x in s.weights]
        G = mpmath.matrix(N, N)
        for r in range(N):
            zr = mpmath.conj(z[r])
            for j in range(N):
                G[r, j] = 1 / (1 - zr * z[j])
        L = mpmath.cholesky(G)
        Lc = L.H.T  # conj(L)
        C = L.H * mpmath.diag(a) * Lc
        U, S, _ = mpmath.svd_c(C)
        sig = [S[i] for i in range(N)]
        order = sorted(range(N), key=lambda i: -sig[i])
        vecs = []
        for i in order:
            w = U[:, i]
            t = (w.H * C * w.H.T)[0, 0]  # w^H C conj(w), modulus sigma
            y = w * mpmath.expj(mpmath.arg(t) / 2) if t != 0 else w
            u = L * y
            u = u / mpmath.norm(u)
            vecs.append(u)
        sigmas = np.array([float(sig[i]) for i in order])
        node_values = np.array([[complex(v[r]) for v in vecs] for r in range(N)])
    return ConEigenSystem(sigmas, node_values, _simplicity(sigmas, sep_tol), tuple(vecs))


def _numerator_mp(s: ExponentialSum, sigma: float, u, dps: int) -> list:
    N = s.order
    z = [mpmath.mpc(x) for x in s.nodes]
    c = [mpmath.mpc(a) * mpmath.conj(mpmath.mpc(u[j])) / sigma for j, a in enumerate(s.weights)]
    coeffs = [mpmath.mpc(0)] * N
    for j in range(N):
        p = [mpmath.mpc(1)]
        for k in range(N):
            if k == j:
                continue
            # multiply by (1 - z_k z)
            p = [(p[i] if i < len(p) else 0) - (z[k] * p[i - 1] if i > 0 else 0) for i in range(len(p) + 1)]
        for i, pi in enumerate(p):
            coeffs[i] += c[j] * pi
    scale = max(abs(x) for x in c)
    if all(abs(x) <= 1e-14 * scale for x in coeffs):
        raise NumericalError("numerator polynomial vanishes; degenerate con-eigenvector")
    return coeffs


def numerator_polynomial(s: ExponentialSum, sigma: float, u, dps: int = EXTENDED_DPS) -> ComplexPolynomial:
    """q(z) = (1/sigma) sum_j a_j conj(u_j) prod_{k != j} (1 - z_k z).

    P_v(z) = q(z) / prod_j (1 - z_j z). Expanded in ``dps`` digits and then
    rounded; ``u`` may be a numpy vector or an mpmath column.
    """
    if sigma <= 0:
        raise ValidationError("sigma must be positive")
    if len(u) != s.order:
        raise ValidationError(f"u has length {len(u)}, expected {s.order}")
    with mpmath.workdps(dps):
        coeffs = _numerator_mp(s, sigma, u, dps)
        out = np.array([complex(x) for x in coeffs])
    return ComplexPolynomial(out)


def polish_roots(coeffs, roots, dps: int = EXTENDED_DPS, max_iter: int = 30) -> np.ndarray:
    """Refine all roots at once with Aberth steps in ``dps`` digits.

    ``coeffs`` (ascending, numbers or mpmath values) is taken as exact. Binary64
    companion roots of clustered polynomials near the unit circle can be off in
    the 8th digit; this restores full double accuracy.
    """
    roots = np.asarray(roots, complex).reshape(-1)
    if roots.size == 0:
        return roots
    with mpmath.workdps(dps):
        c = [mpmath.mpc(x) for x in coeffs]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        if len(c) - 1 != roots.size:
            raise ValidationError("need one starting value per root")
        dc = [i * c[i] for i in range(1, len(c))]
        w = [mpmath.mpc(r) for r in roots]
        eps = mpmath.mpf(10) ** (-(dps - 8))
        for _ in range(max_iter):
            biggest = mpmath.mpf(0)
            for i in range(len(w)):
                pv = mpmath.polyval(c[::-1], w[i])
                dv = mpmath.polyval(dc[::-1], w[i])
                if pv == 0 or dv == 0:
                    continue
                ratio = pv / dv
                rep = mpmath.fsum(1 / (w[i] - w[j]) for j in range(len(w)) if j != i)
                step = ratio / (1 - ratio * rep)
                w[i] -= step
                biggest = max(biggest, abs(step) / max(abs(w[i]), 1))
            if biggest < eps:
                break
        return np.array([complex(x) for x in w])


def polynomial_roots(p: ComplexPolynomial) -> np.ndarray:
    """All roots as eigenvalues of the balanced companion matrix."""
    if p.is_zero:
        raise ValidationError("the zero polynomial has no well-defined roots")
    c = p.coeffs
    d = c.size - 1
    if d == 0:
        return np.zeros(0, complex)
    monic = c[:-1] / c[-1]
    comp = np.zeros((d, d), complex)
    comp[1:, :-1] = np.eye(d - 1)
    comp[:, -1] = -monic
    # LAPACK geev balances (permute + scale) before the QR iteration
    return scipy.linalg.eigvals(comp, overwrite_a=True, check_finite=False)


def zeros_in_disc(
    roots, K_expected: int, disc_tol: float = DISC_TOL, disc_margin: float = DISC_MARGIN
) -> np.ndarray:
    """Roots strictly inside the unit disc, sorted by modulus (descending)."""
    roots = np.asarray(roots, complex).reshape(-1)
    mod = np.abs(roots)
    inside = roots[mod < 1.0 - disc_tol]
    inside = inside[np.argsort(-np.abs(inside), kind="stable")]
    if inside.size != K_expected:
        near = roots[np.abs(mod - 1.0) < disc_margin]
        raise RootCountError(
            f"expected {K_expected} zeros in the unit disc, found {inside.size}; "
            f"near-circle roots: {near.tolist()}",
            expected=K_expected,
            found=int(inside.size),
            near_circle=near.tolist(),
        )
    return inside


@dataclass(frozen=True)
class ReductionResult:
    """Outcome of reducing an N-term sum to K terms.

    ``disc_roots`` are the nodes of ``reduced``. ``no_reduction`` marks the
    case where no singular value fell below the requested threshold and the
    original sum was returned.
    """

    K: int
    sigma_K: float
    disc_roots: np.ndarray
    reduced: ExponentialSum
    error_l2: float
    bound_satisfied: bool
    fit: FitReport | None = None
    no_reduction: bool = False


def _pairwise_min(nodes) -> float:
    if len(nodes) < 2:
        return np.inf
    d = np.abs(nodes[:, None] - nodes[None, :])
    d[np.diag_indices_from(d)] = np.inf
    return float(d.min())


def reduced_nodes(s: ExponentialSum, system: ConEigenSystem, K: int) -> np.ndarray:
    """The K nodes of the reduced sum for a simple sigma_K.

    These are the disc zeros of P_{conj(v)}, i.e. the conjugates of the disc
    zeros of the numerator q of P_v. For real data both coincide.
    """
    if K == 0:
        return np.zeros(0, complex)
    sigma, u = system.sigmas[K], system.vector(K)
    with mpmath.workdps(EXTENDED_DPS):
        exact = _numerator_mp(s, sigma, u, EXTENDED_DPS)
        q = ComplexPolynomial(np.array([complex(x) for x in exact]))
        roots = polynomial_roots(q)
        exact = exact[: q.degree + 1]
    roots = polish_roots(exact, roots)
    inside = zeros_in_disc(roots, K)
    return np.conj(inside)


def reduce_to_K(
    s: ExponentialSum,
    K: int,
    norm: str = "l2",
    system: ConEigenSystem | None = None,
    sample_M: int | None = None,
    l1_tol: float = 1e-10,
) -> ReductionResult:
    """Reduce ``s`` to K terms with error at most sigma_K.

    ``norm`` selects the weight fit: "l2" (closed form) or "l1" (IRLS).
    With ``sample_M`` the l2 weights are fitted by least squares on the
    samples f_0..f_M only. ``error_l2`` is always the closed-form l2 norm of
    the full residual sequence.
    """
    N = s.order
    if not 0 <= K < N:
        raise ValidationError(f"K must satisfy 0 <= K < N = {N}, got {K}")
    if norm not in ("l1", "l2"):
        raise ValidationError(f"unknown norm {norm!r}")
    if system is None:
        system = hankel_con_eigen(s)
    sigma = float(system.sigmas[K])
    if not system.simplicity_flags[K]:
        cl = system.cluster(K)
        raise SigmaClusterError(
            f"sigma_{K} = {sigma:.6e} is not simple; cluster {cl}: "
            f"{[float(system.sigmas[i]) for i in cl]}",
            K=K,
            cluster=cl,
        )
    nodes = reduced_nodes(s, system, K)
    if _pairwise_min(nodes) < NODE_SEP_TOL:
        raise RootCountError(f"reduced nodes coincide (min distance {_pairwise_min(nodes):.2e})", K=K)
    if norm == "l1":
        fit = fit_l1(s, nodes, tol=l1_tol)
    elif sample_M is not None:
        fit = fit_l2_sampled(s, nodes, sample_M)
    else:
        fit = fit_l2(s, nodes)
    reduced = ExponentialSum(fit.weights, nodes) if K else ExponentialSum()
    err = l2_norm(difference(s, reduced))
    return ReductionResult(
        K=K,
        sigma_K=sigma,
        disc_roots=nodes,
        reduced=reduced,
        error_l2=err,
        bound_satisfied=bool(err <= sigma * (1 + BOUND_SLACK)),
        fit=fit,
    )


def select_K(sigmas, eps: float) -> int | None:
    """Smallest index with sigma_K < eps, or None."""
    below = np.nonzero(np.asarray(sigmas) < eps)[0]
    return int(below[0]) if below.size else None


def reduce_to_eps(
    s: ExponentialSum, eps: float, norm: str = "l2", system: ConEigenSystem | None = None, **kw
) -> ReductionResult:
    """Shortest reduction whose guaranteed error sigma_K is below ``eps``."""
    if eps <= 0:
        raise ValidationError("eps must be positive")
    if s.order == 0:
        return ReductionResult(0, 0.0, np.zeros(0, complex), s, 0.0, True, no_reduction=True)
    if system is None:
        system = hankel_con_eigen(s)
    K = select_K(system.sigmas, eps)
    if K is None:
        return ReductionResult(
            K=s.order,
            sigma_K=0.0,
            disc_roots=s.nodes.copy(),
            reduced=s,
            error_l2=0.0,
            bound_satisfied=True,
            no_reduction=True,
        )
    return reduce_to_K(s, K, norm=norm, system=system, **kw)


def spectrum(s: ExponentialSum) -> np.ndarray:
    """The N nonzero singular values of the Hankel operator, descending."""
    if s.order == 0:
        return np.zeros(0)
    return hankel_con_eigen(s).sigmas
