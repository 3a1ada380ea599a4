"""Divergences, distances and entropies of quantum states (logarithms base 2)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg as la
from . import sdp
from .errors import DimensionError, DomainError, SolverError

INF = float("inf")
SUPPORT_WEIGHT_TOL = 1e-9


@dataclass(frozen=True)
class DivergenceValue:
    """A divergence in bits; ``value`` is ``inf`` exactly when ``support_violation`` is set."""

    value: float
    support_violation: bool = False
    method: str = ""

    def __float__(self) -> float:
        return self.value


def _psd(x: np.ndarray, name: str) -> np.ndarray:
    x = la._check_hermitian(np.asarray(x, dtype=complex))
    w = np.linalg.eigvalsh(x)
    if w.size and w[0] < -la.NEGATIVITY_RTOL * max(1.0, float(np.abs(w).max())):
        raise DomainError(f"{name} is not positive semidefinite (min eigenvalue {w[0]:.3e})")
    return x


def _same_shape(rho, sigma):
    if rho.shape != sigma.shape:
        raise DimensionError(f"shape mismatch {rho.shape} vs {sigma.shape}")


def _outside_support_weight(rho: np.ndarray, sigma: np.ndarray) -> float:
    """``tr(rho (1 - Pi_sigma))``, the weight of ``rho`` outside the support of ``sigma``."""
    pi = la.support_projector(sigma)
    return float(np.trace(rho).real - np.trace(pi @ rho).real)


def _violates(rho, sigma) -> bool:
    return _outside_support_weight(rho, sigma) > SUPPORT_WEIGHT_TOL * max(1.0, float(np.trace(rho).real))


def vn_entropy(rho: np.ndarray) -> float:
    """``-tr rho log2 rho``."""
    w = np.linalg.eigvalsh(la.hermitize(rho))
    w = w[w > la.SUPPORT_RTOL * max(float(np.abs(w).max(initial=0)), 1e-300)]
    return float(-np.sum(w * np.log2(w)))


def umegaki(rho: np.ndarray, sigma: np.ndarray) -> DivergenceValue:
    """Umegaki relative entropy ``tr rho (log rho - log sigma)``."""
    rho, sigma = _psd(rho, "rho"), _psd(sigma, "sigma")
    _same_shape(rho, sigma)
    if _violates(rho, sigma):
        return DivergenceValue(INF, True, "umegaki")
    v = np.trace(rho @ (la.matrix_function(rho, "log2") - la.matrix_function(sigma, "log2"))).real
    return DivergenceValue(float(v), False, "umegaki")


def d_max(rho: np.ndarray, sigma: np.ndarray) -> DivergenceValue:
    """Max-relative entropy ``log ||sigma^{-1/2} rho sigma^{-1/2}||_inf``."""
    rho, sigma = _psd(rho, "rho"), _psd(sigma, "sigma")
    _same_shape(rho, sigma)
    if _violates(rho, sigma):
        return DivergenceValue(INF, True, "d_max")
    si = la.matrix_function(sigma, "inv_sqrt")
    lam = float(np.linalg.eigvalsh(la.hermitize(si @ rho @ si))[-1])
    if lam <= 0:
        return DivergenceValue(-INF, False, "d_max")
    return DivergenceValue(math.log2(lam), False, "d_max")


def d_min(rho: np.ndarray, sigma: np.ndarray) -> DivergenceValue:
    """Min-relative entropy ``-log tr(sigma Pi_rho)`` with ``Pi_rho`` the support projector of ``rho``."""
    rho, sigma = _psd(rho, "rho"), _psd(sigma, "sigma")
    _same_shape(rho, sigma)
    t = float(np.trace(sigma @ la.support_projector(rho)).real)
    if t <= SUPPORT_WEIGHT_TOL * max(1.0, float(np.trace(sigma).real)):
        return DivergenceValue(INF, True, "d_min")
    return DivergenceValue(-math.log2(t), False, "d_min")


def sandwiched_renyi(rho: np.ndarray, sigma: np.ndarray, alpha: float) -> DivergenceValue:
    """Sandwiched Renyi divergence of order ``alpha``."""
    if alpha <= 0 or alpha == 1:
        raise DomainError("alpha must lie in (0, 1) or (1, inf); use umegaki for alpha = 1")
    rho, sigma = _psd(rho, "rho"), _psd(sigma, "sigma")
    _same_shape(rho, sigma)
    if alpha > 1 and _violates(rho, sigma):
        return DivergenceValue(INF, True, "sandwiched")
    s = la.matrix_function(sigma, "power", (1 - alpha) / (2 * alpha))
    q = float(np.trace(la.matrix_function(la.hermitize(s @ rho @ s), "power", alpha)).real)
    if q <= 0:
        return DivergenceValue(INF, True, "sandwiched")
    return DivergenceValue(math.log2(q) / (alpha - 1), False, "sandwiched")


def geometric_renyi(rho: np.ndarray, sigma: np.ndarray, alpha: float) -> DivergenceValue:
    """Geometric Renyi divergence ``log tr G_alpha(sigma, rho) / (alpha - 1)``.

    Inverse powers of ``sigma`` are taken on its support.  For ``alpha > 1`` a
    part of ``rho`` outside that support gives ``inf``.
    """
    if alpha <= 0 or alpha == 1:
        raise DomainError("alpha must lie in (0, 1) or (1, inf)")
    rho, sigma = _psd(rho, "rho"), _psd(sigma, "sigma")
    _same_shape(rho, sigma)
    if alpha > 1 and _violates(rho, sigma):
        return DivergenceValue(INF, True, "geometric")
    q = float(np.trace(la.weighted_geometric_mean(sigma, rho, alpha)).real)
    if q <= 0:
        return DivergenceValue(INF, True, "geometric")
    return DivergenceValue(math.log2(q) / (alpha - 1), False, "geometric")


def hypothesis_testing(rho: np.ndarray, sigma: np.ndarray, eps: float, backend: str = "internal") -> DivergenceValue:
    """``-log min tr(L sigma)`` over ``0 <= L <= 1`` with ``tr(L rho) >= 1 - eps``.

    For ``eps = 0`` the constraint forces ``L`` to act as the identity on the
    support of ``rho``, so the program is posed over the complement.
    """
    if not 0 <= eps <= 1:
        raise DomainError("eps must lie in [0, 1]")
    rho, sigma = _psd(rho, "rho"), _psd(sigma, "sigma")
    _same_shape(rho, sigma)
    if eps == 1:
        return DivergenceValue(INF, True, "hypothesis_testing")
    d = rho.shape[0]
    real = np.abs(rho.imag).max() == 0 and np.abs(sigma.imag).max() == 0
    kind = "symmetric" if real else "hermitian"
    p = sdp.SdpProblem("hypothesis_testing")
    if eps == 0:
        pi = la.support_projector(rho)
        vc = la.support_isometry(np.eye(d) - pi) if np.trace(pi).real < d - 0.5 else np.zeros((d, 0))
        base = float(np.trace(pi @ sigma).real)
        if vc.shape[1] == 0:
            beta = base
        else:
            lam = p.variable("L", vc.shape[1], kind)
            p.add_psd(lam)
            p.add_psd(np.eye(vc.shape[1]) - lam)
            p.minimize(_trace_against(lam.congruence(vc), sigma) + base)
            beta = _checked_solve(p, backend).objective
    else:
        lam = p.variable("L", d, kind)
        p.add_psd(lam)
        p.add_psd(np.eye(d) - lam)
        p.add_psd(_trace_against(lam, rho) - (1 - eps))
        p.minimize(_trace_against(lam, sigma))
        beta = _checked_solve(p, backend).objective
    if beta <= 1e-9 * max(1.0, float(np.trace(sigma).real)):
        return DivergenceValue(INF, True, "hypothesis_testing")
    return DivergenceValue(-math.log2(beta), False, "hypothesis_testing")


def _trace_against(expr: sdp.Affine, m: np.ndarray) -> sdp.Affine:
    """Scalar expression ``tr(expr m)`` for Hermitian ``m``."""
    h = la.psd_sqrt(m) if np.linalg.eigvalsh(la.hermitize(m))[0] >= -1e-12 else None
    if h is not None:
        return expr.congruence(h).trace()
    return expr._map(lambda x: np.trace(x @ m).reshape(1, 1))


def _checked_solve(p: sdp.SdpProblem, backend: str) -> sdp.SdpSolution:
    s = sdp.solve(p, tol=1e-9, backend=backend)
    if s.status not in ("optimal", "inaccurate") or s.duality_gap > 1e-6 * (1 + abs(s.objective)):
        raise SolverError(f"{p.name} failed with status {s.status}", s.status, s.iterations)
    return s


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity ``||sqrt(rho) sqrt(sigma)||_1^2``."""
    rho, sigma = _psd(rho, "rho"), _psd(sigma, "sigma")
    _same_shape(rho, sigma)
    return la.schatten_norm(la.psd_sqrt(rho) @ la.psd_sqrt(sigma), 1) ** 2


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Unnormalized trace distance ``||rho - sigma||_1``."""
    _same_shape(np.asarray(rho), np.asarray(sigma))
    return la.schatten_norm(np.asarray(rho) - np.asarray(sigma), 1)


def purified_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    return math.sqrt(max(0.0, 1.0 - fidelity(rho, sigma)))


def diamond_norm(choi_diff: np.ndarray, d_in: int, d_out: int, backend: str = "internal") -> float:
    """Diamond norm of a Hermiticity-preserving map from its Choi operator.

    ``choi_diff`` is laid out as ``R (x) out`` with ``R`` of size ``d_in``.
    Uses the program ``min (||tr_out Y0|| + ||tr_out Y1||) / 2`` subject to
    ``[[Y0, -J], [-J, Y1]] >= 0``.
    """
    j = la.hermitize(choi_diff)
    n = d_in * d_out
    if j.shape != (n, n):
        raise DimensionError(f"Choi operator of shape {j.shape} does not match {d_in}x{d_out}")
    if np.abs(j).max() == 0:
        return 0.0
    kind = "symmetric" if np.abs(j.imag).max() == 0 else "hermitian"
    p = sdp.SdpProblem("diamond_norm")
    y0 = p.variable("Y0", n, kind)
    y1 = p.variable("Y1", n, kind)
    t0 = p.scalar("t0")
    t1 = p.scalar("t1")
    p.add_psd(sdp.Affine.block([[y0, -j], [-j, y1]]))
    p.add_psd(t0.times_identity(d_in) - y0.ptrace([d_in, d_out], [0]))
    p.add_psd(t1.times_identity(d_in) - y1.ptrace([d_in, d_out], [0]))
    p.minimize((t0 + t1) * 0.5)
    return float(_checked_solve(p, backend).objective)


# ------------------------------------------------------------ state entropies


def _split(dims: Sequence[int], *groups: Sequence[int]) -> list[list[int]]:
    n = len(dims)
    seen = set()
    out = []
    for g in groups:
        g = [int(i) for i in g]
        for i in g:
            if not 0 <= i < n:
                raise DimensionError(f"factor index {i} out of range for {n} factors", factor=i)
            if i in seen:
                raise DimensionError(f"factor {i} appears in two groups", factor=i)
            seen.add(i)
        out.append(sorted(g))
    return out


def marginal_entropy(rho: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> float:
    keep = sorted(keep)
    if not keep:
        return 0.0
    if len(keep) == len(dims):
        return vn_entropy(rho)
    return vn_entropy(la.partial_trace(rho, dims, keep))


def state_cond_entropy(rho: np.ndarray, dims: Sequence[int], a: Sequence[int], b: Sequence[int]) -> float:
    """``S(A|B) = S(AB) - S(B)``; factors outside ``a`` and ``b`` are traced out."""
    a, b = _split(dims, a, b)
    return marginal_entropy(rho, dims, a + b) - marginal_entropy(rho, dims, b)


def state_mutual_info(rho: np.ndarray, dims: Sequence[int], a: Sequence[int], b: Sequence[int]) -> float:
    """``I(A;B) = S(A) + S(B) - S(AB)``."""
    a, b = _split(dims, a, b)
    return (marginal_entropy(rho, dims, a) + marginal_entropy(rho, dims, b)
            - marginal_entropy(rho, dims, a + b))


def state_cmi(rho: np.ndarray, dims: Sequence[int], a: Sequence[int], c: Sequence[int],
              b: Sequence[int]) -> float:
    """``I(A;C|B) = S(AB) + S(BC) - S(B) - S(ABC)``."""
    a, c, b = _split(dims, a, c, b)
    return (marginal_entropy(rho, dims, a + b) + marginal_entropy(rho, dims, b + c)
            - marginal_entropy(rho, dims, b) - marginal_entropy(rho, dims, a + b + c))


def state_multipartite_mi(rho: np.ndarray, dims: Sequence[int], groups: Sequence[Sequence[int]]) -> float:
    """Total correlation ``sum_i S(G_i) - S(G_1 ... G_n)``."""
    gs = _split(dims, *groups)
    allf = sorted(i for g in gs for i in g)
    return sum(marginal_entropy(rho, dims, g) for g in gs) - marginal_entropy(rho, dims, allf)
