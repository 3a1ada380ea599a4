"""Dense Hermitian linear algebra on small tensor-product spaces.

Operators are plain complex ``numpy`` arrays.  Factor dimensions are passed
explicitly as a sequence ``dims`` whose product equals the matrix size.
Spectral cutoffs are relative: an eigenvalue counts as zero when its modulus
is below ``1e-10`` times the largest eigenvalue modulus.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np
import scipy.linalg

from .errors import ConvergenceError, DimensionError, DomainError

SUPPORT_RTOL = 1e-10
NEGATIVITY_RTOL = 1e-9
HERMITIAN_TOL = 1e-10


class SpectralDecomposition(NamedTuple):
    """Eigenvalues in ascending order and matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    cutoff: float


def hermiticity_defect(h: np.ndarray) -> float:
    """Spectral norm of ``h - h^dagger``."""
    h = np.asarray(h)
    if h.size == 0:
        return 0.0
    return float(np.linalg.norm(h - h.conj().T, 2))


def hermitize(h: np.ndarray) -> np.ndarray:
    """Return ``(h + h^dagger) / 2``."""
    h = np.asarray(h, dtype=complex)
    return 0.5 * (h + h.conj().T)


def _check_square(h: np.ndarray) -> np.ndarray:
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {h.shape}")
    return h


def _check_hermitian(h: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    h = _check_square(h)
    scale = max(1.0, float(np.abs(h).max()) if h.size else 1.0)
    defect = hermiticity_defect(h)
    if defect > tol * scale:
        raise DomainError(f"matrix is not Hermitian (defect {defect:.3e})")
    return hermitize(h)


def eigh(h: np.ndarray) -> SpectralDecomposition:
    """Hermitian eigendecomposition with a deterministic phase convention.

    Eigenvalues are ascending.  Each eigenvector is rescaled by a phase so that
    its first component of non-negligible modulus is real and positive.

    Raises
    ------
    DomainError
        If ``h`` is not Hermitian to within ``1e-10`` relative.
    ConvergenceError
        If LAPACK fails to converge.
    """
    h = _check_hermitian(h)
    try:
        w, v = scipy.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigendecomposition failed: {exc}") from exc
    if v.size:
        first = np.argmax(np.abs(v) > 1e-12, axis=0)
        lead = v[first, np.arange(v.shape[1])]
        v = v * (np.abs(lead) / np.where(lead == 0, 1, lead))[None, :]
    scale = float(np.abs(w).max()) if w.size else 0.0
    return SpectralDecomposition(w, v, SUPPORT_RTOL * scale)


def _psd_spectrum(h: np.ndarray, name: str) -> SpectralDecomposition:
    sd = eigh(h)
    w = sd.eigenvalues
    scale = float(np.abs(w).max()) if w.size else 0.0
    if w.size and w[0] < -NEGATIVITY_RTOL * max(scale, 1e-300):
        raise DomainError(f"{name} needs a positive semidefinite argument (min eigenvalue {w[0]:.3e})")
    return sd


def matrix_function(h: np.ndarray, f: str, alpha: float | None = None) -> np.ndarray:
    """Apply a scalar function to the spectrum of a positive semidefinite matrix.

    Parameters
    ----------
    h : ndarray
        Hermitian, positive semidefinite.
    f : {"log2", "sqrt", "inv_sqrt", "power"}
        Function tag.  ``"log2"`` and negative powers act on the support only
        (zero on the kernel), i.e. they are pseudo-functions.
    alpha : float, optional
        Exponent for ``"power"``.
    """
    sd = _psd_spectrum(h, f)
    w, v = sd.eigenvalues, sd.eigenvectors
    on = w > sd.cutoff
    out = np.zeros_like(w)
    if f == "log2":
        out[on] = np.log2(w[on])
    elif f == "sqrt":
        out[on] = np.sqrt(w[on])
    elif f == "inv_sqrt":
        out[on] = 1.0 / np.sqrt(w[on])
    elif f == "power":
        if alpha is None:
            raise ValueError("power needs alpha")
        if alpha == 0:
            out[on] = 1.0
        else:
            out[on] = w[on] ** alpha
    else:
        raise ValueError(f"unknown matrix function {f!r}")
    return (v * out[None, :]) @ v.conj().T


def support_projector(h: np.ndarray) -> np.ndarray:
    """Orthogonal projector onto the span of eigenvectors above the cutoff."""
    sd = eigh(h)
    vs = sd.eigenvectors[:, np.abs(sd.eigenvalues) > sd.cutoff]
    return vs @ vs.conj().T


def support_isometry(h: np.ndarray) -> np.ndarray:
    """Columns spanning the support of a PSD matrix, largest eigenvalues last."""
    sd = eigh(h)
    return sd.eigenvectors[:, sd.eigenvalues > sd.cutoff]


def psd_sqrt(h: np.ndarray) -> np.ndarray:
    return matrix_function(h, "sqrt")


def _check_dims(n: int, dims: Sequence[int]) -> list[int]:
    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims):
        raise DimensionError(f"factor dimensions must be positive, got {dims}")
    if math.prod(dims) != n:
        raise DimensionError(f"factor dimensions {dims} do not multiply to {n}")
    return dims


def partial_trace(h: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out every factor not listed in ``keep``.

    The kept factors appear in their original relative order.
    """
    h = _check_square(h)
    dims = _check_dims(h.shape[0], dims)
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    for k in keep:
        if not 0 <= k < n:
            raise DimensionError(f"factor index {k} out of range for {n} factors", factor=k)
    t = h.reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    if 2 * n > len(letters):
        raise DimensionError("too many factors")
    row = list(letters[:n])
    col = list(letters[n:2 * n])
    for i in range(n):
        if i not in keep:
            col[i] = row[i]
    out = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    r = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    dk = math.prod(dims[i] for i in keep)
    return r.reshape(dk, dk)


def permute_factors(h: np.ndarray, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors: new factor ``j`` is old factor ``perm[j]``."""
    h = _check_square(h)
    dims = _check_dims(h.shape[0], dims)
    n = len(dims)
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(n)):
        raise DimensionError(f"{perm} is not a permutation of {n} factors")
    t = h.reshape(dims + dims).transpose(perm + [n + p for p in perm])
    return t.reshape(h.shape)


def permute_vector(v: np.ndarray, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Reorder the tensor factors of a vector (same convention as ``permute_factors``)."""
    dims = _check_dims(v.shape[0], dims)
    return v.reshape(dims).transpose(list(perm)).reshape(-1)


def kron(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product of any number of operators."""
    out = np.ones((1, 1), dtype=complex)
    for op in ops:
        out = np.kron(out, op)
    return out


def schatten_norm(h: np.ndarray, p: float) -> float:
    """Schatten ``p``-norm; ``p = inf`` gives the spectral norm."""
    s = np.linalg.svd(np.asarray(h), compute_uv=False)
    if s.size == 0:
        return 0.0
    if np.isinf(p):
        return float(s.max())
    if p <= 0:
        raise DomainError("Schatten p must be positive")
    return float(np.sum(s ** p) ** (1.0 / p))


def weighted_geometric_mean(x: np.ndarray, y: np.ndarray, alpha: float) -> np.ndarray:
    """``x^{1/2} (x^{-1/2} y x^{-1/2})^alpha x^{1/2}`` for PSD ``x``, ``y``.

    Inverse powers of ``x`` are taken on its support.  For invertible
    arguments ``G_alpha(x, y) = G_{1-alpha}(y, x)``.
    """
    x = _check_square(x)
    y = _check_square(y)
    if x.shape != y.shape:
        raise DimensionError(f"shape mismatch {x.shape} vs {y.shape}")
    xh = matrix_function(x, "sqrt")
    xih = matrix_function(x, "inv_sqrt")
    inner = hermitize(xih @ y @ xih)
    return hermitize(xh @ matrix_function(inner, "power", alpha) @ xh)


def random_density_matrix(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Density matrix from the induced (Hilbert-Schmidt type) measure."""
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    return hermitize(rho / np.trace(rho).real)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with phase correction."""
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph[None, :]


def ket(d: int, i: int) -> np.ndarray:
    v = np.zeros(d, dtype=complex)
    v[i] = 1.0
    return v


def max_entangled(d: int, normalized: bool = True) -> np.ndarray:
    """Vector ``sum_i |ii>``, divided by ``sqrt(d)`` when ``normalized``."""
    v = np.eye(d, dtype=complex).reshape(-1)
    return v / math.sqrt(d) if normalized else v
