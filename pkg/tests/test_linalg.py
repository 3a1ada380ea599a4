import itertools
import math

import numpy as np
import pytest
import scipy.linalg

from chanent import linalg as la
from chanent.errors import DimensionError, DomainError


def _ptrace_oracle(rho, dims, keep):
    """Explicit index loops over every basis element."""
    n = len(dims)
    trace_out = [i for i in range(n) if i not in keep]
    kd = [dims[i] for i in keep]
    out = np.zeros((math.prod(kd),) * 2, dtype=complex)
    t = rho.reshape(dims + dims)
    for ki in itertools.product(*[range(d) for d in kd]):
        for kj in itertools.product(*[range(d) for d in kd]):
            s = 0
            for tr in itertools.product(*[range(dims[i]) for i in trace_out]):
                row, col = [0] * n, [0] * n
                for pos, i in enumerate(keep):
                    row[i], col[i] = ki[pos], kj[pos]
                for pos, i in enumerate(trace_out):
                    row[i] = col[i] = tr[pos]
                s += t[tuple(row + col)]
            out[np.ravel_multi_index(ki, kd), np.ravel_multi_index(kj, kd)] = s
    return out


@pytest.mark.parametrize("dims,keep", [([2, 3], [0]), ([2, 3], [1]), ([2, 2, 3], [0, 2]), ([3, 2, 2], [1])])
def test_partial_trace_matches_index_loops(rng, dims, keep):
    rho = la.random_density_matrix(math.prod(dims), rng)
    assert np.abs(la.partial_trace(rho, dims, keep) - _ptrace_oracle(rho, dims, keep)).max() < 1e-12


def test_partial_trace_of_product():
    a = np.diag([0.25, 0.75])
    b = np.eye(3) / 3
    assert np.allclose(la.partial_trace(np.kron(a, b), [2, 3], [0]), a)
    assert np.allclose(la.partial_trace(np.kron(a, b), [2, 3], [1]), b)


def test_partial_trace_rejects_bad_dims(rng):
    with pytest.raises(DimensionError):
        la.partial_trace(np.eye(6), [2, 2], [0])


def test_permute_factors_on_products(rng):
    ops = [rng.normal(size=(d, d)) for d in (2, 3, 4)]
    perm = [2, 0, 1]
    got = la.permute_factors(la.kron(*ops), [2, 3, 4], perm)
    assert np.allclose(got, la.kron(*[ops[i] for i in perm]))


def test_permute_vector_on_products(rng):
    vs = [rng.normal(size=d) for d in (2, 3)]
    assert np.allclose(la.permute_vector(np.kron(*vs), [2, 3], [1, 0]), np.kron(vs[1], vs[0]))


def test_log2_matches_scipy(rng):
    rho = la.random_density_matrix(4, rng)
    assert np.allclose(la.matrix_function(rho, "log2"), scipy.linalg.logm(rho) / np.log(2), atol=1e-10)


def test_sqrt_and_inverse_sqrt_on_support(rng):
    rho = la.random_density_matrix(4, rng, rank=2)
    s = la.matrix_function(rho, "sqrt")
    assert np.allclose(s @ s, rho, atol=1e-12)
    si = la.matrix_function(rho, "inv_sqrt")
    assert np.allclose(s @ si, la.support_projector(rho), atol=1e-9)


def test_power_matches_scipy(rng):
    rho = la.random_density_matrix(3, rng)
    assert np.allclose(la.matrix_function(rho, "power", 0.3), scipy.linalg.fractional_matrix_power(rho, 0.3),
                       atol=1e-10)


def test_matrix_function_rejects_negative():
    with pytest.raises(DomainError):
        la.matrix_function(np.diag([1.0, -0.5]), "sqrt")


def test_support_isometry_and_projector(rng):
    rho = la.random_density_matrix(5, rng, rank=3)
    v = la.support_isometry(rho)
    assert v.shape == (5, 3)
    assert np.allclose(v.conj().T @ v, np.eye(3))
    assert np.allclose(v @ v.conj().T, la.support_projector(rho))


def test_schatten_norm_matches_svd(rng):
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    s = np.linalg.svd(m, compute_uv=False)
    assert math.isclose(la.schatten_norm(m, 1), s.sum(), rel_tol=1e-12)
    assert math.isclose(la.schatten_norm(m, 2), np.sqrt((s ** 2).sum()), rel_tol=1e-12)
    assert math.isclose(la.schatten_norm(m, np.inf), s.max(), rel_tol=1e-12)


def test_geometric_mean_formula(rng):
    x = la.random_density_matrix(3, rng)
    y = la.random_density_matrix(3, rng)
    alpha = 1.7
    xh = scipy.linalg.sqrtm(x)
    xih = np.linalg.inv(xh)
    oracle = xh @ scipy.linalg.fractional_matrix_power(xih @ y @ xih, alpha) @ xh
    assert np.allclose(la.weighted_geometric_mean(x, y, alpha), oracle, atol=1e-9)


def test_geometric_mean_commuting_and_symmetric(rng):
    x, y = np.diag([0.2, 0.8]), np.diag([0.6, 0.4])
    assert np.allclose(la.weighted_geometric_mean(x, y, 0.3), np.diag([0.2 ** 0.7 * 0.6 ** 0.3, 0.8 ** 0.7 * 0.4 ** 0.3]))
    a = la.random_density_matrix(3, rng)
    b = la.random_density_matrix(3, rng)
    assert np.allclose(la.weighted_geometric_mean(a, b, 0.5), la.weighted_geometric_mean(b, a, 0.5), atol=1e-10)


def test_eigh_reconstructs(rng):
    h = la.hermitize(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
    sd = la.eigh(h)
    assert np.allclose((sd.eigenvectors * sd.eigenvalues) @ sd.eigenvectors.conj().T, h)
    assert np.all(np.diff(sd.eigenvalues) >= 0)


def test_max_entangled_and_random_states(rng):
    phi = la.max_entangled(3)
    assert math.isclose(np.linalg.norm(phi), 1.0)
    assert np.allclose(la.partial_trace(np.outer(phi, phi.conj()), [3, 3], [0]), np.eye(3) / 3)
    u = la.random_unitary(4, rng)
    assert np.allclose(u.conj().T @ u, np.eye(4))
    rho = la.random_density_matrix(4, rng, rank=2)
    assert np.linalg.matrix_rank(rho, tol=1e-10) == 2
    assert math.isclose(np.trace(rho).real, 1.0)
