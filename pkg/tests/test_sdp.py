import math

import numpy as np
import pytest

from chanent import linalg as la
from chanent import sdp


def _min_eig_problem(c, kind="hermitian"):
    p = sdp.SdpProblem("min_eig")
    x = p.variable("X", c.shape[0], kind)
    p.add_psd(x)
    p.add_eq(x.trace() - 1)
    p.minimize(x._map(lambda h: np.trace(h @ c).reshape(1, 1)))
    return p


@pytest.mark.parametrize("backend", ["internal", "cvxpy"])
def test_min_eigenvalue_program(rng, backend):
    c = la.hermitize(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
    s = sdp.solve(_min_eig_problem(c), tol=1e-9, backend=backend)
    assert s.status == "optimal"
    assert math.isclose(s.objective, np.linalg.eigvalsh(c)[0], abs_tol=1e-6)


def test_real_symmetric_variables(rng):
    c = rng.normal(size=(5, 5))
    c = c + c.T
    s = sdp.solve(_min_eig_problem(c, "symmetric"), tol=1e-9)
    assert math.isclose(s.objective, np.linalg.eigvalsh(c)[0], abs_tol=1e-7)
    assert np.abs(s.values["X"].imag).max() == 0


def test_largest_eigenvalue_via_lmi(rng):
    c = la.hermitize(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
    p = sdp.SdpProblem()
    t = p.scalar("t")
    p.add_psd(t.times_identity(3) - c)
    p.minimize(t)
    s = sdp.solve(p, tol=1e-9)
    assert math.isclose(s.objective, np.linalg.eigvalsh(c)[-1], abs_tol=1e-7)


def test_block_with_rectangular_corner():
    # [[t, b^T], [b, 1]] >= 0 iff t >= |b|^2
    b = np.array([[1.0], [2.0]])
    p = sdp.SdpProblem()
    t = p.scalar("t")
    p.add_psd(sdp.Affine.block([[t, sdp.Rect(b.T)], [sdp.Rect(b), np.eye(2)]]))
    p.minimize(t)
    s = sdp.solve(p, tol=1e-9)
    assert math.isclose(s.objective, 5.0, abs_tol=1e-6)


def test_verify_accepts_solution(rng):
    c = la.hermitize(rng.normal(size=(3, 3)))
    p = _min_eig_problem(c)
    s = sdp.solve(p, tol=1e-9)
    rep = sdp.verify(p, s)
    assert rep.ok
    assert rep.gap < 1e-6


def test_verify_rejects_tampered_solution(rng):
    c = la.hermitize(rng.normal(size=(3, 3)))
    p = _min_eig_problem(c)
    s = sdp.solve(p, tol=1e-9)
    s.values["X"] = s.values["X"] * 2
    assert not sdp.verify(p, s).ok


def test_infeasible_and_unbounded_statuses():
    p = sdp.SdpProblem()
    x = p.variable("X", 2)
    p.add_psd(x)
    p.add_eq(x.trace() + 1)
    p.minimize(x.trace())
    assert sdp.solve(p).status == "infeasible"
    q = sdp.SdpProblem()
    y = q.variable("Y", 2)
    q.add_psd(y)
    q.maximize(y.trace())
    assert sdp.solve(q).status == "unbounded"


def test_raise_on_failure():
    from chanent.errors import SolverError
    p = sdp.SdpProblem()
    x = p.variable("X", 2)
    p.add_psd(x)
    p.add_eq(x.trace() + 1)
    p.minimize(x.trace())
    with pytest.raises(SolverError):
        sdp.solve(p, raise_on_failure=True)


def test_realify_spectrum(rng):
    h = la.hermitize(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
    r = sdp.realify(h)
    assert np.allclose(r, r.T)
    w = np.sort(np.repeat(np.linalg.eigvalsh(h), 2))
    assert np.allclose(np.linalg.eigvalsh(r), w)


def test_variable_basis_roundtrip(rng):
    for kind, n in (("hermitian", 9), ("symmetric", 6)):
        v = sdp.Variable("V", 3, kind)
        assert v.nparams == n
        h = rng.normal(size=(3, 3))
        h = h + h.T if kind == "symmetric" else la.hermitize(h + 1j * rng.normal(size=(3, 3)))
        assert np.allclose(v.assemble(v.flatten(h)), h)


def test_affine_ptrace_and_kron():
    p = sdp.SdpProblem()
    x = p.variable("X", 4)
    val = np.kron(np.diag([1.0, 2.0]), np.diag([3.0, 4.0]))
    expr = x.ptrace([2, 2], [0]).kron_left(np.eye(2))
    got = expr.value({"X": val})
    assert np.allclose(got, np.kron(np.eye(2), la.partial_trace(val, [2, 2], [0])))


def test_internal_and_cvxpy_agree_on_partial_trace_program(rng):
    g = la.random_density_matrix(4, rng) * 4
    results = []
    for backend in ("internal", "cvxpy"):
        p = sdp.SdpProblem()
        m = p.variable("M", 2)
        p.add_psd(m.kron_left(np.eye(2)) - g)
        p.minimize(m.trace())
        results.append(sdp.solve(p, tol=1e-9, backend=backend).objective)
    assert math.isclose(results[0], results[1], abs_tol=1e-5)
