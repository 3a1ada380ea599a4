import math

import numpy as np
import pytest

from chanent import channels as ch
from chanent import divergences as dv
from chanent import entropies as en
from chanent import linalg as la
from chanent import samplers
from chanent.errors import DomainError, NotTeleCovariantError


# -------------------------------------------------------- von Neumann


@pytest.mark.parametrize("d", [2, 3])
def test_swap_is_minus_three_log_d(d):
    # SWAP saturates the dimensional lower bound
    assert math.isclose(en.cond_vn_telecov(ch.swap(d)).value, -3 * math.log2(d), abs_tol=1e-9)


def test_identity_and_cnot_values():
    assert math.isclose(en.cond_vn_telecov(ch.identity(2, 2)).value, -1.0, abs_tol=1e-9)
    assert math.isclose(en.cond_vn_telecov(ch.cnot()).value, -2.0, abs_tol=1e-9)


def _cond_vn_oracle(c):
    """``S(R_A A R_B B) - S(R_B B) - log|A'|`` from the standard-layout Choi state."""
    phi = c.choi.standard() / c.dims.d_in
    d = 2
    # standard layout (R_A, R_B, A, B)
    s_all = dv.vn_entropy(phi)
    s_rbb = dv.vn_entropy(la.partial_trace(phi, [d, d, d, d], [1, 3]))
    return s_all - s_rbb - math.log2(d)


@pytest.mark.parametrize("p", [0.0, 0.2, 0.5, 0.9, 1.0])
def test_noisy_swap_curve(p):
    c = ch.white_noise_mixture(ch.swap(2), p)
    v = en.cond_vn_telecov(c).value
    assert math.isclose(v, _cond_vn_oracle(c), abs_tol=1e-10)
    assert math.isclose(v, en.cond_vn_noisy_swap_formula(2, p), abs_tol=1e-10)
    # the printed closed form uses the noise weight q = 1 - p
    assert math.isclose(v, en.cond_vn_noisy_swap_printed(1 - p), abs_tol=1e-10)


def test_noisy_swap_general_d():
    c = ch.white_noise_mixture(ch.swap(3), 0.4)
    assert math.isclose(en.cond_vn_telecov(c).value, en.cond_vn_noisy_swap_formula(3, 0.4), abs_tol=1e-10)


@pytest.mark.parametrize("p", [0.1, 0.6])
def test_noisy_cnot_matches_choi_oracle(p):
    c = ch.white_noise_mixture(ch.cnot(), p)
    assert math.isclose(en.cond_vn_telecov(c).value, _cond_vn_oracle(c), abs_tol=1e-10)


def test_isometric_factor_gives_minus_log_dim(rng):
    probs = samplers.random_pauli_probs(1, rng)
    c = ch.tensor(ch.identity(2), ch.pauli_channel(probs, 1))
    assert math.isclose(en.cond_vn_telecov(c).value, -1.0, abs_tol=1e-9)
    noisy = ch.tensor(ch.depolarizing(0.3), ch.pauli_channel(probs, 1))
    assert en.cond_vn_telecov(noisy).value > -1.0 + 1e-6


def test_bounds_and_replacer():
    lo, hi = en.cond_vn_bounds(ch.swap(2).dims)
    assert (lo, hi) == (-3.0, 1.0)
    assert math.isclose(en.cond_vn_telecov(ch.maxmix_replacer([2, 2])).value, 1.0, abs_tol=1e-9)


def test_channel_entropy():
    assert math.isclose(en.channel_entropy_telecov(ch.swap(2)).value, -2.0, abs_tol=1e-9)
    assert math.isclose(en.channel_entropy_telecov(ch.maxmix_replacer([2, 2])).value, 2.0, abs_tol=1e-9)


def test_non_covariant_channel_is_rejected(rng):
    c = ch.tensor(samplers.random_channel(2, 2, rng), samplers.random_channel(2, 2, rng))
    with pytest.raises(NotTeleCovariantError) as exc:
        en.cond_vn_telecov(c)
    assert exc.value.defect_norms["covariance"] > 0
    rep = en.cond_vn_telecov(c, override=True)
    assert rep.bound_kind == "upper"


# ------------------------------------------------------------ SDPs


@pytest.mark.parametrize("c,target", [(ch.maxmix_replacer([2, 2]), 1.0), (ch.identity(2, 2), -1.0),
                                      (ch.swap(2), -3.0), (ch.cnot(), -2.0)])
def test_cond_min_values(c, target):
    rep = en.cond_min_sdp(c)
    assert math.isclose(rep.value, target, abs_tol=1e-6)
    assert rep.diagnostics["verified"]


def test_cond_min_backends_agree():
    c = ch.white_noise_mixture(ch.cnot(), 0.7)
    a = en.cond_min_sdp(c).value
    b = en.cond_min_sdp(c, backend="cvxpy").value
    assert math.isclose(a, b, abs_tol=1e-5)


@pytest.mark.parametrize("p", [0.0, 0.3, 1.0])
def test_entropy_ordering(p):
    c = ch.identity_mixture(ch.swap(2), p)
    vals = [en.cond_min_sdp(c).value] + [en.cond_geo_sdp(c, ell).value for ell in (0, 2, 4)]
    assert all(b >= a - 1e-5 for a, b in zip(vals, vals[1:]))


def test_geometric_closed_form_at_optimizer():
    c = ch.identity_mixture(ch.cnot(), 0.4)
    r = en.cond_geo_sdp(c, 0)
    y = en.geo_closed_form_y(c, r.diagnostics["GM"], 2.0)
    assert math.isclose(-math.log2(y), r.value, abs_tol=1e-6)


def test_alpha_schedule():
    assert en.AlphaSchedule(0).alpha == 2.0
    assert en.AlphaSchedule(4).alpha == 1.0625
    with pytest.raises(DomainError):
        en.AlphaSchedule(-1)


def test_geometric_on_replacer():
    assert math.isclose(en.cond_geo_sdp(ch.maxmix_replacer([2, 2]), 2).value, 1.0, abs_tol=1e-6)


# ------------------------------------------------------- heuristics


@pytest.mark.parametrize("c,target", [(ch.swap(2), -1.0), (ch.identity(2, 2), -1.0),
                                      (ch.maxmix_replacer([2, 2]), 1.0), (ch.swap(3), -math.log2(3))])
def test_ns_entropy(c, target):
    rep = en.ns_cond_entropy(c, restarts=8)
    assert math.isclose(rep.value, target, abs_tol=1e-6)
    assert rep.bound_kind == "upper"


def test_ns_entropy_is_seeded():
    a = en.ns_cond_entropy(ch.cnot(), restarts=3, seed=7).value
    b = en.ns_cond_entropy(ch.cnot(), restarts=3, seed=7).value
    assert a == b


def test_ns_entropy_is_above_cond_vn():
    for c in (ch.swap(2), ch.cnot(), ch.white_noise_mixture(ch.cnot(), 0.5)):
        assert en.ns_cond_entropy(c, restarts=4).value >= en.cond_vn_telecov(c).value - 1e-8


def test_cond_max():
    assert math.isclose(en.cond_max(ch.maxmix_replacer([2, 2])).value, 1.0, abs_tol=1e-5)
    assert math.isclose(en.cond_max(ch.identity(2, 2)).value, -1.0, abs_tol=1e-5)
    c = ch.white_noise_mixture(ch.cnot(), 0.5)
    assert en.cond_max(c).value >= en.cond_vn_telecov(c).value - 1e-6


def test_stein_gap():
    r = en.quest_rates(ch.swap(2), restarts=6)
    assert math.isclose(r.gap, 2.0, abs_tol=1e-6)


# ----------------------------------------------- mutual informations


def test_mutual_information_values():
    assert math.isclose(en.mi_telecov(ch.swap(2)).value, 4.0, abs_tol=1e-9)
    assert math.isclose(en.mi_telecov(ch.cnot()).value, 2.0, abs_tol=1e-9)
    assert abs(en.mi_telecov(ch.identity(2, 2)).value) < 1e-9


def test_mi_max_upper_bounds_mi():
    for c, target in ((ch.swap(2), 4.0), (ch.cnot(), 2.0)):
        r = en.mi_max_alternating(c)
        assert r.value >= en.mi_telecov(c).value - 1e-5
        assert math.isclose(r.value, target, abs_tol=1e-4)
    assert abs(en.mi_max_alternating(ch.identity(2, 2)).value) < 1e-5


def test_mi_choi_lower_bound(rng):
    c = ch.tensor(samplers.random_channel(2, 2, rng), samplers.random_channel(2, 2, rng))
    assert abs(en.mi_choi_lower_bound(c)) < 1e-9


def test_cmi_paths_agree_and_markov_product(rng):
    for _ in range(4):
        c = samplers.random_telecov(3, rng)
        assert math.isclose(en.cmi_telecov(c).value, en.mi_based_cmi(c).value, abs_tol=1e-8)
    prod = ch.tensor(ch.swap(2), ch.identity(2))
    assert abs(en.cmi_telecov(prod).value) < 1e-9


def test_cmi_of_unitary_equals_marginal_mi():
    # unitary tele-covariant tripartite channel: CMI equals I(R_A A; C)
    u = la.kron(ch.cnot_unitary(), np.eye(2))
    cn = np.eye(8)[[0, 1, 2, 3, 5, 4, 7, 6]]
    c = ch.unitary(cn @ u, [2, 2, 2])
    sizes = c.dims.choi_sizes()
    direct = dv.state_mutual_info(c.choi.state, sizes, [0, 1], [5])
    assert math.isclose(en.cmi_telecov(c).value, direct, abs_tol=1e-9)


# -------------------------------------------------- arithmetic bounds


def test_k_extendible_bound_arithmetic():
    dims = ch.swap(2).dims
    assert en.k_extendible_bound(dims, 2) == 0.0
    assert math.isclose(en.k_extendible_bound(dims, 4), 0.5)
    with pytest.raises(DomainError):
        en.k_extendible_bound(dims, 1)


def test_g2_and_continuity():
    assert en.g2(0) == 0.0
    assert math.isclose(en.g2(1.0), 2.0)
    assert math.isclose(en.continuity_bound(1.0, ch.swap(2).dims), 6.0)
    assert math.isclose(en.cmi_continuity_bound(0.0, ch.tensor(ch.swap(2), ch.identity(2)).dims), 0.0)


@pytest.mark.parametrize("p,q", [(0.2, 0.25), (0.7, 0.9), (0.0, 1.0)])
def test_continuity_bound_holds(p, q):
    a, b = ch.white_noise_mixture(ch.cnot(), p), ch.white_noise_mixture(ch.cnot(), q)
    eps = dv.diamond_norm(a.choi.standard() - b.choi.standard(), 4, 4) / 2
    diff = abs(en.cond_vn_telecov(a).value - en.cond_vn_telecov(b).value)
    assert diff <= en.continuity_bound(min(eps, 1.0), a.dims) + 1e-8
