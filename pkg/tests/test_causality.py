import math

import numpy as np
import pytest

from chanent import causality as ca
from chanent import channels as ch
from chanent import divergences as dv
from chanent import linalg as la
from chanent import samplers
from chanent.errors import DimensionError


def _signals(c, from_party, to_party, rng, trials=20):
    """Largest change of the ``to`` output when only the ``from`` input changes."""
    sizes = c.dims.in_sizes
    names = [l[0] for l, _ in c.dims.in_dims]
    outs = [l for l, _ in c.dims.out_dims]
    i = names.index(from_party)
    keep = [outs.index(to_party)]
    worst = 0.0
    for _ in range(trials):
        rest = [la.random_density_matrix(d, rng) for d in sizes]
        a, b = list(rest), list(rest)
        a[i] = la.random_density_matrix(sizes[i], rng)
        b[i] = la.random_density_matrix(sizes[i], rng)
        oa = la.partial_trace(c(la.kron(*a)), c.dims.out_sizes, keep)
        ob = la.partial_trace(c(la.kron(*b)), c.dims.out_sizes, keep)
        worst = max(worst, dv.trace_distance(oa, ob))
    return worst


@pytest.mark.parametrize("c", [ch.swap(2), ch.cnot()])
def test_signaling_channels(rng, c):
    rep = ca.semicausal_check(c, "A", "B")
    assert not rep.semicausal
    assert _signals(c, "A", "B", rng) > 1e-3


def test_cnot_signals_backwards_through_phase(rng):
    rep = ca.semicausal_check(ch.cnot(), "B", "A")
    assert not rep.semicausal and math.isclose(rep.defect, 1.0, abs_tol=1e-9)


def test_local_channels_are_semicausal(rng):
    c = ch.tensor(ch.identity(2), ch.depolarizing(0.5))
    for f, t in (("A", "B"), ("B", "A")):
        rep = ca.semicausal_check(c, f, t)
        assert rep.semicausal and rep.defect < 1e-12
        assert _signals(c, f, t, rng) < 1e-10


def test_defect_agrees_with_operational_test(rng):
    for _ in range(5):
        c = samplers.random_channel(4, 4, rng, rank=2)
        c = ch.Channel(c.kraus, ch.SystemDims.parties([2, 2]))
        rep = ca.semicausal_check(c, "A", "B")
        assert rep.semicausal == (_signals(c, "A", "B", rng) < 1e-8)


def test_unknown_labels():
    with pytest.raises(DimensionError):
        ca.semicausal_check(ch.swap(2), "Q", "B")


def test_witness():
    rep = ca.signaling_witness(ch.swap(2))
    assert rep.witness_fired and math.isclose(rep.witness_value, -3.0, abs_tol=1e-9)
    rep = ca.signaling_witness(ch.tensor(ch.identity(2), ch.depolarizing(0.3)))
    assert not rep.witness_fired


def test_witness_skips_non_covariant(rng):
    c = ch.tensor(samplers.random_channel(2, 2, rng), samplers.random_channel(2, 2, rng))
    rep = ca.signaling_witness(c)
    assert rep.witness_value is None and not rep.witness_fired and "witness" in rep.notes


def test_markov_check(rng):
    assert ca.markov_check(ch.tensor(ch.swap(2), ch.identity(2))).markov
    u = np.eye(8)[[0, 1, 2, 3, 5, 4, 7, 6]]
    rep = ca.markov_check(ch.unitary(u, [2, 2, 2]), eps=0.5)
    assert not rep.markov and rep.cmi > 0.5


def test_petz_recovers_markov_state(rng):
    a = la.random_density_matrix(2, rng)
    bc = la.random_density_matrix(4, rng)
    sigma = np.kron(a, bc)
    rec = ca.petz_recovery(sigma, [2, 2, 2], [1, 2])
    out = sum(k @ bc @ k.conj().T for k in rec.kraus)
    assert dv.fidelity(sigma, la.hermitize(out)) > 1 - 1e-9


def test_petz_requires_trailing_conditioning(rng):
    with pytest.raises(DimensionError):
        ca.petz_recovery(la.random_density_matrix(8, rng), [2, 2, 2], [0])


def test_choi_petz_on_products(rng):
    c = ch.tensor(ch.tensor(samplers.random_channel(2, 2, rng), samplers.random_channel(2, 2, rng)),
                  samplers.random_channel(2, 2, rng))
    rep = ca.choi_petz_recovery(c)
    assert rep.fidelity > 1 - 1e-7 and abs(rep.cmi) < 1e-8 and rep.tp_defect < 1e-7
