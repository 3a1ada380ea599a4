"""Seeded random channels and states for property tests and the acceptance suite."""

from __future__ import annotations

import math

import numpy as np

from . import channels as ch
from . import linalg as la

_H = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
_S = np.diag([1, 1j])


def random_channel(d_in: int, d_out: int, rng: np.random.Generator, rank: int | None = None,
                   name: str = "random") -> ch.Channel:
    """Random CPTP map from a Gaussian isometry of the given Kraus rank.

    The rank is raised to ``ceil(d_in / d_out)`` when smaller, the least
    rank admitting an isometry.
    """
    rank = d_in * d_out if rank is None else max(rank, -(-d_in // d_out))
    g = rng.normal(size=(rank * d_out, d_in)) + 1j * rng.normal(size=(rank * d_out, d_in))
    v = g @ la.matrix_function(g.conj().T @ g, "inv_sqrt")
    kraus = [v[i * d_out:(i + 1) * d_out] for i in range(rank)]
    return ch.Channel(kraus, ch.SystemDims.parties([d_in], [d_out]), name=name)


def random_clifford(n: int, rng: np.random.Generator, gates: int = 24) -> np.ndarray:
    """Product of random ``H``, ``S`` and ``CNOT`` gates on ``n`` qubits."""
    u = np.eye(2 ** n, dtype=complex)
    for _ in range(gates):
        kind = rng.integers(3) if n > 1 else rng.integers(2)
        if kind < 2:
            q = int(rng.integers(n))
            ops = [np.eye(2)] * n
            ops[q] = _H if kind == 0 else _S
            g = la.kron(*ops)
        else:
            i, j = rng.choice(n, size=2, replace=False)
            g = _cnot_between(n, int(i), int(j))
        u = g @ u
    return u


def _cnot_between(n: int, control: int, target: int) -> np.ndarray:
    d = 2 ** n
    m = np.zeros((d, d))
    for x in range(d):
        bits = [(x >> (n - 1 - k)) & 1 for k in range(n)]
        if bits[control]:
            bits[target] ^= 1
        y = sum(b << (n - 1 - k) for k, b in enumerate(bits))
        m[y, x] = 1
    return m


def random_pauli_probs(n: int, rng: np.random.Generator, support: int | None = None) -> np.ndarray:
    """Probability vector over the ``4^n`` Pauli products with random sparse support."""
    m = 4 ** n
    support = int(rng.integers(1, min(m, 6) + 1)) if support is None else support
    idx = rng.choice(m, size=support, replace=False)
    p = np.zeros(m)
    p[idx] = rng.dirichlet(np.ones(support))
    return p


def random_telecov(n: int, rng: np.random.Generator, name: str = "telecov") -> ch.Channel:
    """Clifford unitary after a random Pauli channel on ``n`` qubits, one qubit per party.

    Pauli conjugation commutes with the Pauli channel up to signs and a
    Clifford maps Paulis to Paulis, so the channel is covariant under the
    local Pauli group with local Pauli corrections.
    """
    pc = ch.pauli_channel(random_pauli_probs(n, rng), n)
    u = random_clifford(n, rng)
    kraus = [u @ k for k in pc.kraus]
    return ch.Channel(kraus, ch.SystemDims.parties([2] * n), name=name)


def random_state(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    return la.random_density_matrix(d, rng, rank)
