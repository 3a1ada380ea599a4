"""Acceptance criteria as callable checks.

Each check returns a :class:`CriterionResult`.  The ``full`` tier uses the
stated sample sizes; the ``fast`` tier uses smaller random samples with
identical tolerances.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import causality as ca
from . import channels as ch
from . import divergences as dv
from . import entropies as en
from . import linalg as la
from . import samplers

SEED = 42


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d} {self.name}: {self.detail}"


def _n(tier: str, full: int, fast: int) -> int:
    return full if tier == "full" else fast


def c01_swap(tier: str = "full") -> CriterionResult:
    errs, worst_t = [], 0.0
    for d in (2, 3):
        t = time.perf_counter()
        v = en.cond_vn_telecov(ch.swap(d)).value
        worst_t = max(worst_t, time.perf_counter() - t)
        errs.append(abs(v + 3 * math.log2(d)))
    ok = max(errs) <= 1e-9 and worst_t < 1.0
    return CriterionResult(1, "SWAP conditional entropy", ok,
                           f"max error {max(errs):.2e}, slowest {worst_t:.3f} s")


def c02_identity(tier: str = "full") -> CriterionResult:
    v = en.cond_vn_telecov(ch.identity(2, 2)).value
    return CriterionResult(2, "identity-gate reference", abs(v + 1) <= 1e-9, f"value {v:.12f}")


def c03_noisy_swap(tier: str = "full") -> CriterionResult:
    worst = 0.0
    for p in np.linspace(0, 1, 101):
        v = en.cond_vn_telecov(ch.white_noise_mixture(ch.swap(2), p)).value
        worst = max(worst, abs(v - en.cond_vn_noisy_swap_printed(1 - p)),
                    abs(v - en.cond_vn_noisy_swap_formula(2, p)))
    e1 = en.cond_vn_telecov(ch.white_noise_mixture(ch.swap(2), 1.0)).value
    e0 = en.cond_vn_telecov(ch.white_noise_mixture(ch.swap(2), 0.0)).value
    ok = worst <= 1e-8 and abs(e1 + 3) <= 1e-8 and abs(e0 - 1) <= 1e-8
    return CriterionResult(3, "noisy-SWAP curve", ok,
                           f"max deviation {worst:.2e}, endpoints {e1:.9f}, {e0:.9f}")


def cnot_oracle() -> float:
    """``S(R_A A R_B B) - S(R_B B) - 1`` from a direct eigendecomposition of the CNOT Choi state."""
    u = ch.cnot_unitary()
    vec = np.zeros(16)
    # |Gamma> in (R_A, R_B, A, B) layout, then (1 (x) U)
    for i in range(4):
        e = np.zeros(4)
        e[i] = 1
        vec += np.kron(e, u @ e)
    t = vec.reshape(2, 2, 2, 2)  # r_a, r_b, a, b
    m = t.transpose(1, 3, 0, 2).reshape(4, 4) / 2  # rows (r_b, b), cols (r_a, a)
    s = np.linalg.svd(m, compute_uv=False) ** 2
    s = s[s > 1e-15]
    ent_b = float(-np.sum(s * np.log2(s)))
    return 0.0 - ent_b - 1.0


def c04_cnot(tier: str = "full") -> CriterionResult:
    oracle = cnot_oracle()
    v = en.cond_vn_telecov(ch.cnot()).value
    ok = abs(oracle + 2) <= 1e-12 and abs(v + 2) <= 1e-9
    return CriterionResult(4, "CNOT endpoint", ok, f"value {v:.12f}, oracle {oracle:.12f}")


def c05_cond_min(tier: str = "full") -> CriterionResult:
    out, ok = [], True
    for c, target in ((ch.maxmix_replacer([2, 2]), 1.0), (ch.identity(2, 2), -1.0)):
        t = time.perf_counter()
        r = en.cond_min_sdp(c)
        dt = time.perf_counter() - t
        good = abs(r.value - target) <= 1e-5 and r.diagnostics["gap"] <= 1e-6 and dt < 10
        ok &= good
        out.append(f"{c.name}={r.value:.8f} gap {r.diagnostics['gap']:.1e} {dt:.2f}s")
    return CriterionResult(5, "conditional min-entropy SDP", bool(ok), "; ".join(out))


def figure_channels(u: ch.Channel, p: float) -> ch.Channel:
    return ch.identity_mixture(u, p)


def c06_geo_ordering(tier: str = "full") -> CriterionResult:
    worst_slack, worst_cf = np.inf, 0.0
    grid = np.linspace(0, 1, 11) if tier == "full" else np.linspace(0, 1, 5)
    for u in (ch.swap(2), ch.cnot()):
        for p in grid:
            c = figure_channels(u, p)
            vals = [en.cond_min_sdp(c).value]
            for ell in (0, 2, 4):
                r = en.cond_geo_sdp(c, ell)
                vals.append(r.value)
                if ell == 0:
                    y = en.geo_closed_form_y(c, r.diagnostics["GM"], 2.0)
                    worst_cf = max(worst_cf, abs(-math.log2(y) - r.value))
            worst_slack = min(worst_slack, min(np.diff(vals)))
    ok = worst_slack >= -1e-5 and worst_cf <= 1e-5
    return CriterionResult(6, "geometric Renyi ordering", bool(ok),
                           f"min consecutive difference {worst_slack:.2e}, closed-form mismatch {worst_cf:.2e}")


def random_product_channel(rng: np.random.Generator, k: int) -> ch.Channel:
    """Alternates generic random products with products of tele-covariant qubit channels."""
    if k % 2 == 0:
        return ch.tensor(samplers.random_channel(2, 2, rng), samplers.random_channel(2, 2, rng))
    return ch.tensor(samplers.random_telecov(1, rng), samplers.random_telecov(1, rng))


def c07_witness(tier: str = "full") -> CriterionResult:
    fired_ok = True
    notes = []
    for c in (ch.swap(2), ch.cnot()):
        rep = ca.signaling_witness(c)
        fired_ok &= bool(rep.witness_fired) and rep.defect > 1e-6
        notes.append(f"{c.name} fired={rep.witness_fired} defect={rep.defect:.3f}")
    rng = np.random.default_rng(SEED)
    n = _n(tier, 100, 20)
    false_fires, evaluated = 0, 0
    for k in range(n):
        rep = ca.signaling_witness(random_product_channel(rng, k))
        evaluated += rep.witness_value is not None
        if rep.witness_fired:
            false_fires += 1
        if rep.witness_fired and not rep.defect > 1e-6:
            fired_ok = False
    ok = fired_ok and false_fires == 0
    return CriterionResult(7, "signaling witness soundness", bool(ok),
                           "; ".join(notes) + f"; products fired {false_fires}/{n} ({evaluated} evaluated)")


def c08_semicausal_equality(tier: str = "full") -> CriterionResult:
    rng = np.random.default_rng(SEED)
    n = _n(tier, 20, 5)
    worst = 0.0
    for _ in range(n):
        c = ch.tensor(ch.identity(2), samplers.random_telecov(1, rng))
        worst = max(worst, abs(en.cond_vn_telecov(c).value - en.ns_cond_entropy(c, restarts=20).value))
    gap = en.ns_cond_entropy(ch.swap(2)).value - en.cond_vn_telecov(ch.swap(2)).value
    ok = worst <= 1e-3 and gap >= 1.9
    return CriterionResult(8, "semicausal equality", bool(ok), f"max |S - S_NS| {worst:.2e}, SWAP gap {gap:.6f}")


def c09_ssa(tier: str = "full") -> CriterionResult:
    rng = np.random.default_rng(SEED)
    n = _n(tier, 50, 10)
    min_cmi, worst = np.inf, 0.0
    for _ in range(n):
        c = samplers.random_telecov(3, rng)
        v = en.cmi_telecov(c).value
        min_cmi = min(min_cmi, v)
        worst = max(worst, abs(v - en.mi_based_cmi(c).value))
    ok = min_cmi >= -1e-7 and worst <= 1e-6
    return CriterionResult(9, "strong subadditivity", bool(ok),
                           f"min CMI {min_cmi:.3e}, max |CMI - Delta| {worst:.2e}")


def c10_stein(tier: str = "full") -> CriterionResult:
    errs = []
    for d in (2, 3):
        r = en.quest_rates(ch.swap(d))
        errs.append(abs(r.gap - 2 * math.log2(d)))
    return CriterionResult(10, "Stein rate gap", max(errs) <= 1e-8, f"max error {max(errs):.2e}")


def divergence_property_violations(n_pairs: int, seed: int = SEED) -> dict:
    """Largest violation of each divergence property over random pairs (dims <= 4)."""
    rng = np.random.default_rng(seed)
    worst = {"data_processing": 0.0, "alpha_monotonicity": 0.0, "ordering": 0.0}
    alphas_s = [0.5, 0.75, 1.5, 2.0, 3.0]
    for _ in range(n_pairs):
        d = int(rng.integers(2, 5))
        rho = la.random_density_matrix(d, rng, rank=int(rng.integers(1, d + 1)))
        sigma = la.random_density_matrix(d, rng)
        nch = samplers.random_channel(d, int(rng.integers(2, 5)), rng, rank=int(rng.integers(1, 4)))
        nr, ns = nch(rho), nch(sigma)
        pairs = [(dv.umegaki, None), (dv.d_max, None), (dv.d_min, None)]
        pairs += [(dv.sandwiched_renyi, a) for a in alphas_s]
        pairs += [(dv.geometric_renyi, a) for a in (1.25, 1.5, 2.0)]
        for f, a in pairs:
            args = () if a is None else (a,)
            before = f(rho, sigma, *args).value
            after = f(nr, ns, *args).value
            worst["data_processing"] = max(worst["data_processing"], after - before)
        sw = [dv.sandwiched_renyi(rho, sigma, a).value for a in alphas_s]
        worst["alpha_monotonicity"] = max(worst["alpha_monotonicity"], max(-np.diff(sw)))
        for a in (1.25, 1.5, 2.0):
            chain = [dv.d_min(rho, sigma).value, dv.umegaki(rho, sigma).value,
                     dv.sandwiched_renyi(rho, sigma, a).value, dv.geometric_renyi(rho, sigma, a).value,
                     dv.d_max(rho, sigma).value]
            worst["ordering"] = max(worst["ordering"], max(-np.diff(chain)))
    return worst


def c11_divergences(tier: str = "full") -> CriterionResult:
    n = _n(tier, 200, 40)
    w = divergence_property_violations(n)
    ok = max(w.values()) <= 1e-8
    return CriterionResult(11, "divergence properties", ok,
                           ", ".join(f"{k} {v:.1e}" for k, v in w.items()) + f" over {n} pairs")


def c12_petz(tier: str = "full") -> CriterionResult:
    rng = np.random.default_rng(SEED)
    n = _n(tier, 20, 5)
    worst = 1.0
    for _ in range(n):
        c = ch.tensor(ch.tensor(samplers.random_channel(2, 2, rng), samplers.random_channel(2, 2, rng)),
                      samplers.random_channel(2, 2, rng))
        worst = min(worst, ca.choi_petz_recovery(c).fidelity)
    info = []
    for _ in range(3):
        rep = ca.choi_petz_recovery(samplers.random_telecov(3, rng))
        info.append(f"F={rep.fidelity:.4f} vs 2^-CMI={rep.bound:.4f}")
    ok = worst >= 1 - 1e-7
    return CriterionResult(12, "Petz recovery", ok, f"min Markov fidelity {worst:.10f}; non-Markov: "
                           + ", ".join(info))


CRITERIA: list[Callable[[str], CriterionResult]] = [
    c01_swap, c02_identity, c03_noisy_swap, c04_cnot, c05_cond_min, c06_geo_ordering,
    c07_witness, c08_semicausal_equality, c09_ssa, c10_stein, c11_divergences, c12_petz,
]


def run(tier: str = "fast") -> list[CriterionResult]:
    if tier not in ("fast", "full"):
        raise ValueError("tier must be 'fast' or 'full'")
    return [f(tier) for f in CRITERIA]
