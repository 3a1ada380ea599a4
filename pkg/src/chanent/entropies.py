"""Entropic functionals of channels.

Closed forms hold for tele-covariant channels and are gated on
:func:`chanent.channels.tele_covariance_check`.  Min- and geometric Renyi
conditional entropies come from semidefinite programs.  The NS-entropy,
max-entropy and max-mutual information use seeded local searches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.optimize

from . import channels as ch
from . import divergences as dv
from . import linalg as la
from . import sdp
from .errors import DimensionError, DomainError, NotTeleCovariantError, SolverError

SDP_TOL = 1e-9


@dataclass
class EntropyReport:
    """Value of a channel functional in bits with its provenance.

    ``bound_kind`` is ``"exact"`` for closed forms and certified programs,
    ``"upper"`` or ``"lower"`` when only a one-sided guarantee holds.
    """

    functional: str
    value: float
    method: str
    bound_kind: str
    dims: ch.SystemDims | None = None
    diagnostics: dict = field(default_factory=dict)

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class AlphaSchedule:
    """Order ``alpha = 1 + 2^-ell`` of the geometric Renyi program."""

    ell: int

    def __post_init__(self):
        if int(self.ell) != self.ell or self.ell < 0:
            raise DomainError(f"ell must be a nonnegative integer, got {self.ell}")

    @property
    def alpha(self) -> float:
        return 1.0 + 2.0 ** (-self.ell)


# ----------------------------------------------------------------- helpers


def _parties(c: ch.Channel, n: int | None = None) -> list[str]:
    ps = c.dims.party_order()
    if n is not None and len(ps) != n:
        raise DimensionError(f"expected a channel with {n} parties, got {ps}")
    return ps


def _party_indices(dims: ch.SystemDims, parties: Sequence[str], with_ref: bool = True,
                   with_out: bool = True) -> list[int]:
    idx = []
    names = [n for n, _ in dims.choi_factors()]
    for p in parties:
        for i, n in enumerate(names):
            if (with_ref and n == "R_" + p) or (with_out and ch._party(n) == p and not n.startswith("R_")):
                idx.append(i)
    return sorted(idx)


def _telecov_gate(c: ch.Channel, override: bool) -> tuple[bool, float]:
    rep = ch.tele_covariance_check(c)
    if not rep.ok and not override:
        raise NotTeleCovariantError(f"channel {c.name} failed the tele-covariance check",
                                    {"covariance": rep.max_defect})
    return rep.ok, rep.max_defect


def _variable_kind(*mats: np.ndarray) -> str:
    return "symmetric" if all(np.abs(np.asarray(m).imag).max(initial=0) == 0 for m in mats) else "hermitian"


def _solve(p: sdp.SdpProblem, backend: str) -> sdp.SdpSolution:
    s = sdp.solve(p, tol=SDP_TOL, backend=backend)
    if s.status not in ("optimal", "inaccurate") or s.duality_gap > 1e-6 * (1 + abs(s.objective)) \
            or s.max_constraint_violation > 1e-7:
        raise SolverError(f"{p.name} ended with status {s.status} (gap {s.duality_gap:.2e}, "
                          f"violation {s.max_constraint_violation:.2e})", s.status, s.iterations)
    return s


def _sdp_diag(p: sdp.SdpProblem, s: sdp.SdpSolution) -> dict:
    v = sdp.verify(p, s)
    return {"gap": s.duality_gap, "violation": s.max_constraint_violation, "iterations": s.iterations,
            "verified": v.ok, "status": s.status, "backend": s.backend}


def _bipartite(c: ch.Channel):
    a, b = _parties(c, 2)
    dims = c.dims
    sizes = dims.choi_sizes()
    d_ra, d_a = dims.in_dim(a), dims.out_dim(a)
    d_rb, d_b = dims.in_dim(b), dims.out_dim(b)
    names = [n for n, _ in dims.choi_factors()]
    expected = [n for n in ("R_" + a, a, "R_" + b, b)
                if (n.startswith("R_") and dims.in_dim(n[2:]) and n in names) or n in names]
    if names != expected or names[:1] != ["R_" + a]:
        raise DimensionError(f"Choi factors {names} are not in the order R_A, A, R_B, B")
    return a, b, sizes, d_ra, d_a, d_rb, d_b


# ------------------------------------------------------- von Neumann paths


def cond_vn_telecov(c: ch.Channel, override: bool = False) -> EntropyReport:
    """``S[A|B] = S(R_A A | R_B B)_Phi - log|A'|`` for a tele-covariant bipartite channel.

    With ``override=True`` a channel failing the covariance check still gets
    the Choi value, reported as an upper bound.
    """
    a, b, sizes, d_ra, d_a, d_rb, d_b = _bipartite(c)
    ok, defect = _telecov_gate(c, override)
    phi = c.choi.state
    ia = _party_indices(c.dims, [a])
    ib = _party_indices(c.dims, [b])
    v = dv.state_cond_entropy(phi, sizes, ia, ib) - math.log2(d_ra)
    return EntropyReport("cond_vn", float(v), "closed_form", "exact" if ok else "upper", c.dims,
                         {"covariance_defect": defect})


def channel_entropy_telecov(c: ch.Channel, override: bool = False) -> EntropyReport:
    """Entropy of a tele-covariant channel, ``S(Phi) - log|in|``."""
    ok, defect = _telecov_gate(c, override)
    v = dv.vn_entropy(c.choi.state) - math.log2(c.dims.d_in)
    return EntropyReport("entropy_vn", float(v), "closed_form", "exact" if ok else "upper", c.dims,
                         {"covariance_defect": defect})


def cond_vn_noisy_swap_formula(d: int, p: float) -> float:
    """Closed form of ``S[A|B]`` for ``p * SWAP + (1 - p) * (replace by maximally mixed)``."""
    if not 0 <= p <= 1 or d < 2:
        raise DomainError("need p in [0, 1] and d >= 2")
    d4 = d ** 4
    top = p + (1 - p) / d4
    rest = (1 - p) / d4

    def xlogx(x):
        return x * math.log2(x) if x > 0 else 0.0

    return -xlogx(top) - (d4 - 1) * xlogx(rest) - 3 * math.log2(d)


def cond_vn_noisy_swap_printed(q: float) -> float:
    """The qubit closed form in the noise-weight convention ``q = 1 - p``."""
    if not 0 <= q <= 1:
        raise DomainError("q must lie in [0, 1]")

    def xlogx(x):
        return x * math.log2(x) if x > 0 else 0.0

    return -15 * xlogx(q / 16) - xlogx(1 - 15 * q / 16) - 3


def cond_vn_bounds(dims: ch.SystemDims) -> tuple[float, float]:
    """``(-log min{|A||B|^2, |A'||B'||B|}, log|A|)`` for a bipartite channel."""
    ps = dims.party_order()
    if len(ps) != 2:
        raise DimensionError("bounds need a bipartite channel")
    a, b = ps
    da_, db_ = dims.in_dim(a), dims.in_dim(b)
    da, db = dims.out_dim(a), dims.out_dim(b)
    return -math.log2(min(da * db * db, da_ * db_ * db)), math.log2(da)


# ------------------------------------------------------------- SDP paths


def cond_min_sdp(c: ch.Channel, backend: str = "internal") -> EntropyReport:
    """Conditional min-entropy from the program

    ``min tr(M)/|B'|`` s.t. ``Gamma <= 1_{R_A A} (x) M``, ``M >= 0``,
    ``tr_B M = tr(M) 1_{R_B} / |B'|``.
    """
    a, b, sizes, d_ra, d_a, d_rb, d_b = _bipartite(c)
    g = c.choi.matrix
    d1, d2 = d_ra * d_a, d_rb * d_b
    p = sdp.SdpProblem("cond_min")
    m = p.variable("M", d2, _variable_kind(g))
    p.add_psd(m.kron_left(np.eye(d1)) - g)
    p.add_psd(m)
    p.add_eq(m.ptrace([d_rb, d_b], [0]) - m.trace().times_identity(d_rb) / d_rb)
    p.minimize(m.trace() / d_rb)
    s = _solve(p, backend)
    return EntropyReport("cond_min", -math.log2(s.objective), "sdp", "exact", c.dims,
                         {**_sdp_diag(p, s), "objective": s.objective, "M": s.values["M"]})


def cond_geo_sdp(c: ch.Channel, schedule: AlphaSchedule | int, backend: str = "internal") -> EntropyReport:
    """Geometric Renyi conditional entropy of order ``1 + 2^-ell`` by semidefinite programming.

    The matrices ``Q_1..Q_ell`` and ``P`` are restricted to the support of
    ``Gamma``.  This is exact: a PSD block ``[[Gamma, Q], [Q, *]]`` forces the
    range of ``Q`` into that support, and the optimal ``P`` lives there too.
    """
    sch = schedule if isinstance(schedule, AlphaSchedule) else AlphaSchedule(int(schedule))
    ell = sch.ell
    a, b, sizes, d_ra, d_a, d_rb, d_b = _bipartite(c)
    g = c.choi.matrix
    d1, d2 = d_ra * d_a, d_rb * d_b
    v = la.support_isometry(g)
    if np.abs(v.imag).max(initial=0) < 1e-14:
        v = v.real
    r = v.shape[1]
    gam = la.hermitize(v.conj().T @ g @ v)
    kind = _variable_kind(g, v)
    p = sdp.SdpProblem(f"cond_geo_l{ell}")
    gm = p.variable("GM", d2, kind)
    y = p.scalar("y")
    pp = p.variable("P", r, kind)
    q0 = gm.kron_left(np.eye(d1))
    if ell == 0:
        p.add_psd(sdp.Affine.block([[pp, sdp.Rect(gam @ v.conj().T)],
                                    [sdp.Rect(v @ gam), q0]]))
    else:
        qs = [p.variable(f"Q{i}", r, kind) for i in range(1, ell + 1)]
        p.add_psd(sdp.Affine.block([[gam, sdp.Rect.from_affine(qs[0], right=v.conj().T)],
                                    [sdp.Rect.from_affine(qs[0], left=v), q0]]))
        for i in range(1, ell):
            p.add_psd(sdp.Affine.block([[gam, qs[i]], [qs[i], qs[i - 1]]]))
        p.add_psd(sdp.Affine.block([[pp, gam], [gam, qs[-1]]]))
    p.add_psd(gm)
    p.add_eq(gm.ptrace([d_rb, d_b], [0]) - np.eye(d_rb))
    full = [d_ra, d_a, d_rb, d_b]
    p.add_psd(y.times_identity(d_ra * d_rb) - pp.congruence(v).ptrace(full, [0, 2]))
    p.minimize(y)
    s = _solve(p, backend)
    ystar = s.objective
    val = -(2.0 ** ell) * math.log2(ystar)
    return EntropyReport(f"cond_geo(alpha={sch.alpha:g},ell={ell})", val, "sdp", "exact", c.dims,
                         {**_sdp_diag(p, s), "y": ystar, "alpha": sch.alpha, "ell": ell,
                          "support_rank": r, "GM": s.values["GM"]})


def geo_closed_form_y(c: ch.Channel, choi_m: np.ndarray, alpha: float) -> float:
    """``|| tr_AB G_alpha(1 (x) Gamma^M, Gamma^N) ||_inf`` at a fixed channel ``M``.

    This is ``G_{1-alpha}(Gamma^N, 1 (x) Gamma^M)`` written with the
    Hermitian-mean symmetry, which stays well defined when ``Gamma^N`` is
    singular.  The conditional entropy at ``M`` is ``-log(y) / (alpha - 1)``.
    """
    a, b, sizes, d_ra, d_a, d_rb, d_b = _bipartite(c)
    y_op = np.kron(np.eye(d_ra * d_a), choi_m)
    gmean = la.weighted_geometric_mean(y_op, c.choi.matrix, alpha)
    red = la.partial_trace(gmean, [d_ra, d_a, d_rb, d_b], [0, 2])
    return float(np.linalg.eigvalsh(la.hermitize(red))[-1])


# ------------------------------------------------------------ NS-entropy


def _out_layout(c: ch.Channel):
    dims = c.dims
    a = dims.party_order()[0]
    outs = dims.out_sizes
    labels = [l for l, _ in dims.out_dims]
    ia = [i for i, l in enumerate(labels) if ch._party(l) == a]
    if len(ia) != 1:
        raise DimensionError("the first party needs an output factor")
    return ia[0], outs


def _ns_objective(c: ch.Channel):
    d_in = c.dims.d_in
    ia, outs = _out_layout(c)
    dims_full = [d_in] + outs
    keep_rb = [0] + [1 + i for i in range(len(outs)) if i != ia]
    kraus = c.kraus
    n = d_in * d_in
    n_out = len(outs)

    def logm(rho):
        w, u = np.linalg.eigh(la.hermitize(rho))
        wc = np.maximum(w, 1e-14)
        ent = -float(np.sum(np.where(w > 1e-14, w * np.log2(np.maximum(w, 1e-300)), 0.0)))
        return ent, (u * np.log2(wc)[None, :]) @ u.conj().T

    def fun(x):
        psi = x[:n] + 1j * x[n:]
        nrm = np.linalg.norm(psi)
        psi_h = psi / nrm
        pm = psi_h.reshape(d_in, d_in)
        ws = [(pm @ k.T).reshape(-1) for k in kraus]
        wmat = np.stack(ws, axis=1)
        rho = wmat @ wmat.conj().T
        rho_rb = la.partial_trace(rho, dims_full, keep_rb)
        s_all, l_all = logm(rho)
        s_rb, l_rb = logm(rho_rb)
        # G = -log rho + 1_A (x) log rho_RB, in the (R, outputs) layout
        sub = [dims_full[i] for i in keep_rb]
        t = l_rb.reshape(sub + sub)
        letters = "abcdefgh"
        row = [letters[i] for i in range(n_out + 1)]
        col = [letters[i].upper() for i in range(n_out + 1)]
        ins = "".join(row[i] for i in keep_rb) + "".join(col[i] for i in keep_rb)
        col_full = list(col)
        col_full[1 + ia] = row[1 + ia]
        outsub = "".join(row) + "".join(col)
        eye_a = np.eye(outs[ia])
        emb = np.einsum(ins + "," + row[1 + ia] + col[1 + ia] + "->" + outsub, t, eye_a)
        gop = -l_all + emb.reshape(rho.shape)
        val = s_all - s_rb
        g = np.zeros(n, dtype=complex)
        for k, w in zip(kraus, ws):
            gw = (gop @ w).reshape(d_in, -1)
            g += (gw @ k.conj()).reshape(-1)
        g = (g - np.vdot(psi_h, g) * psi_h) / nrm
        return val, np.concatenate([2 * g.real, 2 * g.imag])

    return fun, n


def ns_cond_entropy(c: ch.Channel, restarts: int = 20, seed: int = 42) -> EntropyReport:
    """NS-entropy ``inf_psi S(A|RB)_{N(psi)}`` over pure ``psi`` on ``R A' B'`` with ``|R| = |A'||B'|``.

    Seeded restarts, each refined by L-BFGS with analytic gradients.  The
    value is an upper bound on the infimum.
    """
    if restarts < 1:
        raise DomainError("need at least one restart")
    fun, n = _ns_objective(c)
    seeds = np.random.SeedSequence(seed).spawn(restarts)
    vals = []
    best_x = None
    for ss in seeds:
        rng = np.random.default_rng(ss)
        x0 = rng.normal(size=2 * n)
        res = scipy.optimize.minimize(fun, x0, jac=True, method="L-BFGS-B",
                                      options={"maxiter": 5000, "ftol": 1e-15, "gtol": 1e-11})
        vals.append(float(res.fun))
        if best_x is None or res.fun <= min(vals):
            best_x = res.x
    vals_a = np.array(vals)
    best = float(vals_a.min())
    return EntropyReport("ns_cond", best, "heuristic", "upper", c.dims,
                         {"restarts": restarts, "seed": seed, "spread": float(vals_a.max() - best),
                          "median": float(np.median(vals_a))})


# ----------------------------------------------------------- max-entropy


def _dmin_weight_operator(c: ch.Channel, psi: np.ndarray):
    """Operator ``K`` with ``tr(Gamma^M K) = tr(Pi_{N(psi)} (1_A (x) (id (x) M)(psi_{RB'})))``."""
    d_in = c.dims.d_in
    a, b = _parties(c, 2)
    da_, db_ = c.dims.in_dim(a), c.dims.in_dim(b)
    da, db = c.dims.out_dim(a), c.dims.out_dim(b)
    pm = psi.reshape(d_in, d_in)
    ws = np.stack([(pm @ k.T).reshape(-1) for k in c.kraus], axis=1)
    u, sv, _ = np.linalg.svd(ws, full_matrices=False)
    rank = int(np.sum(sv > 1e-8 * sv[0]))
    u = u[:, :rank]
    proj = u @ u.conj().T
    p_rb = la.partial_trace(proj, [d_in, da, db], [0, 2]).reshape(d_in, db, d_in, db)
    full = np.outer(psi, psi.conj()).reshape(d_in, da_, db_, d_in, da_, db_)
    omega = np.einsum("raisaj->risj", full)
    k = np.einsum("risj,sgrb->jgib", omega, p_rb).reshape(db_ * db, db_ * db)
    return k


def cond_max(c: ch.Channel, restarts: int = 4, seed: int = 42, max_rounds: int = 20,
             backend: str = "internal") -> EntropyReport:
    """Heuristic conditional max-entropy ``-inf_M sup_psi D_min(N(psi) || (R (x) M)(psi))``.

    Cutting planes: for a finite set of inputs the outer problem over ``M`` is
    a semidefinite program.  A local search then looks for an input that beats
    the current ``M`` and adds it to the set.
    """
    a, b = _parties(c, 2)
    d_in = c.dims.d_in
    db_, db = c.dims.in_dim(b), c.dims.out_dim(b)
    n = d_in * d_in
    kind = "symmetric" if c.is_real() else "hermitian"
    rng = np.random.default_rng(seed)
    pool = [la.max_entangled(d_in)]
    for _ in range(2):
        z = rng.normal(size=n) + 1j * rng.normal(size=n)
        pool.append(z / np.linalg.norm(z))
    ks = [_dmin_weight_operator(c, psi) for psi in pool]
    t_star, m_star, history = None, None, []
    for rnd in range(max_rounds):
        p = sdp.SdpProblem("cond_max_outer")
        gm = p.variable("GM", db_ * db, kind)
        t = p.scalar("t")
        for k in ks:
            kk = la.hermitize(k)
            if kind == "symmetric":
                kk = kk.real
            p.add_psd(gm._map(lambda h, kk=kk: np.trace(h @ kk).reshape(1, 1)) - t)
        p.add_psd(gm)
        p.add_eq(gm.ptrace([db_, db], [0]) - np.eye(db_))
        p.maximize(t)
        s = _solve(p, backend)
        t_star, m_star = s.objective, s.values["GM"]

        def inner(x, m=m_star):
            psi = x[:n] + 1j * x[n:]
            psi = psi / np.linalg.norm(psi)
            return float(np.trace(m @ _dmin_weight_operator(c, psi)).real)

        best_val, best_psi = np.inf, None
        for _ in range(restarts):
            x0 = rng.normal(size=2 * n)
            res = scipy.optimize.minimize(inner, x0, method="L-BFGS-B",
                                          options={"maxiter": 300, "ftol": 1e-12})
            if res.fun < best_val:
                best_val = res.fun
                z = res.x[:n] + 1j * res.x[n:]
                best_psi = z / np.linalg.norm(z)
        history.append((t_star, best_val))
        if best_val >= t_star - 1e-6 * max(1.0, t_star):
            break
        ks.append(_dmin_weight_operator(c, best_psi))
    return EntropyReport("cond_max", math.log2(t_star), "heuristic", "upper", c.dims,
                         {"rounds": len(history), "history": history, "cuts": len(ks)})


# ---------------------------------------------------- mutual informations


def _groups_to_indices(c: ch.Channel, groups: Sequence[Sequence[str]] | None) -> list[list[int]]:
    ps = c.dims.party_order()
    groups = [[p] for p in ps] if groups is None else [list(g) for g in groups]
    flat = [p for g in groups for p in g]
    if sorted(flat) != sorted(ps):
        raise DimensionError(f"grouping {groups} does not partition the parties {ps}")
    return [_party_indices(c.dims, g) for g in groups]


def mi_telecov(c: ch.Channel, groups: Sequence[Sequence[str]] | None = None,
               override: bool = False) -> EntropyReport:
    """Multipartite mutual information ``I(R_A A; R_B B; ...)_Phi`` of a tele-covariant channel."""
    idx = _groups_to_indices(c, groups)
    ok, defect = _telecov_gate(c, override)
    v = dv.state_multipartite_mi(c.choi.state, c.dims.choi_sizes(), idx)
    return EntropyReport("mi", float(v), "closed_form", "exact" if ok else "lower", c.dims,
                         {"covariance_defect": defect})


def mi_choi_lower_bound(c: ch.Channel, groups: Sequence[Sequence[str]] | None = None) -> float:
    """Mutual information of the Choi state; a lower bound for any channel."""
    idx = _groups_to_indices(c, groups)
    return float(dv.state_multipartite_mi(c.choi.state, c.dims.choi_sizes(), idx))


def mi_max_alternating(c: ch.Channel, iters: int = 30, tol: float = 1e-6,
                       mix: float = 1e-7, backend: str = "internal") -> EntropyReport:
    """Upper bound on ``inf D_max(Phi^N || Phi^M1 (x) Phi^M2)`` by alternating over ``M1`` and ``M2``.

    Each half step is the program ``min lam`` s.t. ``Gamma^N <= W (x) Gamma^{M2}``,
    ``tr_A W = lam 1``.  The fixed factor is mixed with weight ``mix`` into
    the maximally mixed channel so the program keeps a strict interior;
    every reported value is attained by an actual product channel.
    """
    a, b, sizes, d_ra, d_a, d_rb, d_b = _bipartite(c)
    g = c.choi.matrix
    kind = _variable_kind(g)
    dep_a = np.eye(d_ra * d_a) / d_a
    dep_b = np.eye(d_rb * d_b) / d_b
    g2 = dep_b
    history = []
    best = np.inf
    g1 = dep_a
    for it in range(iters):
        for side in (0, 1):
            p = sdp.SdpProblem("mi_max_step")
            if side == 0:
                fixed = (1 - mix) * g2 + mix * dep_b
                w = p.variable("W", d_ra * d_a, kind)
                lam = p.scalar("lam")
                p.add_psd(w.kron_right(fixed) - g)
                p.add_eq(w.ptrace([d_ra, d_a], [0]) - lam.times_identity(d_ra))
            else:
                fixed = (1 - mix) * g1 + mix * dep_a
                w = p.variable("W", d_rb * d_b, kind)
                lam = p.scalar("lam")
                p.add_psd(w.kron_left(fixed) - g)
                p.add_eq(w.ptrace([d_rb, d_b], [0]) - lam.times_identity(d_rb))
            p.add_psd(w)
            p.minimize(lam)
            s = _solve(p, backend)
            lv = s.objective
            new = la.hermitize(s.values["W"]) / lv
            if side == 0:
                g1 = new
            else:
                g2 = new
            history.append(math.log2(lv))
        cur = history[-1]
        if cur < best - tol:
            best = cur
        else:
            best = min(best, cur)
            break
    return EntropyReport("mi_max", float(min(history)), "heuristic", "upper", c.dims,
                         {"history": history, "iterations": len(history) // 2})


def cmi_telecov(c: ch.Channel, override: bool = False) -> EntropyReport:
    """``I[A;C|B] = I(R_A A; C | R_B B R_C)_Phi`` for a tele-covariant tripartite channel."""
    a, b, cc = _parties(c, 3)
    ok, defect = _telecov_gate(c, override)
    ia = _party_indices(c.dims, [a])
    ic = _party_indices(c.dims, [cc], with_ref=False)
    ib = _party_indices(c.dims, [b]) + _party_indices(c.dims, [cc], with_out=False)
    v = dv.state_cmi(c.choi.state, c.dims.choi_sizes(), ia, ic, ib)
    return EntropyReport("cmi", float(v), "closed_form", "exact" if ok else "estimate", c.dims,
                         {"covariance_defect": defect})


def mi_based_cmi(c: ch.Channel, override: bool = False) -> EntropyReport:
    """``Delta[A;C|B] = I[A;BC] - I[A;B]`` from two mutual-information evaluations."""
    a, b, cc = _parties(c, 3)
    full = mi_telecov(c, [[a], [b, cc]], override)
    red = ch.reduced_channel(c, [cc])
    part = mi_telecov(red, [[a], [b, cc]], override)
    kind = "exact" if full.bound_kind == part.bound_kind == "exact" else "estimate"
    return EntropyReport("mi_based_cmi", full.value - part.value, "closed_form", kind, c.dims,
                         {"I_A_BC": full.value, "I_A_B": part.value})


# ------------------------------------------------------ arithmetic bounds


def k_extendible_bound(dims: ch.SystemDims, k: int) -> float:
    """Lower bound on ``S[A|B]`` for a k-extendible tele-covariant channel."""
    if k < 2:
        raise DomainError("k must be at least 2")
    a, b = dims.party_order()
    la_, lb_ = math.log2(dims.in_dim(a)), math.log2(dims.in_dim(b))
    la0, lb0 = math.log2(dims.out_dim(a)), math.log2(dims.out_dim(b))
    return -min(2.0 / k * lb0 - la0, (lb_ + lb0) / k - la_)


@dataclass
class QuestRates:
    r_a: float
    r_b: float

    @property
    def gap(self) -> float:
        return self.r_a - self.r_b


def quest_rates(c: ch.Channel, restarts: int = 20, seed: int = 42) -> QuestRates:
    """Stein rates ``R_a = -S[A|B] + log|A|`` and ``R_b = -S^NS[A|B] + log|A|``."""
    a = c.dims.party_order()[0]
    log_a = math.log2(c.dims.out_dim(a))
    s = cond_vn_telecov(c).value
    ns = ns_cond_entropy(c, restarts=restarts, seed=seed).value
    return QuestRates(-s + log_a, -ns + log_a)


def g2(eps: float) -> float:
    """``(1 + eps) log(1 + eps) - eps log eps`` with ``g2(0) = 0``."""
    if eps < 0:
        raise DomainError("eps must be nonnegative")
    return (1 + eps) * math.log2(1 + eps) - (eps * math.log2(eps) if eps > 0 else 0.0)


def continuity_bound(eps: float, dims: ch.SystemDims) -> float:
    """``2 eps log(|A'||A|) + g2(eps)`` for channels ``eps``-close in diamond norm."""
    if not 0 <= eps <= 1:
        raise DomainError("eps must lie in [0, 1]")
    a = dims.party_order()[0]
    return 2 * eps * math.log2(dims.in_dim(a) * dims.out_dim(a)) + g2(eps)


def cmi_continuity_bound(eps: float, dims: ch.SystemDims) -> float:
    """``2 eps log min{|A'||A|, |C|} + 2 g2(eps)`` for tripartite channels."""
    if not 0 <= eps <= 1:
        raise DomainError("eps must lie in [0, 1]")
    a, b, cc = dims.party_order()
    return 2 * eps * math.log2(min(dims.in_dim(a) * dims.out_dim(a), dims.out_dim(cc))) + 2 * g2(eps)
