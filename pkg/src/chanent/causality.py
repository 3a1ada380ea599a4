"""Semicausality, signaling witnesses, Markov channels and Petz recovery."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import channels as ch
from . import divergences as dv
from . import entropies as en
from . import linalg as la
from .errors import DimensionError, NotTeleCovariantError

SEMICAUSAL_TOL = 1e-8
WITNESS_MARGIN = 1e-9


@dataclass
class CausalityReport:
    """Outcome of a signaling test in the direction ``from_in -> to_out``."""

    direction: tuple[str, str]
    semicausal: bool | None
    defect: float | None
    witness_value: float | None = None
    witness_fired: bool | None = None
    notes: dict = field(default_factory=dict)


def _resolve(c: ch.Channel, from_in: str, to_out: str) -> tuple[str, str]:
    fp, tp = ch._party(from_in), ch._party(to_out)
    if fp not in {ch._party(l) for l, _ in c.dims.in_dims}:
        raise DimensionError(f"no input labeled {from_in!r}", factor=from_in)
    if tp not in {ch._party(l) for l, _ in c.dims.out_dims}:
        raise DimensionError(f"no output labeled {to_out!r}", factor=to_out)
    return fp, tp


def semicausal_check(c: ch.Channel, from_in: str = "A", to_out: str = "B",
                     tol: float = SEMICAUSAL_TOL) -> CausalityReport:
    """Test whether input ``from_in`` cannot signal to output ``to_out``.

    With ``M`` the Choi operator after tracing every output except
    ``to_out`` and ``X = tr_{R_from} M / |from|``, the defect is
    ``|| M - 1_{R_from} (x) X ||_inf``.
    """
    fp, tp = _resolve(c, from_in, to_out)
    dims = c.dims
    names = [n for n, _ in dims.choi_factors()]
    sizes = dims.choi_sizes()
    keep = [i for i, n in enumerate(names) if n.startswith("R_") or ch._party(n) == tp]
    m = la.partial_trace(c.choi.matrix, sizes, keep)
    sub_names = [names[i] for i in keep]
    sub_sizes = [sizes[i] for i in keep]
    r = sub_names.index("R_" + fp)
    rest = [i for i in range(len(keep)) if i != r]
    d_r = sub_sizes[r]
    x = la.partial_trace(m, sub_sizes, rest) / d_r
    # rebuild 1_R (x) X in the original factor order
    rebuilt = np.kron(np.eye(d_r), x)
    order = [r] + rest
    inv = list(np.argsort(order))
    rebuilt = la.permute_factors(rebuilt, [sub_sizes[i] for i in order], inv)
    defect = float(np.linalg.norm(m - rebuilt, 2))
    return CausalityReport((from_in, to_out), defect <= tol, defect)


def signaling_witness(c: ch.Channel) -> CausalityReport:
    """Entropic witness of signaling from ``A'`` to ``B``.

    Fires when ``S[A|B] < -log|A|``.  Only the exact closed form is used, so
    a channel that fails the tele-covariance check is left unevaluated.
    """
    a, b = en._parties(c, 2)
    rep = semicausal_check(c, a, b)
    try:
        s = en.cond_vn_telecov(c).value
    except NotTeleCovariantError as exc:
        rep.notes["witness"] = f"not evaluated: {exc}"
        rep.witness_fired = False
        return rep
    rep.witness_value = s
    rep.witness_fired = bool(s < -math.log2(c.dims.out_dim(a)) - WITNESS_MARGIN)
    return rep


@dataclass
class MarkovReport:
    markov: bool
    approx_markov: bool | None
    cmi: float
    tol: float
    eps: float | None


def markov_check(c: ch.Channel, tol: float = 1e-7, eps: float | None = None) -> MarkovReport:
    """Markov channel test ``I[A;C|B] <= tol``; with ``eps`` also the approximate variant."""
    v = en.cmi_telecov(c).value
    return MarkovReport(v <= tol, None if eps is None else v <= eps, v, tol, eps)


def petz_recovery(sigma: np.ndarray, dims: Sequence[int], conditioning: Sequence[int]) -> ch.Channel:
    """Petz map recovering ``sigma`` from its marginal on ``conditioning``.

    ``R(X) = sigma^{1/2} (1_rest (x) s^{-1/2} X s^{-1/2}) sigma^{1/2}`` with
    ``s`` the marginal and inverses on supports.  The conditioning factors
    must come last in ``dims``; the map's output uses the factor order of
    ``sigma``.
    """
    dims = [int(d) for d in dims]
    cond = sorted(int(i) for i in conditioning)
    n = len(dims)
    if cond != list(range(n - len(cond), n)) or not cond:
        raise DimensionError("conditioning factors must be the trailing factors of sigma")
    d_rest = math.prod(dims[:n - len(cond)])
    marg = la.partial_trace(sigma, dims, cond)
    s_half = la.matrix_function(sigma, "sqrt")
    m_ih = la.matrix_function(marg, "inv_sqrt")
    kraus = []
    for i in range(d_rest):
        e = la.ket(d_rest, i).reshape(-1, 1)
        kraus.append(s_half @ np.kron(e, m_ih))
    in_dims = tuple((f"X{k}'", dims[k]) for k in cond)
    out_dims = tuple((f"Y{k}", d) for k, d in enumerate(dims))
    return ch.Channel(kraus, ch.SystemDims(in_dims, out_dims), name="petz", trace_preserving=False)


@dataclass
class PetzReport:
    fidelity: float
    cmi: float
    bound: float
    satisfies_bound: bool
    tp_defect: float


def choi_petz_recovery(c: ch.Channel) -> PetzReport:
    """Recover the Choi state of a tripartite channel from its ``R_B B R_C C`` marginal.

    The Petz map built from ``Phi_{R_A A R_B B R_C}`` acts on ``R_B B R_C``
    and leaves ``C`` untouched.
    """
    a, b, cc = en._parties(c, 3)
    names = [n for n, _ in c.dims.choi_factors()]
    if names != ["R_" + a, a, "R_" + b, b, "R_" + cc, cc]:
        raise DimensionError(f"unexpected Choi layout {names}")
    sizes = c.dims.choi_sizes()
    phi = c.choi.state
    sig = la.partial_trace(phi, sizes, [0, 1, 2, 3, 4])
    rec = petz_recovery(sig, sizes[:5], [2, 3, 4])
    marg = la.partial_trace(phi, sizes, [2, 3, 4, 5])
    d_c = sizes[5]
    out = sum(np.kron(k, np.eye(d_c)) @ marg @ np.kron(k, np.eye(d_c)).conj().T for k in rec.kraus)
    fid = dv.fidelity(la.hermitize(phi), la.hermitize(out))
    cmi = en.cmi_telecov(c, override=True).value
    proj = la.support_projector(la.partial_trace(sig, sizes[:5], [2, 3, 4]))
    tp = float(np.linalg.norm(rec.adjoint(np.eye(rec.dims.d_out)) - proj, 2))
    bound = 2.0 ** (-cmi)
    return PetzReport(fid, cmi, bound, bool(fid >= bound - 1e-9), tp)
