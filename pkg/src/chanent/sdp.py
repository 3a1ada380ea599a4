"""Small semidefinite programs over Hermitian matrix variables.

Problems are written with :class:`Affine` expressions, i.e. a constant matrix
plus linear maps applied to variables.  Compilation expands each variable in a
real basis and realifies complex data, giving the linear matrix inequality form

    minimize  c^T y   subject to   F_k(y) = F_k0 + sum_i y_i F_ki >= 0,   E y = f.

The default backend is a primal-dual path-following method (HKM search
direction with Mehrotra predictor-corrector).  Equalities are kept as
constraints with dual multipliers.  An optional backend hands the same compiled
data to ``cvxpy``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from . import linalg as la
from .errors import DimensionError, SolverError

# ------------------------------------------------------------------ modeling


@dataclass(eq=False)
class Variable:
    """A Hermitian (or real symmetric) matrix variable of size ``dim``."""

    name: str
    dim: int
    kind: str = "hermitian"

    def __post_init__(self):
        if self.kind not in ("hermitian", "symmetric"):
            raise ValueError(f"unknown variable kind {self.kind!r}")

    @property
    def nparams(self) -> int:
        n = self.dim
        return n * n if self.kind == "hermitian" else n * (n + 1) // 2

    def basis(self) -> list[np.ndarray]:
        n = self.dim
        out = []
        for a in range(n):
            e = np.zeros((n, n), dtype=complex)
            e[a, a] = 1
            out.append(e)
        for a in range(n):
            for b in range(a + 1, n):
                e = np.zeros((n, n), dtype=complex)
                e[a, b] = e[b, a] = 1
                out.append(e)
        if self.kind == "hermitian":
            for a in range(n):
                for b in range(a + 1, n):
                    e = np.zeros((n, n), dtype=complex)
                    e[a, b], e[b, a] = 1j, -1j
                    out.append(e)
        return out

    def assemble(self, y: np.ndarray) -> np.ndarray:
        n = self.dim
        h = np.zeros((n, n), dtype=complex)
        h[np.diag_indices(n)] = y[:n]
        iu = np.triu_indices(n, 1)
        k = len(iu[0])
        h[iu] = y[n:n + k]
        if self.kind == "hermitian":
            h[iu] = h[iu] + 1j * y[n + k:n + 2 * k]
        h[(iu[1], iu[0])] = h[iu].conj()
        return h

    def flatten(self, h: np.ndarray) -> np.ndarray:
        n = self.dim
        iu = np.triu_indices(n, 1)
        parts = [h[np.diag_indices(n)].real, h[iu].real]
        if self.kind == "hermitian":
            parts.append(h[iu].imag)
        return np.concatenate(parts)

    def __repr__(self):
        return f"Variable({self.name!r}, {self.dim}, {self.kind})"


LinearMap = Callable[[np.ndarray], np.ndarray]


class Affine:
    """Square matrix-valued affine expression ``const + sum_t f_t(var_t)``."""

    __array_ufunc__ = None  # make ``ndarray - Affine`` defer to Affine

    def __init__(self, const: np.ndarray, terms: Sequence[tuple[Variable, LinearMap]] = ()):
        self.const = np.asarray(const, dtype=complex)
        if self.const.ndim != 2 or self.const.shape[0] != self.const.shape[1]:
            raise DimensionError(f"affine expressions must be square, got {self.const.shape}")
        self.terms = list(terms)

    @property
    def dim(self) -> int:
        return self.const.shape[0]

    @classmethod
    def of(cls, v: Variable) -> "Affine":
        return cls(np.zeros((v.dim, v.dim)), [(v, lambda h: h)])

    @classmethod
    def lift(cls, x) -> "Affine":
        if isinstance(x, Affine):
            return x
        if isinstance(x, Variable):
            return cls.of(x)
        x = np.asarray(x, dtype=complex)
        if x.ndim == 0:
            x = x.reshape(1, 1)
        return cls(x)

    def _map(self, g: Callable[[np.ndarray], np.ndarray]) -> "Affine":
        return Affine(g(self.const), [(v, (lambda h, f=f: g(f(h)))) for v, f in self.terms])

    def __add__(self, other) -> "Affine":
        o = Affine.lift(other)
        if o.dim != self.dim:
            raise DimensionError(f"cannot add {self.dim}x{self.dim} and {o.dim}x{o.dim}")
        return Affine(self.const + o.const, self.terms + o.terms)

    __radd__ = __add__

    def __neg__(self) -> "Affine":
        return self._map(lambda h: -h)

    def __sub__(self, other) -> "Affine":
        return self + (-Affine.lift(other))

    def __rsub__(self, other) -> "Affine":
        return Affine.lift(other) - self

    def __mul__(self, s: float) -> "Affine":
        if not np.isscalar(s):
            raise TypeError("only scalar multiplication is supported")
        return self._map(lambda h: s * h)

    __rmul__ = __mul__

    def __truediv__(self, s: float) -> "Affine":
        return self * (1.0 / s)

    def kron_left(self, a: np.ndarray) -> "Affine":
        """``a (x) self``."""
        return self._map(lambda h: np.kron(a, h))

    def kron_right(self, b: np.ndarray) -> "Affine":
        """``self (x) b``."""
        return self._map(lambda h: np.kron(h, b))

    def congruence(self, a: np.ndarray) -> "Affine":
        """``a self a^dagger``."""
        a = np.asarray(a)
        return self._map(lambda h: a @ h @ a.conj().T)

    def ptrace(self, dims: Sequence[int], keep: Sequence[int]) -> "Affine":
        return self._map(lambda h: la.partial_trace(h, dims, keep))

    def trace(self) -> "Affine":
        return self._map(lambda h: np.trace(h).reshape(1, 1))

    def times_identity(self, n: int) -> "Affine":
        """For a 1x1 expression ``t``, the expression ``t * 1_n``."""
        if self.dim != 1:
            raise DimensionError("times_identity needs a 1x1 expression")
        return self._map(lambda h: h[0, 0] * np.eye(n))

    def value(self, values: dict) -> np.ndarray:
        out = self.const.copy()
        for v, f in self.terms:
            out = out + f(values[v.name])
        return out

    @staticmethod
    def block(rows: Sequence[Sequence]) -> "Affine":
        """Block matrix; ``None`` entries are zero blocks.  Sizes are read per row and column."""
        nr = len(rows)
        # off-diagonal blocks may be rectangular, so sizes come from the diagonal
        sizes = [Affine._block_size(rows[i][i]) for i in range(nr)]
        offs = np.concatenate([[0], np.cumsum(sizes)])
        n = int(offs[-1])

        def place(parts):
            out = np.zeros((n, n), dtype=complex)
            for (i, j), m in parts:
                out[offs[i]:offs[i + 1], offs[j]:offs[j + 1]] = m
            return out

        const_parts = []
        terms = []
        for i, row in enumerate(rows):
            for j, e in enumerate(row):
                if e is None:
                    continue
                if isinstance(e, Rect):
                    const_parts.append(((i, j), e.const))
                    for v, f in e.terms:
                        terms.append((v, (lambda h, f=f, i=i, j=j: place([((i, j), f(h))]))))
                    continue
                a = Affine.lift(e)
                const_parts.append(((i, j), a.const))
                for v, f in a.terms:
                    terms.append((v, (lambda h, f=f, i=i, j=j: place([((i, j), f(h))]))))
        return Affine(place(const_parts), terms)

    @staticmethod
    def _block_size(e) -> int:
        if isinstance(e, Rect):
            return e.const.shape[0]
        return Affine.lift(e).dim


class Rect:
    """Rectangular affine expression, only used as an off-diagonal block."""

    def __init__(self, const: np.ndarray, terms: Sequence[tuple[Variable, LinearMap]] = ()):
        self.const = np.asarray(const, dtype=complex)
        self.terms = list(terms)

    @classmethod
    def from_affine(cls, a: Affine, left: np.ndarray | None = None, right: np.ndarray | None = None) -> "Rect":
        """``left @ a @ right`` with either factor optional."""
        lm = (lambda h: h) if left is None else (lambda h: left @ h)
        rm = (lambda h: h) if right is None else (lambda h: h @ right)
        return cls(rm(lm(a.const)), [(v, (lambda h, f=f: rm(lm(f(h))))) for v, f in a.terms])

    def adjoint(self) -> "Rect":
        return Rect(self.const.conj().T, [(v, (lambda h, f=f: f(h).conj().T)) for v, f in self.terms])


class SdpProblem:
    """Container for variables, PSD constraints, equalities and a real linear objective."""

    def __init__(self, name: str = "sdp"):
        self.name = name
        self.variables: list[Variable] = []
        self.psd: list[Affine] = []
        self.eqs: list[Affine] = []
        self.objective: Affine | None = None
        self.sense = "min"

    def variable(self, name: str, dim: int, kind: str = "hermitian") -> Affine:
        if any(v.name == name for v in self.variables):
            raise ValueError(f"duplicate variable {name!r}")
        v = Variable(name, dim, kind)
        self.variables.append(v)
        return Affine.of(v)

    def scalar(self, name: str) -> Affine:
        return self.variable(name, 1, "symmetric")

    def add_psd(self, expr) -> None:
        expr = Affine.lift(expr)
        d = la.hermiticity_defect(expr.const)
        if d > 1e-9 * max(1.0, float(np.abs(expr.const).max())):
            raise DimensionError("PSD constraint has a non-Hermitian constant part")
        self.psd.append(expr)

    def add_eq(self, expr) -> None:
        self.eqs.append(Affine.lift(expr))

    def minimize(self, expr) -> None:
        self.objective, self.sense = self._scalar_obj(expr), "min"

    def maximize(self, expr) -> None:
        self.objective, self.sense = self._scalar_obj(expr), "max"

    @staticmethod
    def _scalar_obj(expr) -> Affine:
        expr = Affine.lift(expr)
        if expr.dim != 1:
            raise DimensionError("objective must be a 1x1 expression")
        return expr


# -------------------------------------------------------------- compilation


def realify(h: np.ndarray) -> np.ndarray:
    """Map a Hermitian matrix to the real symmetric ``[[Re H, -Im H], [Im H, Re H]]``."""
    h = np.asarray(h)
    return np.block([[h.real, -h.imag], [h.imag, h.real]])


@dataclass
class _Block:
    n: int
    f0: np.ndarray
    fmat: sp.csc_matrix          # (n*n, nparams), column i is vec(F_i)
    complex_size: int
    realified: bool


@dataclass
class Compiled:
    """LMI data of a problem: ``min c.y + c0`` s.t. blocks PSD and ``E y = f``."""

    c: np.ndarray
    c0: float
    blocks: list
    E: np.ndarray
    f: np.ndarray
    offsets: dict
    sign: float
    nparams: int
    eq_inconsistency: float


def _param_offsets(p: SdpProblem) -> tuple[dict, int]:
    offs, k = {}, 0
    for v in p.variables:
        offs[v.name] = k
        k += v.nparams
    return offs, k


def _linear_images(expr: Affine, p: SdpProblem, offs: dict, nparams: int) -> tuple[np.ndarray, list]:
    """Constant part and a list of ``(param index, complex matrix)`` pairs."""
    by_var: dict[str, list] = {}
    for v, f in expr.terms:
        by_var.setdefault(v.name, []).append(f)
    vars_by_name = {v.name: v for v in p.variables}
    images = []
    for name, fs in by_var.items():
        if name not in vars_by_name:
            raise DimensionError(f"expression uses variable {name!r} that is not in the problem")
        v = vars_by_name[name]
        for j, b in enumerate(v.basis()):
            m = sum(f(b) for f in fs)
            if np.any(m != 0):
                images.append((offs[name] + j, m))
    return expr.const, images


def compile_problem(p: SdpProblem) -> Compiled:
    if p.objective is None:
        raise ValueError("problem has no objective")
    offs, nparams = _param_offsets(p)
    sign = 1.0 if p.sense == "min" else -1.0
    c0_mat, cimgs = _linear_images(p.objective, p, offs, nparams)
    c = np.zeros(nparams)
    for i, m in cimgs:
        c[i] += sign * m[0, 0].real
    c0 = sign * float(c0_mat[0, 0].real)

    blocks = []
    for expr in p.psd:
        const, imgs = _linear_images(expr, p, offs, nparams)
        is_real = np.abs(const.imag).max(initial=0) == 0 and all(
            np.abs(m.imag).max(initial=0) == 0 for _, m in imgs)
        conv = (lambda m: m.real) if is_real else realify
        f0 = conv(la.hermitize(const))
        n = f0.shape[0]
        rows, cols, vals = [], [], []
        for i, m in imgs:
            r = conv(m)
            nz = np.flatnonzero(r)
            rows.append(nz)
            cols.append(np.full(nz.size, i))
            vals.append(r.ravel()[nz])
        if rows:
            fmat = sp.csc_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                                 shape=(n * n, nparams))
        else:
            fmat = sp.csc_matrix((n * n, nparams))
        blocks.append(_Block(n, f0, fmat, expr.dim, not is_real))

    rows_e, rhs = [], []
    for expr in p.eqs:
        const, imgs = _linear_images(expr, p, offs, nparams)
        d = expr.dim
        iu = np.triu_indices(d, 1)

        def realparts(m):
            return np.concatenate([m[np.diag_indices(d)].real, m[iu].real, m[iu].imag,
                                   m[np.diag_indices(d)].imag])

        block = np.zeros((d * d + d, nparams))
        for i, m in imgs:
            block[:, i] += realparts(m)
        rows_e.append(block)
        rhs.append(-realparts(const))
    if rows_e:
        E = np.vstack(rows_e)
        f = np.concatenate(rhs)
        u, s, _ = np.linalg.svd(E, full_matrices=False)
        r = int(np.sum(s > 1e-10 * max(1.0, s.max(initial=0))))
        ur = u[:, :r]
        incons = float(np.linalg.norm(f - ur @ (ur.T @ f)))
        E = ur.T @ E
        f = ur.T @ f
    else:
        E = np.zeros((0, nparams))
        f = np.zeros(0)
        incons = 0.0
    return Compiled(c, c0, blocks, E, f, offs, sign, nparams, incons)


# ------------------------------------------------------------------ solution


@dataclass
class SdpSolution:
    """Result of a solve.  ``objective`` is in the problem's own sense."""

    values: dict
    objective: float
    duality_gap: float
    max_constraint_violation: float
    status: str
    iterations: int = 0
    dual_objective: float = float("nan")
    duals: dict = field(default_factory=dict)
    backend: str = "internal"


def _extract_values(p: SdpProblem, comp: Compiled, y: np.ndarray) -> dict:
    return {v.name: v.assemble(y[comp.offsets[v.name]:comp.offsets[v.name] + v.nparams])
            for v in p.variables}


def _violation(p: SdpProblem, values: dict) -> float:
    worst = 0.0
    for expr in p.psd:
        m = la.hermitize(expr.value(values))
        worst = max(worst, -float(np.linalg.eigvalsh(m)[0]))
    for expr in p.eqs:
        worst = max(worst, float(np.abs(expr.value(values)).max()))
    return max(worst, 0.0)


# ------------------------------------------------------------------- solver


def _fstar(blk: _Block, y: np.ndarray) -> np.ndarray:
    return (blk.fmat @ y).reshape(blk.n, blk.n)


def _fop(blk: _Block, x: np.ndarray) -> np.ndarray:
    return blk.fmat.T @ x.ravel()


class _SchurPlan:
    """Precomputed sparsity data for ``M_ij = tr(F_i X F_j S^{-1})`` on one block."""

    def __init__(self, blk: _Block):
        coo = blk.fmat.tocoo()
        n = blk.n
        self.cols = np.unique(coo.col)
        m = len(self.cols)
        nnz = coo.nnz
        pair_cost = float(nnz) ** 2
        dense_cost = 2.0 * m * n ** 3 + float(m) ** 2 * n * n
        self.mode = "pair" if pair_cost <= dense_cost else "dense"
        if self.mode == "pair":
            self.p = coo.row // n
            self.q = coo.row % n
            self.v = coo.data
            local = np.searchsorted(self.cols, coo.col)
            self.P = sp.csr_matrix((np.ones(nnz), (np.arange(nnz), local)), shape=(nnz, m))
        else:
            self.dense = np.asarray(blk.fmat[:, self.cols].todense()).T.reshape(m, n, n)

    def schur(self, x: np.ndarray, sinv: np.ndarray) -> np.ndarray:
        if self.mode == "pair":
            w = np.outer(self.v, self.v) * x[np.ix_(self.q, self.p)] * sinv[np.ix_(self.p, self.q)]
            return np.asarray((self.P.T @ (self.P.T @ w.T).T))
        t = np.matmul(np.matmul(x, self.dense), sinv)
        m = len(self.cols)
        return self.dense.reshape(m, -1) @ t.transpose(0, 2, 1).reshape(m, -1).T


def _max_step(x: np.ndarray, dx: np.ndarray) -> float:
    try:
        l = np.linalg.cholesky(x)
    except np.linalg.LinAlgError:
        return 0.0
    li = scipy.linalg.solve_triangular(l, dx, lower=True)
    m = scipy.linalg.solve_triangular(l, li.T, lower=True)
    lam = np.linalg.eigvalsh(0.5 * (m + m.T))[0]
    return np.inf if lam >= 0 else -1.0 / lam


def _solve_kkt(m: np.ndarray, E: np.ndarray, h: np.ndarray, re: np.ndarray):
    n = m.shape[0]
    reg = 1e-14 * max(1.0, float(np.abs(np.diag(m)).max(initial=1.0)))
    try:
        cf = scipy.linalg.cho_factor(m + reg * np.eye(n), lower=True, check_finite=False)
        msolve = lambda b: scipy.linalg.cho_solve(cf, b, check_finite=False)
    except np.linalg.LinAlgError:
        lu = scipy.linalg.lu_factor(m + 1e-10 * max(1.0, float(np.abs(m).max())) * np.eye(n))
        msolve = lambda b: scipy.linalg.lu_solve(lu, b)
    if E.shape[0] == 0:
        return msolve(h), np.zeros(0)
    mih = msolve(h)
    mie = msolve(E.T)
    k = E @ mie
    dl = np.linalg.lstsq(k, re - E @ mih, rcond=1e-14)[0]
    return mih + mie @ dl, dl


def _solve_internal(comp: Compiled, tol: float, max_iter: int):
    blocks = comp.blocks
    c, E, f = comp.c, comp.E, comp.f
    m = comp.nparams
    plans = [_SchurPlan(b) for b in blocks]
    ntot = sum(b.n for b in blocks)

    y = np.zeros(m)
    lam = np.zeros(E.shape[0])
    xs, ss = [], []
    normc = np.linalg.norm(c)
    for b in blocks:
        fnorms = np.sqrt(np.asarray(b.fmat.multiply(b.fmat).sum(axis=0))).ravel()
        amax = max(fnorms.max(initial=0.0), np.linalg.norm(b.f0))
        xi = max(10.0, math.sqrt(b.n), b.n * max(1.0, normc) / (1.0 + fnorms[fnorms > 0].min(initial=1.0)))
        eta = max(10.0, math.sqrt(b.n), amax)
        xs.append(xi * np.eye(b.n))
        ss.append(eta * np.eye(b.n))

    normf0 = math.sqrt(sum(np.linalg.norm(b.f0) ** 2 for b in blocks))
    best = None
    status = "maxiter"
    it = 0
    for it in range(1, max_iter + 1):
        fy = [b.f0 + _fstar(b, y) for b in blocks]
        rd = [fy[k] - ss[k] for k in range(len(blocks))]
        fx = sum(_fop(b, xs[k]) for k, b in enumerate(blocks)) if blocks else np.zeros(m)
        r1 = c - fx - E.T @ lam
        re = f - E @ y
        mu = sum(np.vdot(xs[k], ss[k]).real for k in range(len(blocks))) / max(ntot, 1)
        pobj = c @ y
        dobj = -sum(np.vdot(b.f0, xs[k]).real for k, b in enumerate(blocks)) + f @ lam
        gap = pobj - dobj
        relgap = abs(gap) / (1 + abs(pobj) + abs(dobj))
        pinf = max(math.sqrt(sum(np.linalg.norm(r) ** 2 for r in rd)) / (1 + normf0),
                   np.linalg.norm(re) / (1 + np.linalg.norm(f)))
        dinf = np.linalg.norm(r1) / (1 + normc)
        score = max(relgap, pinf, dinf)
        if best is None or score < best[0]:
            best = (score, y.copy(), lam.copy(), [x.copy() for x in xs], pobj, dobj)
        if relgap <= tol and pinf <= tol and dinf <= tol:
            status = "optimal"
            break
        # certificates of infeasibility or unboundedness
        xnorm = max(np.linalg.norm(x) for x in xs) if xs else 0.0
        if dobj > 0 and xnorm > 1e8 and np.linalg.norm(fx + E.T @ lam) <= 1e-6 * dobj:
            status = "infeasible"
            break
        ynorm = np.linalg.norm(y)
        if pobj < 0 and ynorm > 1e8 and (np.linalg.norm(E @ y) <= 1e-6 * -pobj):
            homog = [(_fstar(b, y)) / -pobj for b in blocks]
            if all(np.linalg.eigvalsh(0.5 * (h + h.T))[0] >= -1e-6 for h in homog):
                status = "unbounded"
                break

        sinvs = []
        for s_ in ss:
            try:
                sinvs.append(scipy.linalg.cho_solve(scipy.linalg.cho_factor(s_), np.eye(s_.shape[0])))
            except np.linalg.LinAlgError:
                sinvs.append(np.linalg.inv(s_))
        M = np.zeros((m, m))
        for k, plan in enumerate(plans):
            if len(plan.cols):
                M[np.ix_(plan.cols, plan.cols)] += plan.schur(xs[k], sinvs[k])
        M = 0.5 * (M + M.T)

        def direction(rc_sinv):
            g = [rc_sinv[k] - xs[k] @ rd[k] @ sinvs[k] for k in range(len(blocks))]
            h = sum(_fop(b, g[k]) for k, b in enumerate(blocks)) - r1 if blocks else -r1
            dy, dl = _solve_kkt(M, E, h, re)
            ds = [rd[k] + _fstar(b, dy) for k, b in enumerate(blocks)]
            dx = []
            for k in range(len(blocks)):
                t = rc_sinv[k] - xs[k] @ ds[k] @ sinvs[k]
                dx.append(0.5 * (t + t.T))
            return dy, dl, dx, ds

        def steps(dx, ds):
            ap = min([1.0] + [_max_step(xs[k], dx[k]) for k in range(len(blocks))])
            ad = min([1.0] + [_max_step(ss[k], ds[k]) for k in range(len(blocks))])
            return ap, ad

        # predictor
        dy, dl, dx, ds = direction([-x for x in xs])
        ap, ad = steps(dx, ds)
        mu_aff = sum(np.vdot(xs[k] + ap * dx[k], ss[k] + ad * ds[k]).real
                     for k in range(len(blocks))) / max(ntot, 1)
        expon = max(1.0, 3.0 * min(ap, ad) ** 2)
        sigma = min(1.0, (max(mu_aff, 0.0) / mu) ** expon) if mu > 0 else 0.0
        # corrector
        rcs = [sigma * mu * sinvs[k] - xs[k] - dx[k] @ ds[k] @ sinvs[k] for k in range(len(blocks))]
        dy, dl, dx, ds = direction(rcs)
        ap, ad = steps(dx, ds)
        gamma = 0.9 + 0.09 * min(ap, ad)
        ap, ad = min(1.0, gamma * ap), min(1.0, gamma * ad)
        if ap < 1e-12 and ad < 1e-12:
            break
        xs = [xs[k] + ap * dx[k] for k in range(len(blocks))]
        ss = [ss[k] + ad * ds[k] for k in range(len(blocks))]
        y = y + ad * dy
        lam = lam + ap * dl
    if status != "optimal" and status not in ("infeasible", "unbounded"):
        status = "maxiter"
        _, y, lam, xs, pobj, dobj = best
    return status, y, lam, xs, pobj, dobj, it


def solve(p: SdpProblem, tol: float = 1e-7, max_iter: int = 200, backend: str = "internal",
          raise_on_failure: bool = False) -> SdpSolution:
    """Solve an :class:`SdpProblem`.

    Parameters
    ----------
    tol : float
        Target relative duality gap and relative primal/dual residuals.
    backend : {"internal", "cvxpy"}
        ``"cvxpy"`` hands the compiled data to cvxpy with the Clarabel solver.
    raise_on_failure : bool
        Raise :class:`SolverError` instead of returning a non-optimal status.
    """
    comp = compile_problem(p)
    if comp.eq_inconsistency > 1e-7:
        sol = SdpSolution({}, float("nan"), float("nan"), comp.eq_inconsistency, "infeasible")
        if raise_on_failure:
            raise SolverError("equality constraints are inconsistent", "infeasible")
        return sol
    if backend == "internal":
        status, y, lam, xs, pobj, dobj, it = _solve_internal(comp, tol, max_iter)
    elif backend == "cvxpy":
        status, y, lam, xs, pobj, dobj, it = _solve_cvxpy(comp, tol)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    values = _extract_values(p, comp, y)
    obj = comp.sign * (pobj + comp.c0)
    dual = comp.sign * (dobj + comp.c0)
    sol = SdpSolution(values=values, objective=float(obj), duality_gap=float(abs(pobj - dobj)),
                      max_constraint_violation=_violation(p, values), status=status, iterations=it,
                      dual_objective=float(dual), duals={"blocks": xs, "eq": lam}, backend=backend)
    if sol.status == "optimal" and (sol.duality_gap > 1e-6 * (1 + abs(sol.objective))
                                    or sol.max_constraint_violation > 1e-7):
        sol.status = "inaccurate"
    if raise_on_failure and sol.status != "optimal":
        raise SolverError(f"SDP {p.name!r} ended with status {sol.status} "
                          f"(gap {sol.duality_gap:.2e}, violation {sol.max_constraint_violation:.2e})",
                          sol.status, it)
    return sol


def _solve_cvxpy(comp: Compiled, tol: float):
    import cvxpy as cp

    y = cp.Variable(comp.nparams)
    cons = []
    for b in comp.blocks:
        expr = cp.reshape(b.fmat @ y, (b.n, b.n), order="C") + b.f0
        cons.append(0.5 * (expr + expr.T) >> 0)
    if comp.E.shape[0]:
        cons.append(comp.E @ y == comp.f)
    prob = cp.Problem(cp.Minimize(comp.c @ y), cons)
    # Clarabel reports inaccurate solves below about 1e-8
    ctol = max(tol, 1e-8)
    prob.solve(solver=cp.CLARABEL, tol_gap_abs=ctol, tol_gap_rel=ctol, tol_feas=ctol)
    ok = prob.status in ("optimal", "optimal_inaccurate")
    if not ok:
        status = {"infeasible": "infeasible", "unbounded": "unbounded"}.get(prob.status, "failed")
        return status, np.zeros(comp.nparams), np.zeros(comp.E.shape[0]), [], np.nan, np.nan, 0
    xs = [np.asarray(con.dual_value) for con in cons[:len(comp.blocks)]]
    lam = (-np.asarray(cons[-1].dual_value) if comp.E.shape[0] else np.zeros(0))
    yv = np.asarray(y.value)
    pobj = float(comp.c @ yv)
    dobj = -sum(float(np.vdot(b.f0, x).real) for b, x in zip(comp.blocks, xs)) + float(comp.f @ lam)
    status = "optimal" if prob.status == "optimal" else "inaccurate"
    return status, yv, lam, xs, pobj, dobj, int(prob.solver_stats.num_iters or 0)


# ------------------------------------------------------------ verification


@dataclass
class VerifyReport:
    ok: bool
    primal_violation: float
    dual_residual: float
    dual_psd_violation: float
    objective: float
    dual_objective: float
    gap: float


def verify(p: SdpProblem, s: SdpSolution, tol: float = 1e-6) -> VerifyReport:
    """Recheck a solution from the problem data alone.

    Primal feasibility is measured on the Hermitian expressions at the
    returned variable values.  The dual certificate (block multipliers and
    equality multipliers) is checked for stationarity and positivity, and the
    gap between the recomputed primal and dual objectives is reported.
    """
    comp = compile_problem(p)
    y = np.concatenate([v.flatten(s.values[v.name]) for v in p.variables]) if p.variables else np.zeros(0)
    viol = _violation(p, s.values)
    pobj = float(comp.c @ y)
    xs = s.duals.get("blocks", [])
    lam = np.asarray(s.duals.get("eq", np.zeros(comp.E.shape[0])))
    if len(xs) != len(comp.blocks) or lam.shape[0] != comp.E.shape[0]:
        return VerifyReport(False, viol, np.inf, np.inf, comp.sign * (pobj + comp.c0), np.nan, np.inf)
    resid = comp.c - sum(_fop(b, x) for b, x in zip(comp.blocks, xs)) - comp.E.T @ lam
    dual_psd = max([0.0] + [-float(np.linalg.eigvalsh(0.5 * (x + x.T))[0]) for x in xs])
    dobj = -sum(float(np.vdot(b.f0, x).real) for b, x in zip(comp.blocks, xs)) + float(comp.f @ lam)
    gap = pobj - dobj
    scale = 1 + abs(pobj)
    dres = float(np.linalg.norm(resid)) / (1 + np.linalg.norm(comp.c))
    ok = viol <= 10 * tol and dres <= tol and dual_psd <= tol * scale and abs(gap) <= tol * scale
    return VerifyReport(bool(ok), viol, dres, dual_psd, comp.sign * (pobj + comp.c0),
                        comp.sign * (dobj + comp.c0), float(gap))
