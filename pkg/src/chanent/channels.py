"""Finite-dimensional channels in Kraus form and their Choi operators.

Choi convention
---------------
The Choi operator is unnormalized, ``Gamma = (id (x) N)(|Gamma><Gamma|)`` with
``|Gamma> = sum_i |ii>``.  Its tensor factors are grouped per party: for every
party (an input label ``A'`` and output label ``A`` share party ``A``) the
reference copy ``R_A`` of the input comes first, followed by the output.  A
bipartite channel therefore has factor order ``R_A, A, R_B, B``.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import linalg as la
from .errors import DimensionError, DomainError, ValidationError

CPTP_TOL = 1e-9
UNITARY_TOL = 1e-9
PARTY_LABELS = "ABCDEFGH"


def _party(label: str) -> str:
    return label.rstrip("'")


@dataclass(frozen=True)
class SystemDims:
    """Labeled input and output factors of a channel.

    ``in_dims`` and ``out_dims`` are tuples of ``(label, d)`` pairs in tensor
    order.  Input labels conventionally carry a prime (``A'``); the party of a
    label is the label without primes.
    """

    in_dims: tuple[tuple[str, int], ...]
    out_dims: tuple[tuple[str, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "in_dims", tuple((str(l), int(d)) for l, d in self.in_dims))
        object.__setattr__(self, "out_dims", tuple((str(l), int(d)) for l, d in self.out_dims))
        for side in (self.in_dims, self.out_dims):
            labels = [l for l, _ in side]
            if len(set(labels)) != len(labels):
                raise DimensionError(f"duplicate labels in {labels}")
            for l, d in side:
                if d < 1:
                    raise DimensionError(f"factor {l} has dimension {d}", factor=l)
        for side in (self.in_dims, self.out_dims):
            parties = [_party(l) for l, _ in side]
            if len(set(parties)) != len(parties):
                raise DimensionError(f"two factors share a party in {side}")

    @classmethod
    def parties(cls, d_in: Sequence[int], d_out: Sequence[int] | None = None) -> "SystemDims":
        """Default labels ``A', B', ...`` to ``A, B, ...``."""
        d_out = d_in if d_out is None else d_out
        return cls(
            tuple((PARTY_LABELS[i] + "'", d) for i, d in enumerate(d_in)),
            tuple((PARTY_LABELS[i], d) for i, d in enumerate(d_out)),
        )

    @property
    def d_in(self) -> int:
        return math.prod(d for _, d in self.in_dims)

    @property
    def d_out(self) -> int:
        return math.prod(d for _, d in self.out_dims)

    @property
    def in_sizes(self) -> list[int]:
        return [d for _, d in self.in_dims]

    @property
    def out_sizes(self) -> list[int]:
        return [d for _, d in self.out_dims]

    def party_order(self) -> list[str]:
        order = [_party(l) for l, _ in self.in_dims]
        order += [p for p in (_party(l) for l, _ in self.out_dims) if p not in order]
        return order

    def in_dim(self, party: str) -> int:
        for l, d in self.in_dims:
            if _party(l) == party:
                return d
        return 1

    def out_dim(self, party: str) -> int:
        for l, d in self.out_dims:
            if _party(l) == party:
                return d
        return 1

    def choi_factors(self) -> list[tuple[str, int]]:
        """Choi factor names and dimensions, e.g. ``[("R_A", 2), ("A", 2), ...]``."""
        out = []
        in_parties = {_party(l): d for l, d in self.in_dims}
        out_parties = {_party(l): (l, d) for l, d in self.out_dims}
        for p in self.party_order():
            if p in in_parties:
                out.append(("R_" + p, in_parties[p]))
            if p in out_parties:
                out.append(out_parties[p])
        return out

    def choi_sizes(self) -> list[int]:
        return [d for _, d in self.choi_factors()]

    def choi_index(self, name: str) -> int:
        names = [n for n, _ in self.choi_factors()]
        if name not in names:
            raise DimensionError(f"no Choi factor named {name}", factor=name)
        return names.index(name)

    def _standard_to_choi_perm(self) -> list[int]:
        """Permutation taking the (R_in..., out...) layout to Choi factor order."""
        std = ["R_" + _party(l) for l, _ in self.in_dims] + [l for l, _ in self.out_dims]
        return [std.index(n) for n, _ in self.choi_factors()]

    def to_json(self) -> dict:
        return {
            "in": [{"label": l, "d": d} for l, d in self.in_dims],
            "out": [{"label": l, "d": d} for l, d in self.out_dims],
        }


@dataclass(frozen=True)
class ChoiOperator:
    """Unnormalized Choi operator in the party-grouped factor order of ``dims``."""

    matrix: np.ndarray
    dims: SystemDims

    @property
    def factors(self) -> list[tuple[str, int]]:
        return self.dims.choi_factors()

    @property
    def sizes(self) -> list[int]:
        return self.dims.choi_sizes()

    @property
    def state(self) -> np.ndarray:
        """Normalized Choi state ``Gamma / |in|``."""
        return self.matrix / self.dims.d_in

    def standard(self) -> np.ndarray:
        """Matrix in the layout ``(R_in factors..., out factors...)``."""
        perm = self.dims._standard_to_choi_perm()
        inv = list(np.argsort(perm))
        return la.permute_factors(self.matrix, self.sizes, inv)


class Channel:
    """A completely positive map in Kraus form.

    Instances are treated as immutable.  ``trace_preserving`` is ``False`` only
    for maps built deliberately as CP-but-not-TP (the completely mixing map).

    Parameters
    ----------
    kraus : sequence of ndarray
        Operators of shape ``(d_out, d_in)``.
    dims : SystemDims
    name : str
    trace_preserving : bool
        Declared flag; with ``check=True`` it is verified.
    """

    def __init__(self, kraus: Iterable[np.ndarray], dims: SystemDims, name: str = "channel",
                 trace_preserving: bool = True, check: bool = True):
        ks = [np.asarray(k, dtype=complex) for k in kraus]
        if not ks:
            raise DimensionError("a channel needs at least one Kraus operator")
        for k in ks:
            if k.shape != (dims.d_out, dims.d_in):
                raise DimensionError(f"Kraus shape {k.shape} does not match dims "
                                     f"({dims.d_out}, {dims.d_in})")
        self.kraus = tuple(ks)
        self.dims = dims
        self.name = name
        self.trace_preserving = trace_preserving
        if check and trace_preserving:
            defect = tp_defect(self.kraus, dims.d_in)
            if defect > 1e-7:
                raise ValidationError(f"Kraus set of {name} is not trace preserving",
                                      {"trace_preservation": defect})

    def __repr__(self) -> str:
        return f"Channel({self.name!r}, in={self.dims.in_dims}, out={self.dims.out_dims}, rank={len(self.kraus)})"

    @functools.cached_property
    def choi(self) -> ChoiOperator:
        return choi_of(self)

    def is_real(self) -> bool:
        return all(np.abs(k.imag).max() < 1e-14 for k in self.kraus)

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        return sum(k @ rho @ k.conj().T for k in self.kraus)

    def adjoint(self, x: np.ndarray) -> np.ndarray:
        return sum(k.conj().T @ x @ k for k in self.kraus)


def tp_defect(kraus: Sequence[np.ndarray], d_in: int) -> float:
    s = sum(k.conj().T @ k for k in kraus)
    return float(np.linalg.norm(s - np.eye(d_in), 2))


def _choi_standard(kraus: Sequence[np.ndarray], d_in: int) -> np.ndarray:
    vs = np.stack([k.T.reshape(-1) for k in kraus], axis=1)
    return vs @ vs.conj().T


def choi_of(c: Channel) -> ChoiOperator:
    """Unnormalized Choi operator ``sum_k (1 (x) K) Gamma (1 (x) K)^dagger``."""
    dims = c.dims
    std = _choi_standard(c.kraus, dims.d_in)
    std_sizes = dims.in_sizes + dims.out_sizes
    m = la.permute_factors(std, std_sizes, dims._standard_to_choi_perm())
    return ChoiOperator(la.hermitize(m), dims)


def channel_from_choi(g: ChoiOperator, name: str = "from_choi", tol: float = 1e-7) -> Channel:
    """Kraus decomposition of a Choi operator from its eigendecomposition.

    Raises
    ------
    ValidationError
        If the operator is not PSD or ``tr_out Gamma`` differs from the identity.
    """
    dims = g.dims
    std = g.standard()
    n_in = len(dims.in_dims)
    std_sizes = dims.in_sizes + dims.out_sizes
    tr_out = la.partial_trace(std, std_sizes, range(n_in)) if n_in else np.trace(std).reshape(1, 1)
    defect = float(np.linalg.norm(tr_out - np.eye(dims.d_in), 2))
    sd = la.eigh(std)
    min_eig = float(sd.eigenvalues[0])
    if min_eig < -tol * max(1.0, float(np.abs(sd.eigenvalues).max())):
        raise ValidationError("Choi operator is not positive semidefinite", {"min_eigenvalue": min_eig})
    if defect > tol:
        raise ValidationError("Choi operator is not trace preserving", {"trace_preservation": defect})
    keep = sd.eigenvalues > sd.cutoff
    kraus = []
    for lam, u in zip(sd.eigenvalues[keep][::-1], sd.eigenvectors[:, keep].T[::-1]):
        kraus.append((math.sqrt(lam) * u).reshape(dims.d_in, dims.d_out).T)
    return Channel(kraus, dims, name=name)


class CptpReport(NamedTuple):
    ok: bool
    cp_ok: bool
    tp_ok: bool
    min_choi_eigenvalue: float
    tp_defect: float


def validate_cptp(c: Channel | ChoiOperator, tol: float = CPTP_TOL) -> CptpReport:
    """Check Choi positivity and ``tr_out Gamma = 1_R``; failures go in the report."""
    g = c.choi if isinstance(c, Channel) else c
    std = g.standard()
    dims = g.dims
    n_in = len(dims.in_dims)
    w = np.linalg.eigvalsh(la.hermitize(std))
    tr_out = la.partial_trace(std, dims.in_sizes + dims.out_sizes, range(n_in))
    defect = float(np.linalg.norm(tr_out - np.eye(dims.d_in), 2))
    cp_ok = bool(w[0] >= -tol)
    tp_ok = bool(defect <= tol)
    return CptpReport(cp_ok and tp_ok, cp_ok, tp_ok, float(w[0]), defect)


def _dims_compatible(out_dims, in_dims) -> bool:
    return [d for _, d in out_dims] == [d for _, d in in_dims]


def compose(second: Channel, first: Channel) -> Channel:
    """``second o first``; the output factors of ``first`` must match the inputs of ``second``."""
    if not _dims_compatible(first.dims.out_dims, second.dims.in_dims):
        raise DimensionError(f"cannot compose: {first.dims.out_dims} vs {second.dims.in_dims}")
    kraus = [b @ a for b in second.kraus for a in first.kraus]
    dims = SystemDims(first.dims.in_dims, second.dims.out_dims)
    return Channel(kraus, dims, name=f"{second.name}o{first.name}",
                   trace_preserving=first.trace_preserving and second.trace_preserving, check=False)


def _relabel_clash(a: SystemDims, b: SystemDims) -> SystemDims:
    used = {_party(l) for l, _ in a.in_dims + a.out_dims}
    mine = {_party(l) for l, _ in b.in_dims + b.out_dims}
    if not used & mine:
        return b
    free = [p for p in PARTY_LABELS if p not in used]
    mapping = {}
    for p in [_party(l) for l, _ in b.in_dims] + [_party(l) for l, _ in b.out_dims]:
        if p not in mapping:
            mapping[p] = free.pop(0)
    return SystemDims(tuple((mapping[_party(l)] + "'", d) for l, d in b.in_dims),
                      tuple((mapping[_party(l)], d) for l, d in b.out_dims))


def tensor(a: Channel, b: Channel) -> Channel:
    """``a (x) b``.  Labels of ``b`` that clash with ``a`` are renamed to the next free parties."""
    bd = _relabel_clash(a.dims, b.dims)
    dims = SystemDims(a.dims.in_dims + bd.in_dims, a.dims.out_dims + bd.out_dims)
    kraus = [np.kron(x, y) for x in a.kraus for y in b.kraus]
    return Channel(kraus, dims, name=f"{a.name}x{b.name}",
                   trace_preserving=a.trace_preserving and b.trace_preserving, check=False)


def reduced_channel(c: Channel, drop: Iterable[str]) -> Channel:
    """``tr_drop o c``, where ``drop`` lists output labels (or their parties)."""
    drop = set(drop)
    out = c.dims.out_dims
    dropped = [i for i, (l, _) in enumerate(out) if l in drop or _party(l) in drop]
    known = {l for l, _ in out} | {_party(l) for l, _ in out}
    if drop - known:
        raise DimensionError(f"unknown output labels {sorted(drop - known)}")
    if not dropped:
        return c
    kept = [i for i in range(len(out)) if i not in dropped]
    sizes = [d for _, d in out]
    kraus = []
    for k in c.kraus:
        t = k.reshape(sizes + [c.dims.d_in])
        for idx in itertools.product(*[range(sizes[i]) for i in dropped]):
            sl = [slice(None)] * len(sizes) + [slice(None)]
            for i, j in zip(dropped, idx):
                sl[i] = j
            kraus.append(t[tuple(sl)].reshape(-1, c.dims.d_in))
    dims = SystemDims(c.dims.in_dims, tuple(out[i] for i in kept))
    return Channel(kraus, dims, name=f"tr_{''.join(sorted(drop))}({c.name})",
                   trace_preserving=c.trace_preserving, check=False)


def apply_to_state(c: Channel, rho: np.ndarray, ref_dim: int = 1) -> np.ndarray:
    """Apply ``id_R (x) c`` to ``rho`` on ``R (x) in``, with ``R`` of size ``ref_dim`` first."""
    rho = np.asarray(rho, dtype=complex)
    n = ref_dim * c.dims.d_in
    if rho.shape != (n, n):
        raise DimensionError(f"state of shape {rho.shape} does not fit R({ref_dim}) x in({c.dims.d_in})")
    eye = np.eye(ref_dim)
    out = np.zeros((ref_dim * c.dims.d_out,) * 2, dtype=complex)
    for k in c.kraus:
        kk = np.kron(eye, k)
        out += kk @ rho @ kk.conj().T
    return out


# ---------------------------------------------------------------- builders

def _check_unitary(u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise DimensionError(f"unitary must be square, got {u.shape}")
    defect = float(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0]), 2))
    if defect > UNITARY_TOL:
        raise DomainError(f"matrix is not unitary (defect {defect:.3e})")
    return u


def _check_p(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    return p


def unitary(u: np.ndarray, factor_dims: Sequence[int] | None = None, name: str = "unitary") -> Channel:
    """Unitary channel ``rho -> U rho U^dagger`` on parties with the given factor dimensions."""
    u = _check_unitary(u)
    factor_dims = [u.shape[0]] if factor_dims is None else list(factor_dims)
    if math.prod(factor_dims) != u.shape[0]:
        raise DimensionError(f"factor dims {factor_dims} do not match unitary size {u.shape[0]}")
    return Channel([u], SystemDims.parties(factor_dims), name=name)


def identity(*dims: int) -> Channel:
    """Identity channel on one party per given dimension."""
    dims = dims or (2,)
    return Channel([np.eye(math.prod(dims))], SystemDims.parties(dims), name="id" + "x".join(map(str, dims)))


def swap_unitary(d: int) -> np.ndarray:
    s = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            s[j * d + i, i * d + j] = 1.0
    return s


def cnot_unitary() -> np.ndarray:
    return np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=float)


def swap(d: int = 2) -> Channel:
    return unitary(swap_unitary(d), [d, d], name=f"swap{d}")


def cnot() -> Channel:
    """CNOT with control on party ``A`` and target on party ``B``."""
    return unitary(cnot_unitary(), [2, 2], name="cnot")


def replacer(sigma: np.ndarray, in_dims: Sequence[int], out_dims: Sequence[int] | None = None,
             name: str = "replacer") -> Channel:
    """``rho -> tr(rho) sigma`` for a density matrix ``sigma`` on the output."""
    sigma = la.hermitize(sigma)
    out_dims = list(in_dims) if out_dims is None else list(out_dims)
    d_in, d_out = math.prod(in_dims), math.prod(out_dims)
    if sigma.shape != (d_out, d_out):
        raise DimensionError(f"sigma of shape {sigma.shape} does not match output size {d_out}")
    if abs(np.trace(sigma).real - 1) > 1e-9:
        raise DomainError("sigma must have unit trace")
    sd = la.eigh(sigma)
    if sd.eigenvalues[0] < -1e-9:
        raise DomainError("sigma must be positive semidefinite")
    kraus = []
    for lam, e in zip(sd.eigenvalues, sd.eigenvectors.T):
        if lam > sd.cutoff:
            for i in range(d_in):
                kraus.append(math.sqrt(lam) * np.outer(e, la.ket(d_in, i)))
    return Channel(kraus, SystemDims.parties(in_dims, out_dims), name=name)


def maxmix_replacer(in_dims: Sequence[int], out_dims: Sequence[int] | None = None) -> Channel:
    out_dims = list(in_dims) if out_dims is None else list(out_dims)
    d = math.prod(out_dims)
    return replacer(np.eye(d) / d, in_dims, out_dims, name="replacer_maxmix")


def completely_mixing_map(in_dims: Sequence[int], out_dims: Sequence[int] | None = None) -> Channel:
    """The CP map ``X -> tr(X) 1``; its Choi operator is the identity.  Not trace preserving."""
    out_dims = list(in_dims) if out_dims is None else list(out_dims)
    d_in, d_out = math.prod(in_dims), math.prod(out_dims)
    kraus = [np.outer(la.ket(d_out, o), la.ket(d_in, i)) for i in range(d_in) for o in range(d_out)]
    return Channel(kraus, SystemDims.parties(in_dims, out_dims), name="completely_mixing",
                   trace_preserving=False)


def mixture(channels: Sequence[Channel], weights: Sequence[float], name: str = "mixture") -> Channel:
    """Convex combination ``sum_i w_i N_i`` of channels with equal dims."""
    weights = [float(w) for w in weights]
    if len(weights) != len(channels) or any(w < 0 for w in weights) or abs(sum(weights) - 1) > 1e-12:
        raise DomainError("weights must be a probability vector matching the channels")
    dims = channels[0].dims
    kraus = []
    for c, w in zip(channels, weights):
        if c.dims.in_sizes != dims.in_sizes or c.dims.out_sizes != dims.out_sizes:
            raise DimensionError("mixture components must share dimensions")
        if w > 0:
            kraus += [math.sqrt(w) * k for k in c.kraus]
    return Channel(kraus, dims, name=name)


def white_noise_mixture(u: Channel | np.ndarray, p: float, factor_dims: Sequence[int] | None = None) -> Channel:
    """``(1 - p) * (replace by maximally mixed) + p * U(.)U^dagger``; ``p`` is the unitary weight."""
    p = _check_p(p)
    uc = u if isinstance(u, Channel) else unitary(u, factor_dims)
    if len(uc.kraus) != 1:
        raise DomainError("white_noise_mixture expects a unitary channel")
    _check_unitary(uc.kraus[0])
    noise = maxmix_replacer(uc.dims.in_sizes, uc.dims.out_sizes)
    c = mixture([uc, noise], [p, 1 - p], name=f"mix({uc.name},p={p:g})")
    return Channel(c.kraus, uc.dims, name=c.name)


def identity_mixture(u: Channel | np.ndarray, p: float, factor_dims: Sequence[int] | None = None) -> Channel:
    """``p * U(.)U^dagger + (1 - p) * id``; ``p = 0`` is the identity gate."""
    p = _check_p(p)
    uc = u if isinstance(u, Channel) else unitary(u, factor_dims)
    ident = Channel([np.eye(uc.dims.d_in)], uc.dims, name="id")
    c = mixture([uc, ident], [p, 1 - p])
    return Channel(c.kraus, uc.dims, name=f"idmix({uc.name},p={p:g})")


def depolarizing(p: float, d: int = 2) -> Channel:
    """``rho -> (1 - p) rho + p tr(rho) 1/d``; ``p = 1`` fully depolarizes."""
    p = _check_p(p)
    c = mixture([identity(d), maxmix_replacer([d])], [1 - p, p])
    return Channel(c.kraus, c.dims, name=f"depol(p={p:g})")


def weyl(d: int, a: int, b: int) -> np.ndarray:
    """Weyl operator ``X^a Z^b`` with ``X|j> = |j+1>`` and ``Z|j> = w^j |j>``."""
    x = np.roll(np.eye(d), 1, axis=0)
    z = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return np.linalg.matrix_power(x, a % d) @ np.linalg.matrix_power(z, b % d)


def weyl_set(d: int) -> list[np.ndarray]:
    return [weyl(d, a, b) for a in range(d) for b in range(d)]


def pauli_channel(probs: np.ndarray, n_qubits_per_party: Sequence[int] | int = 1,
                  d: int = 2) -> Channel:
    """Weyl-diagonal channel ``sum_k p_k W_k rho W_k^dagger`` over all product Weyl operators."""
    sizes = [d] * (n_qubits_per_party if isinstance(n_qubits_per_party, int) else len(n_qubits_per_party))
    ops = [la.kron(*ws) for ws in itertools.product(weyl_set(d), repeat=len(sizes))]
    probs = np.asarray(probs, dtype=float)
    if probs.shape != (len(ops),) or probs.min() < 0 or abs(probs.sum() - 1) > 1e-12:
        raise DomainError("probs must be a probability vector over all Weyl products")
    kraus = [math.sqrt(p) * w for p, w in zip(probs, ops) if p > 0]
    return Channel(kraus, SystemDims.parties(sizes), name="weyl_channel")


# ------------------------------------------------------- tele-covariance

@dataclass
class TeleCovReport:
    """Outcome of a covariance search; ``corrections`` maps group index to output unitary."""

    ok: bool
    max_defect: float
    corrections: list = field(default_factory=list)
    failed: list = field(default_factory=list)


def _factor_op(ops: Sequence[np.ndarray]) -> np.ndarray:
    return la.kron(*ops)


def default_weyl_group(dims: SystemDims) -> list[np.ndarray]:
    """Generators ``X`` and ``Z`` of the Weyl group on each input factor, embedded in the full input."""
    gens = []
    sizes = dims.in_sizes
    for i, d in enumerate(sizes):
        for g in (weyl(d, 1, 0), weyl(d, 0, 1)):
            ops = [np.eye(s) for s in sizes]
            ops[i] = g
            gens.append(_factor_op(ops))
    return gens


def tele_covariance_check(c: Channel, group: Sequence | None = None, tol: float = 1e-8) -> TeleCovReport:
    """Check ``N o U_g = V_g o N`` for every group element with a product-unitary correction.

    Parameters
    ----------
    group : sequence, optional
        Either input unitaries (a correction is searched among product Weyl
        operators on the outputs) or ``(U_in, V_out)`` pairs to verify as given.
        The default uses the Weyl generators on each input, which suffices for
        the whole product Weyl group because corrections compose.
    """
    dims = c.dims
    d_in = dims.d_in
    std = _choi_standard(c.kraus, d_in)
    eye_r = np.eye(d_in)
    if group is None:
        group = default_weyl_group(dims)
    candidates = None
    corrections, failed = [], []
    worst = 0.0
    for gi, g in enumerate(group):
        if isinstance(g, tuple):
            u_in, v_out = g
        else:
            u_in, v_out = g, None
        u_in = np.asarray(u_in, dtype=complex)
        if u_in.shape != (d_in, d_in):
            raise DimensionError("group element has the wrong input size")
        try:
            _check_unitary(u_in)
            if v_out is not None:
                _check_unitary(v_out)
        except DomainError as exc:
            raise DomainError(f"group element {gi} is not unitary") from exc
        target = _choi_standard([k @ u_in for k in c.kraus], d_in)
        if v_out is not None:
            tries = [np.asarray(v_out, dtype=complex)]
        else:
            if candidates is None:
                candidates = [_factor_op(ws) for ws in
                              itertools.product(*[weyl_set(d) for d in dims.out_sizes])]
            tries = candidates
        best, best_v = np.inf, None
        for v in tries:
            vv = np.kron(eye_r, v)
            diff = vv @ std @ vv.conj().T - target
            err = float(np.abs(diff).max())
            if err < best:
                best, best_v = err, v
                if err <= tol * 1e-2:
                    break
        if best_v is not None:
            vv = np.kron(eye_r, best_v)
            best = float(np.linalg.norm(vv @ std @ vv.conj().T - target, 2))
        worst = max(worst, best)
        if best <= tol:
            corrections.append(best_v)
        else:
            corrections.append(None)
            failed.append(gi)
    return TeleCovReport(not failed, worst, corrections, failed)
