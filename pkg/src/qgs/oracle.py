"""Independent check: P1 finite elements for the quantum-graph operator.

The quadratic form

    sum_e int_0^1 |f_e'|^2 + U |f_e|^2 dx + sum_v alpha(v) |f(v)|^2

is discretised with N linear elements per edge.  The vertex value is a single
unknown; the far end of edge e is tied to it through f_e(1) = exp(-i beta_e)
f(t(e)), which is the only place the fluxes enter.  The flux (Kirchhoff-type)
condition is natural for the form and needs no special treatment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg

from .errors import EigensolverFailure, MeshTooCoarse, WindowMismatch
from .graph import GraphSpec
from .hill import Potential
from .spectrum import SpectrumReport, Status

__all__ = [
    "DiscretizedOperator",
    "ComparisonReport",
    "discretize",
    "discretize_dirichlet_edge",
    "oracle_eigenvalues",
    "oracle_eigenvalues_below",
    "general_eigenvalues",
    "compare",
    "validate",
    "refine_sigma0",
    "observed_order",
]

MIN_ELEMENTS = 8


@dataclass(frozen=True)
class DiscretizedOperator:
    K: np.ndarray
    M: np.ndarray
    N: int
    vertex_dofs: dict = field(default_factory=dict)
    edge_dofs: dict = field(default_factory=dict)

    @property
    def h(self) -> float:
        return 1.0 / self.N

    @property
    def dim(self) -> int:
        return self.K.shape[0]


def _element_matrices(U: Potential, N: int):
    h = 1.0 / N
    mid = (np.arange(N) + 0.5) * h
    u = U(mid)
    stiff = np.array([[1.0, -1.0], [-1.0, 1.0]]) / h
    mass = np.array([[2.0, 1.0], [1.0, 2.0]]) * h / 6.0
    Ke = stiff[None, :, :] + u[:, None, None] * mass[None, :, :]
    Me = np.broadcast_to(mass, (N, 2, 2))
    return Ke, Me


def discretize(g: GraphSpec, N: int) -> DiscretizedOperator:
    """Assemble stiffness K and mass M with N elements per edge."""
    if N < MIN_ELEMENTS:
        raise MeshTooCoarse(f"N = {N} < {MIN_ELEMENTS}")
    idx = g.index
    nv = len(g.vertices)
    dim = nv + len(g.edges) * (N - 1)
    real = not np.any(g.betas)
    dtype = float if real else complex
    K = np.zeros((dim, dim), dtype=dtype)
    M = np.zeros((dim, dim), dtype=dtype)
    Ke, Me = _element_matrices(g.potential, N)

    edge_dofs = {}
    for j, e in enumerate(g.edges):
        first = nv + j * (N - 1)
        interior = np.arange(first, first + N - 1)
        edge_dofs[e.id] = interior
        # global dof and coefficient for each of the N + 1 local nodes
        dofs = np.concatenate(([idx[e.source]], interior, [idx[e.target]]))
        coef = np.ones(N + 1, dtype=dtype)
        coef[-1] = np.exp(-1j * e.beta) if not real else 1.0
        left, right = dofs[:-1], dofs[1:]
        cl, cr = coef[:-1], coef[1:]
        pairs = ((left, cl, left, cl, 0, 0), (left, cl, right, cr, 0, 1),
                 (right, cr, left, cl, 1, 0), (right, cr, right, cr, 1, 1))
        for ri, rc, ci, cc, a, b in pairs:
            # f^H A f with f_local = coef * u: entry conj(c_row) * A * c_col
            np.add.at(K, (ri, ci), np.conj(rc) * Ke[:, a, b] * cc)
            np.add.at(M, (ri, ci), np.conj(rc) * Me[:, a, b] * cc)

    K[np.arange(nv), np.arange(nv)] += g.coupling()
    vertex_dofs = {v: i for v, i in idx.items()}
    if not np.allclose(K, K.conj().T, rtol=0, atol=1e-12 * max(1.0, np.abs(K).max())):
        raise EigensolverFailure("assembled stiffness matrix is not Hermitian")
    return DiscretizedOperator(K, M, N, vertex_dofs, edge_dofs)


def discretize_dirichlet_edge(U: Potential, N: int) -> DiscretizedOperator:
    """Single edge with f(0) = f(1) = 0 (interior nodes only)."""
    if N < MIN_ELEMENTS:
        raise MeshTooCoarse(f"N = {N} < {MIN_ELEMENTS}")
    Ke, Me = _element_matrices(U, N)
    dim = N + 1
    K = np.zeros((dim, dim))
    M = np.zeros((dim, dim))
    for j in range(N):
        K[j:j + 2, j:j + 2] += Ke[j]
        M[j:j + 2, j:j + 2] += Me[j]
    inner = slice(1, N)
    return DiscretizedOperator(K[inner, inner].copy(), M[inner, inner].copy(), N)


def oracle_eigenvalues(op: DiscretizedOperator, count: int) -> np.ndarray:
    """Lowest ``count`` eigenvalues of the pencil (K, M)."""
    if count > op.dim:
        raise ValueError(f"count {count} exceeds dimension {op.dim}")
    try:
        return scipy.linalg.eigh(
            op.K, op.M, eigvals_only=True, subset_by_index=(0, count - 1), check_finite=False
        )
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigensolverFailure(str(exc)) from exc


def oracle_eigenvalues_below(op: DiscretizedOperator, z_cut: float) -> np.ndarray:
    try:
        vals = scipy.linalg.eigh(op.K, op.M, eigvals_only=True, check_finite=False)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigensolverFailure(str(exc)) from exc
    if vals[-1] <= z_cut:
        raise WindowMismatch(
            f"mesh N = {op.N} cannot resolve the window up to {z_cut} "
            f"(largest discrete eigenvalue {vals[-1]:.4g})"
        )
    return vals[vals <= z_cut]


def general_eigenvalues(A: np.ndarray) -> np.ndarray:
    """Eigenvalues of a general (non-Hermitian) matrix, sorted by real part."""
    try:
        w = scipy.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise EigensolverFailure(str(exc)) from exc
    return w[np.argsort(w.real, kind="stable")]


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ComparisonReport:
    matched: tuple[tuple[float, float, float], ...]  # (theory, oracle, relative error)
    unmatched_oracle: tuple[float, ...]
    unmatched_theory: tuple[float, ...]
    z_cut: float
    tol_rel: float
    N: int | None = None

    @property
    def ok(self) -> bool:
        return not self.unmatched_theory

    @property
    def max_rel_mismatch(self) -> float:
        return max((r for *_, r in self.matched), default=0.0)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "z_cut": self.z_cut,
            "tol_rel": self.tol_rel,
            "N": self.N,
            "max_rel_mismatch": self.max_rel_mismatch,
            "matched": [list(m) for m in self.matched],
            "unmatched_oracle": list(self.unmatched_oracle),
            "unmatched_theory": list(self.unmatched_theory),
        }


def compare(report: SpectrumReport, oracle, tol_rel: float = 1e-2, z_cut: float | None = None,
            N: int | None = None) -> ComparisonReport:
    """Greedy in-order matching of theory points against oracle eigenvalues.

    A theory value t matches an oracle value o when
    |t - o| <= tol_rel * max(1, t).  Oracle values left over are listed as
    evidence of spectrum the theory did not claim (typically Sigma_0).
    """
    z_cut = report.zmax if z_cut is None else float(z_cut)
    if z_cut > report.zmax:
        raise WindowMismatch(f"report covers z <= {report.zmax}, asked for {z_cut}")
    theory = report.theory_values(z_cut)
    oracle = np.sort(np.asarray(oracle, dtype=float))
    oracle = oracle[oracle <= z_cut * (1 + tol_rel) + tol_rel]

    matched, un_o, un_t = [], [], []
    i = j = 0
    while i < len(theory) and j < len(oracle):
        t, o = theory[i], oracle[j]
        if abs(t - o) <= tol_rel * max(1.0, abs(t)):
            matched.append((float(t), float(o), abs(t - o) / max(1.0, abs(t))))
            i += 1
            j += 1
        elif o < t:
            un_o.append(float(o))
            j += 1
        else:
            un_t.append(float(t))
            i += 1
    un_t.extend(float(t) for t in theory[i:])
    un_o.extend(float(o) for o in oracle[j:] if o <= z_cut)
    return ComparisonReport(tuple(matched), tuple(un_o), tuple(un_t), z_cut, tol_rel, N)


def validate(g: GraphSpec, N: int = 500, z_cut: float = 60.0, tol_rel: float = 1e-2,
             report: SpectrumReport | None = None) -> ComparisonReport:
    """Theory spectrum of ``g`` against the FE oracle on [.., z_cut]."""
    from .spectrum import quantum_spectrum

    if report is None:
        report = quantum_spectrum(g, z_cut)
    vals = oracle_eigenvalues_below(discretize(g, N), z_cut * (1 + tol_rel) + tol_rel)
    return compare(report, vals, tol_rel, z_cut, N)


def refine_sigma0(report: SpectrumReport, oracle, tol_rel: float = 1e-2) -> SpectrumReport:
    """Settle ``Undetermined`` Sigma_0 entries with oracle eigenvalues.

    At each undetermined mu_k, oracle eigenvalues within tolerance are counted
    and compared with the multiplicity already accounted for (Sigma points and
    present Sigma_0 at that energy).  A surplus confirms membership.
    """
    oracle = np.asarray(oracle, dtype=float)
    entries = []
    for e in report.sigma0:
        if e.status is not Status.UNDETERMINED or e.mu > report.zmax:
            entries.append(e)
            continue
        tol = tol_rel * max(1.0, e.mu)
        seen = int(np.sum(np.abs(oracle - e.mu) <= tol))
        claimed = sum(p.mult for p in report.points if abs(p.z - e.mu) <= tol)
        surplus = seen - claimed
        if surplus > 0:
            entries.append(replace(e, status=Status.CONFIRMED, reason="oracle", mult=surplus))
        else:
            entries.append(replace(e, status=Status.REFUTED, reason="oracle", mult=0))
    return replace(report, sigma0=tuple(entries))


def observed_order(errors, refinement: float = 2.0) -> np.ndarray:
    """log_r(e_i / e_{i+1}) for successive errors under mesh refinement by r."""
    e = np.asarray(errors, dtype=float)
    return np.log(e[:-1] / e[1:]) / math.log(refinement)
