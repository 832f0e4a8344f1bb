"""Quantum-graph spectra from the discriminant and the discrete Laplacian.

Off the Dirichlet spectrum of an edge, z belongs to the spectrum of the
quantum graph exactly when eta(z; alpha) is an eigenvalue of 2 * Delta_Gamma
(with the same multiplicity).  Every band [a_k, b_k] of the Kronig-Penney
operator is mapped homeomorphically onto [-2, 2] by eta, so each discrete
eigenvalue lambda produces one point per band.  What happens *at* the
Dirichlet eigenvalues mu_k (the set called Sigma_0 below) is handled
separately by :func:`sigma0_classify`.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import NotAnEigenpair
from .graph import GraphSpec, assemble_discrete_laplacian, discrete_spectrum
from .hill import (
    CLOSED_GAP_TOL,
    POLE_TOL,
    BandStructure,
    Potential,
    band_edges,
    dtn_matrix,
    fundamental_matrix,
    fundamental_solutions,
    invert_discriminant,
)

__all__ = [
    "Status",
    "SpectrumPoint",
    "Sigma0Entry",
    "SpectrumReport",
    "LiftedEigenfunction",
    "GapRow",
    "GapReport",
    "weyl_matrix",
    "weyl_min_eigenvalue",
    "quantum_spectrum",
    "lattice_spectrum",
    "sigma0_classify",
    "vertex_edge_system",
    "eigen_multiplicity",
    "lift_eigenfunction",
    "gap_report",
    "report_to_json",
    "report_from_json",
    "report_to_csv",
    "dumps",
]

COINCIDENT_TOL = 1e-9
EIGENPAIR_TOL = 1e-7
RANK_TOL = 1e-8
UNCLEAR_TOL = 1e-5


class Status(str, enum.Enum):
    PRESENT = "Present"
    ABSENT = "Absent"
    UNDETERMINED = "Undetermined"
    CONFIRMED = "Confirmed"
    REFUTED = "Refuted"


@dataclass(frozen=True)
class SpectrumPoint:
    z: float
    mult: int
    lam: float
    band: int
    shared_band: int | None = None  # closed gap: the same point ends band `band` and starts this one
    coincident: bool = False
    kind: str = "disc"


@dataclass(frozen=True)
class Sigma0Entry:
    k: int
    mu: float
    status: Status
    reason: str
    mult: int = 0


@dataclass(frozen=True)
class SpectrumReport:
    bands_used: BandStructure
    points: tuple[SpectrumPoint, ...] = ()
    intervals: tuple[tuple[float, float], ...] = ()
    sigma0: tuple[Sigma0Entry, ...] = ()
    gaps: tuple[tuple[float, float], ...] = ()
    mode: str = "finite"
    zmax: float = math.inf

    def theory_values(self, z_cut: float | None = None, include_sigma0: bool = True) -> np.ndarray:
        """Point spectrum with multiplicity: Sigma points plus present Sigma_0."""
        cut = self.zmax if z_cut is None else z_cut
        vals = [p.z for p in self.points if p.z <= cut for _ in range(p.mult)]
        if include_sigma0:
            vals += [
                e.mu
                for e in self.sigma0
                if e.status in (Status.PRESENT, Status.CONFIRMED) and e.mu <= cut
                for _ in range(max(e.mult, 1))
            ]
        return np.sort(np.array(vals, dtype=float))

    def band_multiplicity(self, k: int) -> int:
        return sum(p.mult for p in self.points if k in (p.band, p.shared_band))

    def to_dict(self) -> dict:
        bs = self.bands_used
        return {
            "mode": self.mode,
            "zmax": self.zmax,
            "alpha": bs.alpha,
            "bands": [
                {"k": b.k, "a": b.a, "b": b.b, "partial": b.partial} for b in bs.bands
            ],
            "dirichlet": [float(m) for m in bs.dirichlet],
            "points": [
                {
                    "z": p.z,
                    "mult": p.mult,
                    "lambda": p.lam,
                    "band": p.band,
                    "shared_band": p.shared_band,
                    "coincident": p.coincident,
                    "kind": p.kind,
                }
                for p in self.points
            ],
            "intervals": [list(iv) for iv in self.intervals],
            "sigma0": [
                {"k": e.k, "mu": e.mu, "status": e.status.value, "reason": e.reason, "mult": e.mult}
                for e in self.sigma0
            ],
            "gaps": [list(g) for g in self.gaps],
        }


# ---------------------------------------------------------------------------
# Weyl function


def weyl_matrix(g: GraphSpec, z: float, picture: str = "hermitian") -> np.ndarray:
    """M(z) = (m11 + m22)/2 * I + m12 * Delta_Gamma.

    ``picture="hermitian"`` uses D^{-1/2} B D^{-1/2} (self-adjoint for real z);
    ``picture="weighted"`` acts on plain vertex values.
    """
    m = dtn_matrix(g.potential, z)
    L = assemble_discrete_laplacian(g)
    delta = L.hermitian if picture == "hermitian" else L.action
    n = len(g.vertices)
    return 0.5 * (m[0, 0] + m[1, 1]) * np.eye(n) + m[0, 1] * delta


def weyl_min_eigenvalue(g: GraphSpec, z: float) -> float:
    """min |eig(M(z) - alpha/2)|; zero exactly when z is in the spectrum."""
    M = weyl_matrix(g, z) - 0.5 * g.alpha * np.eye(len(g.vertices))
    return float(np.min(np.abs(np.linalg.eigvalsh(M))))


# ---------------------------------------------------------------------------
# Sigma_0


def vertex_edge_system(g: GraphSpec, z: float) -> np.ndarray:
    """Linear system whose kernel is the eigenspace of the graph operator at z.

    Unknowns are the vertex values h and the initial slopes B_e; on edge e the
    solution is h(i(e)) c(x) + B_e s(x).  Rows: continuity at the terminal
    end of every edge, then the flux condition at every vertex (scaled by
    1 / max(1, sqrt|z|)).  Unlike the Weyl function this is regular at the
    Dirichlet eigenvalues.
    """
    sol = fundamental_solutions(g.potential, z)
    idx = g.index
    nv, ne = len(g.vertices), len(g.edges)
    A = np.zeros((ne + nv, nv + ne), dtype=complex)
    scale = 1.0 / max(1.0, math.sqrt(abs(z)))
    for j, e in enumerate(g.edges):
        i, t = idx[e.source], idx[e.target]
        p = np.exp(1j * e.beta)
        A[j, i] += p * sol.c1
        A[j, nv + j] += p * sol.s1
        A[j, t] -= 1.0
        A[ne + i, nv + j] += scale
        A[ne + t, i] -= scale * p * sol.cp1
        A[ne + t, nv + j] -= scale * p * sol.sp1
    A[ne + np.arange(nv), np.arange(nv)] -= scale * g.coupling()
    return A


def eigen_multiplicity(g: GraphSpec, z: float) -> tuple[int, bool]:
    """Multiplicity of z as an eigenvalue, and whether the rank decision is clear.

    Singular values below RANK_TOL (relative) count as zero; the decision is
    flagged unclear when some singular value falls between RANK_TOL and
    UNCLEAR_TOL.
    """
    sv = np.linalg.svd(vertex_edge_system(g, z), compute_uv=False)
    top = max(1.0, float(sv.max(initial=0.0)))
    nullity = int(np.sum(sv <= RANK_TOL * top))
    clear = not np.any((sv > RANK_TOL * top) & (sv <= UNCLEAR_TOL * top))
    return nullity, clear


def sigma0_classify(g: GraphSpec, mus, points=()) -> tuple[tuple[Sigma0Entry, ...], tuple[SpectrumPoint, ...]]:
    """Settle each Dirichlet eigenvalue mu_k by a direct kernel computation.

    Discriminant points that land on some mu_k are not covered by the
    Weyl-function correspondence, so they are checked here: their
    multiplicity is capped by the true multiplicity d at mu_k (and the point
    dropped if d = 0).  Any surplus of d over what the points claim is the
    exceptional part at mu_k and is reported ``Present``; no surplus gives
    ``Absent``.  If the rank decision is numerically unclear the entry is
    ``Undetermined`` and the points are left alone.

    Returns the entries and the adjusted points.
    """
    points = list(points)
    out = []
    for k, mu in enumerate(mus):
        mu = float(mu)
        tol = CLOSED_GAP_TOL * max(1.0, abs(mu))
        here = [i for i, p in enumerate(points) if abs(p.z - mu) <= tol]
        claimed = sum(points[i].mult for i in here)
        d, clear = eigen_multiplicity(g, mu)
        if not clear:
            out.append(Sigma0Entry(k, mu, Status.UNDETERMINED, "rank-unclear"))
            continue
        budget = d
        for i in here:
            keep = min(points[i].mult, budget)
            budget -= keep
            points[i] = replace(points[i], mult=keep)
        surplus = d - min(d, claimed)
        if surplus > 0:
            out.append(Sigma0Entry(k, mu, Status.PRESENT, "kernel", surplus))
        else:
            out.append(Sigma0Entry(k, mu, Status.ABSENT, "kernel"))
    return tuple(out), tuple(p for p in points if p.mult > 0)


# ---------------------------------------------------------------------------
# finite graphs


def _complement(points, lo: float, hi: float) -> tuple[tuple[float, float], ...]:
    """Open intervals of (lo, hi) free of ``points`` (points closer than 1e-9 merge)."""
    marks: list[float] = []
    for p in sorted([lo, hi] + [p for p in points if lo <= p <= hi]):
        if not marks or p - marks[-1] > COINCIDENT_TOL * max(1.0, abs(p)):
            marks.append(p)
    marks[0], marks[-1] = lo, hi
    return tuple((a, b) for a, b in zip(marks, marks[1:]) if b > a)


def _merge(raw: list[SpectrumPoint]) -> list[SpectrumPoint]:
    raw.sort(key=lambda p: (p.z, p.lam))
    out: list[SpectrumPoint] = []
    for p in raw:
        if out:
            q = out[-1]
            if q.lam == p.lam and p.band == q.band + 1 and p.z - q.z <= CLOSED_GAP_TOL:
                # same eigenvalue closing a gap: one point shared by both bands
                out[-1] = replace(q, shared_band=p.band)
                continue
            if q.lam != p.lam and p.z - q.z <= COINCIDENT_TOL * max(1.0, abs(p.z)):
                out[-1] = replace(q, coincident=True)
                p = replace(p, coincident=True)
        out.append(p)
    return out


def quantum_spectrum(g: GraphSpec, zmax: float = 100.0) -> SpectrumReport:
    """Spectrum of the quantum graph on a finite graph, up to ``zmax``."""
    U = g.potential
    zmax = float(zmax)
    bs = band_edges(U, g.alpha, zmax)
    spec = discrete_spectrum(assemble_discrete_laplacian(g))
    raw = []
    for band in bs.bands:
        for lam, mult in spec:
            z = invert_discriminant(bs, band.k, 2.0 * lam)
            if z <= zmax:
                raw.append(SpectrumPoint(z, mult, lam, band.k))
    sigma0, points = sigma0_classify(g, bs.dirichlet, _merge(raw))
    occupied = [p.z for p in points] + [
        e.mu for e in sigma0 if e.status is Status.PRESENT
    ]
    gaps = _complement(occupied, U.min - 1.0, zmax)
    return SpectrumReport(bs, points, (), sigma0, gaps, "finite", float(zmax))


def lattice_spectrum(n: int, U: Potential, alpha: float, zmax: float = 100.0) -> SpectrumReport:
    """Spectrum on the Z^n lattice graph with zero fluxes.

    Bloch reduction makes the discrete spectrum the whole of [-1, 1], so the
    continuous part is the band spectrum of the Kronig-Penney operator.  For
    n >= 2 every Dirichlet eigenvalue is an eigenvalue (a square plaquette
    carries a compactly supported eigenfunction); for n = 1 there are none.
    """
    if n < 1:
        raise ValueError("lattice dimension n must be >= 1")
    bs = band_edges(U, alpha, zmax)
    intervals = tuple((b.a, min(b.b, float(zmax))) for b in bs.bands)
    if n >= 2:
        sigma0 = tuple(
            Sigma0Entry(k, float(mu), Status.PRESENT, "plaquette-modes", 1)
            for k, mu in enumerate(bs.dirichlet)
        )
        pp = [e.mu for e in sigma0]
    else:
        sigma0 = tuple(
            Sigma0Entry(k, float(mu), Status.ABSENT, "line-no-modes")
            for k, mu in enumerate(bs.dirichlet)
        )
        pp = []
    gaps: list[tuple[float, float]] = []
    lo = U.min - 1.0
    pieces = [(lo, bs.bottom)] + [(gp.left, gp.right) for gp in bs.gaps]
    for left, right in pieces:
        right = min(right, float(zmax))
        if right <= left:
            continue
        gaps.extend(_complement([m for m in pp if left < m < right], left, right))
    return SpectrumReport(bs, (), intervals, sigma0, tuple(gaps), f"lattice-{n}", float(zmax))


# ---------------------------------------------------------------------------
# eigenfunctions


@dataclass(frozen=True)
class LiftedEigenfunction:
    """Quantum-graph eigenfunction built from vertex values h.

    On edge e the function is ``f0[e] * c(x) + df0[e] * s(x)``.
    """

    graph: GraphSpec
    z: float
    h: np.ndarray
    f0: np.ndarray
    f1: np.ndarray
    df0: np.ndarray
    residuals: dict = field(default_factory=dict)

    def __call__(self, edge: int, x):
        F = fundamental_matrix(self.graph.potential, self.z, x)
        return self.f0[edge] * F[..., 0, 0] + self.df0[edge] * F[..., 0, 1]

    def derivative(self, edge: int, x):
        F = fundamental_matrix(self.graph.potential, self.z, x)
        return self.f0[edge] * F[..., 1, 0] + self.df0[edge] * F[..., 1, 1]

    def continuity_residual(self) -> float:
        """max |exp(i beta) f_e(1) - h(t(e))| with f_e(1) taken from the propagator."""
        g = self.graph
        idx = g.index
        worst = 0.0
        for j, e in enumerate(g.edges):
            end = complex(self(j, 1.0))
            worst = max(worst, abs(np.exp(1j * e.beta) * end - self.h[idx[e.target]]))
        return worst / max(float(np.max(np.abs(self.h))), 1e-300)

    def flux_residual(self) -> float:
        """max over vertices of |f'(v) - alpha(v) f(v)|, relative to |h| max(1, sqrt|z|)."""
        g = self.graph
        idx = g.index
        flux = np.zeros(len(g.vertices), dtype=complex)
        for j, e in enumerate(g.edges):
            flux[idx[e.source]] += complex(self.derivative(j, 0.0))
            flux[idx[e.target]] -= np.exp(1j * e.beta) * complex(self.derivative(j, 1.0))
        res = np.abs(flux - g.coupling() * self.h)
        scale = max(float(np.max(np.abs(self.h))), 1e-300) * max(1.0, math.sqrt(abs(self.z)))
        return float(res.max()) / scale


def lift_eigenfunction(g: GraphSpec, z: float, h) -> LiftedEigenfunction:
    """Build the edge functions from discrete vertex data h at energy z.

    Off the Dirichlet spectrum the edge function is fixed by its end values.
    At a Dirichlet eigenvalue the end values only fix the c-component; the
    s-components are then chosen as the minimum-norm solution of the flux
    conditions.  Raises :class:`NotAnEigenpair` if h is not admissible.
    """
    h = np.asarray(h, dtype=complex)
    U = g.potential
    idx = g.index
    sol = fundamental_solutions(U, z)
    src = np.array([idx[e.source] for e in g.edges])
    dst = np.array([idx[e.target] for e in g.edges])
    phase = np.exp(-1j * g.betas)
    f0 = h[src]
    f1 = phase * h[dst]
    hnorm = max(float(np.max(np.abs(h))), 1e-300)

    if abs(sol.s1) > POLE_TOL:
        M = weyl_matrix(g, z, picture="weighted") - 0.5 * g.alpha * np.eye(len(h))
        res = float(np.max(np.abs(M @ h))) / hnorm
        scale = max(1.0, float(np.max(np.abs(M))))
        if res > EIGENPAIR_TOL * scale:
            raise NotAnEigenpair(f"|(M(z) - alpha/2) h| = {res:.3g} at z = {z}")
        df0 = (f1 - f0 * sol.c1) / sol.s1
    else:
        mismatch = float(np.max(np.abs(f1 - f0 * sol.c1))) / hnorm
        if mismatch > EIGENPAIR_TOL:
            raise NotAnEigenpair(
                f"z = {z} is a Dirichlet eigenvalue and h is incompatible with the edge ends"
            )
        n = len(g.vertices)
        K = np.zeros((n, len(g.edges)), dtype=complex)
        rhs = g.coupling() * h
        for j, e in enumerate(g.edges):
            K[src[j], j] += 1.0
            K[dst[j], j] -= np.conj(phase[j]) * sol.sp1
            rhs[dst[j]] += np.conj(phase[j]) * sol.cp1 * f0[j]
        df0, *_ = np.linalg.lstsq(K, rhs, rcond=None)
        res = float(np.max(np.abs(K @ df0 - rhs))) / hnorm if n else 0.0
        if res > EIGENPAIR_TOL * max(1.0, math.sqrt(abs(z))):
            raise NotAnEigenpair(f"flux conditions unsolvable at Dirichlet point z = {z}")

    lifted = LiftedEigenfunction(g, float(z), h, f0, f1, df0)
    lifted.residuals.update(
        continuity=lifted.continuity_residual(), flux=lifted.flux_residual()
    )
    return lifted


# ---------------------------------------------------------------------------
# gaps


@dataclass(frozen=True)
class GapRow:
    k: int  # interval (mu_k, mu_{k+1}); k = -1 means (-inf, mu_0)
    interval: tuple[float, float]
    band: tuple[float, float]
    lambda_gaps: int
    delta_gaps: int

    @property
    def agree(self) -> bool:
        return self.lambda_gaps == self.delta_gaps


@dataclass(frozen=True)
class GapReport:
    rows: tuple[GapRow, ...]
    pa_gaps: tuple[tuple[float, float], ...]
    violations: tuple[float, ...]  # Sigma points found inside a Kronig-Penney gap
    full_interval: bool

    @property
    def counts_agree(self) -> bool:
        return all(r.agree for r in self.rows)

    @property
    def pa_gaps_free(self) -> bool:
        return not self.violations


def _interior_count(values, lo: float, hi: float, tol: float) -> int:
    distinct: list[float] = []
    for v in sorted(values):
        if lo + tol < v < hi - tol and (not distinct or v - distinct[-1] > tol):
            distinct.append(v)
    return len(distinct)


def gap_report(g: GraphSpec, zmax: float = 100.0, report: SpectrumReport | None = None) -> GapReport:
    """Compare gap counts of the quantum graph with those of Delta_Gamma.

    Gaps are counted band by band: inside the open band (a_k, b_k) lying in
    (mu_{k-1}, mu_k), the gaps of the quantum graph correspond one to one
    with the components of (-1, 1) minus the discrete spectrum.  Only complete
    bands are reported.  The report also lists any spectral point found
    inside an open gap of the Kronig-Penney operator (there should be none).
    """
    if report is None:
        report = quantum_spectrum(g, zmax)
    bs = report.bands_used
    lams = [lam for lam, _ in discrete_spectrum(assemble_discrete_laplacian(g))]
    delta_gaps = _interior_count(lams, -1.0, 1.0, 1e-12) + 1
    zs = [p.z for p in report.points]
    mus = list(bs.dirichlet) + [bs.next_dirichlet]
    rows = []
    for band in bs.bands:
        if band.partial:
            continue
        lo_mu = -math.inf if band.k == 0 else float(mus[band.k - 1])
        tol = COINCIDENT_TOL * max(1.0, abs(band.b))
        count = _interior_count(zs, band.a, band.b, tol) + 1
        rows.append(GapRow(band.k - 1, (lo_mu, float(mus[band.k])), (band.a, band.b), count, delta_gaps))
    pa_gaps = ((-math.inf, bs.bottom),) + tuple((gp.left, gp.right) for gp in bs.gaps)
    violations = tuple(
        z for z in zs for left, right in pa_gaps
        if left + COINCIDENT_TOL * max(1.0, abs(z)) < z < right - COINCIDENT_TOL * max(1.0, abs(z))
    )
    return GapReport(tuple(rows), pa_gaps, violations, full_interval=False)


# ---------------------------------------------------------------------------
# serialisation


def _round(x):
    if isinstance(x, float):
        if math.isnan(x) or math.isinf(x):
            return None if math.isnan(x) else ("inf" if x > 0 else "-inf")
        return float(f"{x:.12g}")
    if isinstance(x, dict):
        return {k: _round(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round(v) for v in x]
    return x


def _unround(x):
    if x == "inf":
        return math.inf
    if x == "-inf":
        return -math.inf
    return math.nan if x is None else float(x)


def dumps(obj) -> str:
    """Deterministic JSON text: floats rounded to 12 significant digits."""
    return json.dumps(_round(obj), indent=2) + "\n"


def report_to_json(report: SpectrumReport) -> str:
    return dumps(report.to_dict())


def report_from_json(text: str) -> SpectrumReport:
    """Inverse of :func:`report_to_json` (band data is restored without the potential)."""
    from .hill import Band

    d = json.loads(text)
    bands = tuple(Band(b["k"], b["a"], b["b"], b["partial"]) for b in d["bands"])
    bs = BandStructure(
        Potential(), float(d["alpha"]), _unround(d["zmax"]), np.array(d["dirichlet"], dtype=float),
        bands, (), (),
    )
    points = tuple(
        SpectrumPoint(float(p["z"]), int(p["mult"]), _unround(p["lambda"]), int(p["band"]),
                      p["shared_band"], bool(p["coincident"]), p["kind"])
        for p in d["points"]
    )
    sigma0 = tuple(
        Sigma0Entry(int(e["k"]), float(e["mu"]), Status(e["status"]), e["reason"], int(e["mult"]))
        for e in d["sigma0"]
    )
    return SpectrumReport(
        bs,
        points,
        tuple((_unround(a), _unround(b)) for a, b in d["intervals"]),
        sigma0,
        tuple((_unround(a), _unround(b)) for a, b in d["gaps"]),
        d["mode"],
        _unround(d["zmax"]),
    )


def report_to_csv(report: SpectrumReport) -> str:
    """Flat table: one row per spectral point, Sigma_0 entry and interval."""
    fmt = lambda x: "" if x is None or (isinstance(x, float) and math.isnan(x)) else f"{x:.12g}"  # noqa: E731
    lines = ["kind,z,z_right,mult,lambda,band,status"]
    for p in report.points:
        lines.append(f"{p.kind},{fmt(p.z)},,{p.mult},{fmt(p.lam)},{p.band},")
    for a, b in report.intervals:
        lines.append(f"ess,{fmt(a)},{fmt(b)},,,,")
    for e in report.sigma0:
        lines.append(f"sigma0,{fmt(e.mu)},,{e.mult},,{e.k},{e.status.value}")
    return "\n".join(lines) + "\n"
