"""Oriented multigraphs with magnetic fluxes and the discrete magnetic Laplacian.

The discrete operator acts on functions on the vertices,

    (Delta h)(v) = 1/deg v * ( sum_{e: i(e)=v} exp(-1j beta_e) h(t(e))
                             + sum_{e: t(e)=v} exp(+1j beta_e) h(i(e)) ),

and is self-adjoint in the degree-weighted inner product.  We diagonalise
the unitarily equivalent Hermitian matrix D^{-1/2} B D^{-1/2}.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import (
    DegreeBoundExceeded,
    DuplicateIdentifier,
    EigensolverFailure,
    InputError,
    IsolatedVertex,
    OddGraphWithUnevenPotential,
    UnknownVertexReference,
)
from .hill import Potential

__all__ = [
    "Edge",
    "GraphSpec",
    "WeightedVector",
    "DiscreteLaplacian",
    "build_graph",
    "load_graph",
    "assemble_discrete_laplacian",
    "discrete_spectrum",
    "discrete_eigenpairs",
    "has_cycle",
]

CLUSTER_TOL = 1e-9


@dataclass(frozen=True)
class Edge:
    id: str
    source: str
    target: str
    beta: float = 0.0

    @property
    def is_loop(self) -> bool:
        return self.source == self.target


@dataclass(frozen=True)
class GraphSpec:
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    alpha: float = 0.0
    potential: Potential = field(default_factory=Potential)
    max_degree: int | None = None

    def __post_init__(self):
        self._validate()

    # validation lives here so that direct construction is as safe as build_graph
    def _validate(self):
        seen = set()
        for v in self.vertices:
            if v in seen:
                raise DuplicateIdentifier(f"vertices: duplicate vertex id {v!r}")
            seen.add(v)
        eids = set()
        for e in self.edges:
            if e.id in eids:
                raise DuplicateIdentifier(f"edges: duplicate edge id {e.id!r}")
            eids.add(e.id)
            for end in (e.source, e.target):
                if end not in seen:
                    raise UnknownVertexReference(f"edges[{e.id!r}]: unknown vertex {end!r}")
        deg = self.degrees
        for v, d in zip(self.vertices, deg):
            if d == 0:
                raise IsolatedVertex(f"vertices: vertex {v!r} has degree 0")
        if self.max_degree is not None and deg.max(initial=0) > self.max_degree:
            raise DegreeBoundExceeded(
                f"max_degree: a vertex has degree {deg.max()} > {self.max_degree}"
            )
        if not self.is_even_graph and not self.potential.is_even():
            raise OddGraphWithUnevenPotential(
                "potential: graph has a vertex with indeg != outdeg, "
                "which requires an even potential U(x) = U(1 - x)"
            )

    @property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @property
    def indegrees(self) -> np.ndarray:
        idx = self.index
        out = np.zeros(len(self.vertices), dtype=int)
        for e in self.edges:
            out[idx[e.target]] += 1
        return out

    @property
    def outdegrees(self) -> np.ndarray:
        idx = self.index
        out = np.zeros(len(self.vertices), dtype=int)
        for e in self.edges:
            out[idx[e.source]] += 1
        return out

    @property
    def degrees(self) -> np.ndarray:
        return self.indegrees + self.outdegrees

    @property
    def is_even_graph(self) -> bool:
        """indeg v == outdeg v everywhere (type A); otherwise type B."""
        return bool(np.all(self.indegrees == self.outdegrees))

    @property
    def graph_type(self) -> str:
        return "A" if self.is_even_graph else "B"

    @property
    def betas(self) -> np.ndarray:
        return np.array([e.beta for e in self.edges], dtype=float)

    def coupling(self) -> np.ndarray:
        """Vertex coupling constants alpha(v) = deg(v) * alpha / 2."""
        return 0.5 * self.degrees * self.alpha

    def with_(self, **changes) -> "GraphSpec":
        data = dict(
            vertices=self.vertices,
            edges=self.edges,
            alpha=self.alpha,
            potential=self.potential,
            max_degree=self.max_degree,
        )
        data.update(changes)
        return GraphSpec(**data)

    def to_dict(self) -> dict:
        d = {
            "vertices": list(self.vertices),
            "edges": [
                {"id": e.id, "from": e.source, "to": e.target, "beta": e.beta} for e in self.edges
            ],
            "alpha": self.alpha,
            "potential": self.potential.to_dict(),
        }
        if self.max_degree is not None:
            d["max_degree"] = self.max_degree
        return d


def _field(raw: Mapping, key: str, where: str):
    try:
        return raw[key]
    except KeyError:
        raise InputError(f"{where}: missing field {key!r}") from None


def build_graph(raw) -> GraphSpec:
    """Parse a graph description (JSON text or an already decoded mapping).

    Schema::

        {"vertices": ["v1", ...],
         "edges": [{"id": "e1", "from": "v1", "to": "v2", "beta": 0.0}, ...],
         "alpha": 0.0,
         "potential": {"breakpoints": [0, ..., 1], "values": [...]},
         "max_degree": 4}                      # optional

    ``beta``, ``alpha`` and ``potential`` default to zero; edge ids default to
    ``e<position>``.
    """
    if isinstance(raw, (str, bytes)):
        try:
            raw = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise InputError(f"graph description is not valid JSON: {exc}") from None
    if not isinstance(raw, Mapping):
        raise InputError("graph description must be a JSON object")

    vertices = _field(raw, "vertices", "graph")
    if not isinstance(vertices, list):
        raise InputError("vertices: expected a list of ids")
    vertices = tuple(str(v) for v in vertices)

    edges = []
    for n, e in enumerate(_field(raw, "edges", "graph")):
        if not isinstance(e, Mapping):
            raise InputError(f"edges[{n}]: expected an object")
        try:
            beta = float(e.get("beta", 0.0))
        except (TypeError, ValueError):
            raise InputError(f"edges[{n}].beta: not a number") from None
        edges.append(
            Edge(
                str(e.get("id", f"e{n}")),
                str(_field(e, "from", f"edges[{n}]")),
                str(_field(e, "to", f"edges[{n}]")),
                beta,
            )
        )

    try:
        alpha = float(raw.get("alpha", 0.0))
    except (TypeError, ValueError):
        raise InputError("alpha: not a number") from None
    pot = raw.get("potential")
    potential = Potential() if pot is None else Potential.from_dict(pot)
    max_degree = raw.get("max_degree")
    return GraphSpec(vertices, tuple(edges), alpha, potential,
                     None if max_degree is None else int(max_degree))


def load_graph(path) -> GraphSpec:
    return build_graph(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeightedVector:
    """Vertex function with the degree-weighted norm."""

    values: np.ndarray
    weights: np.ndarray

    def inner(self, other: "WeightedVector") -> complex:
        return complex(np.sum(self.weights * np.conj(self.values) * other.values))

    @property
    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.weights * np.abs(self.values) ** 2)))


@dataclass(frozen=True)
class DiscreteLaplacian:
    """Delta_Gamma in two equivalent forms.

    ``action`` is D^{-1} B and acts on vertex values directly; ``hermitian``
    is D^{-1/2} B D^{-1/2}.
    """

    hermitian: np.ndarray
    action: np.ndarray
    degrees: np.ndarray

    def apply(self, h) -> np.ndarray:
        if isinstance(h, WeightedVector):
            h = h.values
        return self.action @ np.asarray(h)

    def to_weighted(self, phi: np.ndarray) -> np.ndarray:
        """Map eigenvectors of ``hermitian`` to eigenvectors of ``action``."""
        return phi / np.sqrt(self.degrees)[:, None] if phi.ndim == 2 else phi / np.sqrt(self.degrees)


def adjacency(g: GraphSpec) -> np.ndarray:
    """Flux-phased adjacency B with B[v, w] summing exp(-+1j beta) over edges."""
    idx = g.index
    n = len(g.vertices)
    B = np.zeros((n, n), dtype=complex)
    for e in g.edges:
        p = np.exp(1j * e.beta)
        i, t = idx[e.source], idx[e.target]
        B[i, t] += np.conj(p)
        B[t, i] += p
    return B


def assemble_discrete_laplacian(g: GraphSpec) -> DiscreteLaplacian:
    B = adjacency(g)
    deg = g.degrees.astype(float)
    r = 1.0 / np.sqrt(deg)
    # outer(r, r) is symmetric bit for bit, so H is exactly Hermitian
    H = B * np.outer(r, r)
    return DiscreteLaplacian(H, B / deg[:, None], deg)


def discrete_eigenpairs(L: DiscreteLaplacian) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending, clipped to [-1, 1]) and Hermitian-picture eigenvectors."""
    try:
        w, v = np.linalg.eigh(L.hermitian)
    except np.linalg.LinAlgError as exc:
        raise EigensolverFailure(str(exc)) from exc
    return np.clip(w, -1.0, 1.0), v


def discrete_spectrum(L: DiscreteLaplacian) -> list[tuple[float, int]]:
    """Sorted (eigenvalue, multiplicity) pairs; clusters within 1e-9 merge."""
    w, _ = discrete_eigenpairs(L)
    out: list[tuple[float, int]] = []
    cluster = [w[0]] if len(w) else []
    for x in w[1:]:
        if x - cluster[-1] <= CLUSTER_TOL:
            cluster.append(x)
        else:
            out.append((float(np.mean(cluster)), len(cluster)))
            cluster = [x]
    if cluster:
        out.append((float(np.mean(cluster)), len(cluster)))
    return out


def has_cycle(g: GraphSpec) -> bool:
    """Whether the underlying undirected multigraph has a cycle.

    Self-loops and parallel edges count; a forest has exactly
    |V| - (#components) edges.
    """
    n = len(g.vertices)
    idx = g.index
    rows = [idx[e.source] for e in g.edges]
    cols = [idx[e.target] for e in g.edges]
    adj = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    ncomp, _ = connected_components(adj, directed=False)
    return len(g.edges) > n - ncomp
