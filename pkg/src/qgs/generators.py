"""Small graph families used in tests and demos."""

from __future__ import annotations

import math

import numpy as np

from .graph import Edge, GraphSpec
from .hill import Potential


def _graph(n_vertices, pairs, alpha=0.0, potential=None, betas=None) -> GraphSpec:
    verts = tuple(f"v{i}" for i in range(n_vertices))
    betas = [0.0] * len(pairs) if betas is None else list(betas)
    edges = tuple(
        Edge(f"e{j}", verts[a], verts[b], float(beta)) for j, ((a, b), beta) in enumerate(zip(pairs, betas))
    )
    return GraphSpec(verts, edges, float(alpha), potential or Potential())


def single_edge(alpha=0.0, potential=None) -> GraphSpec:
    return _graph(2, [(0, 1)], alpha, potential)


def self_loop(beta=0.0, alpha=0.0, potential=None) -> GraphSpec:
    return _graph(1, [(0, 0)], alpha, potential, [beta])


def path_graph(n_vertices: int, alpha=0.0, potential=None) -> GraphSpec:
    """v0 -> v1 -> ... ; ``path_graph(3)`` has two edges."""
    return _graph(n_vertices, [(i, i + 1) for i in range(n_vertices - 1)], alpha, potential)


def cycle_graph(n: int, beta=0.0, alpha=0.0, potential=None) -> GraphSpec:
    """Oriented n-cycle; the total flux ``beta`` sits on the first edge."""
    betas = [beta] + [0.0] * (n - 1)
    return _graph(n, [(i, (i + 1) % n) for i in range(n)], alpha, potential, betas)


def random_tree(n_vertices: int, rng: np.random.Generator, alpha=0.0, potential=None) -> GraphSpec:
    pairs = [(int(rng.integers(0, i)), i) for i in range(1, n_vertices)]
    return _graph(n_vertices, pairs, alpha, potential)


def random_graph(n_vertices: int, n_extra: int, rng: np.random.Generator, alpha=0.0,
                 potential=None, fluxes=True, loops=True) -> GraphSpec:
    """Random connected multigraph: a random tree plus ``n_extra`` edges.

    Extra edges may be parallel edges or (if ``loops``) self-loops.  Fluxes
    are uniform on [0, 2 pi) when ``fluxes`` is set.
    """
    pairs = [(int(rng.integers(0, i)), i) for i in range(1, n_vertices)]
    while len(pairs) < n_vertices - 1 + n_extra:
        a, b = (int(x) for x in rng.integers(0, n_vertices, size=2))
        if a == b and not loops:
            continue
        pairs.append((a, b))
    betas = rng.uniform(0, 2 * math.pi, len(pairs)) if fluxes else None
    return _graph(n_vertices, pairs, alpha, potential, betas)


def random_potential(rng: np.random.Generator, pieces: int | None = None, scale=10.0) -> Potential:
    """Piecewise-constant potential with random breakpoints and values in [-scale, scale]."""
    pieces = int(rng.integers(1, 6)) if pieces is None else pieces
    inner = np.sort(rng.uniform(0.05, 0.95, pieces - 1))
    return Potential(np.concatenate(([0.0], inner, [1.0])), rng.uniform(-scale, scale, pieces))
