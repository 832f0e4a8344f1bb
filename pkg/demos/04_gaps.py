"""Gaps of the graph spectrum versus gaps of the periodic problem.

Two statements are checked numerically: no eigenvalue of a graph with
alpha = 2 falls inside an open gap of the Kronig-Penney operator, and inside
each band the number of gaps of the graph spectrum equals the number of gaps
of the discrete Laplacian's spectrum in (-1, 1).
"""
import numpy as np

from qgs import gap_report
from qgs.generators import path_graph, random_graph

rep = gap_report(path_graph(3), 250)
print("path with 3 vertices")
for row in rep.rows:
    lo, hi = row.interval
    print(f"  ({lo:9.4f}, {hi:9.4f}): graph gaps {row.lambda_gaps}, discrete gaps {row.delta_gaps}")

rng = np.random.default_rng(7)
print("\nrandom magnetic graphs, U = 0, alpha = 2")
for i in range(6):
    g = random_graph(int(rng.integers(2, 7)), int(rng.integers(0, 4)), rng, alpha=2.0)
    rep = gap_report(g, 120)
    print(f"  graph {i}: {len(g.edges)} edges, points in gaps: {len(rep.violations)}, "
          f"gap counts agree: {rep.counts_agree}")
