"""Checking the reduction against a direct discretisation.

The oracle discretises the whole graph operator with linear finite elements
(fluxes enter as phases on the edge ends) and solves the generalised
eigenproblem K u = z M u.  Nothing in it uses eta or the discrete Laplacian.
"""
import numpy as np

from qgs import Potential, discretize, oracle_eigenvalues, quantum_spectrum, validate
from qgs.generators import random_graph, self_loop, single_edge
from qgs.oracle import observed_order

rng = np.random.default_rng(2024)
U = Potential((0, 0.25, 0.75, 1), (3.0, -5.0, 3.0))
g = random_graph(5, 3, rng, alpha=0.8, potential=U)
print(f"graph: {len(g.vertices)} vertices, {len(g.edges)} edges, fluxes {np.round(g.betas, 3)}")

report = quantum_spectrum(g, 80)
cmp = validate(g, N=400, z_cut=80, report=report)
print(f"{len(cmp.matched)} eigenvalues matched, worst relative gap {cmp.max_rel_mismatch:.2e}")
print(f"theory-only: {cmp.unmatched_theory}, oracle-only: {cmp.unmatched_oracle}")
for t, o, rel in cmp.matched[:8]:
    print(f"  theory {t:10.5f}   FE {o:10.5f}   rel {rel:.1e}")

# linear elements converge at second order in the mesh width
for name, graph, exact in (("interval", single_edge(), np.pi**2), ("circle", self_loop(), 4 * np.pi**2)):
    errs = [abs(oracle_eigenvalues(discretize(graph, N), 2)[1] - exact) for N in (100, 200, 400, 800)]
    print(f"{name}: errors {np.array(errs)}  orders {np.round(observed_order(errs), 3)}")
