"""Spectra of small graphs from eta and the discrete Laplacian.

For z off the Dirichlet spectrum, z is an eigenvalue of the quantum graph
exactly when eta(z) / 2 is an eigenvalue of the discrete magnetic Laplacian.
Each discrete eigenvalue therefore produces one point per band.  At the
Dirichlet eigenvalues the multiplicity is settled by solving the vertex
conditions directly.
"""
import math
from pathlib import Path

from qgs import load_graph, quantum_spectrum
from qgs.generators import cycle_graph, self_loop

GRAPHS = Path(__file__).with_name("graphs")
PI2 = math.pi**2


def show(name, report):
    print(f"{name}")
    for p in report.points:
        shared = f", shared with band {p.shared_band}" if p.shared_band is not None else ""
        print(f"  z = {p.z:11.6f} = {p.z / PI2:8.5f} pi^2   mult {p.mult}  lambda {round(p.lam, 12) + 0.0:+.4f}  band {p.band}{shared}")
    extra = [e for e in report.sigma0 if e.status.value == "Present"]
    for e in extra:
        print(f"  z = {e.mu:11.6f} = {e.mu / PI2:8.5f} pi^2   mult {e.mult}  (vanishes at every vertex)")


# interval with free ends: the Neumann values (k pi)^2
show("interval", quantum_spectrum(load_graph(GRAPHS / "edge.graph"), 100))

# circle: (2 k pi)^2, the nonzero ones double (cos and sin)
show("\ncircle", quantum_spectrum(load_graph(GRAPHS / "circle.graph"), 160))

# two edges in a row behave like an interval of length 2
show("\npath with 3 vertices", quantum_spectrum(load_graph(GRAPHS / "path3.graph"), 60))

# a flux threading a ring splits the doublets: z = (2 pi m + beta)^2
beta = 0.4
r = quantum_spectrum(self_loop(beta=beta), 120)
print(f"\nring with flux {beta}:", [round(float(z), 6) for z in r.theory_values()])
closed = sorted((2 * math.pi * m + beta) ** 2 for m in range(-3, 3))
print("closed form:          ", [round(z, 6) for z in closed if z <= 120])

# a triangle: a ring of length 3
r = quantum_spectrum(cycle_graph(3), 60)
print("\ntriangle / (2 pi / 3)^2:", [round(float(z) / (2 * math.pi / 3) ** 2, 6) for z in r.theory_values()])
