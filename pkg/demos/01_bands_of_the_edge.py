"""Bands of the periodic edge problem.

Every computation on a graph starts from a single edge: the fundamental
solutions c and s of -f'' + U f = z f, the discriminant
eta(z) = s'(1) + c(1) + alpha s(1), and the Dirichlet eigenvalues (zeros of
s(1)).  The bands of the Kronig-Penney operator are the sets where
|eta| <= 2; each one sits between consecutive Dirichlet eigenvalues.
"""
import math
from pathlib import Path

import numpy as np

from qgs import Potential, band_edges, discriminant

# --- free edge, three couplings --------------------------------------------
U0 = Potential()
for alpha in (-2.0, 0.0, 2.0):
    bs = band_edges(U0, alpha, 100)
    print(f"alpha = {alpha:+.0f}")
    for b in bs.bands:
        tail = "  (extends past zmax)" if b.partial else ""
        print(f"  band {b.k}: [{b.a:10.5f}, {b.b:10.5f}]{tail}")
    widths = ", ".join(f"{g.width:.4f}" for g in bs.gaps) or "none"
    print(f"  open gap widths: {widths}")

# at alpha = 0 every gap is closed; at alpha = 2 every gap is open and its
# left end is exactly a Dirichlet eigenvalue (k pi)^2
bs = band_edges(U0, 2.0, 100)
print("gap left ends / pi^2:", [round(g.left / math.pi**2, 12) for g in bs.gaps])

# --- a step potential ---------------------------------------------------------
step = Potential((0, 0.3, 0.7, 1), (6.0, -4.0, 6.0))
bs = band_edges(step, 1.0, 150)
print("\nstep potential, alpha = 1")
print("  Dirichlet eigenvalues:", np.round(bs.dirichlet, 6))
for b in bs.bands:
    print(f"  band {b.k}: [{b.a:.6f}, {b.b:.6f}]")

# --- a discriminant curve for plotting elsewhere --------------------------------
z = np.linspace(step.min - 1, 150, 2001)
eta = discriminant(step, 1.0, z)
out = Path("step_discriminant.csv")
np.savetxt(out, np.column_stack([z, eta]), delimiter=",", header="z,eta", comments="", fmt="%.12g")
print(f"\nwrote {len(z)} samples of eta to {out.name}")
