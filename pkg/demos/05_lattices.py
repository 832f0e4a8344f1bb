"""Square lattices.

On Z^n the discrete Laplacian has the whole of [-1, 1] as spectrum, so the
graph spectrum contains every band of the periodic edge problem.  For n >= 2
each Dirichlet eigenvalue is in addition an eigenvalue of infinite
multiplicity (a mode living on one square); on the line there are none.
"""
import math

from qgs import Potential, lattice_spectrum

for n in (1, 2, 3):
    r = lattice_spectrum(n, Potential(), 2.0, 100)
    print(f"Z^{n}, alpha = 2")
    print("  bands:", [(round(a, 4), round(b, 4)) for a, b in r.intervals])
    pp = [e.mu for e in r.sigma0 if e.status.value == "Present"]
    print("  eigenvalues / pi^2:", [round(m / math.pi**2, 10) for m in pp])
    print("  gaps:", [(round(a, 4), round(b, 4)) for a, b in r.gaps])
