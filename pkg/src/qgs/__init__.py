"""Spectra of magnetic Schroedinger operators on equilateral quantum graphs.

The spectrum of the graph operator is assembled from two ingredients: the
Hill discriminant eta(z; alpha) of the common edge potential and the spectrum
of the discrete magnetic Laplacian of the combinatorial graph.  A
finite-element discretisation of the full operator serves as a check.
"""

from .errors import *  # noqa: F401,F403
from .graph import (
    DiscreteLaplacian,
    Edge,
    GraphSpec,
    WeightedVector,
    assemble_discrete_laplacian,
    build_graph,
    discrete_eigenpairs,
    discrete_spectrum,
    has_cycle,
    load_graph,
)
from .hill import (
    Band,
    BandStructure,
    EdgeSolution,
    Gap,
    Potential,
    band_edges,
    dirichlet_count,
    dirichlet_eigenvalues,
    discriminant,
    dtn_matrix,
    fundamental_matrix,
    fundamental_solutions,
    gap_indicator,
    interpolate_edge_solution,
    invert_discriminant,
    transfer_matrix,
)
from .oracle import (
    ComparisonReport,
    DiscretizedOperator,
    compare,
    discretize,
    discretize_dirichlet_edge,
    oracle_eigenvalues,
    oracle_eigenvalues_below,
    refine_sigma0,
    validate,
)
from .spectrum import (
    GapReport,
    LiftedEigenfunction,
    Sigma0Entry,
    SpectrumPoint,
    SpectrumReport,
    Status,
    gap_report,
    lattice_spectrum,
    lift_eigenfunction,
    quantum_spectrum,
    report_from_json,
    report_to_csv,
    report_to_json,
    sigma0_classify,
    weyl_matrix,
    weyl_min_eigenvalue,
)

__version__ = "0.1.0"
