import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qgs.errors import NotAnEigenpair
from qgs.generators import cycle_graph, path_graph, random_graph, self_loop, single_edge
from qgs.graph import assemble_discrete_laplacian, discrete_eigenpairs
from qgs.hill import Potential
from qgs.spectrum import (
    SpectrumPoint,
    Status,
    _merge,
    eigen_multiplicity,
    gap_report,
    lattice_spectrum,
    lift_eigenfunction,
    quantum_spectrum,
    report_from_json,
    report_to_csv,
    report_to_json,
    weyl_matrix,
    weyl_min_eigenvalue,
)

PI = math.pi
PI2 = PI**2


def with_mult(report, zmax=None):
    return report.theory_values(zmax)


# --- analytic geometries -----------------------------------------------------------


def test_interval_neumann_values():
    r = quantum_spectrum(single_edge(), 100)
    np.testing.assert_allclose([p.z for p in r.points], [0, PI2, 4 * PI2, 9 * PI2], atol=1e-8)
    assert all(p.mult == 1 for p in r.points)
    # the points at mu_k close a gap and are shared by two bands
    assert [p.shared_band for p in r.points] == [None, 1, 2, 3]


def test_circle_points_and_sigma0():
    r = quantum_spectrum(self_loop(), 100)
    np.testing.assert_allclose([p.z for p in r.points], [0, 4 * PI2], atol=1e-8)
    status = {e.k: e.status for e in r.sigma0}
    assert status == {0: Status.ABSENT, 1: Status.PRESENT, 2: Status.ABSENT}
    # cos and sin modes at (2 pi)^2
    np.testing.assert_allclose(with_mult(r), [0, 4 * PI2, 4 * PI2], atol=1e-8)


def test_path3_points():
    r = quantum_spectrum(path_graph(3), 100)
    expected = [(k * PI / 2) ** 2 for k in range(7)]
    np.testing.assert_allclose(with_mult(r), expected, atol=1e-8)
    assert all(e.status is Status.ABSENT for e in r.sigma0)


@pytest.mark.parametrize("n", [2, 4, 5])
def test_path_graph_is_a_long_interval(n):
    L = n - 1
    r = quantum_spectrum(path_graph(n), 150)
    expected = [(k * PI / L) ** 2 for k in range(100) if (k * PI / L) ** 2 <= 150]
    np.testing.assert_allclose(with_mult(r), expected, atol=1e-8)


@pytest.mark.parametrize("beta", [0.0, 0.3, 1.0, PI / 2, PI, 4.0])
def test_magnetic_loop(beta):
    # a ring of length 1 with flux beta: z = (2 pi m + beta)^2, m in Z
    zmax = 200.0
    r = quantum_spectrum(self_loop(beta=beta), zmax)
    expected = sorted(
        (2 * PI * m + beta) ** 2 for m in range(-5, 6) if (2 * PI * m + beta) ** 2 <= zmax
    )
    np.testing.assert_allclose(with_mult(r), expected, atol=1e-8)


@pytest.mark.parametrize("n, beta", [(3, 0.0), (3, 1.3), (4, 0.0), (4, PI), (5, 2.2)])
def test_magnetic_cycle(n, beta):
    # a ring of length n with total flux beta: z = ((2 pi m + beta) / n)^2
    zmax = 120.0
    r = quantum_spectrum(cycle_graph(n, beta=beta), zmax)
    expected = sorted(
        ((2 * PI * m + beta) / n) ** 2 for m in range(-40, 41) if ((2 * PI * m + beta) / n) ** 2 <= zmax
    )
    np.testing.assert_allclose(with_mult(r), expected, atol=1e-8)


def test_sigma0_for_self_loop_with_half_flux():
    r = quantum_spectrum(self_loop(beta=PI), 100)
    assert r.sigma0[0].status is Status.PRESENT and r.sigma0[0].reason == "kernel"


def test_robin_ends_drop_points_on_dirichlet_values():
    # with alpha != 0 the interval has no eigenvalue at (k pi)^2, although
    # eta = +-2 there (band edge of the periodic problem)
    g = single_edge(alpha=2.0)
    r = quantum_spectrum(g, 100)
    for mu in r.bands_used.dirichlet:
        assert all(abs(p.z - mu) > 1e-6 for p in r.points)
        assert eigen_multiplicity(g, mu) == (0, True)
    # alpha(v) = 1 at both ends: tan k = 2k / (k^2 - 1)
    for p in r.points:
        k = math.sqrt(p.z)
        assert math.tan(k) * (k * k - 1) == pytest.approx(2 * k, abs=1e-6)


def test_energy_shift_of_graph_spectrum():
    g = random_graph(4, 2, np.random.default_rng(11), alpha=0.5)
    r = quantum_spectrum(g, 80)
    r2 = quantum_spectrum(g.with_(potential=Potential.constant(0.75)), 80.75)
    np.testing.assert_allclose(with_mult(r2), with_mult(r) + 0.75, atol=1e-9)


# --- Weyl function and multiplicities ------------------------------------------------


@st.composite
def graphs(draw, alpha=None):
    seed = draw(st.integers(0, 2**32 - 1))
    nv = draw(st.integers(1, 5))
    extra = draw(st.integers(0 if nv > 1 else 1, 3))
    rng = np.random.default_rng(seed)
    a = draw(st.floats(-2, 3)) if alpha is None else alpha
    v = rng.uniform(-5, 5, 2)
    U = Potential((0, 0.3, 0.7, 1), (v[0], v[1], v[0]))
    return random_graph(nv, extra, rng, alpha=a, potential=U)


@settings(max_examples=25, deadline=None)
@given(graphs())
def test_points_are_kernels_of_weyl_function(g):
    r = quantum_spectrum(g, 60)
    mus = r.bands_used.dirichlet
    for p in r.points:
        if np.min(np.abs(mus - p.z), initial=np.inf) < 1e-6:
            continue
        assert weyl_min_eigenvalue(g, p.z) <= 1e-7 * max(1.0, np.abs(weyl_matrix(g, p.z)).max())
        d, clear = eigen_multiplicity(g, p.z)
        assert clear and d == p.mult


def test_weyl_matrix_hermitian_and_picture_similarity():
    g = random_graph(5, 3, np.random.default_rng(2), alpha=1.0)
    M = weyl_matrix(g, 3.7)
    np.testing.assert_allclose(M, M.conj().T, atol=1e-14)
    Mw = weyl_matrix(g, 3.7, picture="weighted")
    np.testing.assert_allclose(np.sort(np.linalg.eigvals(Mw).real), np.linalg.eigvalsh(M), atol=1e-10)


@settings(max_examples=25, deadline=None)
@given(graphs(alpha=2.0))
def test_no_points_inside_kronig_penney_gaps(g):
    rep = gap_report(g, 100)
    assert rep.pa_gaps_free


# --- eigenfunctions ------------------------------------------------------------------


@settings(max_examples=20, deadline=None)
@given(graphs())
def test_lifted_eigenfunctions_satisfy_vertex_conditions(g):
    r = quantum_spectrum(g, 50)
    L = assemble_discrete_laplacian(g)
    w, v = discrete_eigenpairs(L)
    phi = L.to_weighted(v)
    mus = r.bands_used.dirichlet
    for p in r.points:
        if np.min(np.abs(mus - p.z), initial=np.inf) < 1e-6:
            continue
        h = phi[:, int(np.argmin(np.abs(w - p.lam)))]
        f = lift_eigenfunction(g, p.z, h)
        assert f.residuals["continuity"] < 1e-8
        assert f.residuals["flux"] < 1e-7


def test_lift_at_dirichlet_points():
    circle = self_loop()
    f = lift_eigenfunction(circle, 4 * PI2, [1.0])
    x = np.linspace(0, 1, 7)
    np.testing.assert_allclose(f(0, x), np.cos(2 * PI * x), atol=1e-9)
    edge = single_edge()
    f = lift_eigenfunction(edge, PI2, [1.0, -1.0])
    np.testing.assert_allclose(f(0, x), np.cos(PI * x), atol=1e-9)
    assert f.residuals["flux"] < 1e-9


def test_lift_rejects_non_eigenpairs():
    g = path_graph(3)
    with pytest.raises(NotAnEigenpair):
        lift_eigenfunction(g, 3.0, [1.0, 0.2, -0.5])
    with pytest.raises(NotAnEigenpair):
        lift_eigenfunction(single_edge(), PI2, [1.0, 1.0])


# --- gaps ------------------------------------------------------------------------------


def test_gap_counts_on_path3():
    rep = gap_report(path_graph(3), 250)
    assert [r.k for r in rep.rows] == [-1, 0, 1, 2, 3]
    assert all(r.lambda_gaps == r.delta_gaps == 2 for r in rep.rows)
    assert rep.counts_agree and rep.pa_gaps_free


def test_gap_counts_on_magnetic_graph():
    g = random_graph(5, 2, np.random.default_rng(5), alpha=1.0)
    rep = gap_report(g, 150)
    assert rep.counts_agree


def test_finite_gaps_are_complement_of_points():
    r = quantum_spectrum(path_graph(3), 60)
    zs = [p.z for p in r.points]
    assert r.gaps[0][0] == -1.0 and r.gaps[-1][1] == 60.0
    for (a, b), z in zip(r.gaps, zs):
        assert b == pytest.approx(z, abs=1e-12)
    assert len(r.gaps) == len(zs) + 1


# --- lattices ---------------------------------------------------------------------------


def test_lattice_line_has_no_gaps_for_free_case():
    r = lattice_spectrum(1, Potential(), 0.0, 100)
    assert r.points == ()
    assert all(e.status is Status.ABSENT for e in r.sigma0)
    assert r.intervals[0][0] == pytest.approx(0.0, abs=1e-12) and r.intervals[-1][1] == 100.0
    assert len(r.gaps) == 1 and r.gaps[0][1] == pytest.approx(0.0, abs=1e-12)


def test_lattice_plane_has_dirichlet_eigenvalues_in_gaps():
    r = lattice_spectrum(2, Potential(), 2.0, 100)
    pp = [e.mu for e in r.sigma0 if e.status is Status.PRESENT]
    np.testing.assert_allclose(pp, [PI2, 4 * PI2, 9 * PI2], atol=1e-8)
    for mu in pp:
        assert not any(a < mu < b for a, b in r.intervals)
    # gaps exclude the point spectrum (here mu_k is the left end of gap k)
    for a, b in r.gaps:
        assert not any(a + 1e-9 < mu < b - 1e-9 for mu in pp)
    assert r.mode == "lattice-2"


def test_lattice_rejects_bad_dimension():
    with pytest.raises(ValueError):
        lattice_spectrum(0, Potential(), 0.0, 10)


# --- merging and serialisation -----------------------------------------------------------


def test_merge_marks_coincident_points():
    pts = [SpectrumPoint(5.0, 1, 0.5, 1), SpectrumPoint(5.0 + 1e-12, 2, -0.5, 1), SpectrumPoint(9.0, 1, 1.0, 1),
           SpectrumPoint(9.0 + 1e-10, 1, 1.0, 2)]
    out = _merge(pts)
    assert [p.coincident for p in out] == [True, True, False]
    assert out[2].shared_band == 2


def test_json_roundtrip():
    r = quantum_spectrum(random_graph(4, 2, np.random.default_rng(9), alpha=1.0), 80)
    text = report_to_json(r)
    back = report_from_json(text)
    assert report_to_json(back) == text
    assert len(back.points) == len(r.points)
    assert [e.status for e in back.sigma0] == [e.status for e in r.sigma0]


def test_json_lattice_roundtrip_with_infinite_bounds():
    r = lattice_spectrum(2, Potential(), 2.0, 50)
    text = report_to_json(r)
    assert report_to_json(report_from_json(text)) == text


def test_csv_layout():
    text = report_to_csv(quantum_spectrum(single_edge(), 50))
    lines = text.splitlines()
    assert lines[0] == "kind,z,z_right,mult,lambda,band,status"
    assert all(len(line.split(",")) == 7 for line in lines)
    assert lines[1].startswith("disc,")
