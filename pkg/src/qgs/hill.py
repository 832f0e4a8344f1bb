"""Edge problem: fundamental solutions, Hill discriminant and Kronig-Penney bands.

Every edge is the unit interval carrying the same piecewise-constant potential
``U``.  On a segment of length ``l`` with constant value ``u`` the Cauchy
problem for ``-f'' + u f = z f`` is solved exactly by

    f(l)  = C f(0) + S f'(0),         C = cos(sqrt(w)),  w = (z - u) l**2
    f'(l) = -(z - u) S f(0) + C f'(0), S = l * sinc(sqrt(w))

so the fundamental solutions on [0, 1] are a finite product of such 2x2
propagators and carry no discretisation error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
import numpy as np

from .errors import (
    BandIndexOutOfRange,
    DirichletPole,
    InvalidPotential,
    ScanResolutionExceeded,
)

__all__ = [
    "Potential",
    "EdgeSolution",
    "Band",
    "Gap",
    "BandStructure",
    "fundamental_solutions",
    "fundamental_matrix",
    "discriminant",
    "transfer_matrix",
    "gap_indicator",
    "dirichlet_count",
    "dirichlet_eigenvalues",
    "band_edges",
    "dtn_matrix",
    "invert_discriminant",
    "interpolate_edge_solution",
]

TAYLOR_EPS = 1e-6
POLE_TOL = 1e-12
CLOSED_GAP_TOL = 1e-8
EDGE_SNAP_TOL = 2e-12
MAX_HALVINGS = 60


# ---------------------------------------------------------------------------
# potential


@dataclass(frozen=True)
class Potential:
    """Piecewise-constant potential on [0, 1].

    ``values[j]`` is the value on ``(breakpoints[j], breakpoints[j + 1])``.
    """

    breakpoints: tuple[float, ...] = (0.0, 1.0)
    values: tuple[float, ...] = (0.0,)

    def __post_init__(self):
        bp = tuple(float(x) for x in self.breakpoints)
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)
        if len(bp) < 2 or len(vals) != len(bp) - 1:
            raise InvalidPotential(
                f"potential needs len(values) == len(breakpoints) - 1, "
                f"got {len(vals)} values for {len(bp)} breakpoints"
            )
        if bp[0] != 0.0 or bp[-1] != 1.0:
            raise InvalidPotential("potential breakpoints must start at 0 and end at 1")
        if any(b <= a for a, b in zip(bp, bp[1:])):
            raise InvalidPotential("potential breakpoints must be strictly increasing")
        if not all(math.isfinite(v) for v in vals):
            raise InvalidPotential("potential values must be finite")

    @classmethod
    def constant(cls, value: float = 0.0) -> "Potential":
        return cls((0.0, 1.0), (value,))

    @classmethod
    def from_dict(cls, data: dict) -> "Potential":
        try:
            return cls(tuple(data["breakpoints"]), tuple(data["values"]))
        except KeyError as exc:
            raise InvalidPotential(f"potential: missing field {exc.args[0]!r}") from None
        except TypeError as exc:
            raise InvalidPotential(f"potential: {exc}") from None

    def to_dict(self) -> dict:
        return {"breakpoints": list(self.breakpoints), "values": list(self.values)}

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    @property
    def min(self) -> float:
        return min(self.values)

    @property
    def max(self) -> float:
        return max(self.values)

    @property
    def mean(self) -> float:
        return float(np.dot(self.lengths, self.values))

    def shifted(self, c: float) -> "Potential":
        return Potential(self.breakpoints, tuple(v + c for v in self.values))

    def __call__(self, x):
        """Evaluate U at x (right-continuous at interior breakpoints)."""
        idx = np.searchsorted(self.breakpoints, x, side="right") - 1
        idx = np.clip(idx, 0, len(self.values) - 1)
        return np.asarray(self.values)[idx]

    def is_even(self, tol: float = 1e-12) -> bool:
        """True if U(x) == U(1 - x) almost everywhere (up to ``tol``)."""
        bp = np.asarray(self.breakpoints)
        merged = np.union1d(bp, 1.0 - bp)
        # breakpoints closer than tol are the same point
        merged = merged[np.concatenate(([True], np.diff(merged) > tol))]
        merged[-1] = 1.0
        if len(merged) < 2:
            return True
        mid = 0.5 * (merged[:-1] + merged[1:])
        return bool(np.all(np.abs(self(mid) - self(1.0 - mid)) <= tol))


# ---------------------------------------------------------------------------
# entire functions cos(sqrt(w)) and sin(sqrt(w))/sqrt(w)


def _cos_sqrt(w: np.ndarray) -> np.ndarray:
    out = np.empty_like(w)
    pos = w > TAYLOR_EPS
    neg = w < -TAYLOR_EPS
    small = ~(pos | neg)
    out[pos] = np.cos(np.sqrt(w[pos]))
    out[neg] = np.cosh(np.sqrt(-w[neg]))
    ws = w[small]
    # 1 - w/2 + w^2/24 - ...
    out[small] = 1 - ws / 2 * (1 - ws / 12 * (1 - ws / 30 * (1 - ws / 56 * (1 - ws / 90))))
    return out


def _sinc_sqrt(w: np.ndarray) -> np.ndarray:
    out = np.empty_like(w)
    pos = w > TAYLOR_EPS
    neg = w < -TAYLOR_EPS
    small = ~(pos | neg)
    r = np.sqrt(w[pos])
    out[pos] = np.sin(r) / r
    r = np.sqrt(-w[neg])
    out[neg] = np.sinh(r) / r
    ws = w[small]
    out[small] = 1 - ws / 6 * (1 - ws / 20 * (1 - ws / 42 * (1 - ws / 72 * (1 - ws / 110))))
    return out


def _segment(z: np.ndarray, u: float, ell: float):
    """Propagator entries (C, S, C') of one constant segment; S' == C."""
    k2 = z - u
    w = k2 * (ell * ell)
    C = _cos_sqrt(w)
    S = ell * _sinc_sqrt(w)
    return C, S, -k2 * S


def _monodromy(U: Potential, z, extended: bool = False) -> tuple[np.ndarray, ...]:
    """Entries (c(1), s(1), c'(1), s'(1)) for scalar or array z.

    The product is carried in extended precision and rounded once, so each
    entry is close to correctly rounded even where the entries grow like
    exp(sqrt(u - z)) and the Wronskian is a difference of large terms.
    ``extended=True`` skips the final rounding.
    """
    z = np.asarray(z, dtype=float)
    shape = z.shape
    z = z.reshape(-1).astype(np.longdouble)
    m00 = np.ones_like(z)
    m01 = np.zeros_like(z)
    m10 = np.zeros_like(z)
    m11 = np.ones_like(z)
    lengths = np.diff(np.asarray(U.breakpoints, dtype=np.longdouble))
    for u, ell in zip(U.values, lengths):
        C, S, Cp = _segment(z, np.longdouble(u), ell)
        m00, m01, m10, m11 = (
            C * m00 + S * m10,
            C * m01 + S * m11,
            Cp * m00 + C * m10,
            Cp * m01 + C * m11,
        )
    if extended:
        return tuple(m.reshape(shape) for m in (m00, m01, m10, m11))
    return tuple(m.astype(float).reshape(shape) for m in (m00, m01, m10, m11))


def fundamental_matrix(U: Potential, z: float, x) -> np.ndarray:
    """Matrix ``[[c(x), s(x)], [c'(x), s'(x)]]`` at points x in [0, 1].

    Returns an array of shape ``np.shape(x) + (2, 2)``.
    """
    x = np.asarray(x, dtype=float)
    shape = x.shape
    x = x.reshape(-1)
    if np.any((x < 0) | (x > 1)):
        raise ValueError("x must lie in [0, 1]")
    bp = np.asarray(U.breakpoints)
    seg = np.clip(np.searchsorted(bp, x, side="right") - 1, 0, len(U.values) - 1)
    out = np.empty((x.size, 2, 2))
    acc = np.eye(2)
    zz = np.array([float(z)])
    for j, (u, ell) in enumerate(zip(U.values, U.lengths)):
        sel = seg == j
        if np.any(sel):
            # partial segment of length t = x - x_j, all at the same z
            t = x[sel] - bp[j]
            k2 = float(z) - u
            C = _cos_sqrt(k2 * t * t)
            S = t * _sinc_sqrt(k2 * t * t)
            P = np.empty((t.size, 2, 2))
            P[:, 0, 0] = C
            P[:, 0, 1] = S
            P[:, 1, 0] = -k2 * S
            P[:, 1, 1] = C
            out[sel] = P @ acc
        C, S, Cp = (v[0] for v in _segment(zz, u, ell))
        acc = np.array([[C, S], [Cp, C]]) @ acc
    return out.reshape(shape + (2, 2))


@dataclass(frozen=True)
class EdgeSolution:
    z: float
    s1: float
    sp1: float
    c1: float
    cp1: float
    # unrounded (c1, s1, cp1, sp1) from the extended-precision product
    extended: tuple = field(default=(), repr=False, compare=False)

    @property
    def wronskian(self) -> float:
        """s'(1) c(1) - s(1) c'(1) in extended precision.

        Uses the unrounded entries when available: once the entries reach
        ~1e3 (deep below the potential), rounding them to float64 alone
        perturbs the Wronskian by ~|c s'| * 1.1e-16.
        """
        if self.extended:
            c1, s1, cp1, sp1 = self.extended
        else:
            c1, s1, cp1, sp1 = (np.longdouble(v) for v in (self.c1, self.s1, self.cp1, self.sp1))
        return float(sp1 * c1 - s1 * cp1)


def fundamental_solutions(U: Potential, z: float) -> EdgeSolution:
    ext = _monodromy(U, float(z), extended=True)
    c1, s1, cp1, sp1 = (float(v) for v in ext)
    return EdgeSolution(float(z), s1, sp1, c1, cp1, tuple(np.longdouble(v) for v in ext))


def discriminant(U: Potential, alpha: float, z):
    """eta(z; alpha) = s'(1) + c(1) + alpha s(1); vectorised over z.

    Summed as ``(s' + alpha s) + c`` so that it equals the trace of
    :func:`transfer_matrix` bit for bit.
    """
    c1, s1, _, sp1 = _monodromy(U, z)
    eta = (sp1 + alpha * s1) + c1
    return float(eta) if np.ndim(eta) == 0 else eta


def transfer_matrix(U: Potential, alpha: float, z: float) -> np.ndarray:
    """Map (f'(0+), f(0+)) -> (f'(1+), f(1+)) across one period with the delta."""
    sol = fundamental_solutions(U, z)
    return np.array(
        [
            [sol.sp1 + alpha * sol.s1, sol.cp1 + alpha * sol.c1],
            [sol.s1, sol.c1],
        ]
    )


def gap_indicator(U: Potential, alpha: float, z):
    """eta**2 - 4 evaluated as (T11 - T22)**2 + 4 T12 T21.

    Positive exactly in the gaps of the Kronig-Penney operator.  This form
    keeps relative accuracy where T is close to +-identity, i.e. at closed
    or nearly closed gaps where eta -+ 2 has a double root.
    """
    c1, s1, cp1, sp1 = _monodromy(U, z)
    t11 = sp1 + alpha * s1
    t12 = cp1 + alpha * c1
    d = (t11 - c1) ** 2 + 4.0 * t12 * s1
    return float(d) if np.ndim(d) == 0 else d


# ---------------------------------------------------------------------------
# Dirichlet eigenvalues


def dirichlet_count(U: Potential, z: float) -> int:
    """Number of Dirichlet eigenvalues below z.

    Counts the zeros of s(x; z) in (0, 1) (Sturm oscillation), segment by
    segment: Pruefer phase on segments spanning at least half a wavelength,
    a sign test elsewhere (such segments hold at most one zero).
    """
    z = float(z)
    f, fp = 0.0, 1.0
    count = 0
    last = len(U.values) - 1
    for j, (u, ell) in enumerate(zip(U.values, U.lengths)):
        C, S, Cp = (float(v[0]) for v in _segment(np.array([z]), u, ell))
        g, gp = C * f + S * fp, Cp * f + C * fp
        k2 = z - u
        if k2 * ell * ell >= math.pi**2:
            k = math.sqrt(k2)
            phi = math.atan2(f, fp / k)
            top = (phi + k * ell) / math.pi
            n = math.floor(top)
            if j == last and n == top:
                n -= 1
            count += n - math.floor(phi / math.pi)
        elif f * g < 0 or (g == 0.0 and f != 0.0 and j != last):
            count += 1
        f, fp = g, gp
    return count


def _bisect(pred, lo: float, hi: float, max_iter: int = 200) -> tuple[float, float]:
    """Shrink [lo, hi] with pred(lo) False / pred(hi) True to float resolution."""
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return lo, hi


def _s1(U: Potential, z: float) -> float:
    return float(_monodromy(U, z)[1])


def _refine_dirichlet(U: Potential, lo: float, hi: float, k: int) -> float:
    """k-th Dirichlet eigenvalue, isolated in (lo, hi]."""
    s_lo, s_hi = _s1(U, lo), _s1(U, hi)
    if s_lo == 0.0:
        return lo
    if s_hi == 0.0:
        return hi
    if (s_lo > 0) != (s_hi > 0):
        sign_lo = s_lo > 0
        lo, hi = _bisect(lambda z: (_s1(U, z) > 0) != sign_lo, lo, hi)
    else:
        # sign test inconsistent with the count at the last ulp; fall back
        # on the count itself, which is monotone in z
        lo, hi = _bisect(lambda z: dirichlet_count(U, z) > k, lo, hi)
    return float(0.5 * (lo + hi))


def _dirichlet_in(U: Potential, lo: float, hi: float) -> list[float]:
    """All Dirichlet eigenvalues in (lo, hi]."""
    n_lo = dirichlet_count(U, lo)
    n_hi = dirichlet_count(U, hi)
    if n_hi == n_lo:
        return []
    seeds = [lo]
    k = 0
    while True:
        zk = ((k + 0.5) * math.pi) ** 2 + U.mean
        if zk >= hi:
            break
        if zk > lo:
            seeds.append(zk)
        k += 1
    step = math.pi**2 / 4
    # uniform filling where the lattice is sparse relative to the step
    grid = sorted(set(seeds + list(np.arange(lo + step, min(hi, lo + 8 * step), step)) + [hi]))
    counts = [dirichlet_count(U, z) for z in grid]

    roots: list[float] = []
    stack = [(grid[i], grid[i + 1], counts[i], counts[i + 1], 0) for i in range(len(grid) - 1)]
    stack.reverse()
    while stack:
        a, b, na, nb, depth = stack.pop()
        if nb == na:
            continue
        if nb - na == 1:
            roots.append(_refine_dirichlet(U, a, b, na))
            continue
        if depth >= MAX_HALVINGS:
            raise ScanResolutionExceeded(
                f"cannot separate {nb - na} Dirichlet eigenvalues in ({a}, {b}]"
            )
        m = 0.5 * (a + b)
        nm = dirichlet_count(U, m)
        stack.append((m, b, nm, nb, depth + 1))
        stack.append((a, m, na, nm, depth + 1))
    return roots


def dirichlet_eigenvalues(U: Potential, zmax: float) -> np.ndarray:
    """Dirichlet eigenvalues mu_0 < mu_1 < ... not exceeding ``zmax``."""
    if zmax <= U.min:
        raise ValueError("zmax must exceed min(U)")
    return np.array(_dirichlet_in(U, U.min - 1.0, float(zmax)))


def _first_dirichlet(U: Potential, n: int) -> list[float]:
    """The n lowest Dirichlet eigenvalues."""
    hi = (n * math.pi) ** 2 + U.max + 1.0
    while dirichlet_count(U, hi) < n:
        hi = U.min + 2 * (hi - U.min)
    return _dirichlet_in(U, U.min - 1.0, hi)[:n]


# ---------------------------------------------------------------------------
# Kronig-Penney bands


@dataclass(frozen=True)
class Band:
    k: int
    a: float
    b: float
    partial: bool = False


@dataclass(frozen=True)
class Gap:
    """Open gap (b_k, a_{k+1}) around the Dirichlet eigenvalue mu_k."""

    k: int
    left: float
    right: float

    @property
    def width(self) -> float:
        return self.right - self.left


@dataclass(frozen=True)
class BandStructure:
    potential: Potential
    alpha: float
    zmax: float
    dirichlet: np.ndarray
    bands: tuple[Band, ...]
    gaps: tuple[Gap, ...]
    closed: tuple[int, ...]
    next_dirichlet: float = field(default=math.inf)

    @property
    def bottom(self) -> float:
        return self.bands[0].a

    def edge_value(self, k: int, end: str) -> float:
        """Discriminant value (+2 or -2) at band edge ``end`` in {'a', 'b'}."""
        left = 2.0 if k % 2 == 0 else -2.0
        return left if end == "a" else -left

    def contains(self, z: float, tol: float = 0.0) -> bool:
        return any(b.a - tol <= z <= b.b + tol for b in self.bands)

    def in_gap(self, z: float) -> bool:
        """True if z is strictly inside an open inner gap or below the bottom."""
        return z < self.bottom or any(g.left < z < g.right for g in self.gaps)

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "zmax": self.zmax,
            "dirichlet": [float(m) for m in self.dirichlet],
            "bands": [{"k": b.k, "a": b.a, "b": b.b, "partial": b.partial} for b in self.bands],
            "gaps": [{"k": g.k, "left": g.left, "right": g.right} for g in self.gaps],
            "closed": list(self.closed),
        }


def _band_bottom_anchor(U: Potential, alpha: float) -> float:
    """A point below the lowest band (eta > 2 there)."""
    lo = U.min - 1.0
    step = 1.0
    for _ in range(200):
        if discriminant(U, alpha, lo) > 2.0 and gap_indicator(U, alpha, lo) > 0:
            return lo
        step *= 2.0
        lo = U.min - step
    raise ScanResolutionExceeded("could not locate the bottom of the spectrum")


def _band_between(U: Potential, alpha: float, k: int, left: float, right: float) -> tuple[float, float]:
    """Band k inside [left, right] = [mu_{k-1}, mu_k] (left = anchor for k = 0)."""
    sgn = 1.0 if k % 2 == 0 else -1.0
    # eta has exactly one zero in (left, right), inside the band
    lo, hi = _bisect(lambda z: sgn * discriminant(U, alpha, z) < 0, left, right)
    centre = 0.5 * (lo + hi)
    in_gap = lambda z: gap_indicator(U, alpha, z) > 0  # noqa: E731
    lo, hi = _bisect(lambda z: not in_gap(z), left, centre)
    a = hi
    lo, hi = _bisect(in_gap, centre, right)
    return float(a), float(lo)


def band_edges(U: Potential, alpha: float, zmax: float) -> BandStructure:
    """Bands [a_k, b_k] of the Kronig-Penney operator meeting (-inf, zmax].

    The last band is flagged ``partial`` when it extends beyond ``zmax``.
    """
    alpha = float(alpha)
    zmax = float(zmax)
    n = dirichlet_count(U, zmax) if zmax > U.min else 0
    mus = _first_dirichlet(U, n + 1)
    mu_next = mus.pop()
    if mus and mus[-1] > zmax:  # count said "below zmax" but the root rounds above
        mu_next = mus.pop()
    anchors = [_band_bottom_anchor(U, alpha)] + mus + [mu_next]

    bands: list[Band] = []
    for k in range(len(anchors) - 1):
        a, b = _band_between(U, alpha, k, anchors[k], anchors[k + 1])
        if a > zmax:
            break
        bands.append(Band(k, a, b, partial=bool(b > zmax)))

    gaps: list[Gap] = []
    closed: list[int] = []
    for lower, upper in zip(bands, bands[1:]):
        if upper.a - lower.b <= CLOSED_GAP_TOL:
            closed.append(lower.k)
        else:
            gaps.append(Gap(lower.k, lower.b, upper.a))
    return BandStructure(
        U, alpha, zmax, np.array(mus), tuple(bands), tuple(gaps), tuple(closed), mu_next
    )


def invert_discriminant(bs: BandStructure, k: int, y: float) -> float:
    """The unique z in band k with eta(z; alpha) = y, for |y| <= 2."""
    if not 0 <= k < len(bs.bands):
        raise BandIndexOutOfRange(f"band {k} not computed (have {len(bs.bands)})")
    y = float(y)
    if abs(y) > 2.0 + EDGE_SNAP_TOL:
        raise ValueError(f"|y| must not exceed 2, got {y}")
    band = bs.bands[k]
    for end, z_end in (("a", band.a), ("b", band.b)):
        if abs(y - bs.edge_value(k, end)) <= EDGE_SNAP_TOL:
            return z_end
    U, alpha = bs.potential, bs.alpha
    decreasing = k % 2 == 0
    if decreasing:
        pred = lambda z: discriminant(U, alpha, z) < y  # noqa: E731
    else:
        pred = lambda z: discriminant(U, alpha, z) > y  # noqa: E731
    lo, hi = _bisect(pred, band.a, band.b)
    return float(0.5 * (lo + hi))


# ---------------------------------------------------------------------------
# Dirichlet-to-Neumann map and edge solutions


def dtn_matrix(U: Potential, z: float) -> np.ndarray:
    """m(z) sending (f(0), f(1)) to (f'(0), -f'(1)) for solutions at energy z."""
    sol = fundamental_solutions(U, z)
    if abs(sol.s1) <= POLE_TOL:
        raise DirichletPole(f"z = {z} is a Dirichlet eigenvalue (s(1) = {sol.s1:.3g})")
    return np.array([[-sol.c1, 1.0], [1.0, -sol.sp1]]) / sol.s1


def interpolate_edge_solution(U: Potential, z: float, f0: complex, f1: complex, x):
    """Solution of -f'' + U f = z f with boundary values f(0)=f0, f(1)=f1."""
    sol = fundamental_solutions(U, z)
    if abs(sol.s1) <= POLE_TOL:
        raise DirichletPole(f"z = {z} is a Dirichlet eigenvalue")
    A = (f1 - f0 * sol.c1) / sol.s1
    F = fundamental_matrix(U, z, x)
    return A * F[..., 0, 1] + f0 * F[..., 0, 0]


def _as_potential(obj) -> Potential:
    if isinstance(obj, Potential):
        return obj
    if isinstance(obj, dict):
        return Potential.from_dict(obj)
    raise TypeError(f"cannot interpret {type(obj).__name__} as a Potential")
