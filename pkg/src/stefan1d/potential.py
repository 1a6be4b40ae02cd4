"""Newtonian potentials of step densities and the order verifier.

In one dimension the potential of a finite step measure,
U(y) = -1/2 * integral |y - x| dmu(x), is piecewise quadratic: concave with
curvature equal to minus the local density inside the break grid, and linear
with slopes +mass/2 (left) and -mass/2 (right) outside. The subharmonic
order check certifies U_nu <= U_mu by exact per-piece maximisation of the
difference, never by sampling: on concave pieces the maximum sits at the
interior vertex or an endpoint, everywhere else at endpoints.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Sequence

from .errors import SingularityError, ValidationError
from .measure import DEFAULT_TOL, OpenSet1D, StepMeasure, restrict

_BALL_VOLUME = {1: 2.0, 2: math.pi, 3: 4.0 * math.pi / 3.0}

#: Hypothesis of the order relation that cannot be checked from step data;
#: recorded on every certificate produced by :func:`order_leq_sh_O`.
EXIT_TIME_ASSUMPTION = (
    "exit times of the open set and of its closure are assumed to agree "
    "almost surely for the started distribution (not verifiable from step data)",
)


def kernel(d: int, y) -> float:
    """Fundamental-solution kernel in dimension d, evaluated at |y|.

    Accepts a scalar displacement or a vector (its Euclidean norm is used).
    Only point evaluation is supported for d in {2, 3}; potentials of
    measures are implemented in d = 1 alone.
    """
    if d not in (1, 2, 3):
        raise ValidationError(f"kernel dimension must be 1, 2 or 3, got {d!r}")
    if isinstance(y, (int, float)):
        r = abs(float(y))
    else:
        r = math.sqrt(sum(float(t) ** 2 for t in y))
    if d == 1:
        return -0.5 * r
    if r == 0.0:
        raise SingularityError(f"kernel singular at the origin for d={d}")
    if d == 2:
        return -2.0 * math.pi * math.log(r)
    return r ** (2 - d) / (d * (d - 2) * _BALL_VOLUME[d])


@dataclass(frozen=True)
class PiecewiseQuadratic:
    """a*y^2 + b*y + c per piece; piece i covers [breakpoints[i-1], breakpoints[i]].

    Piece 0 and the last piece are the unbounded tails. For potentials of
    finite measures the tails are linear (a = 0) with slopes +-mass/2.
    """

    breakpoints: tuple[float, ...]
    coeffs: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        if len(self.coeffs) != len(self.breakpoints) + 1:
            raise ValidationError("need len(coeffs) == len(breakpoints) + 1")

    def piece_index(self, y: float) -> int:
        return bisect_right(self.breakpoints, y)

    def __call__(self, y: float) -> float:
        a, b, c = self.coeffs[self.piece_index(y)]
        return (a * y + b) * y + c

    def derivative(self) -> "PiecewiseLinear":
        return PiecewiseLinear(
            self.breakpoints, tuple((2.0 * a, b) for a, b, _ in self.coeffs)
        )

    def __sub__(self, other: "PiecewiseQuadratic") -> "PiecewiseQuadratic":
        bp = sorted({*self.breakpoints, *other.breakpoints})
        coeffs = []
        for i in range(len(bp) + 1):
            y = _sample_point(bp, i)
            a1, b1, c1 = self.coeffs[self.piece_index(y)]
            a2, b2, c2 = other.coeffs[other.piece_index(y)]
            coeffs.append((a1 - a2, b1 - b2, c1 - c2))
        return PiecewiseQuadratic(tuple(bp), tuple(coeffs))

    def negated(self) -> "PiecewiseQuadratic":
        return PiecewiseQuadratic(
            self.breakpoints, tuple((-a, -b, -c) for a, b, c in self.coeffs)
        )

    def max_on(self, lo: float, hi: float) -> tuple[float, float]:
        """Exact maximum of the function over [lo, hi] and its location."""
        if hi < lo:
            raise ValidationError("empty window")
        best, arg = -math.inf, lo
        bp = self.breakpoints
        for i, (a, b, c) in enumerate(self.coeffs):
            seg_lo = lo if i == 0 else max(lo, bp[i - 1])
            seg_hi = hi if i == len(bp) else min(hi, bp[i])
            if seg_hi < seg_lo:
                continue
            candidates = [seg_lo, seg_hi]
            if a < 0.0:
                vertex = -b / (2.0 * a)
                if seg_lo < vertex < seg_hi:
                    candidates.append(vertex)
            for y in candidates:
                val = (a * y + b) * y + c
                if val > best:
                    best, arg = val, y
        return best, arg

    def max_on_hull(self) -> tuple[float, float]:
        """Maximum over the breakpoint hull; beyond it the tails are linear."""
        if not self.breakpoints:
            a, b, c = self.coeffs[0]
            return c, 0.0
        return self.max_on(self.breakpoints[0], self.breakpoints[-1])

    def min_on(self, lo: float, hi: float) -> tuple[float, float]:
        val, arg = self.negated().max_on(lo, hi)
        return -val, arg

    def to_json(self) -> dict:
        return {
            "breakpoints": list(self.breakpoints),
            "pieces": [list(p) for p in self.coeffs],
        }


@dataclass(frozen=True)
class PiecewiseLinear:
    """m*y + b per piece, same piece convention as PiecewiseQuadratic."""

    breakpoints: tuple[float, ...]
    coeffs: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.coeffs) != len(self.breakpoints) + 1:
            raise ValidationError("need len(coeffs) == len(breakpoints) + 1")

    def piece_index(self, y: float) -> int:
        return bisect_right(self.breakpoints, y)

    def __call__(self, y: float) -> float:
        m, b = self.coeffs[self.piece_index(y)]
        return m * y + b

    def __sub__(self, other: "PiecewiseLinear") -> "PiecewiseLinear":
        bp = sorted({*self.breakpoints, *other.breakpoints})
        coeffs = []
        for i in range(len(bp) + 1):
            y = _sample_point(bp, i)
            m1, b1 = self.coeffs[self.piece_index(y)]
            m2, b2 = other.coeffs[other.piece_index(y)]
            coeffs.append((m1 - m2, b1 - b2))
        return PiecewiseLinear(tuple(bp), tuple(coeffs))

    def roots(self, lo: float, hi: float) -> tuple[list[float], list[tuple[float, float]]]:
        """All zeros on [lo, hi]: isolated roots plus flat zero segments.

        Exact per-piece enumeration; isolated roots closer than 1e-12 are
        merged. A flat segment means the function vanishes identically there.
        """
        bp = self.breakpoints
        points: list[float] = []
        flats: list[tuple[float, float]] = []
        for i, (m, b) in enumerate(self.coeffs):
            seg_lo = lo if i == 0 else max(lo, bp[i - 1])
            seg_hi = hi if i == len(bp) else min(hi, bp[i])
            if seg_hi < seg_lo:
                continue
            if m == 0.0:
                if b == 0.0 and seg_hi > seg_lo:
                    flats.append((seg_lo, seg_hi))
                elif b == 0.0:
                    points.append(seg_lo)
                continue
            y0 = -b / m
            eps = 1e-12 * max(1.0, abs(seg_lo), abs(seg_hi))
            if seg_lo - eps <= y0 <= seg_hi + eps:
                points.append(min(max(y0, seg_lo), seg_hi))
        points.sort()
        merged: list[float] = []
        for p in points:
            if merged and abs(p - merged[-1]) <= 1e-12 * max(1.0, abs(p)):
                continue
            merged.append(p)
        return merged, flats


def _sample_point(bp: Sequence[float], piece: int) -> float:
    if not bp:
        return 0.0
    if piece == 0:
        return bp[0] - 1.0
    if piece == len(bp):
        return bp[-1] + 1.0
    return 0.5 * (bp[piece - 1] + bp[piece])


# -- potentials ----------------------------------------------------------------


def potential(mu: StepMeasure) -> PiecewiseQuadratic:
    """Exact potential U(y) = -1/2 * integral |y - x| dmu(x) in d = 1.

    Breakpoints are the measure's breaks. On cell j the curvature is
    -values[j] (so U'' = -density); the left tail has slope +mass/2 and the
    right tail -mass/2.
    """
    n = mu.ncells
    if n == 0:
        return PiecewiseQuadratic((), ((0.0, 0.0, 0.0),))
    b = mu.breaks
    v = mu.values
    cell_mass = [v[i] * (b[i + 1] - b[i]) for i in range(n)]
    cell_mom = [v[i] * (b[i + 1] ** 2 - b[i] ** 2) / 2.0 for i in range(n)]
    k = sum(cell_mass)
    beta = sum(cell_mom)

    pre_m = [0.0] * (n + 1)
    pre_s = [0.0] * (n + 1)
    for i in range(n):
        pre_m[i + 1] = pre_m[i] + cell_mass[i]
        pre_s[i + 1] = pre_s[i] + cell_mom[i]
    # mass/moment strictly right of cell i is total minus prefix through i
    coeffs: list[tuple[float, float, float]] = [(0.0, k / 2.0, -beta / 2.0)]
    for i in range(n):
        suf_m = k - pre_m[i + 1]
        suf_s = beta - pre_s[i + 1]
        a = -v[i] / 2.0
        bb = v[i] * (b[i] + b[i + 1]) / 2.0 + (suf_m - pre_m[i]) / 2.0
        cc = -v[i] * (b[i] ** 2 + b[i + 1] ** 2) / 4.0 + (pre_s[i] - suf_s) / 2.0
        coeffs.append((a, bb, cc))
    coeffs.append((0.0, -k / 2.0, beta / 2.0))
    return PiecewiseQuadratic(b, tuple(coeffs))


def potential_derivative(mu: StepMeasure) -> PiecewiseLinear:
    """U'(y) = (mass on (y, inf) - mass on (-inf, y)) / 2, piecewise linear.

    Built directly from mass prefix sums rather than by differentiating
    :func:`potential`; the two routes are compared in tests.
    """
    n = mu.ncells
    if n == 0:
        return PiecewiseLinear((), ((0.0, 0.0),))
    b = mu.breaks
    v = mu.values
    cell_mass = [v[i] * (b[i + 1] - b[i]) for i in range(n)]
    k = sum(cell_mass)
    coeffs: list[tuple[float, float]] = [(0.0, k / 2.0)]
    pre = 0.0
    for i in range(n):
        suf = k - pre - cell_mass[i]
        # inside cell i: ((suf + v*(b[i+1]-y)) - (pre + v*(y-b[i]))) / 2
        coeffs.append((-v[i], (suf - pre) / 2.0 + v[i] * (b[i] + b[i + 1]) / 2.0))
        pre += cell_mass[i]
    coeffs.append((0.0, -k / 2.0))
    return PiecewiseLinear(b, tuple(coeffs))


# -- order certificates ---------------------------------------------------------


@dataclass(frozen=True)
class OrderCertificate:
    """Outcome of a potential-order check.

    ``worst_gap`` is the exact maximum of U_nu - U_mu over the joint support
    hull (the difference is linear beyond it, with slope controlled by the
    mass gap, and vanishes identically once mass and moment gaps are zero).
    ``ordered`` requires the gap and both conservation gaps to clear the
    tolerance, mass and moment gaps relative to max(1, mass).
    """

    ordered: bool
    mass_gap: float
    moment_gap: float
    worst_point: float
    worst_gap: float
    per_component: tuple["OrderCertificate", ...] | None = None
    assumptions: tuple[str, ...] = ()
    note: str = ""

    def to_json(self) -> dict:
        out = {
            "ordered": self.ordered,
            "mass_gap": self.mass_gap,
            "moment_gap": self.moment_gap,
            "worst_point": self.worst_point,
            "worst_gap": self.worst_gap,
        }
        if self.per_component is not None:
            out["per_component"] = [c.to_json() for c in self.per_component]
        if self.assumptions:
            out["assumptions"] = list(self.assumptions)
        if self.note:
            out["note"] = self.note
        return out


def dominates(mu: StepMeasure, nu: StepMeasure, tol: float = DEFAULT_TOL) -> OrderCertificate:
    """Certificate for U_mu >= U_nu on all of R (mu precedes nu in the order)."""
    diff = potential(nu) - potential(mu)
    gap, point = diff.max_on_hull()
    mass_gap = abs(mu.mass - nu.mass)
    moment_gap = abs(mu.first_moment - nu.first_moment)
    scale = max(1.0, mu.mass)
    ordered = gap <= tol and mass_gap <= tol * scale and moment_gap <= tol * scale
    return OrderCertificate(ordered, mass_gap, moment_gap, point, gap)


def order_leq_sh_O(
    mu: StepMeasure,
    nu: StepMeasure,
    open_set: OpenSet1D,
    tol: float = DEFAULT_TOL,
) -> OrderCertificate:
    """Component-wise order check for stopping before exiting the open set.

    Boundary points of the set block mass transport, so the relation holds
    iff every component conserves mass and first moment and the potential
    inequality holds for the restricted pair. Support outside the set (beyond
    tol) raises SupportError.
    """
    mus = restrict(mu, open_set, tol)
    nus = restrict(nu, open_set, tol)
    per = tuple(dominates(m_n, n_n, tol) for m_n, n_n in zip(mus, nus))
    ordered = all(c.ordered for c in per)
    worst_gap, worst_point = 0.0, 0.0
    mass_gap = moment_gap = 0.0
    for c in per:
        if c.worst_gap > worst_gap:
            worst_gap, worst_point = c.worst_gap, c.worst_point
        mass_gap = max(mass_gap, c.mass_gap)
        moment_gap = max(moment_gap, c.moment_gap)
    return OrderCertificate(
        ordered,
        mass_gap,
        moment_gap,
        worst_point,
        worst_gap,
        per_component=per,
        assumptions=EXIT_TIME_ASSUMPTION,
    )
