"""Step densities on the real line and finite unions of open intervals.

Two value types are the common currency of the whole package: StepMeasure,
a nonnegative piecewise-constant density with bounded support, and
OpenSet1D, a finite disjoint union of bounded open intervals. Every
integral here (mass, first moment, L1 gaps) is evaluated in closed form
over merged break grids; nothing is approximated by quadrature.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import RangeError, SamplingError, SupportError, ValidationError

#: Default absolute comparison tolerance used across the package.
DEFAULT_TOL = 1e-9


def _as_float_tuple(xs: Sequence[float]) -> tuple[float, ...]:
    return tuple(float(x) for x in xs)


@dataclass(frozen=True)
class StepMeasure:
    """Nonnegative piecewise-constant density with bounded support.

    ``values[i]`` is the density on ``(breaks[i], breaks[i+1])``; the density
    is zero outside ``[breaks[0], breaks[-1]]``. Instances are kept canonical:
    strictly increasing breaks, no adjacent cells with equal density, no
    leading or trailing zero cells, and the zero measure is ``breaks == ()``.
    Build instances through :func:`make_step_measure`, :func:`indicator` or
    arithmetic on existing measures; direct construction skips
    canonicalisation.

    Values are immutable after construction and safe to share across
    concurrent tasks.
    """

    breaks: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        nb, nv = len(self.breaks), len(self.values)
        if nb == 0:
            if nv != 0:
                raise ValidationError("zero measure must have empty values")
        elif nv != nb - 1:
            raise ValidationError(
                f"expected len(values) == len(breaks) - 1, got {nv} and {nb}"
            )

    # -- basic queries ----------------------------------------------------

    @property
    def ncells(self) -> int:
        return len(self.values)

    def cells(self) -> Iterator[tuple[float, float, float]]:
        """Yield (lo, hi, density) triples."""
        for i, v in enumerate(self.values):
            yield self.breaks[i], self.breaks[i + 1], v

    @property
    def mass(self) -> float:
        return sum(v * (hi - lo) for lo, hi, v in self.cells())

    @property
    def first_moment(self) -> float:
        return sum(v * (hi * hi - lo * lo) / 2.0 for lo, hi, v in self.cells())

    def support(self) -> tuple[float, float]:
        """Hull of the support; (0, 0) for the zero measure."""
        if not self.breaks:
            return (0.0, 0.0)
        return self.breaks[0], self.breaks[-1]

    def max_density(self) -> float:
        return max(self.values, default=0.0)

    def density_at(self, y: float) -> float:
        """Density at y; at a break the right cell wins (a.e. irrelevant)."""
        if not self.breaks or y < self.breaks[0] or y >= self.breaks[-1]:
            return 0.0
        i = bisect_right(self.breaks, y) - 1
        if i < 0 or i >= self.ncells:
            return 0.0
        return self.values[i]

    # -- integral transforms ----------------------------------------------

    def cdf(self, y: float) -> float:
        """Mass of (-inf, y]; piecewise linear and nondecreasing in y."""
        acc = 0.0
        for lo, hi, v in self.cells():
            if y <= lo:
                break
            acc += v * (min(y, hi) - lo)
        return acc

    def quantile(self, u: float) -> float:
        """Generalized inverse of the cdf, defined for u in [0, mass]."""
        m = self.mass
        if not self.breaks or m <= 0.0:
            raise SamplingError("quantile of a zero-mass measure is undefined")
        if u < 0.0 or u > m + 1e-12 * max(1.0, m):
            raise RangeError(f"quantile argument {u!r} outside [0, {m!r}]")
        u = min(u, m)
        acc = 0.0
        last_hi = self.breaks[0]
        for lo, hi, v in self.cells():
            if v <= 0.0:
                continue
            cell_mass = v * (hi - lo)
            if u <= acc + cell_mass:
                return lo + (u - acc) / v
            acc += cell_mass
            last_hi = hi
        return last_hi

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "StepMeasure") -> "StepMeasure":
        cells = [
            (lo, hi, a + b)
            for lo, hi, a, b in _merged_cells(self, other)
            if a + b != 0.0
        ]
        return _from_cells(cells)

    def scaled(self, factor: float) -> "StepMeasure":
        if factor < 0.0:
            raise ValidationError("scaling factor must be nonnegative")
        return _from_cells((lo, hi, v * factor) for lo, hi, v in self.cells())

    # -- wire format --------------------------------------------------------

    def to_json(self) -> dict:
        return {"breaks": list(self.breaks), "values": list(self.values)}

    @classmethod
    def from_json(cls, obj: dict) -> "StepMeasure":
        return make_step_measure(obj["breaks"], obj["values"])


@dataclass(frozen=True)
class OpenSet1D:
    """Finite disjoint union of bounded open intervals, sorted left to right.

    Components may touch (d_n == c_{n+1}); the shared boundary point still
    separates them, which matters for the component-wise order relation.
    """

    components: tuple[tuple[float, float], ...]

    def __post_init__(self):
        prev_end = -math.inf
        for i, (c, d) in enumerate(self.components):
            if not (math.isfinite(c) and math.isfinite(d)):
                raise ValidationError(f"component {i} has non-finite endpoint")
            if not c < d:
                raise ValidationError(
                    f"component {i} is empty or reversed: ({c!r}, {d!r})"
                )
            if c < prev_end:
                raise ValidationError(
                    f"component {i} overlaps or is out of order at {c!r}"
                )
            prev_end = d

    @classmethod
    def interval(cls, c: float, d: float) -> "OpenSet1D":
        return cls(((float(c), float(d)),))

    @classmethod
    def of(cls, *intervals: tuple[float, float]) -> "OpenSet1D":
        return cls(tuple((float(c), float(d)) for c, d in intervals))

    @property
    def length(self) -> float:
        return sum(d - c for c, d in self.components)

    def hull(self) -> tuple[float, float]:
        if not self.components:
            return (0.0, 0.0)
        return self.components[0][0], self.components[-1][1]

    def contains_point(self, x: float) -> bool:
        return any(c < x < d for c, d in self.components)

    def to_json(self) -> dict:
        return {"components": [[c, d] for c, d in self.components]}

    @classmethod
    def from_json(cls, obj: dict) -> "OpenSet1D":
        comps = obj["components"]
        return cls(tuple((float(c), float(d)) for c, d in comps))


# -- constructors ------------------------------------------------------------


def _from_cells(cells: Iterable[tuple[float, float, float]]) -> StepMeasure:
    """Canonical StepMeasure from (lo, hi, density) cells.

    Cells must be non-overlapping but may touch, arrive unsorted, and may
    include zero-width or zero-density entries (dropped). Gaps between kept
    cells become explicit zero cells so the break grid stays contiguous.
    """
    pos = sorted(
        (float(lo), float(hi), float(v))
        for lo, hi, v in cells
        if hi > lo and v != 0.0
    )
    breaks: list[float] = []
    values: list[float] = []
    for lo, hi, v in pos:
        if breaks:
            # tolerate clipping dust, reject genuine overlap
            if lo < breaks[-1] - 1e-12 * max(1.0, abs(breaks[-1])):
                raise ValidationError("internal: overlapping cells")
            lo = max(lo, breaks[-1])
            if hi <= lo:
                continue
        if not breaks:
            breaks.extend((lo, hi))
            values.append(v)
            continue
        if lo > breaks[-1]:
            values.append(0.0)
            breaks.append(lo)
        if values and values[-1] == v:
            breaks[-1] = hi
        else:
            values.append(v)
            breaks.append(hi)
    return StepMeasure(tuple(breaks), tuple(values))


def canonicalize(mu: StepMeasure) -> StepMeasure:
    """Re-normalise a StepMeasure; idempotent on canonical inputs."""
    return _from_cells(mu.cells())


def make_step_measure(breaks: Sequence[float], values: Sequence[float]) -> StepMeasure:
    """Validated constructor; the result is canonical and equal a.e. to the input."""
    b = _as_float_tuple(breaks)
    v = _as_float_tuple(values)
    if len(b) == 0 and len(v) == 0:
        return StepMeasure((), ())
    if len(v) != len(b) - 1:
        raise ValidationError(
            f"expected len(values) == len(breaks) - 1, got {len(v)} and {len(b)}"
        )
    for i, x in enumerate(b):
        if not math.isfinite(x):
            raise ValidationError(f"breaks[{i}] is not finite: {x!r}")
    for i in range(len(b) - 1):
        if b[i + 1] <= b[i]:
            raise ValidationError(
                f"breaks must be strictly increasing: breaks[{i}]={b[i]!r} "
                f">= breaks[{i + 1}]={b[i + 1]!r}"
            )
    for i, x in enumerate(v):
        if not math.isfinite(x):
            raise ValidationError(f"values[{i}] is not finite: {x!r}")
        if x < 0.0:
            raise ValidationError(f"values[{i}] is negative: {x!r}")
    return _from_cells(zip(b, b[1:], v))


def indicator(a: float, b: float, density: float = 1.0) -> StepMeasure:
    """density * chi_(a, b)."""
    if not b > a:
        raise ValidationError(f"indicator needs a < b, got ({a!r}, {b!r})")
    if density < 0.0:
        raise ValidationError("density must be nonnegative")
    return _from_cells([(a, b, density)])


def zero_measure() -> StepMeasure:
    return StepMeasure((), ())


def sum_measures(measures: Iterable[StepMeasure]) -> StepMeasure:
    out = zero_measure()
    for mu in measures:
        out = out + mu
    return out


# -- merged-grid operations ---------------------------------------------------


def _merged_cells(
    mu: StepMeasure, nu: StepMeasure
) -> Iterator[tuple[float, float, float, float]]:
    """Yield (lo, hi, density_mu, density_nu) over the merged break grid."""
    grid = sorted({*mu.breaks, *nu.breaks})
    for lo, hi in zip(grid, grid[1:]):
        mid = 0.5 * (lo + hi)
        yield lo, hi, mu.density_at(mid), nu.density_at(mid)


def mass(mu: StepMeasure) -> float:
    return mu.mass


def first_moment(mu: StepMeasure) -> float:
    return mu.first_moment


def positive_part_l1(mu: StepMeasure, nu: StepMeasure) -> float:
    """Integral of max(mu - nu, 0), exact over the merged break grid."""
    return sum(
        (a - b) * (hi - lo) for lo, hi, a, b in _merged_cells(mu, nu) if a > b
    )


def l1_distance(mu: StepMeasure, nu: StepMeasure) -> float:
    """Integral of |mu - nu|."""
    return sum(abs(a - b) * (hi - lo) for lo, hi, a, b in _merged_cells(mu, nu))


def pointwise_leq(mu: StepMeasure, nu: StepMeasure, tol: float = DEFAULT_TOL) -> bool:
    """True iff mu <= nu + tol a.e."""
    if tol < 0.0:
        raise ValidationError("tolerance must be nonnegative")
    return all(a <= b + tol for _, _, a, b in _merged_cells(mu, nu))


def measures_allclose(mu: StepMeasure, nu: StepMeasure, tol: float = DEFAULT_TOL) -> bool:
    """True iff the densities agree within tol a.e."""
    return all(abs(a - b) <= tol for _, _, a, b in _merged_cells(mu, nu))


def cdf(mu: StepMeasure, y: float) -> float:
    return mu.cdf(y)


def quantile(mu: StepMeasure, u: float) -> float:
    return mu.quantile(u)


def restrict(
    mu: StepMeasure, open_set: OpenSet1D, tol: float = DEFAULT_TOL
) -> list[StepMeasure]:
    """Component-wise restrictions of mu to the open set.

    The returned list is aligned with ``open_set.components`` and the sum of
    the parts equals mu restricted to the set. Mass outside the set beyond
    tol (relative to max(1, total mass)) raises SupportError carrying the
    leaked amount.
    """
    parts: list[StepMeasure] = []
    for c, d in open_set.components:
        sub = [
            (max(lo, c), min(hi, d), v)
            for lo, hi, v in mu.cells()
            if min(hi, d) > max(lo, c)
        ]
        parts.append(_from_cells(sub))
    leaked = mu.mass - sum(p.mass for p in parts)
    if leaked > tol * max(1.0, mu.mass):
        raise SupportError(
            f"measure carries mass {leaked:.9g} outside the open set", leaked
        )
    return parts
