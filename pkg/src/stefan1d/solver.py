"""Maximal two-block targets from mass and first-moment conservation.

Per component (c, d) of the domain, the saturated target is the indicator
of (c, e) union (f, d) whose block widths p = e - c and q = d - f satisfy
p + q = k and the first-moment match; eliminating q gives the closed form

    p = (k * (d - k/2) - beta) / ((d - c) - k)        (k < d - c)

with the whole component covered when k equals its length. Every solve is
construct-then-verify: the result must pass the component-wise potential
order check or the operation fails loudly. A left-to-right sweep over unit
blocks provides an independent oracle for the closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .errors import (
    AdmissibilityError,
    InfeasibilityError,
    ValidationError,
    VerificationError,
)
from .measure import (
    DEFAULT_TOL,
    OpenSet1D,
    StepMeasure,
    _from_cells,
    indicator,
    measures_allclose,
    restrict,
)
from .potential import (
    OrderCertificate,
    order_leq_sh_O,
    potential,
    potential_derivative,
)


@dataclass(frozen=True)
class BlockPair:
    """Component endpoints c <= e <= f <= d of a two-block indicator."""

    c: float
    e: float
    f: float
    d: float

    def __post_init__(self):
        slack = 1e-9 * max(1.0, abs(self.c), abs(self.d))
        if not (self.c - slack <= self.e <= self.f + slack and self.f <= self.d + slack):
            raise ValidationError(
                f"block endpoints out of order: ({self.c}, {self.e}, {self.f}, {self.d})"
            )

    @property
    def p(self) -> float:
        """Left block width."""
        return self.e - self.c

    @property
    def q(self) -> float:
        """Right block width."""
        return self.d - self.f

    def measure(self) -> StepMeasure:
        return _from_cells([(self.c, self.e, 1.0), (self.f, self.d, 1.0)])

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.c, self.e, self.f, self.d)


@dataclass(frozen=True)
class MaximalSolution:
    """Two-block target per component, with the per-component (k, beta) data."""

    blocks: tuple[BlockPair, ...]
    measure: StepMeasure
    provenance: tuple[tuple[float, float], ...]
    certificate: OrderCertificate | None = None

    def to_json(self) -> dict:
        out = {
            "blocks": [list(b.as_tuple()) for b in self.blocks],
            "k": [k for k, _ in self.provenance],
            "beta": [b for _, b in self.provenance],
            "measure": self.measure.to_json(),
        }
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        return out


def moment_window(c: float, d: float, k: float) -> tuple[float, float]:
    """First moments attainable by densities <= 1 with mass k on (c, d)."""
    return k * c + 0.5 * k * k, k * d - 0.5 * k * k


def solve_component(c: float, d: float, k: float, beta: float) -> BlockPair:
    """Closed-form two-block target on a single interval.

    Infeasible (k, beta) raises InfeasibilityError naming the violated bound;
    floating dust at the window edges is absorbed by clamping the block
    widths into [0, k].
    """
    if not c < d:
        raise ValidationError(f"interval is empty or reversed: ({c!r}, {d!r})")
    width = d - c
    slack = 1e-12 * max(1.0, width, abs(c), abs(d), abs(k), abs(beta))
    if k < -slack:
        raise InfeasibilityError(f"mass k={k!r} is negative")
    if k > width + slack:
        raise InfeasibilityError(
            f"mass k={k!r} exceeds the interval length {width!r}"
        )
    k = min(max(k, 0.0), width)
    lo, hi = moment_window(c, d, k)
    if beta < lo - slack:
        raise InfeasibilityError(
            f"first moment {beta!r} below the lower bound k*c + k^2/2 = {lo!r}"
        )
    if beta > hi + slack:
        raise InfeasibilityError(
            f"first moment {beta!r} above the upper bound k*d - k^2/2 = {hi!r}"
        )
    if width - k <= slack:
        # saturated component: blocks cover (c, d)
        mid = 0.5 * (c + d)
        return BlockPair(c, mid, mid, d)
    p = (k * (d - 0.5 * k) - beta) / (width - k)
    p = min(max(p, 0.0), k)
    return BlockPair(c, c + p, d - (k - p), d)


def solve(
    mu: StepMeasure, open_set: OpenSet1D, tol: float = DEFAULT_TOL
) -> MaximalSolution:
    """Maximal target for mu on the open set, certified before returning.

    Each component is solved independently from its restricted mass and
    first moment. The assembled target is then checked against mu with the
    component-wise potential order verifier; a failed check raises
    VerificationError carrying the certificate.
    """
    top = mu.max_density()
    if top > 1.0 + tol:
        raise AdmissibilityError(
            f"density {top:.9g} exceeds the admissible bound 1"
        )
    parts = restrict(mu, open_set, tol)
    blocks: list[BlockPair] = []
    stats: list[tuple[float, float]] = []
    for (c, d), mu_n in zip(open_set.components, parts):
        k = mu_n.mass
        beta = mu_n.first_moment
        blocks.append(solve_component(c, d, k, beta))
        stats.append((k, beta))
    target = _blocks_measure(blocks)
    certificate = order_leq_sh_O(mu, target, open_set, tol)
    if not certificate.ordered:
        raise VerificationError(
            "solver output failed the potential order certification "
            f"(worst gap {certificate.worst_gap:.3e} at {certificate.worst_point:.9g})",
            certificate,
        )
    return MaximalSolution(tuple(blocks), target, tuple(stats), certificate)


def _blocks_measure(blocks: Iterable[BlockPair]) -> StepMeasure:
    cells = []
    for b in blocks:
        cells.append((b.c, b.e, 1.0))
        cells.append((b.f, b.d, 1.0))
    return _from_cells(cells)


# -- sweep oracle ----------------------------------------------------------------


def _unit_blocks(mu: StepMeasure) -> list[tuple[float, float]]:
    blocks = []
    for lo, hi, v in mu.cells():
        if v == 0.0:
            continue
        if abs(v - 1.0) > 1e-12:
            raise ValidationError(
                f"sweep needs unit-density blocks, found density {v!r} on "
                f"({lo!r}, {hi!r}); overlapping input blocks add up"
            )
        blocks.append((lo, hi))
    return blocks


def _sweep(mu: StepMeasure, open_set: OpenSet1D):
    if len(open_set.components) != 1:
        raise ValidationError("sweep operates on a single-interval domain")
    (c, d) = open_set.components[0]
    blocks = _unit_blocks(mu)
    if not blocks:
        return BlockPair(c, c, d, d), []
    if blocks[0][0] <= c or blocks[-1][1] >= d:
        raise ValidationError("sweep blocks must lie strictly inside the domain")

    states: list[StepMeasure] = []
    sat_end = c  # (c, sat_end) is saturated so far
    carry = blocks[0]
    for i, nxt in enumerate(blocks[1:], start=1):
        a, b = carry
        sub = solve_component(sat_end, nxt[0], b - a, (b * b - a * a) / 2.0)
        sat_end = sub.e
        carry = (sub.f, nxt[1])  # produced right block touches the next one
        states.append(
            _from_cells(
                [(c, sat_end, 1.0), (carry[0], carry[1], 1.0)]
                + [(lo, hi, 1.0) for lo, hi in blocks[i + 1 :]]
            )
        )
    a, b = carry
    final = solve_component(sat_end, d, b - a, (b * b - a * a) / 2.0)
    return BlockPair(c, final.e, final.f, d), states


def solve_by_sweep(mu: StepMeasure, open_set: OpenSet1D) -> MaximalSolution:
    """Left-to-right merge oracle for the closed form, on one interval.

    Solves the leftmost block in the sub-domain ending at the next block's
    left edge, merges the produced right block with that one, and repeats;
    mass and first moment are conserved at every step, so the final two-block
    state must match :func:`solve`. No certification is run here, keeping the
    route independent.
    """
    block, _ = _sweep(mu, open_set)
    target = _blocks_measure([block])
    return MaximalSolution(
        (block,), target, ((mu.mass, mu.first_moment),), certificate=None
    )


def sweep_states(mu: StepMeasure, open_set: OpenSet1D) -> list[StepMeasure]:
    """Intermediate measures produced by the sweep, excluding mu and the target."""
    _, states = _sweep(mu, open_set)
    return states


# -- stationary point of the potential difference ---------------------------------


def critical_point(k: float, beta: float) -> float:
    """Unique stationary point of U_target' - U_source' on (-1, 1).

    The source is the single unit block with the given mass and first moment,
    the target its two-block solution on (-1, 1). Returns
    s0 = 2*beta*(1-k)/(k*(2-k)) after certifying, via the exact piecewise
    linear root finder, that s0 is the only interior zero of the derivative
    difference, that the potential difference attains its minimum there, and
    that it vanishes at the endpoints.
    """
    if not 0.0 < k < 2.0:
        raise InfeasibilityError(f"mass must satisfy 0 < k < 2, got {k!r}")
    lo = 0.5 * k * k - k
    hi = k - 0.5 * k * k
    if not lo < beta < hi:
        raise InfeasibilityError(
            f"first moment {beta!r} outside the open window ({lo!r}, {hi!r})"
        )
    s0 = 2.0 * beta * (1.0 - k) / (k * (2.0 - k))

    a = beta / k - 0.5 * k
    b = beta / k + 0.5 * k
    source = indicator(a, b)
    target = solve_component(-1.0, 1.0, k, beta).measure()

    dprime = potential_derivative(target) - potential_derivative(source)
    roots, flats = dprime.roots(-1.0, 1.0)
    margin = 1e-7
    interior = [r for r in roots if -1.0 + margin < r < 1.0 - margin]
    interior_flats = [
        seg for seg in flats if seg[1] > -1.0 + margin and seg[0] < 1.0 - margin
    ]
    if interior_flats:
        raise VerificationError(
            f"derivative difference vanishes on segments {interior_flats}"
        )
    if len(interior) != 1:
        raise VerificationError(
            f"expected a unique interior stationary point, found {interior}"
        )
    if abs(interior[0] - s0) > 1e-10 * max(1.0, abs(s0)):
        raise VerificationError(
            f"stationary point {interior[0]!r} disagrees with the closed form {s0!r}"
        )

    diff = potential(target) - potential(source)
    scale = max(1.0, k)
    if abs(diff(-1.0)) > 1e-10 * scale or abs(diff(1.0)) > 1e-10 * scale:
        raise VerificationError("potential difference does not vanish at the endpoints")
    top, _ = diff.max_on(-1.0, 1.0)
    if top > 1e-10 * scale:
        raise VerificationError(f"potential difference positive inside: {top!r}")
    bottom, arg = diff.min_on(-1.0, 1.0)
    if abs(diff(s0) - bottom) > 1e-10 * scale:
        raise VerificationError(
            f"minimum at {arg!r} with value {bottom!r} is not attained at s0={s0!r}"
        )
    return s0


# -- primal objective and cost independence ----------------------------------------


@dataclass(frozen=True)
class ConcaveGrid:
    """Cost function given by samples on a grid, certified concave.

    Slopes must be nonincreasing (second differences <= 0, up to rounding);
    weakly concave samples such as a linear cost are accepted, strictly
    convex kinks are not.
    """

    xs: tuple[float, ...]
    ys: tuple[float, ...]

    def __post_init__(self):
        if len(self.xs) != len(self.ys) or len(self.xs) < 2:
            raise ValidationError("need matching xs/ys with at least two samples")
        for i in range(len(self.xs) - 1):
            if self.xs[i + 1] <= self.xs[i]:
                raise ValidationError(f"grid not strictly increasing at index {i}")
        slopes = [
            (self.ys[i + 1] - self.ys[i]) / (self.xs[i + 1] - self.xs[i])
            for i in range(len(self.xs) - 1)
        ]
        span = max(abs(s) for s in slopes) + 1.0
        for i in range(len(slopes) - 1):
            if slopes[i + 1] > slopes[i] + 1e-12 * span:
                raise ValidationError(
                    f"cost samples are not concave at index {i + 1}"
                )

    @classmethod
    def from_function(
        cls, fn: Callable[[float], float], lo: float, hi: float, n: int = 1001
    ) -> "ConcaveGrid":
        xs = [lo + (hi - lo) * i / (n - 1) for i in range(n)]
        return cls(tuple(xs), tuple(fn(x) for x in xs))

    def __call__(self, x: float) -> float:
        from bisect import bisect_right

        if x < self.xs[0] - 1e-12 or x > self.xs[-1] + 1e-12:
            raise ValidationError(f"point {x!r} outside the cost grid")
        i = min(max(bisect_right(self.xs, x) - 1, 0), len(self.xs) - 2)
        t = (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i])
        return self.ys[i] * (1.0 - t) + self.ys[i + 1] * t


def primal_objective(nu: StepMeasure, cost: ConcaveGrid) -> float:
    """Integral of the piecewise-linear interpolant of the cost against nu.

    Exact for the interpolant: the trapezoid rule on the merged grid of cell
    boundaries and cost nodes introduces no further error.
    """
    if nu.ncells == 0:
        return 0.0
    lo_s, hi_s = nu.support()
    if lo_s < cost.xs[0] - 1e-12 or hi_s > cost.xs[-1] + 1e-12:
        raise ValidationError("measure support leaves the cost grid")
    from bisect import bisect_left, bisect_right

    total = 0.0
    for lo, hi, v in nu.cells():
        if v == 0.0:
            continue
        inner = list(cost.xs[bisect_right(cost.xs, lo) : bisect_left(cost.xs, hi)])
        pts = [lo] + inner + [hi]
        f_prev = cost(pts[0])
        for left, right in zip(pts, pts[1:]):
            f_right = cost(right)
            total += v * (right - left) * (f_prev + f_right) / 2.0
            f_prev = f_right
    return total


@dataclass(frozen=True)
class CandidateResult:
    index: int
    admissible: bool
    certificate: OrderCertificate
    objectives: tuple[float, ...]  # one per cost; nan when inadmissible


@dataclass(frozen=True)
class CostIndependenceReport:
    """Primal objectives of candidate targets against a battery of costs.

    ``ok`` certifies that, for every cost, the maximal target achieves the
    minimum over the admissible candidates and the argmin measure coincides
    with it: the computable restatement of cost independence.
    """

    solution: MaximalSolution
    candidates: tuple[CandidateResult, ...]
    optimal_objectives: tuple[float, ...]
    argmin_indices: tuple[int, ...]
    argmin_is_maximal: tuple[bool, ...]
    ok: bool


def check_admissible(
    nu: StepMeasure,
    mu: StepMeasure,
    open_set: OpenSet1D,
    tol: float = DEFAULT_TOL,
) -> OrderCertificate:
    """Certificate that nu is a reachable target for mu inside the open set."""
    top = nu.max_density()
    if top > 1.0 + tol:
        lo_s, hi_s = nu.support()
        return OrderCertificate(
            ordered=False,
            mass_gap=0.0,
            moment_gap=0.0,
            worst_point=0.5 * (lo_s + hi_s),
            worst_gap=top - 1.0,
            note=f"density {top:.9g} exceeds the unit bound",
        )
    try:
        restrict(nu, open_set, tol)
    except ValidationError as exc:
        return OrderCertificate(
            ordered=False,
            mass_gap=0.0,
            moment_gap=0.0,
            worst_point=0.0,
            worst_gap=math.inf,
            note=f"support violation: {exc}",
        )
    return order_leq_sh_O(mu, nu, open_set, tol)


def independence_check(
    mu: StepMeasure,
    open_set: OpenSet1D,
    candidates: Sequence[StepMeasure],
    costs: Sequence[ConcaveGrid],
    tol: float = DEFAULT_TOL,
) -> CostIndependenceReport:
    """Compare primal objectives of admissible candidates against the solver output."""
    solution = solve(mu, open_set, tol)
    star = solution.measure
    optimal = tuple(primal_objective(star, cost) for cost in costs)

    rows: list[CandidateResult] = []
    for i, cand in enumerate(candidates):
        cert = check_admissible(cand, mu, open_set, tol)
        if cert.ordered:
            objs = tuple(primal_objective(cand, cost) for cost in costs)
        else:
            objs = tuple(math.nan for _ in costs)
        rows.append(CandidateResult(i, cert.ordered, cert, objs))

    argmins: list[int] = []
    argmin_is_max: list[bool] = []
    ok = True
    for j, opt in enumerate(optimal):
        best_idx, best_val = -1, math.inf
        for row in rows:
            if row.admissible and row.objectives[j] < best_val:
                best_idx, best_val = row.index, row.objectives[j]
        argmins.append(best_idx)
        tie = 1e-12 * (1.0 + abs(opt))
        if best_idx < 0:
            argmin_is_max.append(True)  # no admissible competitor
            continue
        is_max = measures_allclose(candidates[best_idx], star, 1e-9)
        argmin_is_max.append(is_max)
        if best_val < opt - tie or not is_max:
            ok = False
    return CostIndependenceReport(
        solution=solution,
        candidates=tuple(rows),
        optimal_objectives=optimal,
        argmin_indices=tuple(argmins),
        argmin_is_maximal=tuple(argmin_is_max),
        ok=ok,
    )


def check_c0_sufficient(mu: StepMeasure, open_set: OpenSet1D, delta: float) -> bool:
    """Sufficient (not necessary) admissibility check: sup density <= delta < 1.

    The measure itself then witnesses the required intermediate target.
    """
    if not 0.0 < delta < 1.0:
        raise ValidationError(f"delta must lie in (0, 1), got {delta!r}")
    try:
        restrict(mu, open_set)
    except ValidationError:
        return False
    return mu.max_density() <= delta
