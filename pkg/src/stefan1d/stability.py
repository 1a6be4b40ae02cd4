"""Stability behaviour of the two-block solver.

Three experiments: monotonicity of the input-to-target map fails, any
uniform L1 Lipschitz bound fails along an explicit one-parameter family of
block rearrangements, and targets are stable under convergence of mass and
first moment (weak convergence of the inputs).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import ParameterError, VerificationError
from .measure import (
    DEFAULT_TOL,
    OpenSet1D,
    StepMeasure,
    indicator,
    l1_distance,
    pointwise_leq,
    positive_part_l1,
)
from .solver import solve


@dataclass(frozen=True)
class LipschitzFamilyParams:
    """Parameters (x, y, r, c) of the blow-up family.

    mu1 = r*chi_(-x, x) and mu2 = chi_(-c, -c+r*y) + r*chi_(-x, x-y) on
    (-1, 1). The small detached block must sit strictly left of the wide one:
    -c + r*y < -x.
    """

    x: float
    y: float
    r: float
    c: float

    def __post_init__(self):
        if not 0.0 < self.x < 1.0:
            raise ParameterError(f"x must lie in (0, 1), got {self.x!r}")
        if not 0.0 < self.r < 1.0:
            raise ParameterError(f"r must lie in (0, 1), got {self.r!r}")
        if not 0.0 < self.c < 1.0:
            raise ParameterError(f"c must lie in (0, 1), got {self.c!r}")
        if not 0.0 < self.y < 2.0 * self.x:
            raise ParameterError(f"y must lie in (0, 2x), got {self.y!r}")
        if not -self.c + self.r * self.y < -self.x:
            raise ParameterError(
                f"need -c + r*y < -x, got {-self.c + self.r * self.y!r} "
                f">= {-self.x!r}"
            )
        # formalises "y small": the target displacement must stay below the
        # middle gap of the limiting target, else the one-sided L1 gap
        # saturates at 2 - 2rx and the closed forms no longer describe it
        displacement = (
            2 * self.r * self.x * self.y
            + 2 * self.c * self.r * self.y
            - self.r * self.y**2
            - (self.r * self.y) ** 2
        ) / (2.0 * (2.0 - 2.0 * self.r * self.x))
        if not displacement < 2.0 - 2.0 * self.r * self.x:
            raise ParameterError(
                f"y={self.y!r} too large: target displacement {displacement:.6g} "
                f"reaches the middle gap {2.0 - 2.0 * self.r * self.x:.6g}"
            )


def lipschitz_pair(params: LipschitzFamilyParams) -> tuple[StepMeasure, StepMeasure]:
    x, y, r, c = params.x, params.y, params.r, params.c
    mu1 = indicator(-x, x, r)
    mu2 = indicator(-c, -c + r * y) + indicator(-x, x - y, r)
    return mu1, mu2


def lipschitz_closed_form_gap(params: LipschitzFamilyParams) -> float:
    """Closed form of the target gap || (nu1 - nu2)_+ ||_L1."""
    x, y, r, c = params.x, params.y, params.r, params.c
    return (2 * r * x * y + 2 * c * r * y - r * y * y - r * r * y * y) / (
        2.0 * (2.0 - 2.0 * r * x)
    )


def lipschitz_closed_form_ratio(x: float, y: float, r: float, c: float) -> float:
    """Target gap over input gap, (2x + 2c - y - r*y) / (4 (1 - r*x)).

    Pure formula evaluation; it needs no feasible pair of measures and is
    defined whenever r*x < 1. Along c, x, r up to 1 and y down to 0 it grows
    without bound.
    """
    if not r * x < 1.0:
        raise ParameterError(f"need r*x < 1, got {r * x!r}")
    return (2.0 * x + 2.0 * c - y - r * y) / (4.0 * (1.0 - r * x))


@dataclass(frozen=True)
class StabilityReport:
    """L1 gaps of a pair of inputs and of their targets, plus order flags."""

    input_l1_gap: float
    output_l1_gap: float
    ratio: float
    monotone_in: bool
    monotone_out: bool
    closed_form_ratio: float
    nu1: StepMeasure
    nu2: StepMeasure

    def to_json(self) -> dict:
        return {
            "input_l1_gap": self.input_l1_gap,
            "output_l1_gap": self.output_l1_gap,
            "ratio": self.ratio,
            "monotone_in": self.monotone_in,
            "monotone_out": self.monotone_out,
            "closed_form_ratio": self.closed_form_ratio,
            "nu1": self.nu1.to_json(),
            "nu2": self.nu2.to_json(),
        }


def monotonicity_report(
    mu1: StepMeasure,
    mu2: StepMeasure,
    open_set: OpenSet1D,
    tol: float = DEFAULT_TOL,
) -> StabilityReport:
    """Compare pointwise order of two inputs with that of their targets."""
    sol1 = solve(mu1, open_set, tol)
    sol2 = solve(mu2, open_set, tol)
    in_gap = positive_part_l1(mu1, mu2)
    out_gap = positive_part_l1(sol1.measure, sol2.measure)
    return StabilityReport(
        input_l1_gap=in_gap,
        output_l1_gap=out_gap,
        ratio=out_gap / in_gap if in_gap > 0.0 else math.nan,
        monotone_in=pointwise_leq(mu1, mu2, tol),
        monotone_out=pointwise_leq(sol1.measure, sol2.measure, tol),
        closed_form_ratio=math.nan,
        nu1=sol1.measure,
        nu2=sol2.measure,
    )


def lipschitz_ratio(
    params: LipschitzFamilyParams, tol: float = DEFAULT_TOL
) -> StabilityReport:
    """Solve the blow-up pair and cross-check both gaps against closed forms.

    The input gap must equal r*y and the target gap the closed form, both to
    1e-9, otherwise VerificationError: the family is the analytic witness
    that no uniform Lipschitz constant exists, so transcription slips here
    must fail loudly.
    """
    mu1, mu2 = lipschitz_pair(params)
    domain = OpenSet1D.interval(-1.0, 1.0)
    sol1 = solve(mu1, domain, tol)
    sol2 = solve(mu2, domain, tol)
    in_gap = positive_part_l1(mu1, mu2)
    out_gap = positive_part_l1(sol1.measure, sol2.measure)

    expected_in = params.r * params.y
    expected_out = lipschitz_closed_form_gap(params)
    if abs(in_gap - expected_in) > 1e-9:
        raise VerificationError(
            f"input gap {in_gap!r} does not match r*y = {expected_in!r}"
        )
    if abs(out_gap - expected_out) > 1e-9:
        raise VerificationError(
            f"target gap {out_gap!r} does not match the closed form {expected_out!r}"
        )
    return StabilityReport(
        input_l1_gap=in_gap,
        output_l1_gap=out_gap,
        ratio=out_gap / in_gap if in_gap > 0.0 else math.nan,
        monotone_in=pointwise_leq(mu1, mu2, tol),
        monotone_out=pointwise_leq(sol1.measure, sol2.measure, tol),
        closed_form_ratio=lipschitz_closed_form_ratio(
            params.x, params.y, params.r, params.c
        ),
        nu1=sol1.measure,
        nu2=sol2.measure,
    )


@dataclass(frozen=True)
class WeakConvergenceRow:
    index: int
    mass_gap: float
    moment_gap: float
    l1_gap: float


@dataclass(frozen=True)
class WeakConvergenceTable:
    rows: tuple[WeakConvergenceRow, ...]
    constant: float
    bounded: bool

    def to_json(self) -> dict:
        return {
            "constant": self.constant,
            "bounded": self.bounded,
            "rows": [
                {
                    "index": r.index,
                    "mass_gap": r.mass_gap,
                    "moment_gap": r.moment_gap,
                    "l1_gap": r.l1_gap,
                }
                for r in self.rows
            ],
        }


def _endpoint_sensitivity(c: float, d: float, k: float, beta: float) -> float:
    """Local Lipschitz bound of the block endpoints in (k, beta).

    p = (k (d - k/2) - beta) / (W - k) gives
    dp/dk = (d - k)/(W - k) + p/(W - k), dp/dbeta = -1/(W - k), and the
    right width q = k - p mirrors them. Unbounded as k approaches W.
    """
    width = d - c
    gap = width - k
    if gap <= 0.0:
        return math.inf
    p = (k * (d - 0.5 * k) - beta) / gap
    dp_dk = (d - k) / gap + p / gap
    dq_dk = abs(1.0 - dp_dk)
    coef_k = abs(dp_dk) + dq_dk
    coef_b = 2.0 / gap
    return max(coef_k, coef_b)


def weak_convergence_experiment(
    sequence: Sequence[StepMeasure],
    mu: StepMeasure,
    open_set: OpenSet1D,
    tol: float = DEFAULT_TOL,
) -> WeakConvergenceTable:
    """Target L1 gaps along a sequence of inputs converging to mu.

    Targets depend on the inputs only through per-component mass and first
    moment, so the gap of each member is bounded by the endpoint maps'
    Lipschitz constant times its (|mass gap| + |moment gap|). The constant is
    the largest local sensitivity over the family and the limit, valid while
    component masses stay away from the component lengths.
    """
    limit = solve(mu, open_set, tol)
    k0, b0 = mu.mass, mu.first_moment
    members = [solve(m, open_set, tol) for m in sequence]

    constant = 0.0
    for sol in members + [limit]:
        for (c, d), (k_n, beta_n) in zip(open_set.components, sol.provenance):
            constant = max(constant, _endpoint_sensitivity(c, d, k_n, beta_n))

    rows = []
    bounded = True
    for i, (m, sol) in enumerate(zip(sequence, members)):
        dk = abs(m.mass - k0)
        db = abs(m.first_moment - b0)
        gap = l1_distance(sol.measure, limit.measure)
        rows.append(WeakConvergenceRow(i, dk, db, gap))
        if gap > constant * (dk + db) * (1.0 + 1e-6) + 1e-12:
            bounded = False
    return WeakConvergenceTable(tuple(rows), constant, bounded)
