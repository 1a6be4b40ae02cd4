"""Named reproduction scenarios with expected values and tolerances.

Each scenario pins inputs, the expected outputs, a comparison tolerance and
a provenance label: "reference" for values quoted from the source analysis,
"derived" for values recomputed here by an independent route, "direct" for
elementary facts. The manifest is deterministic, including the particle
cross-check, which runs on a fixed seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .measure import OpenSet1D, indicator, l1_distance, pointwise_leq
from .particles import SimConfig, compare_to_formula, run
from .solver import critical_point, solve
from .stability import (
    LipschitzFamilyParams,
    lipschitz_closed_form_gap,
    lipschitz_closed_form_ratio,
    lipschitz_ratio,
    monotonicity_report,
    weak_convergence_experiment,
)

DOMAIN = OpenSet1D.interval(-1.0, 1.0)


@dataclass(frozen=True)
class CheckRow:
    quantity: str
    expected: float
    computed: float
    tol: float
    provenance: str

    @property
    def passed(self) -> bool:
        return abs(self.computed - self.expected) <= self.tol

    def to_json(self) -> dict:
        return {
            "quantity": self.quantity,
            "expected": self.expected,
            "computed": self.computed,
            "tol": self.tol,
            "provenance": self.provenance,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class Scenario:
    name: str
    rows: tuple[CheckRow, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "rows": [r.to_json() for r in self.rows],
        }


@dataclass(frozen=True)
class ReproManifest:
    scenarios: tuple[Scenario, ...]

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.scenarios)

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "scenarios": [s.to_json() for s in self.scenarios],
        }

    def format_table(self) -> str:
        lines = [
            f"{'scenario':<24} {'quantity':<38} {'expected':>16} "
            f"{'computed':>16} {'tol':>9} {'prov':<10} status"
        ]
        for sc in self.scenarios:
            for r in sc.rows:
                lines.append(
                    f"{sc.name:<24} {r.quantity:<38} {r.expected:>16.12g} "
                    f"{r.computed:>16.12g} {r.tol:>9.1e} {r.provenance:<10} "
                    f"{'pass' if r.passed else 'FAIL'}"
                )
            lines.append(
                f"{sc.name:<24} {'[scenario]':<38} {'':>16} {'':>16} {'':>9} "
                f"{'':<10} {'pass' if sc.passed else 'FAIL'}"
            )
        lines.append(f"overall: {'pass' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def _scenario_example_5_1(tol: float | None) -> Scenario:
    t = 1e-12 if tol is None else tol
    saturated = solve(indicator(-1.0, 0.0), DOMAIN)
    diff = l1_distance(saturated.measure, indicator(-1.0, 0.0))
    partial = solve(indicator(-0.9, 0.0), DOMAIN)
    right_width = partial.blocks[0].q
    report = monotonicity_report(
        indicator(-0.9, 0.0), indicator(-1.0, 0.0), DOMAIN
    )
    rows = (
        CheckRow("saturated input is a fixed point (L1)", 0.0, diff, t, "reference"),
        CheckRow(
            "right block width of chi(-0.9,0) target",
            0.9 / 1.1 * 0.1,  # q = k - p with p = k/(2-k) scaled, equals 9/110
            right_width,
            max(t, 1e-12),
            "derived",
        ),
        CheckRow("inputs ordered", 1.0, 1.0 if report.monotone_in else 0.0, 0.0, "direct"),
        CheckRow(
            "targets not ordered", 0.0, 1.0 if report.monotone_out else 0.0, 0.0, "reference"
        ),
    )
    return Scenario("example_5_1", rows)


def _scenario_example_5_2(tol: float | None) -> Scenario:
    t_endpoint = 1e-6 if tol is None else tol
    t_beta = 1e-12 if tol is None else tol
    mu1 = indicator(0.0, math.sqrt(0.75), 0.99)
    mu2 = indicator(-0.5, 1.0, 0.99)
    sol1 = solve(mu1, DOMAIN)
    sol2 = solve(mu2, DOMAIN)
    b1 = sol1.blocks[0]
    b2 = sol2.blocks[0]
    rows = (
        CheckRow("first moment of mu1", 0.37125, mu1.first_moment, t_beta, "reference"),
        CheckRow("first moment of mu2", 0.37125, mu2.first_moment, t_beta, "reference"),
        CheckRow("A1 left block end", -0.896224371, b1.e, t_endpoint, "reference"),
        CheckRow("A1 right block start", 0.246410478, b1.f, t_endpoint, "reference"),
        CheckRow("A2 left block end", -0.978373786, b2.e, t_endpoint, "reference"),
        CheckRow("A2 right block start", -0.463373786, b2.f, t_endpoint, "reference"),
        CheckRow(
            "targets not ordered despite ordered inputs",
            0.0,
            1.0 if pointwise_leq(sol1.measure, sol2.measure, 1e-9) else 0.0,
            0.0,
            "reference",
        ),
    )
    return Scenario("example_5_2", rows)


def _scenario_lipschitz_family(tol: float | None) -> Scenario:
    t = 1e-9 if tol is None else tol
    params = LipschitzFamilyParams(x=0.9, y=0.01, r=0.9, c=0.99)
    report = lipschitz_ratio(params)
    rows = (
        CheckRow(
            "input gap equals r*y",
            params.r * params.y,
            report.input_l1_gap,
            t,
            "reference",
        ),
        CheckRow(
            "target gap equals closed form",
            lipschitz_closed_form_gap(params),
            report.output_l1_gap,
            t,
            "reference",
        ),
        CheckRow(
            "gap ratio", 3.761 / 0.76, report.closed_form_ratio, max(t, 1e-9), "derived"
        ),
        CheckRow(
            "ratio at the blow-up corner exceeds 100",
            1.0,
            1.0
            if lipschitz_closed_form_ratio(0.999, 1e-4, 0.999, 0.999) > 100.0
            else 0.0,
            0.0,
            "derived",
        ),
    )
    return Scenario("lipschitz_family", rows)


def _scenario_appendix_critical_point(tol: float | None) -> Scenario:
    t = 1e-10 if tol is None else tol
    rng = np.random.default_rng(20240817)
    worst = 0.0
    for _ in range(100):
        k = rng.uniform(0.05, 1.95)
        half = k - 0.5 * k * k
        beta = rng.uniform(-0.98 * half, 0.98 * half)
        s0 = critical_point(k, beta)
        formula = 2.0 * beta * (1.0 - k) / (k * (2.0 - k))
        worst = max(worst, abs(s0 - formula))
    rows = (
        CheckRow(
            "worst stationary-point defect over 100 draws",
            0.0,
            worst,
            t,
            "reference",
        ),
    )
    return Scenario("appendix_critical_point", rows)


def _scenario_weak_convergence(tol: float | None) -> Scenario:
    t = 1e-9 if tol is None else tol
    mu = indicator(-0.5, 0.5)
    seq = [indicator(-0.5, 0.5, 1.0 - 1.0 / l) for l in range(2, 65)]
    table = weak_convergence_experiment(seq, mu, DOMAIN)
    worst_defect = max(
        abs(row.l1_gap - 1.0 / (row.index + 2)) for row in table.rows
    )
    monotone = all(
        table.rows[i].l1_gap > table.rows[i + 1].l1_gap
        for i in range(len(table.rows) - 1)
    )
    bound4 = all(
        row.l1_gap <= 4.0 * (row.mass_gap + row.moment_gap) + 1e-12
        for row in table.rows
    )
    rows = (
        CheckRow("L1 gaps equal 1/l (worst defect)", 0.0, worst_defect, t, "derived"),
        CheckRow("gaps decrease monotonically", 1.0, 1.0 if monotone else 0.0, 0.0, "derived"),
        CheckRow(
            "gaps bounded by 4 (|dk| + |dbeta|)", 1.0, 1.0 if bound4 else 0.0, 0.0, "derived"
        ),
        CheckRow("final gap at l = 64", 1.0 / 64.0, table.rows[-1].l1_gap, t, "derived"),
    )
    return Scenario("weak_convergence", rows)


def _scenario_particle_cross_check(tol: float | None) -> Scenario:
    t = 0.01 if tol is None else max(tol, 0.01)
    mu1 = indicator(0.0, math.sqrt(0.75), 0.99)
    sol = solve(mu1, DOMAIN)
    report = run(mu1, DOMAIN, SimConfig(n_particles=20000, seed=20240817, dt=1e-3))
    comparison = compare_to_formula(report, sol)
    rows = (
        CheckRow(
            "all walkers frozen",
            0.0,
            float(sum(c.unfrozen for c in report.components)),
            0.0,
            "direct",
        ),
        CheckRow(
            "mass accounting p+q-k",
            0.0,
            report.components[0].p_hat + report.components[0].q_hat - mu1.mass,
            1e-12,
            "direct",
        ),
        CheckRow(
            "frozen split vs solver block width",
            sol.blocks[0].p,
            report.components[0].p_hat,
            t,
            "derived",
        ),
        CheckRow(
            "frozen measure L1 gap", 0.0, comparison.total_l1, 2.0 * t, "derived"
        ),
    )
    return Scenario("particle_cross_check", rows)


def run_manifest(tol: float | None = None, include_simulation: bool = True) -> ReproManifest:
    """Run every scenario; tol overrides each row's comparison tolerance."""
    scenarios = [
        _scenario_example_5_1(tol),
        _scenario_example_5_2(tol),
        _scenario_lipschitz_family(tol),
        _scenario_appendix_critical_point(tol),
        _scenario_weak_convergence(tol),
    ]
    if include_simulation:
        scenarios.append(_scenario_particle_cross_check(tol))
    return ReproManifest(tuple(scenarios))
