"""Front-freezing Brownian particle system for stochastic cross-validation.

Walkers start from the initial density and move by Gaussian increments
inside their component. Two saturation fronts advance inward from the
component endpoints; a walker meeting a front freezes there and the front
advances by one particle mass, so the frozen region has density exactly one
by accounting and the discrete stopping time never exceeds the exit time of
the component. The final front positions estimate the block widths of the
maximal target; mass and first-moment conservation force the agreement.

Crossing detection combines the post-step position test with the within-step
Brownian bridge crossing probability against the start-of-step fronts, which
keeps the weak error of the frozen split first order in dt. Walkers crossing
a front are recorded at the front (slot midpoints of the swept region), not
at their overshot position.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import AdmissibilityError, SamplingError, ValidationError
from .measure import DEFAULT_TOL, OpenSet1D, StepMeasure, _from_cells, l1_distance, restrict
from .solver import MaximalSolution


@dataclass(frozen=True)
class SimConfig:
    """Simulation parameters.

    dt is the time step in units of Brownian time; None picks
    1e-4 * (component length)^2 per component, since exit times scale
    diffusively. Seeds for component i derive from (seed, i), so per-component
    results do not depend on execution order or the parallel flag.
    """

    n_particles: int
    seed: int = 0
    dt: float | None = None
    t_max: float = 50.0
    parallel_components: bool = False
    hist_bins: int = 64

    def __post_init__(self):
        if self.n_particles < 1:
            raise ValidationError("n_particles must be at least 1")
        if self.dt is not None and not self.dt > 0.0:
            raise ValidationError("dt must be positive")
        if not self.t_max > 0.0:
            raise ValidationError("t_max must be positive")
        if self.hist_bins < 1:
            raise ValidationError("hist_bins must be at least 1")

    def to_json(self) -> dict:
        return {
            "n_particles": self.n_particles,
            "seed": self.seed,
            "dt": self.dt,
            "t_max": self.t_max,
            "parallel_components": self.parallel_components,
            "hist_bins": self.hist_bins,
        }


@dataclass
class FrontState:
    """Mutable per-component front bookkeeping; left <= right always."""

    left: float
    right: float
    frozen_left: int = 0
    frozen_right: int = 0


@dataclass(frozen=True)
class ComponentRunReport:
    interval: tuple[float, float]
    n: int
    unit_mass: float
    frozen_left: int
    frozen_right: int
    unfrozen: int
    p_hat: float
    q_hat: float
    left_front: float
    right_front: float
    mean_freeze_time: float
    freeze_position_mean: float
    freeze_position_std: float
    hist_edges: tuple[float, ...]
    hist_counts: tuple[int, ...]

    def frozen_measure(self) -> StepMeasure:
        c, d = self.interval
        return _from_cells([(c, self.left_front, 1.0), (self.right_front, d, 1.0)])

    def to_json(self) -> dict:
        return {
            "interval": list(self.interval),
            "n": self.n,
            "unit_mass": self.unit_mass,
            "frozen_left": self.frozen_left,
            "frozen_right": self.frozen_right,
            "unfrozen": self.unfrozen,
            "p_hat": self.p_hat,
            "q_hat": self.q_hat,
            "left_front": self.left_front,
            "right_front": self.right_front,
            "mean_freeze_time": self.mean_freeze_time,
            "freeze_position_mean": self.freeze_position_mean,
            "freeze_position_std": self.freeze_position_std,
            "hist_edges": list(self.hist_edges),
            "hist_counts": list(self.hist_counts),
        }


@dataclass(frozen=True)
class RunReport:
    """Simulation outcome; a pure function of (inputs, config.seed)."""

    components: tuple[ComponentRunReport, ...]
    measure: StepMeasure
    config: SimConfig

    @property
    def all_frozen(self) -> bool:
        return all(c.unfrozen == 0 for c in self.components)

    def to_json(self) -> dict:
        return {
            "components": [c.to_json() for c in self.components],
            "measure": self.measure.to_json(),
            "config": self.config.to_json(),
            "all_frozen": self.all_frozen,
        }


def _positive_cell_arrays(mu: StepMeasure):
    lb, dens, cum = [], [], [0.0]
    for lo, hi, v in mu.cells():
        if v <= 0.0:
            continue
        lb.append(lo)
        dens.append(v)
        cum.append(cum[-1] + v * (hi - lo))
    return np.asarray(lb), np.asarray(dens), np.asarray(cum)


def _quantiles(mu: StepMeasure, u: np.ndarray) -> np.ndarray:
    lb, dens, cum = _positive_cell_arrays(mu)
    idx = np.searchsorted(cum[1:], u, side="left")
    idx = np.clip(idx, 0, len(lb) - 1)
    return lb[idx] + (u - cum[idx]) / dens[idx]


def sample_initial(mu: StepMeasure, n: int, seed) -> np.ndarray:
    """n i.i.d. draws from mu / mass(mu) by exact inversion of the cdf."""
    if mu.ncells == 0 or mu.mass <= 0.0:
        raise SamplingError("cannot sample from a zero-mass measure")
    if n < 1:
        raise ValidationError("sample size must be at least 1")
    rng = np.random.default_rng(seed)
    return _quantiles(mu, rng.random(n) * mu.mass)


def _simulate_component(
    mu_n: StepMeasure,
    c: float,
    d: float,
    n: int,
    dt: float,
    t_max: float,
    rng: np.random.Generator,
    hist_bins: int,
) -> ComponentRunReport:
    k = mu_n.mass
    m = k / n
    front = FrontState(left=c, right=d)
    pos = _quantiles(mu_n, rng.random(n) * k)

    freeze_pos = np.empty(n)
    freeze_t = np.empty(n)
    n_frozen = 0
    sqrt_dt = math.sqrt(dt)
    inv_dt = -2.0 / dt
    t = 0.0

    def freeze(left_mask: np.ndarray, right_mask: np.ndarray, when: float):
        # fronts stay at exactly c + m*count and d - m*count
        nonlocal n_frozen
        nl = int(left_mask.sum())
        nr = int(right_mask.sum())
        if nl:
            slots = front.left + m * (np.arange(nl) + 0.5)
            freeze_pos[n_frozen : n_frozen + nl] = slots
            freeze_t[n_frozen : n_frozen + nl] = when
            n_frozen += nl
            front.frozen_left += nl
            front.left = c + m * front.frozen_left
        if nr:
            slots = front.right - m * (np.arange(nr) + 0.5)
            freeze_pos[n_frozen : n_frozen + nr] = slots
            freeze_t[n_frozen : n_frozen + nr] = when
            n_frozen += nr
            front.frozen_right += nr
            front.right = d - m * front.frozen_right
        return nl + nr

    def cascade(current: np.ndarray, when: float) -> np.ndarray:
        # advancing fronts may sweep past survivors; repeat until stable
        while current.size:
            cl = current <= front.left
            cr = (~cl) & (current >= front.right)
            if not freeze(cl, cr, when):
                break
            current = current[~(cl | cr)]
        return current

    pos = cascade(pos, 0.0)  # mass starting on the boundary freezes at once

    # The walk runs in float32: position rounding (~1e-7) is far below the
    # statistical resolution, and the narrower arrays nearly halve the step
    # cost. Front bookkeeping stays in float64 scalars, so the mass and
    # moment accounting is unaffected.
    pos = pos.astype(np.float32)
    step_buf = np.empty(n, dtype=np.float32)
    u_buf = np.empty(n, dtype=np.float32)
    tmp_a = np.empty(n, dtype=np.float32)
    tmp_b = np.empty(n, dtype=np.float32)

    with np.errstate(over="ignore"):  # exp overflow on deep crossings means p >= 1
        while pos.size and t < t_max - 0.5 * dt:
            size = pos.size
            new = step_buf[:size]
            rng.standard_normal(dtype=np.float32, out=new)
            np.multiply(new, sqrt_dt, out=new)
            np.add(new, pos, out=new)
            u = u_buf[:size]
            rng.random(dtype=np.float32, out=u)
            # Brownian bridge crossing probability against the start-of-step
            # fronts; a post-step crossing makes the argument nonnegative, so
            # p >= 1 there and the comparison subsumes the hard-crossing test.
            p_l = tmp_a[:size]
            np.subtract(pos, front.left, out=p_l)
            scratch = tmp_b[:size]
            np.subtract(new, front.left, out=scratch)
            np.multiply(p_l, scratch, out=p_l)
            np.multiply(p_l, inv_dt, out=p_l)
            np.exp(p_l, out=p_l)
            cross_l = u < p_l
            p_r = scratch
            np.subtract(front.right, pos, out=p_r)
            tail = pos  # start positions no longer needed this step
            np.subtract(front.right, new, out=tail)
            np.multiply(p_r, tail, out=p_r)
            np.multiply(p_r, inv_dt, out=p_r)
            np.exp(p_r, out=p_r)
            np.add(p_l, p_r, out=p_l)
            cross_any = u < p_l
            cross_r = cross_any & ~cross_l
            t += dt
            if cross_any.any():
                freeze(cross_l, cross_r, t)
                pos = cascade(new[~cross_any], t)  # mask indexing copies
            else:
                pos = new.copy()  # new is a view of step_buf
            # discrete stopping never leaves the component
            assert front.left <= front.right + 1e-9 * max(1.0, abs(c), abs(d))
            if pos.size:
                assert pos.min() > front.left and pos.max() < front.right

    frozen = freeze_pos[:n_frozen]
    times = freeze_t[:n_frozen]
    counts, edges = np.histogram(frozen, bins=hist_bins, range=(c, d))
    return ComponentRunReport(
        interval=(c, d),
        n=n,
        unit_mass=m,
        frozen_left=front.frozen_left,
        frozen_right=front.frozen_right,
        unfrozen=int(pos.size),
        p_hat=m * front.frozen_left,
        q_hat=m * front.frozen_right,
        left_front=front.left,
        right_front=front.right,
        mean_freeze_time=float(times.mean()) if n_frozen else math.nan,
        freeze_position_mean=float(frozen.mean()) if n_frozen else math.nan,
        freeze_position_std=float(frozen.std()) if n_frozen else math.nan,
        hist_edges=tuple(edges.tolist()),
        hist_counts=tuple(int(x) for x in counts),
    )


def _allocate(n_total: int, masses: list[float]) -> list[int]:
    """Largest-remainder apportionment, at least one walker per massive component."""
    total = sum(masses)
    if total <= 0.0:
        return [0 for _ in masses]
    raw = [n_total * k / total for k in masses]
    alloc = [int(x) for x in raw]
    order = sorted(range(len(raw)), key=lambda i: raw[i] - alloc[i], reverse=True)
    short = n_total - sum(alloc)
    for i in order[:short]:
        alloc[i] += 1
    for i, k in enumerate(masses):
        if k > 0.0 and alloc[i] == 0:
            alloc[i] = 1
    return alloc


def run(mu: StepMeasure, open_set: OpenSet1D, cfg: SimConfig) -> RunReport:
    """Simulate every component independently and assemble the frozen measure.

    Component i draws from a generator seeded by (cfg.seed, i); with the
    parallel flag the components run on a thread pool, with identical results
    by construction.
    """
    if mu.max_density() > 1.0 + DEFAULT_TOL:
        raise AdmissibilityError(
            f"density {mu.max_density():.9g} exceeds the admissible bound 1"
        )
    parts = restrict(mu, open_set, DEFAULT_TOL)
    masses = [p.mass for p in parts]
    alloc = _allocate(cfg.n_particles, masses)

    def one(i: int) -> ComponentRunReport:
        c, d = open_set.components[i]
        mu_n = parts[i]
        n_i = alloc[i]
        if n_i == 0 or masses[i] <= 0.0:
            edges = np.linspace(c, d, cfg.hist_bins + 1)
            return ComponentRunReport(
                interval=(c, d),
                n=0,
                unit_mass=0.0,
                frozen_left=0,
                frozen_right=0,
                unfrozen=0,
                p_hat=0.0,
                q_hat=0.0,
                left_front=c,
                right_front=d,
                mean_freeze_time=math.nan,
                freeze_position_mean=math.nan,
                freeze_position_std=math.nan,
                hist_edges=tuple(edges.tolist()),
                hist_counts=tuple(0 for _ in range(cfg.hist_bins)),
            )
        rng = np.random.default_rng([cfg.seed, i])
        dt = cfg.dt if cfg.dt is not None else 1e-4 * (d - c) ** 2
        return _simulate_component(
            mu_n, c, d, n_i, dt, cfg.t_max, rng, cfg.hist_bins
        )

    indices = range(len(open_set.components))
    if cfg.parallel_components and len(open_set.components) > 1:
        with ThreadPoolExecutor() as pool:
            components = tuple(pool.map(one, indices))
    else:
        components = tuple(one(i) for i in indices)

    cells = []
    for comp in components:
        c, d = comp.interval
        cells.append((c, comp.left_front, 1.0))
        cells.append((comp.right_front, d, 1.0))
    return RunReport(components=components, measure=_from_cells(cells), config=cfg)


@dataclass(frozen=True)
class ComparisonRow:
    interval: tuple[float, float]
    p_error: float
    q_error: float
    l1_gap: float
    sigma_hat: float


@dataclass(frozen=True)
class ComparisonReport:
    rows: tuple[ComparisonRow, ...]
    total_l1: float
    max_p_error: float

    def to_json(self) -> dict:
        return {
            "rows": [
                {
                    "interval": list(r.interval),
                    "p_error": r.p_error,
                    "q_error": r.q_error,
                    "l1_gap": r.l1_gap,
                    "sigma_hat": r.sigma_hat,
                }
                for r in self.rows
            ],
            "total_l1": self.total_l1,
            "max_p_error": self.max_p_error,
        }


def compare_to_formula(report: RunReport, solution: MaximalSolution) -> ComparisonReport:
    """Per-component errors of the simulated frozen blocks against the solver.

    sigma_hat = sqrt(k * p * q) / sqrt(n) estimates the Monte Carlo standard
    error of the frozen split; the L1 gap compares the exact frozen block
    measure (density one by accounting) with the solver blocks.
    """
    if len(report.components) != len(solution.blocks):
        raise ValidationError(
            f"component count mismatch: report has {len(report.components)}, "
            f"solution has {len(solution.blocks)}"
        )
    rows = []
    total = 0.0
    worst = 0.0
    for comp, block, (k_n, _) in zip(
        report.components, solution.blocks, solution.provenance
    ):
        if abs(comp.interval[0] - block.c) > 1e-9 or abs(comp.interval[1] - block.d) > 1e-9:
            raise ValidationError(
                f"component intervals disagree: {comp.interval} vs "
                f"({block.c}, {block.d})"
            )
        dp = abs(comp.p_hat - block.p)
        dq = abs(comp.q_hat - block.q)
        gap = l1_distance(comp.frozen_measure(), block.measure())
        sigma = (
            math.sqrt(k_n * block.p * block.q) / math.sqrt(comp.n)
            if comp.n > 0 and k_n > 0.0
            else 0.0
        )
        rows.append(ComparisonRow(comp.interval, dp, dq, gap, sigma))
        total += gap
        worst = max(worst, dp)
    return ComparisonReport(tuple(rows), total, worst)
