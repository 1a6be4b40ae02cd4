"""Random instance generators shared by the property and acceptance tests."""

from __future__ import annotations

import numpy as np

from stefan1d import OpenSet1D, StepMeasure, indicator, make_step_measure, sum_measures


def random_open_set(rng: np.random.Generator, max_components: int = 3) -> OpenSet1D:
    n = int(rng.integers(1, max_components + 1))
    comps = []
    left = float(rng.uniform(-3.0, -2.0))
    for _ in range(n):
        width = float(rng.uniform(0.4, 1.6))
        comps.append((left, left + width))
        left += width + float(rng.uniform(0.05, 0.6))
    return OpenSet1D.of(*comps)


def random_admissible_measure(
    rng: np.random.Generator,
    open_set: OpenSet1D,
    max_cells: int = 4,
    allow_empty_components: bool = True,
) -> StepMeasure:
    """Random step density <= 1 supported inside the open set."""
    parts = []
    for c, d in open_set.components:
        if allow_empty_components and rng.random() < 0.15:
            continue
        ncells = int(rng.integers(1, max_cells + 1))
        lo = float(rng.uniform(c + 1e-6, c + 0.45 * (d - c)))
        hi = float(rng.uniform(d - 0.45 * (d - c), d - 1e-6))
        pts = np.linspace(lo, hi, ncells + 1)
        vals = rng.uniform(0.0, 1.0, ncells)
        if rng.random() < 0.2:
            vals[int(rng.integers(0, ncells))] = 1.0
        parts.append(make_step_measure(pts.tolist(), vals.tolist()))
    if not parts:
        c, d = open_set.components[0]
        parts.append(indicator(c + 0.3 * (d - c), d - 0.3 * (d - c), 0.5))
    return sum_measures(parts)


def random_unit_blocks(
    rng: np.random.Generator,
    c: float,
    d: float,
    n_blocks: int,
    margin: float = 0.02,
) -> StepMeasure:
    """Disjoint unit-density blocks strictly inside (c, d)."""
    width = d - c
    inner_lo = c + margin * width
    inner_hi = d - margin * width
    # 2*n_blocks edges with guaranteed separation: draw weights, renormalise
    weights = rng.uniform(0.2, 1.0, 2 * n_blocks + 1)
    edges = inner_lo + (inner_hi - inner_lo) * np.cumsum(weights)[:-1] / weights.sum()
    blocks = [
        indicator(float(edges[2 * i]), float(edges[2 * i + 1]))
        for i in range(n_blocks)
    ]
    return sum_measures(blocks)
