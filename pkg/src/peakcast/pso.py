"""Global-best PSO with inertia: the comparison kernel for the tuning loop.

Shares the determinism contract and result shape of the symbiotic search so
the two kernels are interchangeable. Per iteration, particles are updated in
index order; each update draws two per-dimension random vectors (cognitive
then social). Velocities are clamped to half the box width per dimension.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .errors import ConfigError, NonFiniteObjectiveError
from .sos import Objective, OptimizationResult, OptimizerConfig, PsoParams
from .space import SearchSpace, clip_to_bounds


def pso_optimize(
    objective: Objective,
    space: SearchSpace,
    config: OptimizerConfig,
    initial_positions: Optional[np.ndarray] = None,
) -> OptimizationResult:
    """Minimize ``objective`` over ``space`` with inertia-weight global-best PSO."""
    config.validate()
    if config.algorithm != "pso":
        raise ConfigError(f"pso_optimize() runs the pso kernel, got {config.algorithm!r}")
    if config.pso_params is None:
        raise ConfigError("pso requires pso_params (inertia, cognitive, social)")
    params: PsoParams = config.pso_params

    rng = np.random.default_rng(config.seed)
    n, dim = config.population_size, space.dimension
    vmax = 0.5 * (space.upper - space.lower)

    positions = rng.uniform(space.lower, space.upper, size=(n, dim))
    velocities = rng.uniform(-vmax, vmax, size=(n, dim))
    if initial_positions is not None:
        warm = np.atleast_2d(np.asarray(initial_positions, dtype=float))
        if warm.shape[0] > n:
            raise ConfigError("more warm-start positions than population slots")
        for k in range(warm.shape[0]):
            positions[k] = clip_to_bounds(warm[k], space)

    evaluations = 0

    def evaluate(x: np.ndarray) -> float:
        nonlocal evaluations
        value = float(objective(x))
        evaluations += 1
        if not np.isfinite(value):
            raise NonFiniteObjectiveError(x, value)
        return value

    fitness = np.array([evaluate(positions[k]) for k in range(n)])
    pbest_pos = positions.copy()
    pbest_fit = fitness.copy()
    g = int(np.argmin(pbest_fit))
    gbest_pos = pbest_pos[g].copy()
    gbest_fit = float(pbest_fit[g])

    history = np.empty(config.max_iterations)
    for it in range(config.max_iterations):
        for i in range(n):
            r1 = rng.random(dim)
            r2 = rng.random(dim)
            velocities[i] = (
                params.inertia * velocities[i]
                + params.cognitive * r1 * (pbest_pos[i] - positions[i])
                + params.social * r2 * (gbest_pos - positions[i])
            )
            np.clip(velocities[i], -vmax, vmax, out=velocities[i])
            positions[i] = clip_to_bounds(positions[i] + velocities[i], space)
            fit = evaluate(positions[i])
            if fit < pbest_fit[i]:
                pbest_fit[i] = fit
                pbest_pos[i] = positions[i].copy()
                if fit < gbest_fit:
                    gbest_fit = fit
                    gbest_pos = positions[i].copy()
        history[it] = gbest_fit

    return OptimizationResult(
        best_position=gbest_pos,
        best_fitness=gbest_fit,
        fitness_history=history,
        evaluations=evaluations,
    )
