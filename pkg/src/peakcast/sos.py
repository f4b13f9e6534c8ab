"""Symbiotic organism search: population optimization over a bounded box.

The ecosystem evolves by full sweeps over the organisms; each organism i in
index order undergoes a mutualism, then a commensalism, then a parasitism
step. Replacements require strictly better fitness, so per-organism fitness
and the ecosystem best are non-increasing.

All randomness flows through one seeded generator owned by the ecosystem.
Per step the draw order is fixed:

  mutualism:     partner j, BF1, BF2, rand for organism i, rand for organism j
  commensalism:  partner j, rand in (-1, 1)
  parasitism:    partner j, number of resampled dimensions, dimension subset,
                 one uniform value per resampled dimension
                 (scalar_multiply mode: partner j, one rand in (0, 1))

Identical (objective, space, config) inputs therefore yield bit-identical
results.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Literal, Optional

import numpy as np

from .errors import ConfigError, NonFiniteObjectiveError
from .space import SearchSpace, clip_to_bounds

Objective = Callable[[np.ndarray], float]
TraceSink = Callable[[str], None]


@dataclass
class PsoParams:
    """Inertia-weight PSO coefficients (baseline kernel only)."""

    inertia: float = 0.72
    cognitive: float = 1.49
    social: float = 1.49


@dataclass
class OptimizerConfig:
    population_size: int = 30
    max_iterations: int = 100
    seed: int = 0
    algorithm: Literal["sos", "pso"] = "sos"
    pso_params: Optional[PsoParams] = None
    parasite_mode: Literal["subset_resample", "scalar_multiply"] = "subset_resample"

    def validate(self):
        if self.population_size < 2:
            raise ConfigError(
                f"population_size must be >= 2, got {self.population_size}"
            )
        if self.max_iterations < 1:
            raise ConfigError(
                f"max_iterations must be >= 1, got {self.max_iterations}"
            )
        if self.algorithm not in ("sos", "pso"):
            raise ConfigError(f"unknown algorithm {self.algorithm!r}")
        if self.parasite_mode not in ("subset_resample", "scalar_multiply"):
            raise ConfigError(f"unknown parasite_mode {self.parasite_mode!r}")


@dataclass
class Organism:
    """One candidate solution with its cached objective value."""

    position: np.ndarray
    fitness: float

    def copy(self) -> "Organism":
        return Organism(self.position.copy(), self.fitness)


@dataclass
class Ecosystem:
    """Population state threaded through the phase steps.

    Also carries the run context: bounds, RNG, evaluation counter and the
    optional phase-trace sink used by conformance tests.
    """

    organisms: list[Organism]
    best: Organism
    iteration: int
    rng: np.random.Generator
    space: SearchSpace
    parasite_mode: str = "subset_resample"
    evaluations: int = 0
    trace: Optional[TraceSink] = None

    def evaluate(self, objective: Objective, position: np.ndarray) -> float:
        value = float(objective(position))
        self.evaluations += 1
        if not np.isfinite(value):
            raise NonFiniteObjectiveError(position, value)
        return value

    def offer_best(self, organism: Organism):
        if organism.fitness < self.best.fitness:
            self.best = organism.copy()

    def emit(self, i: int, phase: str, accepted: bool):
        if self.trace is not None:
            word = "accepted" if accepted else "rejected"
            self.trace(f"{self.iteration}\t{i}\t{phase}\t{word}")


@dataclass
class OptimizationResult:
    best_position: np.ndarray
    best_fitness: float
    fitness_history: np.ndarray
    evaluations: int


def _pick_partner(eco: Ecosystem, i: int) -> int:
    """Uniform draw over organism indices excluding i."""
    j = int(eco.rng.integers(len(eco.organisms) - 1))
    return j + 1 if j >= i else j


def mutualism_step(eco: Ecosystem, i: int, objective: Objective) -> Ecosystem:
    """Both i and a random partner j move toward the best, away from their mean.

    Candidate positions use benefit factors drawn from {1, 2}; each organism
    is replaced only when its candidate strictly improves its fitness.
    """
    j = _pick_partner(eco, i)
    org_i, org_j = eco.organisms[i], eco.organisms[j]
    mutual = 0.5 * (org_i.position + org_j.position)
    bf1 = int(eco.rng.integers(1, 3))
    bf2 = int(eco.rng.integers(1, 3))
    r1 = float(eco.rng.random())
    r2 = float(eco.rng.random())
    best = eco.best.position
    cand_i = clip_to_bounds(org_i.position + r1 * (best - mutual * bf1), eco.space)
    cand_j = clip_to_bounds(org_j.position + r2 * (best - mutual * bf2), eco.space)
    fit_i = eco.evaluate(objective, cand_i)
    fit_j = eco.evaluate(objective, cand_j)

    accepted = False
    if fit_i < org_i.fitness:
        eco.organisms[i] = Organism(cand_i, fit_i)
        eco.offer_best(eco.organisms[i])
        accepted = True
    if fit_j < org_j.fitness:
        eco.organisms[j] = Organism(cand_j, fit_j)
        eco.offer_best(eco.organisms[j])
        accepted = True
    eco.emit(i, "mutualism", accepted)
    return eco


def commensalism_step(eco: Ecosystem, i: int, objective: Objective) -> Ecosystem:
    """Organism i rides the difference between the best and a partner j.

    The partner is read but never modified.
    """
    j = _pick_partner(eco, i)
    org_i, org_j = eco.organisms[i], eco.organisms[j]
    r = float(eco.rng.uniform(-1.0, 1.0))
    cand = clip_to_bounds(
        org_i.position + r * (eco.best.position - org_j.position), eco.space
    )
    fit = eco.evaluate(objective, cand)

    accepted = fit < org_i.fitness
    if accepted:
        eco.organisms[i] = Organism(cand, fit)
        eco.offer_best(eco.organisms[i])
    eco.emit(i, "commensalism", accepted)
    return eco


def parasitism_step(eco: Ecosystem, i: int, objective: Objective) -> Ecosystem:
    """A mutated copy of organism i challenges a random partner j.

    In subset_resample mode the parasite copies i and redraws a non-empty
    random subset of coordinates uniformly within bounds; scalar_multiply
    instead scales the whole vector by one rand(0, 1) and clips. The partner
    is replaced only when the parasite is strictly fitter.
    """
    j = _pick_partner(eco, i)
    org_i = eco.organisms[i]
    parasite = org_i.position.copy()
    if eco.parasite_mode == "subset_resample":
        dim = eco.space.dimension
        count = int(eco.rng.integers(1, dim + 1))
        dims = eco.rng.choice(dim, size=count, replace=False)
        parasite[dims] = eco.rng.uniform(
            eco.space.lower[dims], eco.space.upper[dims]
        )
    else:
        r = float(eco.rng.random())
        parasite = clip_to_bounds(r * org_i.position, eco.space)
    fit = eco.evaluate(objective, parasite)

    accepted = fit < eco.organisms[j].fitness
    if accepted:
        eco.organisms[j] = Organism(parasite, fit)
        eco.offer_best(eco.organisms[j])
    eco.emit(i, "parasitism", accepted)
    return eco


def initialize_ecosystem(
    objective: Objective,
    space: SearchSpace,
    config: OptimizerConfig,
    initial_positions: Optional[np.ndarray] = None,
    trace: Optional[TraceSink] = None,
) -> Ecosystem:
    """Seeded uniform population; optional warm-start rows replace the first
    random positions (clipped into bounds) without changing RNG consumption."""
    config.validate()
    rng = np.random.default_rng(config.seed)
    n = config.population_size
    positions = rng.uniform(space.lower, space.upper, size=(n, space.dimension))
    if initial_positions is not None:
        warm = np.atleast_2d(np.asarray(initial_positions, dtype=float))
        if warm.shape[0] > n:
            raise ConfigError("more warm-start positions than population slots")
        for k in range(warm.shape[0]):
            positions[k] = clip_to_bounds(warm[k], space)

    eco = Ecosystem(
        organisms=[],
        best=Organism(positions[0].copy(), np.inf),
        iteration=0,
        rng=rng,
        space=space,
        parasite_mode=config.parasite_mode,
        trace=trace,
    )
    for k in range(n):
        fit = eco.evaluate(objective, positions[k])
        eco.organisms.append(Organism(positions[k].copy(), fit))
    eco.best = eco.organisms[int(np.argmin([o.fitness for o in eco.organisms]))].copy()
    return eco


def optimize(
    objective: Objective,
    space: SearchSpace,
    config: OptimizerConfig,
    initial_positions: Optional[np.ndarray] = None,
    trace: Optional[TraceSink] = None,
) -> OptimizationResult:
    """Run symbiotic organism search for ``config.max_iterations`` full sweeps.

    Returns the best organism found, the per-iteration best-fitness history
    (non-increasing) and the exact number of objective evaluations.
    """
    if config.algorithm != "sos":
        raise ConfigError(f"optimize() runs the sos kernel, got {config.algorithm!r}")
    eco = initialize_ecosystem(objective, space, config, initial_positions, trace)
    history = np.empty(config.max_iterations)
    for iteration in range(1, config.max_iterations + 1):
        eco.iteration = iteration
        for i in range(len(eco.organisms)):
            mutualism_step(eco, i, objective)
            commensalism_step(eco, i, objective)
            parasitism_step(eco, i, objective)
        history[iteration - 1] = eco.best.fitness
    return OptimizationResult(
        best_position=eco.best.position.copy(),
        best_fitness=eco.best.fitness,
        fitness_history=history,
        evaluations=eco.evaluations,
    )
