#!/usr/bin/env python3
"""Exercise the two optimization kernels on standard benchmark functions.

Symbiotic organism search needs no tuning knobs beyond population and
iterations; the PSO baseline shares the same interface and determinism
contract. Both should crush the convex sphere; rastrigin separates them
from plain random sampling.
"""

import numpy as np

from peakcast import (
    OptimizerConfig,
    PsoParams,
    SearchSpace,
    optimize,
    pso_optimize,
    rastrigin,
    sphere,
)

# a 2-D box; both benchmarks have their global minimum at the origin
space = SearchSpace(lower=np.array([-5.12, -5.12]), upper=np.array([5.12, 5.12]))

print("== symbiotic organism search on sphere ==")
result = optimize(sphere, space, OptimizerConfig(population_size=30, max_iterations=200, seed=1))
print(f"best value:    {result.best_fitness:.3e}")
print(f"best position: {result.best_position}")
print(f"evaluations:   {result.evaluations}")

print("\n== the same budget on rastrigin (many local minima) ==")
result = optimize(rastrigin, space, OptimizerConfig(population_size=50, max_iterations=200, seed=1))
print(f"best value:    {result.best_fitness:.3e}")
# the per-iteration history is non-increasing by construction
history = result.fitness_history
print(f"history head:  {np.array2string(history[:5], precision=3)}")
print(f"history tail:  {np.array2string(history[-5:], precision=3)}")

print("\n== PSO baseline, same interface ==")
config = OptimizerConfig(
    population_size=30, max_iterations=200, seed=1, algorithm="pso", pso_params=PsoParams()
)
result = pso_optimize(sphere, space, config)
print(f"best value:    {result.best_fitness:.3e}")

print("\n== determinism: same seed, same answer ==")
config = OptimizerConfig(population_size=20, max_iterations=50, seed=42)
a = optimize(sphere, space, config)
b = optimize(sphere, space, config)
print("bit-identical:", np.array_equal(a.best_position, b.best_position))

print("\n== a trace of the phase schedule (first organism sweep) ==")
events = []
optimize(sphere, space, OptimizerConfig(population_size=3, max_iterations=1, seed=0),
         trace=events.append)
for line in events[:3]:
    print(" ", line)
