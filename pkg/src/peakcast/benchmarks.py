"""Standard continuous benchmark objectives used to self-test the optimizers."""

from __future__ import annotations

import numpy as np


def sphere(x: np.ndarray) -> float:
    """Sum of squares; unique global minimum 0 at the origin."""
    x = np.asarray(x, dtype=float)
    return float(x @ x)


def rastrigin(x: np.ndarray) -> float:
    """Highly multimodal; global minimum 0 at the origin, grid of local minima."""
    x = np.asarray(x, dtype=float)
    return float(10.0 * x.size + np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x)))


def rosenbrock(x: np.ndarray) -> float:
    """Curved valley; global minimum 0 at the all-ones point."""
    x = np.asarray(x, dtype=float)
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2))
