#!/usr/bin/env python3
"""Train the epsilon-SVR on noisy 1-D data and inspect what the solver did.

Points inside the epsilon tube cost nothing and get zero dual coefficients;
only the support vectors carry the fit. The KKT verifier recomputes both
objectives from scratch, so the duality gap tells you how converged the
training run is.
"""

import numpy as np

from peakcast import (
    SvrHyperparameters,
    TrainingProblem,
    predict_batch,
    train,
    verify_kkt,
)
from peakcast.svr import model_from_text, model_to_text

rng = np.random.default_rng(7)
X = np.sort(rng.uniform(0, 6, size=60))[:, None]
y = np.sin(X[:, 0]) + 0.08 * rng.normal(size=60)

hyper = SvrHyperparameters(cost_c=10.0, epsilon=0.1, gamma=1.0)
problem = TrainingProblem(X, y)
model, diag = train(problem, hyper, solver_tolerance=1e-6)

print(f"training points:    {problem.count}")
print(f"support vectors:    {model.dual_coefficients.size}")
print(f"bias:               {model.bias:.4f}")
print(f"iterations:         {diag.iterations}")
print(f"converged:          {diag.converged}")
print(f"primal objective:   {diag.primal_objective:.6f}")
print(f"dual objective:     {diag.dual_objective:.6f}")
print(f"duality gap:        {diag.duality_gap:.2e}")

# residuals inside the tube are free; count how many points sit outside
residuals = np.abs(predict_batch(model, X) - y)
print(f"points outside eps: {(residuals > hyper.epsilon + 1e-9).sum()}")

# independent re-verification of the optimality conditions
check = verify_kkt(problem, model, tolerance=1e-6)
print(f"max KKT violation:  {check.max_kkt_violation:.2e}")

# the flat text format round-trips the model exactly
text = model_to_text(model)
restored = model_from_text(text)
sample = X[17]
print(f"serialized size:    {len(text)} bytes")
print("round-trip exact:  ", predict_batch(restored, [sample])[0] == predict_batch(model, [sample])[0])

# a coarse look at the fit quality on a dense grid
grid = np.linspace(0, 6, 13)[:, None]
fit = predict_batch(model, grid)
for g, f in zip(grid[:, 0], fit):
    bar = "#" * int(round((f + 1.2) * 16))
    print(f"x={g:4.1f}  f={f:+.3f}  {bar}")
