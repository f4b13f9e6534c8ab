"""Epsilon-insensitive support vector regression with an RBF kernel.

Training solves the dual

    min over beta:  0.5 beta' K beta - y' beta + epsilon * sum|beta_i|
    subject to      sum(beta_i) = 0,  -C <= beta_i <= C

by pairwise coordinate optimization: each pass picks the maximally
KKT-violating index pair and minimizes the objective exactly along the
(e_p - e_q) direction (the one-dimensional problem is a convex piecewise
quadratic, solved by candidate enumeration). The equality constraint is
preserved by construction and the solver is fully deterministic.

beta_i here is the difference of the classic pair of nonnegative dual
variables for point i, so predictions are sum_i beta_i K(x_i, x) + b.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .data import NormalizationState
from .errors import DimensionMismatchError, NumericError

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


_BOUND_MARGIN = 1e-12  # relative slack when classifying beta as at-bound


@dataclass(frozen=True)
class SvrHyperparameters:
    """Penalty C, tube half-width epsilon and RBF width gamma."""

    cost_c: float
    epsilon: float
    gamma: float

    def __post_init__(self):
        if not (self.cost_c > 0):
            raise NumericError(f"cost_c must be > 0, got {self.cost_c}")
        if not (self.epsilon >= 0):
            raise NumericError(f"epsilon must be >= 0, got {self.epsilon}")
        if not (self.gamma > 0):
            raise NumericError(f"gamma must be > 0, got {self.gamma}")


class TrainingProblem:
    """Finite training inputs (uniform dimension) with aligned targets."""

    def __init__(self, inputs, targets):
        self.inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
        self.targets = np.asarray(targets, dtype=float).ravel()
        if self.inputs.shape[0] != self.targets.shape[0]:
            raise DimensionMismatchError(
                f"{self.inputs.shape[0]} inputs vs {self.targets.shape[0]} targets"
            )
        if self.count < 1:
            raise NumericError("training problem needs at least one point")
        if not np.isfinite(self.inputs).all() or not np.isfinite(self.targets).all():
            raise NumericError("training data contains non-finite values")

    @property
    def count(self) -> int:
        return self.inputs.shape[0]

    @property
    def dimension(self) -> int:
        return self.inputs.shape[1]


@dataclass
class SvrModel:
    """Trained regressor.

    ``support_inputs`` are stored in solver space (after feature scaling when
    a normalization state is present); ``predict`` maps raw inputs in and raw
    targets back out.
    """

    support_inputs: np.ndarray
    dual_coefficients: np.ndarray
    bias: float
    hyper: SvrHyperparameters
    normalization: Optional[NormalizationState]
    input_dimension: int
    support_indices: Optional[np.ndarray] = None


@dataclass
class TrainingDiagnostics:
    primal_objective: float
    dual_objective: float
    duality_gap: float
    iterations: int
    max_kkt_violation: float
    converged: bool


def rbf_kernel(a, b, gamma: float) -> float:
    """exp(-gamma * ||a - b||^2); 1.0 at zero distance, symmetric."""
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.shape != b.shape:
        raise DimensionMismatchError(f"kernel arguments of length {a.size} vs {b.size}")
    if not gamma > 0:
        raise NumericError(f"gamma must be > 0, got {gamma}")
    d = a - b
    return float(np.exp(-gamma * (d @ d)))


def epsilon_insensitive_loss(prediction: float, target: float, epsilon: float) -> float:
    """Zero inside the tube, linear outside: max(0, |prediction - target| - epsilon)."""
    return max(0.0, abs(prediction - target) - epsilon)


def squared_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """All pairwise squared Euclidean distances, clamped at zero."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    d2 = (a * a).sum(axis=1)[:, None] + (b * b).sum(axis=1)[None, :] - 2.0 * (a @ b.T)
    return np.maximum(d2, 0.0)


def kernel_matrix(a: np.ndarray, b: np.ndarray, gamma: float) -> np.ndarray:
    return np.exp(-gamma * squared_distances(a, b))


@njit(cache=True)
def _solve_dual(K, y, C, eps, tol, max_passes):  # pragma: no cover - jitted
    """Pairwise dual coordinate descent; returns (beta, b_lo, b_hi, iters, conv).

    b_lo/b_hi are the tightest lower/upper KKT bounds on the bias at exit;
    convergence means b_lo - b_hi <= tol.
    """
    l = y.shape[0]
    beta = np.zeros(l)
    g = np.zeros(l)  # K @ beta, maintained incrementally
    bnd = _BOUND_MARGIN * C
    inf = np.inf
    it = 0
    converged = False
    max_lo = -inf
    min_hi = inf
    while True:
        max_lo = -inf
        min_hi = inf
        p = 0
        q = 0
        for i in range(l):
            yg = y[i] - g[i]
            bi = beta[i]
            if bi <= -C + bnd:
                lo = yg + eps
                hi = inf
            elif bi >= C - bnd:
                lo = -inf
                hi = yg - eps
            elif bi < 0.0:
                lo = yg + eps
                hi = lo
            elif bi > 0.0:
                lo = yg - eps
                hi = lo
            else:
                lo = yg - eps
                hi = yg + eps
            if lo > max_lo:
                max_lo = lo
                p = i
            if hi < min_hi:
                min_hi = hi
                q = i
        if max_lo - min_hi <= tol:
            converged = True
            break
        if it >= max_passes:
            break

        # Exact minimization along beta_p += t, beta_q -= t for t in (0, t_hi].
        bp = beta[p]
        bq = beta[q]
        t_hi = min(C - bp, bq + C)
        eta = K[p, p] + K[q, q] - 2.0 * K[p, q]
        a = (g[p] - y[p]) - (g[q] - y[q])

        # Candidate steps: box edge, |.| breakpoints inside, per-segment minima.
        cand = np.empty(6)
        n_cand = 0
        cand[n_cand] = t_hi
        n_cand += 1
        br1 = -bp  # beta_p sign change
        br2 = bq  # beta_q sign change
        if 0.0 < br1 < t_hi:
            cand[n_cand] = br1
            n_cand += 1
        if 0.0 < br2 < t_hi:
            cand[n_cand] = br2
            n_cand += 1
        if eta > 0.0:
            # Segment edges, sorted.
            s1 = br1 if 0.0 < br1 < t_hi else t_hi
            s2 = br2 if 0.0 < br2 < t_hi else t_hi
            e1 = min(s1, s2)
            e2 = max(s1, s2)
            edges0 = 0.0
            segs = ((edges0, e1), (e1, e2), (e2, t_hi))
            for s_lo, s_hi in segs:
                if s_hi <= s_lo:
                    continue
                m = 0.5 * (s_lo + s_hi)
                sp = 1.0 if bp + m >= 0.0 else -1.0
                sq = 1.0 if bq - m >= 0.0 else -1.0
                t_star = -(a + eps * (sp - sq)) / eta
                if s_lo < t_star < s_hi:
                    cand[n_cand] = t_star
                    n_cand += 1

        best_t = 0.0
        best_val = 0.0
        for k in range(n_cand):
            t = cand[k]
            if t <= 0.0 or t > t_hi:
                continue
            val = (
                0.5 * eta * t * t
                + a * t
                + eps * ((abs(bp + t) - abs(bp)) + (abs(bq - t) - abs(bq)))
            )
            if val < best_val or (val == best_val and 0.0 < t < best_t):
                best_val = val
                best_t = t
        if best_t <= 0.0:
            # No descending step available: numerically stalled.
            break

        t = best_t
        new_bp = bp + t
        new_bq = bq - t
        if new_bp > C:
            new_bp = C
        elif new_bp < -C:
            new_bp = -C
        if new_bq > C:
            new_bq = C
        elif new_bq < -C:
            new_bq = -C
        beta[p] = new_bp
        beta[q] = new_bq
        for i in range(l):
            g[i] += t * (K[i, p] - K[i, q])
        it += 1

    return beta, max_lo, min_hi, it, converged


def _bias_from_solution(beta, g, y, C, eps, b_lo, b_hi):
    """Average the bias estimates of free support vectors; fall back to the
    midpoint of the KKT bias interval when none are free."""
    margin = _BOUND_MARGIN * C
    free = (np.abs(beta) > 0.0) & (np.abs(beta) < C - margin)
    if free.any():
        estimates = y[free] - g[free] - eps * np.sign(beta[free])
        return float(estimates.mean())
    return 0.5 * (b_lo + b_hi)


def _diagnostics(K, y, beta, bias, hyper, iterations, converged):
    g = K @ beta
    residuals = y - (g + bias)
    slack = np.maximum(0.0, np.abs(residuals) - hyper.epsilon)
    quad = float(beta @ g)
    primal = 0.5 * quad + hyper.cost_c * float(slack.sum())
    dual = -0.5 * quad - hyper.epsilon * float(np.abs(beta).sum()) + float(y @ beta)
    return TrainingDiagnostics(
        primal_objective=primal,
        dual_objective=dual,
        duality_gap=primal - dual,
        iterations=iterations,
        max_kkt_violation=_max_kkt_violation(beta, residuals, hyper),
        converged=converged,
    )


def _max_kkt_violation(beta, residuals, hyper):
    """Largest per-point optimality violation given fixed beta and bias."""
    C, eps = hyper.cost_c, hyper.epsilon
    margin = _BOUND_MARGIN * C
    worst = 0.0
    for bi, ri in zip(beta, residuals):
        if bi <= -C + margin:
            v = max(0.0, ri + eps)
        elif bi >= C - margin:
            v = max(0.0, eps - ri)
        elif bi < 0.0:
            v = abs(ri + eps)
        elif bi > 0.0:
            v = abs(ri - eps)
        else:
            v = max(0.0, abs(ri) - eps)
        worst = max(worst, v)
    return worst


def train(
    problem: TrainingProblem,
    hyper: SvrHyperparameters,
    solver_tolerance: float = 1e-3,
    max_passes: int = 10_000,
    normalization: Optional[NormalizationState] = None,
) -> tuple[SvrModel, TrainingDiagnostics]:
    """Fit the regressor; exhausting max_passes is reported, not raised."""
    if not solver_tolerance > 0:
        raise NumericError(f"solver_tolerance must be > 0, got {solver_tolerance}")
    if normalization is not None:
        X = normalization.apply_features(problem.inputs)
        y = normalization.apply_target(problem.targets)
    else:
        X = problem.inputs
        y = problem.targets

    K = kernel_matrix(X, X, hyper.gamma)
    beta, b_lo, b_hi, iterations, converged = _solve_dual(
        K, y, hyper.cost_c, hyper.epsilon, solver_tolerance, max_passes
    )
    if not np.isfinite(beta).all():
        raise NumericError("dual solver produced non-finite coefficients")
    g = K @ beta
    bias = _bias_from_solution(beta, g, y, hyper.cost_c, hyper.epsilon, b_lo, b_hi)
    if not np.isfinite(bias):
        raise NumericError("bias computation produced a non-finite value")

    diagnostics = _diagnostics(K, y, beta, bias, hyper, iterations, converged)
    mask = beta != 0.0
    model = SvrModel(
        support_inputs=X[mask].copy(),
        dual_coefficients=beta[mask].copy(),
        bias=bias,
        hyper=hyper,
        normalization=normalization,
        input_dimension=problem.dimension,
        support_indices=np.flatnonzero(mask),
    )
    return model, diagnostics


def predict(model: SvrModel, input_row) -> float:
    """Raw-space prediction for one input row."""
    return float(predict_batch(model, np.atleast_2d(np.asarray(input_row, dtype=float)))[0])


def predict_batch(model: SvrModel, rows) -> np.ndarray:
    """Raw-space predictions for a matrix of input rows."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    if rows.shape[1] != model.input_dimension:
        raise DimensionMismatchError(
            f"input dimension {rows.shape[1]}, model expects {model.input_dimension}"
        )
    if model.normalization is not None:
        rows = model.normalization.apply_features(rows)
    if model.dual_coefficients.size == 0:
        values = np.full(rows.shape[0], model.bias)
    else:
        K = kernel_matrix(rows, model.support_inputs, model.hyper.gamma)
        values = K @ model.dual_coefficients + model.bias
    if model.normalization is not None:
        values = model.normalization.invert_target(values)
    return values


def verify_kkt(
    problem: TrainingProblem, model: SvrModel, tolerance: float = 1e-3
) -> TrainingDiagnostics:
    """Recompute objectives, gap and KKT violations for a trained model.

    Pure function: operates in the model's solver space and mutates nothing.
    """
    if model.normalization is not None:
        X = model.normalization.apply_features(problem.inputs)
        y = model.normalization.apply_target(problem.targets)
    else:
        X = problem.inputs
        y = problem.targets

    beta = _full_coefficients(model, X)
    K = kernel_matrix(X, X, model.hyper.gamma)
    diag = _diagnostics(K, y, beta, model.bias, model.hyper, 0, True)
    return TrainingDiagnostics(
        primal_objective=diag.primal_objective,
        dual_objective=diag.dual_objective,
        duality_gap=diag.duality_gap,
        iterations=0,
        max_kkt_violation=diag.max_kkt_violation,
        converged=diag.max_kkt_violation <= tolerance,
    )


def _full_coefficients(model: SvrModel, X: np.ndarray) -> np.ndarray:
    """Expand the support-only coefficients to one beta per training row."""
    beta = np.zeros(X.shape[0])
    if model.support_indices is not None:
        beta[model.support_indices] = model.dual_coefficients
        return beta
    used = np.zeros(X.shape[0], dtype=bool)
    for coeff, row in zip(model.dual_coefficients, model.support_inputs):
        matches = np.flatnonzero(~used & np.all(X == row, axis=1))
        if matches.size == 0:
            raise NumericError("support vector does not match any training row")
        beta[matches[0]] = coeff
        used[matches[0]] = True
    return beta


# --- flat text serialization -------------------------------------------------

_FORMAT_TAG = "peakcast-svr 1"


def _fmt(x: float) -> str:
    return repr(float(x))


def model_to_text(model: SvrModel) -> str:
    """Versioned flat format: header, one line per support vector, bias line."""
    if model.normalization is None:
        norm = "none"
    else:
        s = model.normalization
        norm = "minmax:{}|{}|{}|{}".format(
            ",".join(_fmt(v) for v in s.feature_min),
            ",".join(_fmt(v) for v in s.feature_max),
            _fmt(s.target_min),
            _fmt(s.target_max),
        )
    lines = [
        f"{_FORMAT_TAG} dim={model.input_dimension} cost_c={_fmt(model.hyper.cost_c)} "
        f"epsilon={_fmt(model.hyper.epsilon)} gamma={_fmt(model.hyper.gamma)} norm={norm}"
    ]
    for coeff, row in zip(model.dual_coefficients, model.support_inputs):
        lines.append(" ".join([_fmt(coeff)] + [_fmt(v) for v in row]))
    lines.append(_fmt(model.bias))
    return "\n".join(lines) + "\n"


def model_from_text(text: str) -> SvrModel:
    lines = [line for line in text.splitlines() if line.strip()]
    if len(lines) < 2 or not lines[0].startswith(_FORMAT_TAG):
        raise NumericError("unrecognized model format")
    fields = dict(
        part.split("=", 1) for part in lines[0][len(_FORMAT_TAG):].split() if "=" in part
    )
    dim = int(fields["dim"])
    hyper = SvrHyperparameters(
        cost_c=float(fields["cost_c"]),
        epsilon=float(fields["epsilon"]),
        gamma=float(fields["gamma"]),
    )
    norm = None
    if fields["norm"] != "none":
        body = fields["norm"].split(":", 1)[1]
        fmin_s, fmax_s, tmin_s, tmax_s = body.split("|")
        norm = NormalizationState(
            feature_min=np.array([float(v) for v in fmin_s.split(",") if v]),
            feature_max=np.array([float(v) for v in fmax_s.split(",") if v]),
            target_min=float(tmin_s),
            target_max=float(tmax_s),
        )

    sv_lines = lines[1:-1]
    coeffs = np.empty(len(sv_lines))
    supports = np.empty((len(sv_lines), dim))
    for k, line in enumerate(sv_lines):
        values = [float(v) for v in line.split()]
        if len(values) != dim + 1:
            raise NumericError(f"support-vector line {k + 2} has {len(values)} fields")
        coeffs[k] = values[0]
        supports[k] = values[1:]
    return SvrModel(
        support_inputs=supports,
        dual_coefficients=coeffs,
        bias=float(lines[-1]),
        hyper=hyper,
        normalization=norm,
        input_dimension=dim,
    )


def save_model(model: SvrModel, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(model_to_text(model))


def load_model(path) -> SvrModel:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_text(fh.read())
