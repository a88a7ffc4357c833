"""Ridge-penalized binary logistic regression, fit by iteratively
reweighted least squares (Newton steps with step halving).

The objective is the penalized negative binomial log-likelihood

    f(b, w) = -sum_i m_i [t_i log p_i + (1 - t_i) log(1 - p_i)]
              + (ridge / 2) ||w||^2

with p_i = sigmoid(w . x_i + b), instance weights m_i, and the intercept b
left out of the penalty.  The objective is strictly convex (any positive
ridge), so the optimizer is deterministic and the fit reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..data import Dataset
from ..errors import DidNotConverge
from .base import BinaryModel, FeatureEncoder, binary_class_info

_MAX_HALVINGS = 50


@dataclass(frozen=True)
class LogisticParams:
    ridge: float = 1e-8
    max_iterations: int = 200
    gradient_tolerance: float = 1e-8

    def __post_init__(self):
        if self.ridge < 0:
            raise ValueError("ridge must be >= 0")
        if self.gradient_tolerance <= 0:
            raise ValueError("gradient tolerance must be > 0")


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))


def penalized_nll(beta, X, target, sample_weights, ridge) -> float:
    """Objective value; ``beta[0]`` is the (unpenalized) intercept."""
    z = X @ beta[1:] + beta[0]
    # -t log p - (1-t) log(1-p) == (1-t) z + log(1 + e^-z), stable form
    losses = (1.0 - target) * z + np.logaddexp(0.0, -z)
    return float(sample_weights @ losses + 0.5 * ridge * (beta[1:] @ beta[1:]))


def penalized_nll_grad(beta, X, target, sample_weights, ridge) -> np.ndarray:
    """Analytic gradient of :func:`penalized_nll` in ``beta``."""
    z = X @ beta[1:] + beta[0]
    r = sample_weights * (_sigmoid(z) - target)
    g = np.empty_like(beta)
    g[0] = r.sum()
    g[1:] = X.T @ r + ridge * beta[1:]
    return g


class LogisticModel(BinaryModel):
    kind = "logistic"

    def __init__(self, weights, intercept, encoder, class_pair, iterations, converged):
        self.weights = np.asarray(weights, dtype=np.float64)
        self.intercept = float(intercept)
        self.encoder = encoder
        self.class_pair = tuple(class_pair)
        self.iterations = int(iterations)
        self.converged = bool(converged)
        self.n_attributes = encoder.n_attributes

    def predict_prob_batch(self, rows: np.ndarray) -> np.ndarray:
        X = self.encoder.encode(rows)
        return _sigmoid(X @ self.weights + self.intercept)

    def to_lines(self) -> list[str]:
        lines = [
            "logistic",
            f"classes {self.class_pair[0]} {self.class_pair[1]}",
            f"intercept {self.intercept!r}",
        ]
        lines += [
            f"w {name} {w!r}"
            for name, w in zip(self.encoder.feature_names, self.weights)
        ]
        return lines


def fit_logistic(d: Dataset, params: LogisticParams = LogisticParams()) -> LogisticModel:
    """Fit on a dataset with exactly two classes present.

    Deterministic: Newton iterations from the zero vector with step
    halving.  The iteration runs in an internally standardized feature
    basis (same objective, far better conditioning on unnormalized data)
    and stops when the standardized gradient inf-norm reaches the
    tolerance; returned weights are in the original basis.  Raises
    DidNotConverge (carrying the partial model) at the iteration cap.
    """
    lo, hi, target = binary_class_info(d)
    encoder = FeatureEncoder(d.attributes, d.class_attribute)
    raw = encoder.encode(d.values)
    m = d.weights

    # Standardize with weighted moments; constant columns keep scale 1.
    total = m.sum()
    mu = (m @ raw) / total
    var = (m @ (raw - mu) ** 2) / total
    scale = np.sqrt(var)
    scale[scale <= 0] = 1.0
    X = (raw - mu) / scale

    p_dim = X.shape[1] + 1
    beta = np.zeros(p_dim)
    # ridge on original-basis weights w = ws / scale
    ridge_diag = np.concatenate(([0.0], params.ridge / scale**2))

    def objective(b):
        z = X @ b[1:] + b[0]
        losses = (1.0 - target) * z + np.logaddexp(0.0, -z)
        return float(m @ losses + 0.5 * (ridge_diag @ (b * b)))

    def gradient(b):
        z = X @ b[1:] + b[0]
        r = m * (_sigmoid(z) - target)
        g = np.empty_like(b)
        g[0] = r.sum()
        g[1:] = X.T @ r
        return g + ridge_diag * b

    obj = objective(beta)
    iterations = 0
    converged = False
    stationary_streak = 0
    for iterations in range(1, params.max_iterations + 1):
        g = gradient(beta)
        if np.max(np.abs(g)) <= params.gradient_tolerance:
            converged = True
            iterations -= 1
            break
        z = X @ beta[1:] + beta[0]
        p = _sigmoid(z)
        curv = m * np.maximum(p * (1.0 - p), 1e-12)
        Xc = X * curv[:, None]
        hess = np.empty((p_dim, p_dim))
        hess[0, 0] = curv.sum()
        hess[0, 1:] = hess[1:, 0] = Xc.sum(axis=0)
        hess[1:, 1:] = X.T @ Xc
        hess[np.diag_indices_from(hess)] += ridge_diag
        try:
            step = np.linalg.solve(hess, -g)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(hess, -g, rcond=None)[0]

        alpha = 1.0
        for _ in range(_MAX_HALVINGS):
            cand = beta + alpha * step
            cand_obj = objective(cand)
            if cand_obj < obj:
                break
            alpha *= 0.5
        else:
            # No strictly decreasing step of any size exists: the iterate
            # is the double-precision optimum, even if the (noise-level)
            # gradient sits above an unreachably tight tolerance.
            converged = True
            break
        if obj - cand_obj <= 1e-13 * (1.0 + abs(cand_obj)):
            stationary_streak += 1
        else:
            stationary_streak = 0
        beta, obj = cand, cand_obj
        if stationary_streak >= 3:
            # three consecutive float-resolution decreases: numerically
            # stationary (quasi-separable data crawls here forever)
            converged = True
            break
    else:
        converged = np.max(np.abs(gradient(beta))) <= params.gradient_tolerance

    weights = beta[1:] / scale
    intercept = beta[0] - float(weights @ mu)
    model = LogisticModel(weights, intercept, encoder, (lo, hi), iterations, converged)
    if not converged:
        raise DidNotConverge(iterations, model=model)
    return model
