"""Adam optimizer over transition-operator entries.

Fixed iteration budget, no stopping rule: the fitting protocol runs a small
number of full-gradient steps from the plain least-squares solution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError
from .objectives import Objective, objective_value, objective_value_and_gradient


@dataclass(frozen=True)
class AdamConfig:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    iterations: int = 5

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if not 0 <= self.beta1 < 1:
            raise ValueError("beta1 must lie in [0, 1)")
        if not 0 <= self.beta2 < 1:
            raise ValueError("beta2 must lie in [0, 1)")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.iterations < 1:
            raise ValueError("iterations must be at least 1")


@dataclass(frozen=True)
class OptState:
    params: np.ndarray
    first_moment: np.ndarray
    second_moment: np.ndarray
    step_count: int = 0

    def __post_init__(self):
        if not (self.params.shape == self.first_moment.shape == self.second_moment.shape):
            raise ValueError("params and moment estimates must share one shape")
        if self.step_count < 0:
            raise ValueError("step_count must be nonnegative")

    @classmethod
    def initial(cls, params: np.ndarray) -> "OptState":
        params = np.asarray(params, dtype=float)
        return cls(
            params=params,
            first_moment=np.zeros_like(params),
            second_moment=np.zeros_like(params),
            step_count=0,
        )


def adam_step(state: OptState, grad: np.ndarray, cfg: AdamConfig) -> OptState:
    """One bias-corrected Adam update; returns the advanced state."""
    grad = np.asarray(grad, dtype=float)
    if grad.shape != state.params.shape:
        raise ValueError("gradient shape does not match the parameters")
    t = state.step_count + 1
    m = cfg.beta1 * state.first_moment + (1.0 - cfg.beta1) * grad
    v = cfg.beta2 * state.second_moment + (1.0 - cfg.beta2) * grad * grad
    m_hat = m / (1.0 - cfg.beta1**t)
    v_hat = v / (1.0 - cfg.beta2**t)
    params = state.params - cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.epsilon)
    return OptState(params=params, first_moment=m, second_moment=v, step_count=t)


def fit_transition(obj: Objective, a0: np.ndarray, cfg: AdamConfig) -> tuple[np.ndarray, np.ndarray]:
    """Run ``cfg.iterations`` Adam steps on ``obj`` starting from ``a0``.

    Returns the final operator and the objective value at every iterate
    (length ``iterations + 1``, the initial loss first).
    """
    a0 = np.asarray(a0, dtype=float)
    d = obj.snapshots.dim
    if a0.shape != (d, d):
        raise ValueError("a0 shape does not match the snapshot dimension")
    state = OptState.initial(a0.copy())
    trace = np.empty(cfg.iterations + 1)
    for it in range(cfg.iterations):
        value, grad = objective_value_and_gradient(obj, state.params)
        trace[it] = value
        if not np.isfinite(value):
            raise DivergenceError(f"objective became non-finite at iteration {it}", step=it)
        state = adam_step(state, grad, cfg)
    final = objective_value(obj, state.params)
    trace[-1] = final
    if not np.isfinite(final):
        raise DivergenceError(
            f"objective became non-finite after {cfg.iterations} iterations",
            step=cfg.iterations,
        )
    return state.params, trace
