"""Limited-memory BFGS with Armijo backtracking over log-bandwidth space.

The driver is a plain two-loop-recursion L-BFGS: search directions come from
the last ``memory`` curvature pairs, step lengths from a backtracking line
search that enforces the Armijo sufficient-decrease condition, so every
accepted iterate strictly decreases the objective and the loss trace is
monotone.  Curvature pairs with non-positive s'y are skipped, which keeps the
implicit Hessian approximation positive definite.

The objective callback returns ``(value, gradient)``; a non-finite trial
value is treated as a rejected step, never as an error, so the optimizer can
probe arbitrarily aggressive steps safely.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InputError
from .validation import check_seed

# Armijo sufficient-decrease constant and backtracking schedule.
_C1 = 1e-4
_BACKTRACK_FACTOR = 0.5
_MAX_BACKTRACKS = 40

GRADIENT_TOLERANCE = "gradient-tolerance"
LOSS_STAGNATION = "loss-stagnation"
MAX_ITERATIONS = "max-iterations"
LINE_SEARCH_FAILURE = "line-search-failure"


@dataclass(frozen=True)
class OptimizerConfig:
    """Settings for :func:`minimize`.

    ``init_sigma`` is the starting bandwidth used by the selector when it
    builds the initial log-bandwidth vector; it may be a scalar or an
    explicit per-feature vector.  ``restarts`` adds extra runs from
    multiplicatively jittered initializations (log-normal, scale 0.5,
    seeded) and keeps the best result.
    """

    memory: int = 10
    max_iterations: int = 500
    grad_tol: float = 1e-6
    rel_loss_tol: float = 1e-10
    init_sigma: float | tuple[float, ...] = 0.5
    restarts: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.memory < 1:
            raise InputError("memory must be >= 1")
        if self.max_iterations < 1:
            raise InputError("max_iterations must be >= 1")
        if not (self.grad_tol > 0.0 and self.rel_loss_tol > 0.0):
            raise InputError("tolerances must be strictly positive")
        if self.restarts < 0:
            raise InputError("restarts must be >= 0")
        init = np.asarray(self.init_sigma, dtype=np.float64)
        if (init <= 0.0).any() or not np.isfinite(init).all():
            raise InputError("init_sigma must be strictly positive and finite")
        if init.ndim > 0:
            object.__setattr__(self, "init_sigma", tuple(float(v) for v in init))
        else:
            object.__setattr__(self, "init_sigma", float(init))
        check_seed(self.seed)

    def initial_log_sigma(self, n_features: int) -> np.ndarray:
        """Initial log-bandwidth vector for an ``n_features`` problem."""
        init = np.asarray(self.init_sigma, dtype=np.float64)
        if init.ndim == 0:
            init = np.full(n_features, float(init))
        if init.shape[0] != n_features:
            raise InputError(
                f"init_sigma has length {init.shape[0]}, expected {n_features}"
            )
        return np.log(init)


@dataclass(frozen=True)
class OptimResult:
    """Outcome of one minimization.

    ``loss_trace`` holds the accepted-iterate losses (non-increasing by
    construction); ``loss_opt`` equals its last entry.  ``converged`` is True
    when the run stopped on the gradient or loss tolerance.
    """

    theta_opt: np.ndarray
    loss_opt: float
    loss_trace: np.ndarray
    iterations: int
    converged: bool
    termination_reason: str
    n_evaluations: int = 0

    def __post_init__(self):
        object.__setattr__(self, "theta_opt", np.asarray(self.theta_opt, dtype=np.float64))
        object.__setattr__(self, "loss_trace", np.asarray(self.loss_trace, dtype=np.float64))


def _two_loop(g, s_hist, y_hist, rho_hist):
    q = g.copy()
    alphas = []
    for s, y, rho in zip(reversed(s_hist), reversed(y_hist), reversed(rho_hist)):
        a = rho * (s @ q)
        alphas.append(a)
        q -= a * y
    if s_hist:
        q *= (s_hist[-1] @ y_hist[-1]) / (y_hist[-1] @ y_hist[-1])
    for (s, y, rho), a in zip(zip(s_hist, y_hist, rho_hist), reversed(alphas)):
        q += (a - rho * (y @ q)) * s
    return q


def _lbfgs(objective, init, config: OptimizerConfig) -> OptimResult:
    theta = np.asarray(init, dtype=np.float64).copy()
    f, g = objective(theta)
    g = np.asarray(g, dtype=np.float64)
    if not (np.isfinite(f) and np.isfinite(g).all()):
        raise InputError("objective is non-finite at the initial point")

    trace = [f]
    s_hist: list[np.ndarray] = []
    y_hist: list[np.ndarray] = []
    rho_hist: list[float] = []
    n_evals = 1
    iterations = 0
    stagnant = 0
    reason = MAX_ITERATIONS

    for it in range(1, config.max_iterations + 1):
        if np.abs(g).max() <= config.grad_tol:
            reason = GRADIENT_TOLERANCE
            break
        d = -_two_loop(g, s_hist, y_hist, rho_hist)
        dd = float(d @ g)
        if not np.isfinite(dd) or dd >= 0.0:
            # not a descent direction: drop the memory, fall back to steepest descent
            s_hist, y_hist, rho_hist = [], [], []
            d = -g
            dd = -float(g @ g)

        step = 1.0
        accepted = False
        for _ in range(_MAX_BACKTRACKS + 1):
            theta_t = theta + step * d
            f_t, g_t = objective(theta_t)
            n_evals += 1
            if np.isfinite(f_t) and f_t <= f + _C1 * step * dd:
                accepted = True
                break
            step *= _BACKTRACK_FACTOR
        if not accepted:
            reason = LINE_SEARCH_FAILURE
            break

        s = theta_t - theta
        yv = np.asarray(g_t, dtype=np.float64) - g
        sy = float(s @ yv)
        if sy > 1e-12 * np.linalg.norm(s) * np.linalg.norm(yv):
            s_hist.append(s)
            y_hist.append(yv)
            rho_hist.append(1.0 / sy)
            if len(s_hist) > config.memory:
                s_hist.pop(0)
                y_hist.pop(0)
                rho_hist.pop(0)

        f_prev = f
        theta, f, g = theta_t, float(f_t), np.asarray(g_t, dtype=np.float64)
        trace.append(f)
        iterations = it
        # single tiny steps happen mid-run (L-BFGS decrease is not monotone
        # in magnitude), so stagnation needs two consecutive hits
        if abs(f_prev - f) <= config.rel_loss_tol * max(1.0, abs(f_prev)):
            stagnant += 1
            if stagnant >= 2:
                reason = LOSS_STAGNATION
                break
        else:
            stagnant = 0

    return OptimResult(
        theta_opt=theta,
        loss_opt=f,
        loss_trace=np.asarray(trace),
        iterations=iterations,
        converged=reason in (GRADIENT_TOLERANCE, LOSS_STAGNATION),
        termination_reason=reason,
        n_evaluations=n_evals,
    )


def minimize(
    objective: Callable[[np.ndarray], tuple[float, np.ndarray]],
    init,
    config: OptimizerConfig | None = None,
) -> OptimResult:
    """Minimize a differentiable objective from ``init``.

    With ``config.restarts > 0`` the optimization is rerun from jittered
    copies of ``init`` (additive Gaussian noise of scale 0.5 in the
    optimization variables, i.e. multiplicative log-normal jitter on the
    bandwidths) and the result with the lowest loss is returned.
    """
    config = config or OptimizerConfig()
    init = np.asarray(init, dtype=np.float64).reshape(-1)
    if not np.isfinite(init).all():
        raise InputError("init contains non-finite values")
    best = _lbfgs(objective, init, config)
    if config.restarts > 0:
        rng = np.random.default_rng(config.seed)
        for _ in range(config.restarts):
            jittered = init + rng.normal(0.0, 0.5, init.shape[0])
            candidate = _lbfgs(objective, jittered, config)
            if candidate.loss_opt < best.loss_opt:
                best = candidate
    return best
