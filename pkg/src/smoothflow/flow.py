"""The continuous-time system: x' = -grad F(x, mu(t)).

Two integrators are provided. Forward Euler with the schedule-driven
timestep is, by construction, the same recursion as the discrete solver
(``integrate_euler`` simply delegates, so the iterate sequences are
bitwise identical). The adaptive integrator is a Dormand-Prince 4(5)
embedded pair with FSAL, implemented here so that runs are reproducible
without an external solver.
"""

import math
from dataclasses import dataclass
from typing import List

import numpy as np

from ._linalg import adaptive_simpson
from .errors import (
    IllPosedIntervalError,
    InvalidParameterError,
    StiffnessError,
    UndefinedBoundError,
)
from .problem import GradEvalCounter, smoothed_grad, smoothed_value
from .schedule import ContinuousDriven
from .solver import run_sgm

# Dormand-Prince 4(5): classic 7-stage tableau with the first-same-as-last
# property; the propagated solution is the 5th-order one.
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# b5 - b4: local error weights of the embedded 4th-order solution.
_DP_ERR = np.array(
    [71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40]
)

_SAFETY = 0.9
_FACTOR_MIN = 0.2
_FACTOR_MAX = 5.0
_INITIAL_STEP_FRACTION = 1e-2
_MIN_STEP_FRACTION = 1e-14


@dataclass(frozen=True)
class FlowSample:
    """State of the flow at one accepted step endpoint.

    ``lyapunov_v`` and ``bound_ct`` are NaN when the problem's optimum
    is unknown; ``bound_ct`` is also NaN at the initial time where the
    bound is undefined.
    """

    t: float
    x: np.ndarray
    mu: float
    f_true: float
    lyapunov_v: float
    bound_ct: float
    grad_evals: int


def integrate_euler(problem, design, x0, max_steps, **kwargs):
    """Forward Euler integration of the flow under a continuous design.

    Delegates to the discrete solver with ``mu_k = mu(t_k)``; the
    returned trajectory is bitwise identical to ``run_sgm`` on the same
    design, which is the whole point of the discretization.
    """
    if not isinstance(design, ContinuousDriven):
        design = ContinuousDriven(mu_of_t=design, t0=getattr(design, "t0", 0.0))
    return run_sgm(problem, design, x0, max_steps, **kwargs)


def lyapunov_continuous(problem, x, t, t0, sigma, beta, mu_of_t):
    """Continuous-time Lyapunov certificate.

    V(t) = exp(sigma (t-t0))/2 * ||x - x*||^2
           + I_sigma(t) * (F(x, mu(t)) + beta mu(t) - F(x*, mu(t))),
    with I_sigma(t) = (exp(sigma (t-t0)) - 1)/sigma, or t - t0 at sigma 0.
    """
    opt = problem.require_optimum()
    if t < t0:
        raise InvalidParameterError("t must be >= t0")
    mu = float(mu_of_t(t))
    x = np.asarray(x, dtype=float)
    diff = x - opt
    delta = t - t0
    weight = math.exp(sigma * delta)
    integral = delta if sigma == 0.0 else math.expm1(sigma * delta) / sigma
    gap = (
        smoothed_value(problem, x, mu)
        + beta * mu
        - smoothed_value(problem, opt, mu)
    )
    return 0.5 * weight * float(diff @ diff) + integral * gap


def weighted_mu_integral(mu_of_t, sigma, t0, t):
    """int_{t0}^{t} exp(sigma (tau - t0)) mu(tau) dtau.

    Uses the design's closed form when it has one (constant and
    exponential designs do), adaptive Simpson otherwise.
    """
    closed = getattr(mu_of_t, "weighted_integral", None)
    if callable(closed):
        return float(closed(sigma, t0, t))
    return adaptive_simpson(
        lambda tau: math.exp(sigma * (tau - t0)) * float(mu_of_t(tau)), t0, t
    )


def bound_continuous(x0_dist_sq, beta, sigma, mu_of_t, t0, t):
    """Continuous-time optimality-gap bound at time t > t0.

    (x0_dist_sq/2 + beta * int exp(sigma tau') mu) / I_sigma(t).
    """
    if not (t > t0):
        raise UndefinedBoundError("the continuous bound is defined for t > t0")
    delta = t - t0
    integral = delta if sigma == 0.0 else math.expm1(sigma * delta) / sigma
    return (0.5 * x0_dist_sq + beta * weighted_mu_integral(mu_of_t, sigma, t0, t)) / integral


def integrate_rk45(
    problem,
    mu_of_t,
    x0,
    t0,
    t_end,
    rtol,
    atol,
    counter=None,
    max_attempts=10_000_000,
):
    """Adaptive Dormand-Prince 4(5) integration of the smoothing flow.

    Error per step is controlled against ``atol + rtol * |x|`` (RMS over
    components); accepted steps shrink or grow by
    ``0.9 * (1/err)**(1/5)`` clamped to [0.2, 5]. The final step is
    clipped to land exactly on ``t_end``. Every right-hand-side
    evaluation is charged to ``counter``; with FSAL that is one
    evaluation up front plus six per attempted step.

    Returns the list of ``FlowSample`` at t0 and every accepted step.
    Raises ``IllPosedIntervalError`` if mu(t) <= 0 anywhere it is
    evaluated and ``StiffnessError`` on step-size underflow.
    """
    if not (t_end > t0):
        raise InvalidParameterError("t_end must be > t0")
    if not (rtol > 0.0 and atol > 0.0):
        raise InvalidParameterError("rtol and atol must be > 0")
    if counter is None:
        counter = GradEvalCounter()
    x = np.array(x0, dtype=float).reshape(-1)
    sigma = problem.f.sigma
    beta = problem.beta
    has_optimum = problem.optimum is not None
    if has_optimum:
        diff0 = x - problem.optimum
        x0_dist_sq = float(diff0 @ diff0)

    def rhs(t, y):
        mu = float(mu_of_t(t))
        if not (mu > 0.0):
            raise IllPosedIntervalError(f"mu(t) = {mu} at t = {t}")
        return -smoothed_grad(problem, y, mu, counter)

    def sample_at(t, y):
        mu = float(mu_of_t(t))
        if has_optimum:
            lyap = lyapunov_continuous(problem, y, t, t0, sigma, beta, mu_of_t)
            bnd = (
                bound_continuous(x0_dist_sq, beta, sigma, mu_of_t, t0, t)
                if t > t0
                else math.nan
            )
        else:
            lyap = math.nan
            bnd = math.nan
        return FlowSample(
            t=t,
            x=y.copy(),
            mu=mu,
            f_true=problem.true_value(y),
            lyapunov_v=lyap,
            bound_ct=bnd,
            grad_evals=counter.count,
        )

    samples: List[FlowSample] = [sample_at(t0, x)]
    span = t_end - t0
    h = _INITIAL_STEP_FRACTION * span
    min_step = _MIN_STEP_FRACTION * span
    t = t0
    k1 = rhs(t, x)
    stages = [None] * 7
    for _ in range(max_attempts):
        remaining = t_end - t
        h_try = min(h, remaining)
        if h_try < min_step:
            raise StiffnessError(f"step size underflow at t = {t} (h = {h_try})")
        stages[0] = k1
        for i in range(1, 7):
            yi = x + h_try * (_DP_A[i] @ np.array(stages[:i]))
            stages[i] = rhs(t + _DP_C[i] * h_try, yi)
        k_mat = np.array(stages)
        x_new = x + h_try * (_DP_B5 @ k_mat)
        err_vec = h_try * (_DP_ERR @ k_mat)
        scale = atol + rtol * np.maximum(np.abs(x), np.abs(x_new))
        err = float(np.sqrt(np.mean((err_vec / scale) ** 2)))
        if err <= 1.0:
            # Land exactly on t_end when the step was clipped to it.
            t = t_end if h_try == remaining else t + h_try
            x = x_new
            k1 = stages[6]  # FSAL: last stage is the next first stage
            samples.append(sample_at(t, x))
            if t >= t_end:
                return samples
        factor = _FACTOR_MAX if err == 0.0 else _SAFETY * err ** (-0.2)
        h = h_try * min(_FACTOR_MAX, max(_FACTOR_MIN, factor))
    raise StiffnessError(f"no convergence within {max_attempts} attempted steps")
