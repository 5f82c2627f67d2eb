"""The discrete-time system: smoothing gradient descent with monitors.

``run_sgm`` iterates ``x <- x - s_k * grad F(x, mu_k)`` with the
schedule-driven stepsize ``s_k = 1/(L + alpha/mu_k)`` and records, per
retained step, the smoothed and true objective values, the Lyapunov
certificate and the analytical optimality-gap bound.
"""

import math
from dataclasses import dataclass
from typing import List

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidParameterError,
    NumericalDivergenceError,
    ScheduleExhaustedError,
    UndefinedBoundError,
)
from .problem import GradEvalCounter, smoothed_grad, smoothed_value
from .schedule import advance, initial_state

STATUS_BUDGET = "budget-exhausted"
STATUS_SCHEDULE = "schedule-exhausted"
STATUS_TOLERANCE = "tolerance-met"


@dataclass(frozen=True)
class IterationRecord:
    """One retained iterate.

    ``grad_evals`` is the number of gradient evaluations spent to reach
    this iterate (so the initial record carries 0). ``grad_norm`` at the
    final record comes from an uncharged diagnostic evaluation.
    ``bound`` is defined for k >= 1 and NaN otherwise; ``lyapunov`` and
    ``bound`` are NaN when the problem's optimum is unknown.
    """

    k: int
    t: float
    s: float
    mu: float
    x: np.ndarray
    f_tilde: float
    f_true: float
    grad_norm: float
    lyapunov: float
    bound: float
    grad_evals: int


@dataclass(frozen=True)
class Trajectory:
    records: List[IterationRecord]
    problem_fingerprint: str
    schedule: str
    status: str

    def column(self, name):
        """Per-record values of one field as an array."""
        return np.array([getattr(r, name) for r in self.records])

    @property
    def final(self):
        return self.records[-1]


def lyapunov_discrete(problem, state, x):
    """Lyapunov certificate at (state.k, x).

    V = eta_k/2 * ||x - x*||^2
        + (sum eta_{kappa+1} s_kappa) * (F(x, mu_k) + beta*mu_k - F(x*, mu_k)).
    """
    opt = problem.require_optimum()
    x = np.asarray(x, dtype=float)
    diff = x - opt
    gap = (
        smoothed_value(problem, x, state.mu)
        + problem.beta * state.mu
        - smoothed_value(problem, opt, state.mu)
    )
    return 0.5 * state.eta_lin * float(diff @ diff) + state.sum_eta_s * gap


def bound_discrete(state, x0_dist_sq, beta):
    """Optimality-gap bound at step k >= 1.

    (x0_dist_sq/2 + beta * sum eta_{kappa+1} mu_kappa s_kappa)
        / (sum eta_{kappa+1} s_kappa),
    evaluated in log space once the eta-weighted sums overflow doubles.
    """
    if state.k < 1:
        raise UndefinedBoundError("the discrete bound is defined for k >= 1")
    half_dist = 0.5 * x0_dist_sq
    num_lin = half_dist + beta * state.sum_eta_mu_s_lin
    if math.isfinite(num_lin) and math.isfinite(state.sum_eta_s_lin):
        return num_lin / state.sum_eta_s_lin
    log_num = np.logaddexp(
        math.log(half_dist) if half_dist > 0.0 else -math.inf,
        math.log(beta) + state.log_sum_eta_mu_s,
    )
    return float(math.exp(log_num - state.log_sum_eta_s))


def closed_form_bound_nonstrongly(lipschitz, alpha, beta, mu0, gamma, x0_dist_sq, k):
    """Closed-form optimality-gap bound for sigma = 0, mu_k = mu0*(k+1)**(-gamma).

    Branches: gamma in (0,1) with gamma != 1/2 decays like k**(-gamma)
    or k**(gamma-1); gamma = 1/2 like log(k)/sqrt(k); gamma = 1 like
    1/log(k). Upper-bounds the running discrete bound by construction.
    """
    if not (0.0 < gamma <= 1.0):
        raise InvalidParameterError(f"gamma must be in (0, 1], got {gamma}")
    if k < 1:
        raise UndefinedBoundError("the closed-form bound is defined for k >= 1")
    k = float(k)
    c = lipschitz + alpha / mu0
    half_dist = 0.5 * x0_dist_sq
    mu_term = beta * mu0 * mu0 / alpha
    if gamma == 0.5:
        numerator = half_dist + mu_term * (1.0 + math.log(k))
        denominator = 2.0 / c * (math.sqrt(k + 1.0) - 1.0)
    elif gamma == 1.0:
        numerator = half_dist + mu_term * (2.0 - 1.0 / k)
        denominator = math.log(k + 1.0) / c
    else:
        numerator = half_dist + mu_term * (k ** (1.0 - 2.0 * gamma) - 2.0 * gamma) / (
            1.0 - 2.0 * gamma
        )
        denominator = ((k + 1.0) ** (1.0 - gamma) - 1.0) / (c * (1.0 - gamma))
    return numerator / denominator


def run_sgm(
    problem,
    sched,
    x0,
    max_steps,
    grad_eval_budget=None,
    grad_tol=None,
    record_stride=1,
    step_scale=1.0,
    counter=None,
):
    """Run the smoothing gradient method.

    Parameters
    ----------
    problem : CompositeProblem
    sched : schedule variant (PowerDecay, ExpDecay or ContinuousDriven)
    x0 : initial iterate
    max_steps : iteration budget (>= 1)
    grad_eval_budget : optional cap on charged gradient evaluations
    grad_tol : optional stop threshold on the smoothed gradient norm
    record_stride : keep every stride-th record (first and last always)
    step_scale : experimental stepsize factor in (0, 1]; the analytical
        bounds are only guaranteed at 1.0
    counter : optional externally owned ``GradEvalCounter``

    Returns a ``Trajectory``; schedule exhaustion ends the run with
    status ``schedule-exhausted`` rather than raising.
    """
    if max_steps < 1:
        raise InvalidParameterError("max_steps must be >= 1")
    if not (0.0 < step_scale <= 1.0):
        raise InvalidParameterError("step_scale must be in (0, 1]")
    x = np.array(x0, dtype=float).reshape(-1)
    if x.shape[0] != problem.input_dim:
        raise DimensionMismatchError(
            f"x0 has dimension {x.shape[0]}, problem expects {problem.input_dim}"
        )
    sigma = problem.f.sigma
    lipschitz = problem.f.lipschitz
    alpha = problem.alpha
    beta = problem.beta
    if counter is None:
        counter = GradEvalCounter()
    has_optimum = problem.optimum is not None
    if has_optimum:
        diff0 = x - problem.optimum
        x0_dist_sq = float(diff0 @ diff0)

    state = initial_state(sched, lipschitz, alpha)
    records = []
    status = STATUS_BUDGET

    def emit(k, st, x_now, grad_norm, evals):
        lyap = lyapunov_discrete(problem, st, x_now) if has_optimum else math.nan
        bnd = (
            bound_discrete(st, x0_dist_sq, beta) if has_optimum and k >= 1 else math.nan
        )
        records.append(
            IterationRecord(
                k=k,
                t=st.t,
                s=st.s,
                mu=st.mu,
                x=x_now.copy(),
                f_tilde=smoothed_value(problem, x_now, st.mu),
                f_true=problem.true_value(x_now),
                grad_norm=grad_norm,
                lyapunov=lyap,
                bound=bnd,
                grad_evals=evals,
            )
        )

    while True:
        k = state.k
        stopping = k >= max_steps or (
            grad_eval_budget is not None and counter.count >= grad_eval_budget
        )
        next_state = None
        if not stopping:
            # Peek the schedule first: on exhaustion the run ends at the
            # current iterate and the gradient below is diagnostic only.
            try:
                next_state = advance(sched, state, sigma, lipschitz, alpha)
            except ScheduleExhaustedError:
                stopping = True
                status = STATUS_SCHEDULE
        charged = not stopping
        g = smoothed_grad(problem, x, state.mu, counter if charged else None)
        grad_norm = float(np.linalg.norm(g))
        if not (np.all(np.isfinite(x)) and math.isfinite(grad_norm)):
            raise NumericalDivergenceError(k)
        if not stopping and grad_tol is not None and grad_norm <= grad_tol:
            stopping = True
            status = STATUS_TOLERANCE
        if stopping or k % record_stride == 0:
            # Evaluations spent reaching this iterate; a just-charged
            # evaluation belongs to the step ahead, not to this record.
            emit(k, state, x, grad_norm, counter.count - (1 if charged else 0))
        if stopping:
            break
        x = x - step_scale * state.s * g
        state = next_state
    return Trajectory(
        records=records,
        problem_fingerprint=problem.fingerprint,
        schedule=sched.describe(),
        status=status,
    )
