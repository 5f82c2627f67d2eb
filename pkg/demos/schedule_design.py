"""Designing the smoothing schedule from the continuous timeline.

Decaying mu too fast starves the method: with mu_k = mu0 * lam^k the
stepsizes form a convergent series, the reachable set has radius
mu0/(1-lam), and a far-away start never arrives. Driving mu by a
continuous-time design mu(t) that stays positive forever fixes this by
construction: the discretized time then provably diverges, and value
convergence follows.
"""

import numpy as np

import smoothflow as sf
from smoothflow.harness import ExperimentConfig, generate_problem

# --- the trap: exponentially decaying mu on min |x| ------------------------------
f0 = sf.quadratic_least_squares(np.zeros((1, 1)), np.zeros(1))
scalar = sf.CompositeProblem(f=f0, h=sf.sqrt_l2_approx(1), optimum=np.zeros(1))
mu0, lam = 1.0, 0.9
x0 = np.array([10.0 * mu0 / (1.0 - lam)])  # radius is 10; we start at 100
traj = sf.run_sgm(scalar, sf.ExpDecay(mu0=mu0, lam=lam), x0, 100_000)
print(
    f"min |x| with mu_k = 0.9^k from x0 = {x0[0]:g}: "
    f"stopped at x = {traj.final.x[0]:.4f} ({traj.status}); "
    f"can never get below {x0[0] - mu0 / (1.0 - lam):g}"
)

# --- the fix: schedules driven by a positive continuous design -------------------
problem = generate_problem(ExperimentConfig(n_x=10, n_a=20, n_c=50, rng_seed=1))
x0 = np.zeros(10)
d0 = float(np.linalg.norm(x0 - problem.optimum))

designs = {
    "power decay k^-1/2": sf.PowerDecay(mu0=1.0, gamma=0.5, t0=1.0),
    "reciprocal mu(t)": sf.ContinuousDriven(sf.ReciprocalMu(1.0, 1.0, t0=1.0), t0=1.0),
    "exponential mu(t)": sf.ContinuousDriven(
        sf.ExponentialMu(1.0, 2.0 * problem.f.sigma, t0=1.0), t0=1.0
    ),
}
print("\nstrongly convex benchmark, 10^4 steps, distance ratio to x*:")
for name, sched in designs.items():
    traj = sf.run_sgm(problem, sched, x0, 10_000)
    ratio = float(np.linalg.norm(traj.final.x - problem.optimum)) / d0
    print(
        f"  {name:20s} ||x_N - x*||/||x_0 - x*|| = {ratio:9.3e}   "
        f"t_N = {traj.final.t:8.3f}  F(x_N) = {traj.final.f_true:.3e}"
    )

# sum(s_k) diverging is exactly what separates the convergent designs from
# the trapped one above
report = sf.sum_divergence_equivalent(sf.ExpDecay(mu0=1.0, lam=0.9), 0.0, 0.0, 1.0, 500)
print("\nexp-decay stepsize series:", report.sum_s_verdict, f"(sum = {report.sum_s_series[-1]:.4f})")
report = sf.sum_divergence_equivalent(sf.PowerDecay(mu0=1.0, gamma=0.5), 0.0, 0.0, 1.0, 500)
print("power-decay stepsize series:", report.sum_s_verdict, f"(sum = {report.sum_s_series[-1]:.2f})")
