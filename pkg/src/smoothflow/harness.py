"""Experiment harness: seeded benchmark problems and serialization.

The benchmark family is least squares plus an l1 residual term,

    minimize ||A x - b||^2 + ||C x - d||_1,

with A, C and the planted solution x* drawn from the package's
reproducible normal sampler and b = A x*, d = C x*. Both residuals
vanish at x*, so the optimal value is exactly 0 and x* is a known
optimum. n_A >= n_x makes the quadratic part strongly convex with
overwhelming probability; n_A < n_x forces sigma = 0.

All serialization here is byte-deterministic for a fixed config/seed:
floats are printed with 17 significant digits.
"""

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .approx import AffineTerm, affine_sum, huber_l2_approx, sqrt_l2_approx
from .errors import ConfigError
from .problem import CompositeProblem, GradEvalCounter, quadratic_least_squares
from .rng import Xoshiro256pp, standard_normal
from .schedule import (
    ContinuousDriven,
    ExpDecay,
    ExponentialMu,
    LinearMu,
    PowerDecay,
    ReciprocalMu,
)

__all__ = [
    "ExperimentConfig",
    "GradEvalCounter",
    "generate_problem",
    "standard_normal",
    "schedule_from_config",
    "trajectory_csv",
    "flow_csv",
    "timeline_csv",
    "series_csv",
    "json_envelope",
]

_SMOOTHERS = {"sqrt_l2": sqrt_l2_approx, "huber_l2": huber_l2_approx}


@dataclass
class ExperimentConfig:
    """Deserialized experiment description (see README for the schema)."""

    n_x: int
    n_a: int
    n_c: int
    rng_seed: int
    smoothing: str = "sqrt_l2"
    schedule: dict = field(default_factory=lambda: {"name": "power", "mu0": 1.0, "gamma": 0.5})
    run: dict = field(default_factory=dict)
    outputs: Optional[str] = None

    def __post_init__(self):
        if min(self.n_x, self.n_a, self.n_c) < 1:
            raise ConfigError("n_x, n_A and n_C must all be >= 1")
        if not (0 <= int(self.rng_seed) < 2**64):
            raise ConfigError("rng_seed must be an unsigned 64-bit integer")
        if self.smoothing not in _SMOOTHERS:
            raise ConfigError(
                f"unknown smoothing {self.smoothing!r}; choose from {sorted(_SMOOTHERS)}"
            )

    @classmethod
    def from_dict(cls, raw):
        try:
            prob = raw["problem"]
            return cls(
                n_x=int(prob["n_x"]),
                n_a=int(prob["n_A"]),
                n_c=int(prob["n_C"]),
                rng_seed=int(prob["rng_seed"]),
                smoothing=raw.get("smoothing", "sqrt_l2"),
                schedule=dict(raw.get("schedule", {"name": "power", "mu0": 1.0, "gamma": 0.5})),
                run=dict(raw.get("run", {})),
                outputs=raw.get("outputs"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed config: {exc}") from exc

    @classmethod
    def from_file(cls, path):
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(raw)

    def to_dict(self):
        return {
            "problem": {
                "n_x": self.n_x,
                "n_A": self.n_a,
                "n_C": self.n_c,
                "rng_seed": self.rng_seed,
            },
            "smoothing": self.smoothing,
            "schedule": self.schedule,
            "run": self.run,
            "outputs": self.outputs,
        }


def generate_problem(cfg):
    """Build the seeded benchmark problem described by ``cfg``.

    Draw order is fixed (A row-major, then C row-major, then x*), so a
    given seed always yields bit-identical data. The l1 term is the sum
    over rows of one-dimensional smooth approximations of
    |c_i^T x - d_i|; its parameters come out as
    (sum_i ||c_i||^2, n_C) for the sqrt smoother.
    """
    rng = Xoshiro256pp(cfg.rng_seed)
    a = rng.normals((cfg.n_a, cfg.n_x))
    c = rng.normals((cfg.n_c, cfg.n_x))
    x_star = rng.normals(cfg.n_x)
    b = a @ x_star
    # Offsets come from the same stacked matmul the composed term
    # evaluates, so the residuals at x* are zero bit-for-bit and the
    # optimal value is exactly 0.
    d = c @ x_star
    smoother = _SMOOTHERS[cfg.smoothing]
    terms = []
    for i in range(cfg.n_c):
        terms.append(
            AffineTerm(
                weight=1.0,
                matrix=c[i : i + 1, :],
                offset=-d[i : i + 1],
                inner=smoother(1),
            )
        )
    return CompositeProblem(
        f=quadratic_least_squares(a, b),
        h=affine_sum(terms),
        optimum=x_star,
        optimal_value=0.0,
    )


def schedule_from_config(params, t0=0.0):
    """Build a schedule variant from a name + parameter map.

    Names: "power" (mu0, gamma), "exp" (mu0, lambda),
    "continuous-linear" (mu0, rate), "continuous-exp" (mu0, gamma),
    "continuous-reciprocal" (mu0, p). Continuous designs anchor at
    ``params["t0"]`` or the ``t0`` argument.
    """
    params = dict(params)
    name = params.pop("name", None)
    t0 = float(params.pop("t0", t0))
    try:
        if name == "power":
            return PowerDecay(mu0=float(params["mu0"]), gamma=float(params["gamma"]), t0=t0)
        if name == "exp":
            return ExpDecay(mu0=float(params["mu0"]), lam=float(params["lambda"]), t0=t0)
        if name == "continuous-linear":
            design = LinearMu(mu0=float(params["mu0"]), rate=float(params["rate"]), t0=t0)
            return ContinuousDriven(mu_of_t=design, t0=t0)
        if name == "continuous-exp":
            design = ExponentialMu(mu0=float(params["mu0"]), gamma=float(params["gamma"]), t0=t0)
            return ContinuousDriven(mu_of_t=design, t0=t0)
        if name == "continuous-reciprocal":
            design = ReciprocalMu(mu0=float(params["mu0"]), power=float(params["p"]), t0=t0)
            return ContinuousDriven(mu_of_t=design, t0=t0)
    except KeyError as exc:
        raise ConfigError(f"schedule {name!r} is missing parameter {exc}") from exc
    raise ConfigError(f"unknown schedule name {name!r}")


def _fmt(value):
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return "%.17g" % value


TRAJECTORY_COLUMNS = "k,t,s,mu,f_tilde,f_true,grad_norm,lyapunov,bound,grad_evals"
FLOW_COLUMNS = "t,mu,f_true,lyapunov_v,bound_ct,grad_evals"
TIMELINE_COLUMNS = "k,t_actual,t_lower,t_upper,mu_actual,mu_lower,mu_upper"


def trajectory_csv(traj):
    """Fixed-column CSV of a discrete trajectory."""
    lines = [TRAJECTORY_COLUMNS]
    for r in traj.records:
        lines.append(
            ",".join(
                [
                    str(r.k),
                    _fmt(r.t),
                    _fmt(r.s),
                    _fmt(r.mu),
                    _fmt(r.f_tilde),
                    _fmt(r.f_true),
                    _fmt(r.grad_norm),
                    _fmt(r.lyapunov),
                    _fmt(r.bound),
                    str(r.grad_evals),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def flow_csv(samples, include_x=False):
    """Fixed-column CSV of adaptive-integrator samples."""
    header = FLOW_COLUMNS
    if include_x:
        dim = samples[0].x.shape[0]
        header = header + "," + ",".join(f"x{i}" for i in range(dim))
    lines = [header]
    for s in samples:
        row = [
            _fmt(s.t),
            _fmt(s.mu),
            _fmt(s.f_true),
            _fmt(s.lyapunov_v),
            _fmt(s.bound_ct),
            str(s.grad_evals),
        ]
        if include_x:
            row.extend(_fmt(v) for v in s.x)
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def timeline_csv(table):
    """CSV of a timeline bounds-vs-recursion table."""
    lines = [TIMELINE_COLUMNS]
    n = len(table["k"])
    for i in range(n):
        lines.append(
            ",".join(
                [str(int(table["k"][i]))]
                + [
                    _fmt(table[key][i])
                    for key in (
                        "t_actual",
                        "t_lower",
                        "t_upper",
                        "mu_actual",
                        "mu_lower",
                        "mu_upper",
                    )
                ]
            )
        )
    return "\n".join(lines) + "\n"


def series_csv(columns, rows):
    """Generic CSV with a fixed column list; floats at full precision."""
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(v) if not isinstance(v, str) else v for v in row))
    return "\n".join(lines) + "\n"


def json_envelope(config, series):
    """JSON envelope {config, version, series} as a deterministic string."""
    payload = {"config": config, "version": __version__, "series": series}
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"
