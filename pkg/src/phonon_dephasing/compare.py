"""Closed-form rate against the radial quadrature oracle on a parameter grid."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .oracle import QuadratureConfig, QuadratureError, gamma_oracle_radial
from .output import fmt
from .rates import RateParams, gamma

DEFAULT_ETAS = (0.05, 0.08, 0.1)
DEFAULT_SIGMAS = (0.0, 0.1, 0.5, 1.0)
DEFAULT_POINTS = 300
DEFAULT_T_MAX = 3.0
DEFAULT_TOLERANCE = 1e-6

COLUMNS = (
    "eta",
    "sigma",
    "t_over_tau_d",
    "closed_form",
    "oracle",
    "oracle_error",
    "relative_deviation",
    "status",
)


@dataclass(frozen=True)
class CompareRow:
    eta: float
    sigma: float
    x: float
    closed_form: float
    oracle: float
    oracle_error: float
    deviation: float
    converged: bool = True


@dataclass
class CompareReport:
    """Per-point comparison; deviations are relative to the curve's peak ``|oracle|``."""

    grid: dict
    tolerance: float
    rows: list = field(default_factory=list)

    @property
    def max_deviation(self):
        devs = [r.deviation for r in self.rows if r.converged]
        return max(devs) if devs else float("nan")

    @property
    def nonconverged(self):
        return sum(not r.converged for r in self.rows)

    @property
    def passed(self):
        return bool(self.rows) and not self.nonconverged and self.max_deviation <= self.tolerance

    def to_csv(self):
        head = dict(self.grid)
        head.update(
            tolerance=fmt(self.tolerance),
            max_deviation=fmt(self.max_deviation),
            nonconverged=self.nonconverged,
            result="pass" if self.passed else "fail",
        )
        lines = [f"# {k}={v}" for k, v in head.items()]
        lines.append(",".join(COLUMNS))
        for r in self.rows:
            nums = (r.eta, r.sigma, r.x, r.closed_form, r.oracle, r.oracle_error, r.deviation)
            lines.append(",".join([fmt(v) for v in nums] + ["ok" if r.converged else "nonconverged"]))
        return "\n".join(lines) + "\n"


def run_compare(
    etas=DEFAULT_ETAS,
    sigmas=DEFAULT_SIGMAS,
    points=DEFAULT_POINTS,
    t_max=DEFAULT_T_MAX,
    tolerance=DEFAULT_TOLERANCE,
    quad: QuadratureConfig | None = None,
):
    """Evaluate both routes on ``etas x sigmas x linspace(0, t_max, points)``.

    Raises
    ------
    ValueError
        For an empty grid or a non-positive tolerance.
    """
    etas, sigmas = list(etas), list(sigmas)
    if not etas or not sigmas or points < 1:
        raise ValueError("comparison grid is empty")
    if not tolerance > 0:
        raise ValueError("tolerance must be positive")
    quad = quad or QuadratureConfig()
    x = np.linspace(0.0, t_max, points)
    grid = {
        "etas": " ".join(f"{e:g}" for e in etas),
        "sigmas": " ".join(f"{s:g}" for s in sigmas),
        "points": points,
        "t_max_over_tau_d": fmt(t_max),
        "quadrature.rel_tol": fmt(quad.rel_tol),
    }
    report = CompareReport(grid, tolerance)
    for eta in etas:
        for sigma in sigmas:
            p = RateParams.from_shape(eta, sigma)
            closed = np.asarray(gamma(x, p), dtype=float)
            oracle, error, ok = np.full(points, np.nan), np.full(points, np.nan), np.ones(points, bool)
            for i, xi in enumerate(x):
                try:
                    res = gamma_oracle_radial(float(xi), p, quad)
                except QuadratureError as exc:
                    ok[i] = False
                    if exc.value is not None:
                        scale = p.Gamma_T / np.pi
                        oracle[i], error[i] = scale * exc.value, scale * exc.error
                    continue
                oracle[i], error[i] = res.value, res.error
            peak = np.nanmax(np.abs(oracle[ok])) if ok.any() else np.nan
            dev = np.abs(closed - oracle) / peak if peak > 0 else np.abs(closed - oracle)
            report.rows.extend(
                CompareRow(eta, sigma, float(x[i]), float(closed[i]), float(oracle[i]), float(error[i]),
                           float(dev[i]), bool(ok[i]))
                for i in range(points)
            )
    return report
