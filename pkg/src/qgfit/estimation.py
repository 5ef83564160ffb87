"""Least-squares fitting of (q, beta) to exceedance curves and the scaling laws.

Two routes to the tail index are provided: a full least-squares fit of the
model CCDF in log space, and a direct log-log regression of the tail region
combined with the exact tail-exponent relation.  Power-law regressions of
the fitted parameters against the time scale extract the three scaling
exponents.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import minimize

from .qgaussian import QGaussianParams, ccdf_abs, tail_to_q
from .returns import EmpiricalCCDF

__all__ = [
    "InsufficientTailPointsError",
    "ScaleFitResult",
    "PowerLawFit",
    "ScalingReport",
    "Q_BOUNDS",
    "BETA_BOUNDS",
    "fit_qgaussian_ccdf",
    "estimate_tail_exponent",
    "fit_power_law",
    "scaling_report",
    "scale_fits_to_csv",
    "scale_fits_to_json",
    "load_scale_fits",
]

# Search box of the least-squares fit.
Q_BOUNDS = (1.01, 2.99)
BETA_BOUNDS = (1e-4, 1e4)

# Fraction of grid points (largest thresholds) used by the tail regression.
DEFAULT_TAIL_FRACTION = 0.3

_MIN_FIT_POINTS = 8
_MIN_TAIL_POINTS = 5
_LOG_FLOOR = 1e-300


class InsufficientTailPointsError(ValueError):
    """Raised when the tail region holds too few points for a regression."""


@dataclass(frozen=True)
class ScaleFitResult:
    """Fitted (q, beta) for one time scale, with fit diagnostics."""

    dt: int
    q: float
    beta: float
    residual: float
    n_points: int
    converged: bool

    def __post_init__(self):
        if not math.isfinite(self.residual):
            raise ValueError("fit residual must be finite")
        if not Q_BOUNDS[0] <= self.q <= Q_BOUNDS[1]:
            raise ValueError(f"fitted q={self.q} escaped the search box")
        if not BETA_BOUNDS[0] <= self.beta <= BETA_BOUNDS[1]:
            raise ValueError(f"fitted beta={self.beta} escaped the search box")


@dataclass(frozen=True)
class PowerLawFit:
    """Log-log regression result y = amplitude * x^exponent."""

    exponent: float
    amplitude: float
    exponent_stderr: float
    r_squared: float

    def __post_init__(self):
        if self.amplitude <= 0.0:
            raise ValueError("amplitude must be positive")
        if self.exponent_stderr < 0.0:
            raise ValueError("standard error cannot be negative")


@dataclass(frozen=True)
class ScalingReport:
    """The three scaling regressions across time scales."""

    tau_fit: PowerLawFit  # q - 1 against dt
    gamma_fit: PowerLawFit  # 1/beta against dt
    delta_fit: PowerLawFit  # 1/beta against q - 1


def _expit(u: float) -> float:
    if u >= 0.0:
        return 1.0 / (1.0 + math.exp(-u))
    e = math.exp(u)
    return e / (1.0 + e)


def _logit(p: float) -> float:
    return math.log(p / (1.0 - p))


def _to_unbounded(q: float, beta: float) -> np.ndarray:
    qlo, qhi = Q_BOUNDS
    blo, bhi = BETA_BOUNDS
    uq = _logit((q - qlo) / (qhi - qlo))
    ub = _logit((math.log10(beta) - math.log10(blo)) / (math.log10(bhi) - math.log10(blo)))
    return np.array([uq, ub])


def _from_unbounded(u: np.ndarray) -> tuple[float, float]:
    qlo, qhi = Q_BOUNDS
    blo, bhi = BETA_BOUNDS
    q = qlo + (qhi - qlo) * _expit(float(u[0]))
    log_beta = math.log10(blo) + (math.log10(bhi) - math.log10(blo)) * _expit(float(u[1]))
    return q, 10.0 ** log_beta


def fit_qgaussian_ccdf(
    ccdf: EmpiricalCCDF, init: tuple[float, float] | None = None
) -> ScaleFitResult:
    """Least-squares fit of the model CCDF to an empirical exceedance curve.

    Minimizes the sum of squared log10 residuals over the threshold grid
    with a Nelder-Mead simplex in transformed coordinates (the logit map
    keeps q and beta inside their boxes).  The search restarts once from a
    perturbed optimum; the converged flag reports the winning run's status.
    Non-convergence is reported through the flag, not raised.
    """
    if len(ccdf) < _MIN_FIT_POINTS:
        raise ValueError(f"need at least {_MIN_FIT_POINTS} CCDF points, got {len(ccdf)}")
    if np.any(ccdf.probabilities <= 0.0):
        raise ValueError("all CCDF probabilities must be positive")

    xs = ccdf.thresholds
    target = np.log10(ccdf.probabilities)

    def objective(u: np.ndarray) -> float:
        q, beta = _from_unbounded(u)
        params = QGaussianParams(q, beta)
        total = 0.0
        for x, t in zip(xs, target):
            model = max(ccdf_abs(params, float(x)), _LOG_FLOOR)
            diff = math.log10(model) - t
            total += diff * diff
        return total

    if init is None:
        q0 = _default_q_init(ccdf)
        beta0 = 1.0
    else:
        q0 = min(max(init[0], Q_BOUNDS[0] + 1e-6), Q_BOUNDS[1] - 1e-6)
        beta0 = min(max(init[1], BETA_BOUNDS[0] * 1.001), BETA_BOUNDS[1] * 0.999)

    options = {"xatol": 1e-9, "fatol": 1e-10, "maxiter": 4000, "maxfev": 6000}
    first = minimize(objective, _to_unbounded(q0, beta0), method="Nelder-Mead", options=options)
    second = minimize(objective, first.x + 0.05, method="Nelder-Mead", options=options)
    best = second if second.fun < first.fun else first

    q_fit, beta_fit = _from_unbounded(best.x)
    return ScaleFitResult(
        dt=ccdf.dt,
        q=q_fit,
        beta=beta_fit,
        residual=float(best.fun),
        n_points=len(ccdf),
        converged=bool(best.success),
    )


def _default_q_init(ccdf: EmpiricalCCDF) -> float:
    """Tail-slope starting point for q, clipped into the search box."""
    try:
        alpha = estimate_tail_exponent(ccdf, DEFAULT_TAIL_FRACTION)
        return min(max(tail_to_q(alpha), 1.05), 2.9)
    except ValueError:
        return 1.5


def estimate_tail_exponent(ccdf: EmpiricalCCDF, tail_fraction: float = DEFAULT_TAIL_FRACTION):
    """Tail exponent from an OLS slope of ln P against ln x over the tail.

    The tail region is the largest `tail_fraction` of grid thresholds; via
    the exact exponent relation this yields a q estimate independent of the
    least-squares fit.
    """
    from .qgaussian import TailExponent

    if not 0.0 < tail_fraction < 1.0:
        raise ValueError(f"tail_fraction must lie in (0, 1), got {tail_fraction}")
    k = math.ceil(tail_fraction * len(ccdf))
    if k < _MIN_TAIL_POINTS:
        raise InsufficientTailPointsError(
            f"tail region holds {k} points, need at least {_MIN_TAIL_POINTS}"
        )
    log_x = np.log(ccdf.thresholds[-k:])
    log_p = np.log(ccdf.probabilities[-k:])
    slope, _, _, _ = _ols(log_x, log_p)
    return TailExponent(-slope)


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float, float]:
    """Slope, intercept, slope standard error, and R^2 of a least-squares line."""
    n = len(x)
    xm, ym = float(np.mean(x)), float(np.mean(y))
    sxx = float(np.sum((x - xm) ** 2))
    if sxx == 0.0:
        raise ValueError("x values are all identical; slope undefined")
    slope = float(np.sum((x - xm) * (y - ym))) / sxx
    intercept = ym - slope * xm
    residuals = y - (intercept + slope * x)
    ssr = float(np.sum(residuals**2))
    sst = float(np.sum((y - ym) ** 2))
    stderr = math.sqrt(ssr / (n - 2) / sxx) if n > 2 else 0.0
    r_squared = 1.0 - ssr / sst if sst > 0.0 else 1.0
    return slope, intercept, stderr, r_squared


def fit_power_law(xs, ys) -> PowerLawFit:
    """Fit y = amplitude * x^exponent by ordinary least squares in log space.

    The exponent is reported signed, exactly as fitted; callers comparing
    against quoted decay rates should compare magnitudes.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(xs) != len(ys):
        raise ValueError("x and y must have equal length")
    if len(xs) < 3:
        raise ValueError(f"need at least 3 points, got {len(xs)}")
    if np.any(xs <= 0.0) or np.any(ys <= 0.0):
        raise ValueError("power-law regression requires positive data")
    slope, intercept, stderr, r2 = _ols(np.log(xs), np.log(ys))
    return PowerLawFit(
        exponent=slope,
        amplitude=math.exp(intercept),
        exponent_stderr=stderr,
        r_squared=min(max(r2, 0.0), 1.0),
    )


def scaling_report(fits: list[ScaleFitResult]) -> ScalingReport:
    """Regress the fitted parameters against the time scale.

    tau: q - 1 against dt; gamma: 1/beta against dt; delta: 1/beta against
    q - 1.  Needs at least three distinct time scales.
    """
    if len({f.dt for f in fits}) < 3:
        raise ValueError("need fits at 3 or more distinct time scales")
    dts = np.array([f.dt for f in fits], dtype=float)
    q_excess = np.array([f.q - 1.0 for f in fits])
    inv_beta = np.array([1.0 / f.beta for f in fits])
    return ScalingReport(
        tau_fit=fit_power_law(dts, q_excess),
        gamma_fit=fit_power_law(dts, inv_beta),
        delta_fit=fit_power_law(q_excess, inv_beta),
    )


def scale_fits_to_csv(fits: list[ScaleFitResult], path: str | Path) -> None:
    """Write the per-scale results as the three-column dt,q,beta table."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["dt", "q", "beta"])
        for f in fits:
            writer.writerow([f.dt, f"{f.q:.10g}", f"{f.beta:.10g}"])


def scale_fits_to_json(fits: list[ScaleFitResult], path: str | Path) -> None:
    """Write the per-scale results with full diagnostics as JSON."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([asdict(f) for f in fits], fh, indent=2)
        fh.write("\n")


def load_scale_fits(path: str | Path) -> list[ScaleFitResult]:
    """Read fit results from a JSON file or a dt,q,beta CSV table."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        rows = json.loads(path.read_text(encoding="utf-8"))
        return [
            ScaleFitResult(
                dt=int(r["dt"]),
                q=float(r["q"]),
                beta=float(r["beta"]),
                residual=float(r.get("residual", 0.0)),
                n_points=int(r.get("n_points", 0)),
                converged=bool(r.get("converged", True)),
            )
            for r in rows
        ]
    fits = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"dt", "q", "beta"} <= set(reader.fieldnames):
            raise ValueError(f"{path}: expected columns dt,q,beta, got {reader.fieldnames}")
        for row in reader:
            fits.append(
                ScaleFitResult(
                    dt=int(row["dt"]),
                    q=float(row["q"]),
                    beta=float(row["beta"]),
                    residual=0.0,
                    n_points=0,
                    converged=True,
                )
            )
    return fits
