"""Rolling-window one-step-ahead forecasting and density-forecast scoring.

Three AR(1) forecasters share the loop: ordinary least squares with a
Gaussian plug-in predictive, a Bayesian AR with Gaussian errors, and the
Bayesian AR with SEPD errors.  Each rolling step fits on the trailing
window and scores the next observation with the predictive mean (RMSE),
the Rao-Blackwellized mixture log density (log score), and the Monte Carlo
CRPS in energy form.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from .distributions import Family, sepd_log_norm_const
from .mcmc import ArNormalModel, ArSepdModel, Chain, McmcConfig, run_mwg
from .priors import TailPrior, build_tail_prior
from .sampling import RngStream, sepd_transform

__all__ = [
    "ModelKind",
    "ForecastConfig",
    "ForecastRecord",
    "ComparisonRow",
    "rolling_forecast",
    "rmse",
    "log_score",
    "crps_mc",
    "comparison_table",
    "standardize_first_differences",
]

_HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)
_EXP_ARG_MAX = 709.0


class ModelKind(enum.Enum):
    OLS_AR = "ols-ar"
    BAYES_NORMAL_AR = "bayes-normal-ar"
    SEPD_AR = "sepd-ar"


@dataclass(frozen=True)
class ForecastConfig:
    """Settings for one rolling-forecast run.

    ``mcmc`` drives the Bayesian fits.  ``predictive_draws`` caps the
    number of posterior draws carried into each predictive sample (strided
    thinning); it is also the sample size of the OLS plug-in predictive.
    ``refit_every`` > 1 re-fits only every k-th step and carries the last
    posterior between refits (the predictive still uses the fresh y_t).
    """

    mcmc: McmcConfig = field(default_factory=McmcConfig)
    predictive_draws: int = 2000
    refit_every: int = 1

    def validate(self) -> None:
        self.mcmc.validate()
        if self.predictive_draws < 2:
            raise ValueError(f"predictive_draws must be >= 2, got {self.predictive_draws}")
        if self.refit_every < 1:
            raise ValueError(f"refit_every must be >= 1, got {self.refit_every}")


@dataclass(frozen=True)
class ForecastRecord:
    """One rolling step: the forecast made at origin t-1 for series index t."""

    t: int
    point_forecast: float
    predictive_draws: np.ndarray
    realized: float
    log_score: float
    crps: float

    def __post_init__(self) -> None:
        draws = np.asarray(self.predictive_draws, dtype=float)
        if draws.size == 0:
            raise ValueError("predictive_draws must be non-empty")
        draws.flags.writeable = False
        object.__setattr__(self, "predictive_draws", draws)
        if self.crps < 0.0:
            raise ValueError(f"crps must be nonnegative, got {self.crps}")


def rmse(forecasts, realized) -> float:
    """Root mean squared error of point forecasts."""
    f = np.asarray(forecasts, dtype=float)
    r = np.asarray(realized, dtype=float)
    if f.shape != r.shape or f.ndim != 1 or f.size == 0:
        raise ValueError(f"need matching non-empty vectors, got {f.shape} and {r.shape}")
    return float(np.sqrt(np.mean((f - r) ** 2)))


def log_score(component_log_densities) -> float:
    """Log of the equally-weighted mixture given per-component log densities.

    The components are the predictive density of each retained posterior
    draw evaluated at the realized value; the result is the
    Rao-Blackwellized log predictive score log(mean_m f(y | theta_m)).
    Underflow of every component gives the -inf sentinel rather than an
    error.
    """
    comp = np.asarray(component_log_densities, dtype=float)
    if comp.size == 0:
        raise ValueError("need at least one mixture component")
    return float(logsumexp(comp) - math.log(comp.size))


def crps_mc(predictive_draws, realized: float) -> float:
    """Monte Carlo CRPS in energy form: E|Y - y| - 0.5 E|Y - Y'|.

    Both expectations run over all ordered draw pairs (M^2 pairs including
    i = j), with E|Y - Y'| computed through the sorted-draws identity in
    O(M log M).  A degenerate all-equal draw set short-circuits to the
    exact point-mass value |y - c|.
    """
    draws = np.asarray(predictive_draws, dtype=float)
    if draws.ndim != 1 or draws.size < 2:
        raise ValueError("crps_mc needs at least two draws")
    y = float(realized)
    xs = np.sort(draws)
    if xs[0] == xs[-1]:
        return abs(y - xs[0])
    m = xs.size
    term1 = float(np.mean(np.abs(draws - y)))
    # sum_{i,j} |x_i - x_j| = 2 * sum_k (2k - m - 1) x_(k), k one-based
    coeffs = 2.0 * np.arange(1, m + 1) - m - 1.0
    pair_term = float(np.dot(coeffs, xs)) / (m * m)
    return max(0.0, term1 - pair_term)


def standardize_first_differences(series) -> np.ndarray:
    """First-difference, then center and scale to unit sample deviation."""
    arr = np.asarray(series, dtype=float)
    if arr.ndim != 1 or arr.size < 3:
        raise ValueError("need a one-dimensional series of length >= 3")
    if not np.all(np.isfinite(arr)):
        raise ValueError("series contains non-finite values")
    d = np.diff(arr)
    sd = float(np.std(d, ddof=1))
    if not sd > 0.0:
        raise ValueError("differenced series has zero variance")
    return (d - d.mean()) / sd


def _sepd_log_norm_vec(ps: np.ndarray) -> np.ndarray:
    cache = {}
    out = np.empty(ps.size)
    for i, p in enumerate(ps):
        val = cache.get(p)
        if val is None:
            val = sepd_log_norm_const(float(p))
            cache[p] = val
        out[i] = val
    return out


def _sepd_component_log_pdf(y, phis, alphas, ps, sigmas, y_last):
    """Per-posterior-draw SEPD predictive log density at y."""
    resid = y - phis * y_last
    scale = np.where(resid <= 0.0, 2.0 * alphas * sigmas, 2.0 * (1.0 - alphas) * sigmas)
    w = resid / scale
    with np.errstate(divide="ignore"):
        t = ps * np.log(np.abs(w)) - np.log(ps)
    power = np.exp(np.minimum(t, _EXP_ARG_MAX))
    return _sepd_log_norm_vec(ps) - np.log(sigmas) - power


def _thin(values: np.ndarray, m: int) -> np.ndarray:
    if values.size <= m:
        return values
    stride = values.size // m
    return values[::stride][:m]


class _SepdArForecaster:
    def __init__(self, config: ForecastConfig, tail_prior: TailPrior):
        self.config = config
        self.tail_prior = tail_prior
        self.chain: Optional[Chain] = None

    def refit(self, window: np.ndarray, stream: RngStream) -> None:
        model = ArSepdModel(window)
        self.chain = run_mwg(model, self.tail_prior, self.config.mcmc, stream)

    def predict(self, y_last: float, realized: float, stream: RngStream):
        m = self.config.predictive_draws
        phis = _thin(self.chain.draws["phi1"], m)
        alphas = _thin(self.chain.draws["alpha"], m)
        sigmas = _thin(self.chain.draws["sigma"], m)
        ps = _thin(self.chain.draws["p"], m).astype(float)
        u = stream.uniform(size=phis.size)
        w1 = stream.gamma(1.0 / ps)
        w2 = stream.gamma(1.0 / ps)
        eps = sepd_transform(u, w1, w2, alphas, ps)
        draws = phis * y_last + sigmas * eps
        comp = _sepd_component_log_pdf(realized, phis, alphas, ps, sigmas, y_last)
        # skewed errors have a nonzero mean, so the predictive mean is taken
        # from the draws rather than from phi alone
        return float(np.mean(draws)), draws, log_score(comp)


class _BayesNormalArForecaster:
    def __init__(self, config: ForecastConfig):
        self.config = config
        self.chain: Optional[Chain] = None

    def refit(self, window: np.ndarray, stream: RngStream) -> None:
        model = ArNormalModel(window)
        self.chain = run_mwg(model, None, self.config.mcmc, stream)

    def predict(self, y_last: float, realized: float, stream: RngStream):
        m = self.config.predictive_draws
        phis = _thin(self.chain.draws["phi1"], m)
        sigmas = _thin(self.chain.draws["sigma"], m)
        draws = phis * y_last + sigmas * stream.normal(size=phis.size)
        z = (realized - phis * y_last) / sigmas
        comp = -0.5 * z * z - np.log(sigmas) - _HALF_LOG_TWO_PI
        # Gaussian errors are mean-zero, so the predictive mean is exact
        return float(np.mean(phis) * y_last), draws, log_score(comp)


class _OlsArForecaster:
    def __init__(self, config: ForecastConfig):
        self.config = config
        self.phi = 0.0
        self.sigma = 0.0

    def refit(self, window: np.ndarray, stream: RngStream) -> None:
        x = window[:-1]
        y = window[1:]
        xtx = float(x @ x)
        if xtx == 0.0:
            raise ValueError("estimation window is identically zero; AR fit undefined")
        self.phi = float(x @ y) / xtx
        resid = y - self.phi * x
        dof = max(resid.size - 1, 1)
        self.sigma = math.sqrt(float(resid @ resid) / dof)

    def predict(self, y_last: float, realized: float, stream: RngStream):
        point = self.phi * y_last
        m = self.config.predictive_draws
        if self.sigma == 0.0:
            # perfect in-sample fit: the plug-in predictive is a point mass
            draws = np.full(m, point)
            score = math.inf if realized == point else -math.inf
            return point, draws, score
        draws = point + self.sigma * stream.normal(size=m)
        z = (realized - point) / self.sigma
        score = -0.5 * z * z - math.log(self.sigma) - _HALF_LOG_TWO_PI
        return point, draws, score


def _make_forecaster(kind: ModelKind, config: ForecastConfig, tail_prior: Optional[TailPrior]):
    if kind == ModelKind.SEPD_AR:
        if tail_prior is None:
            tail_prior = build_tail_prior(Family.SEPD, config.mcmc.p_max)
        return _SepdArForecaster(config, tail_prior)
    if kind == ModelKind.BAYES_NORMAL_AR:
        return _BayesNormalArForecaster(config)
    if kind == ModelKind.OLS_AR:
        return _OlsArForecaster(config)
    raise ValueError(f"unknown forecast model kind: {kind!r}")


def rolling_forecast(
    series,
    window: int,
    kind: ModelKind,
    config: ForecastConfig,
    stream: RngStream,
    tail_prior: Optional[TailPrior] = None,
) -> list:
    """One-step-ahead forecasts over every origin from index window-1 on.

    For each step the model is fit on the trailing ``window`` observations
    (series indices up to the origin only; the future is never touched) and
    scored on the next observation.  Returns len(series) - window records.
    Per-step randomness comes from substreams keyed by the origin index, so
    results do not depend on refit cadence bookkeeping.
    """
    config.validate()
    if window < 3:
        raise ValueError(f"window must be >= 3, got {window}")
    n_total = len(series)
    if n_total <= window:
        raise ValueError(f"series length {n_total} must exceed window {window}")
    forecaster = _make_forecaster(kind, config, tail_prior)
    records = []
    for step, origin in enumerate(range(window - 1, n_total - 1)):
        window_data = np.asarray(series[origin - window + 1 : origin + 1], dtype=float)
        if not np.all(np.isfinite(window_data)):
            raise ValueError(f"non-finite values in estimation window ending at {origin}")
        realized = float(series[origin + 1])
        step_stream = stream.substream(origin)
        if step % config.refit_every == 0:
            forecaster.refit(window_data, step_stream.substream(0))
        point, draws, score = forecaster.predict(
            float(window_data[-1]), realized, step_stream.substream(1)
        )
        records.append(
            ForecastRecord(
                t=origin + 1,
                point_forecast=point,
                predictive_draws=draws,
                realized=realized,
                log_score=score,
                crps=crps_mc(draws, realized),
            )
        )
    return records


@dataclass(frozen=True)
class ComparisonRow:
    """One model's metrics, raw and relative to the baseline."""

    model: str
    rmse: float
    avg_log_score: float
    avg_crps: float
    rmse_ratio: float
    log_score_diff: float
    crps_ratio: float


def comparison_table(records_by_model: dict, baseline: str) -> list:
    """Raw metrics per model plus ratios/differences against the baseline.

    RMSE and average CRPS are reported as model/baseline ratios (< 1 means
    the model is more accurate); the average log score as model - baseline
    (> 0 means the model outperforms).  All record lists must cover the
    same evaluation period with the same realized values.
    """
    if baseline not in records_by_model:
        raise ValueError(f"baseline {baseline!r} missing from records")
    reference = records_by_model[baseline]
    metrics = {}
    for name, records in records_by_model.items():
        if [r.t for r in records] != [r.t for r in reference] or any(
            r.realized != s.realized for r, s in zip(records, reference)
        ):
            raise ValueError(f"evaluation period of {name!r} differs from the baseline")
        points = [r.point_forecast for r in records]
        realized = [r.realized for r in records]
        metrics[name] = (
            rmse(points, realized),
            float(np.mean([r.log_score for r in records])),
            float(np.mean([r.crps for r in records])),
        )
    base_rmse, base_score, base_crps = metrics[baseline]
    rows = []
    for name, (m_rmse, m_score, m_crps) in metrics.items():
        rows.append(
            ComparisonRow(
                model=name,
                rmse=m_rmse,
                avg_log_score=m_score,
                avg_crps=m_crps,
                rmse_ratio=m_rmse / base_rmse,
                log_score_diff=m_score - base_score,
                crps_ratio=m_crps / base_crps,
            )
        )
    return rows
