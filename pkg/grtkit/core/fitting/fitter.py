"""
Maximum-likelihood fitting of GRT models to confusion data.

The fitter minimizes the negative multinomial log-likelihood with the
Nelder-Mead simplex over the unconstrained coordinates of a
:class:`~grtkit.core.fitting.layout.ParameterLayout`. The first restart
starts from marginal z-score estimates (or a supplied model); the others add
seeded Gaussian jitter. Restarts run in parallel through joblib, and the best
one is chosen by the first maximum of the log-likelihood, so the result does
not depend on scheduling.

Example:
    >>> from grtkit.core.fitting.simulate import simulate
    >>> from grtkit.core.model import TwoByTwoModel
    >>> data = simulate(TwoByTwoModel.symmetric(1.0), 200, seed=3)
    >>> result = fit(data, "2x2", options=FitOptions(restarts=1, tolerance=1e-6, n_jobs=1))
    >>> result.log_likelihood <= 0.0, result.n_free_parameters
    (True, 12)
"""

from __future__ import annotations

import dataclasses
import logging
import math
import typing as typ

import numpy as np
from joblib import Parallel, delayed
from scipy.optimize import minimize
from scipy.special import ndtri

from grtkit.core.confusion import ConfusionMatrix
from grtkit.core.constraints import ConstraintScheme, LocationKind
from grtkit.core.fitting.layout import AnyModel, ParameterLayout
from grtkit.core.fitting.likelihood import AnyData, log_likelihood
from grtkit.core.identifiability import audit, default_scheme
from grtkit.core.model import ModelClass
from grtkit.core.utils import worker_count
from grtkit.exceptions import (
    DataShapeError,
    DomainError,
    GrtKitError,
    IdentifiabilityError,
    OptimizationError,
)

logger = logging.getLogger(__name__)

_MIN_CRITERION_GAP = 0.05


@dataclasses.dataclass(frozen=True)
class FitOptions:
    """
    Fitter settings.

    Attributes:
        restarts (int): Number of starts; the first is never jittered.
        max_iterations (int): Simplex iteration cap per restart.
        tolerance (float): Simplex size (and objective spread) at convergence.
        seed (int): Seed of the restart jitter.
        jitter (float): Standard deviation of the jitter in unconstrained coordinates.
        n_jobs (int | None): joblib workers; defaults to ``worker_count()``.
    """

    restarts: int = 20
    max_iterations: int = 20000
    tolerance: float = 1e-8
    seed: int = 0
    jitter: float = 0.3
    n_jobs: typ.Optional[int] = None

    def __post_init__(self):
        if self.restarts < 1:
            raise DomainError(f"restarts must be at least one, got {self.restarts}")
        if self.max_iterations < 1:
            raise DomainError(f"max_iterations must be at least one, got {self.max_iterations}")
        if not self.tolerance > 0.0:
            raise DomainError(f"tolerance must be positive, got {self.tolerance}")
        if self.jitter < 0.0:
            raise DomainError(f"jitter must be non-negative, got {self.jitter}")


@dataclasses.dataclass(frozen=True)
class FitResult:
    """
    Outcome of :func:`fit`.

    Attributes:
        model: The best fitted model.
        log_likelihood (float): Its log-likelihood.
        n_free_parameters (int): Free coordinates of the layout; AIC and BIC use this count.
        audited_parameters (int): Free parameters counted by the identifiability
            audit. It exceeds ``n_free_parameters`` for n x m identification,
            where the audit counts five (co)variance terms per distribution.
        aic (float): ``2 k - 2 lnL``.
        bic (float): ``k ln(T) - 2 lnL`` with T the total number of trials.
        converged (bool): Whether the best restart's simplex shrank below the tolerance.
        n_restarts_used (int): Restarts that reached a finite likelihood.
        gradient_norm_at_solution (float): Central-difference gradient norm in
            unconstrained coordinates.
        restart_log_likelihoods (tuple[float, ...]): Final log-likelihood of every restart.
    """

    model: AnyModel
    log_likelihood: float
    n_free_parameters: int
    audited_parameters: int
    aic: float
    bic: float
    converged: bool
    n_restarts_used: int
    gradient_norm_at_solution: float
    restart_log_likelihoods: tuple[float, ...] = ()

    def to_dict(self) -> dict[str, typ.Any]:
        """Scalar fields; the model is serialized separately."""
        return {
            "log_likelihood": self.log_likelihood,
            "n_free_parameters": self.n_free_parameters,
            "audited_parameters": self.audited_parameters,
            "aic": self.aic,
            "bic": self.bic,
            "converged": self.converged,
            "n_restarts_used": self.n_restarts_used,
            "gradient_norm_at_solution": self.gradient_norm_at_solution,
            "restart_log_likelihoods": list(self.restart_log_likelihoods),
        }


@dataclasses.dataclass(frozen=True)
class _Restart:
    log_likelihood: float
    theta: np.ndarray
    converged: bool
    iterations: int


def _matrices(data: AnyData) -> list[ConfusionMatrix]:
    return [data] if isinstance(data, ConfusionMatrix) else list(data)


def _square_levels(size: int, what: str) -> tuple[int, int]:
    root = math.isqrt(size)
    if root * root != size:
        raise DataShapeError(
            f"cannot infer response levels from {size} {what}; pass levels=(n, m)"
        )
    return root, root


def resolve_levels(
    data: AnyData, model_class: ModelClass, levels: typ.Optional[tuple[int, int]] = None
) -> tuple[tuple[int, int], int]:
    """
    Check the data against a model class and work out its levels.

    Returns:
        tuple: ``((n, m), n_subjects)``.

    Raises:
        DataShapeError: If the data cannot come from the class.
    """
    matrices = _matrices(data)
    if not matrices:
        raise DataShapeError("no confusion matrices given")
    if model_class is ModelClass.GrtWind:
        for k, matrix in enumerate(matrices):
            if matrix.shape != (4, 4):
                raise DataShapeError(f"subject {k + 1}: GRTwIND data must be 4x4, got {matrix.shape}")
        return (2, 2), len(matrices)
    if len(matrices) != 1:
        raise DataShapeError(f"{model_class.value} fits take one confusion matrix, got {len(matrices)}")
    s, r = matrices[0].shape
    if model_class is ModelClass.TwoByTwo:
        if (s, r) != (4, 4):
            raise DataShapeError(f"2x2 data must be 4x4, got {s}x{r}")
        return (2, 2), 1
    if model_class is ModelClass.ConcurrentRatings:
        if s != 4:
            raise DataShapeError(f"concurrent ratings data has four stimuli, got {s}")
        n, m = levels if levels is not None else _square_levels(r, "responses")
    else:
        if s != r:
            raise DataShapeError(f"n x m identification data must be square, got {s}x{r}")
        n, m = levels if levels is not None else _square_levels(r, "responses")
    if n * m != r:
        raise DataShapeError(f"levels {n}x{m} do not match {r} responses")
    return (int(n), int(m)), 1


def _cumulative_z(counts: np.ndarray, levels: int, axis: int, m: int) -> np.ndarray:
    """z-scores of P(response level <= l) on one dimension, one row per stimulus."""
    n_stim, n_resp = counts.shape
    grid = counts.reshape(n_stim, n_resp // m, m)
    marginal = grid.sum(axis=2) if axis == 0 else grid.sum(axis=1)
    totals = marginal.sum(axis=1, keepdims=True)
    cumulative = np.cumsum(marginal, axis=1)[:, : levels - 1] / totals
    floor = 0.5 / totals
    return ndtri(np.clip(cumulative, floor, 1.0 - floor))


def _criteria_and_means(z: np.ndarray, anchor: int, sd: float) -> tuple[np.ndarray, np.ndarray]:
    criteria = sd * z[anchor]
    for i in range(1, len(criteria)):
        criteria[i] = max(criteria[i], criteria[i - 1] + _MIN_CRITERION_GAP)
    means = np.mean(criteria[None, :] - sd * z, axis=1)
    return criteria, means


def initial_values(layout: ParameterLayout, data: AnyData) -> dict[str, float]:
    """
    Starting values from marginal z-scores of the observed response rates.

    Criteria come from the anchor stimulus, whose mean is taken as zero;
    each other mean is the average of ``c_l - sd * z_s(l)`` over criteria.
    Variances start at one, correlations and slopes at zero, kappa at one
    and lambda at one half.
    """
    matrices = _matrices(data)
    pooled = np.sum([matrix.counts for matrix in matrices], axis=0)
    n, m = layout.response_levels
    is_grtwind = layout.model_class is ModelClass.GrtWind
    # kappa = 1, lambda = 1/2 double every group variance
    sd = math.sqrt(2.0) if is_grtwind else 1.0
    location = layout.scheme.location_fix
    anchor = location.stimulus if location.kind is LocationKind.MeanAtOrigin else 0

    cx, mu_x = _criteria_and_means(_cumulative_z(pooled, n, 0, m), anchor, sd)
    cy, mu_y = _criteria_and_means(_cumulative_z(pooled, m, 1, m), anchor, sd)

    if is_grtwind:
        cx = np.array(
            [np.mean(mu_x + sd * _cumulative_z(matrix.counts, 2, 0, 2)[:, 0]) for matrix in matrices]
        )
        cy = np.array(
            [np.mean(mu_y + sd * _cumulative_z(matrix.counts, 2, 1, 2)[:, 0]) for matrix in matrices]
        )
    if location.kind is LocationKind.BoundIntersectionAtOrigin:
        mu_x, cx = mu_x - cx[0], cx - cx[0]
        mu_y, cy = mu_y - cy[0], cy - cy[0]

    values: dict[str, float] = {}
    for stim in range(len(mu_x)):
        values[f"mu_x[{stim}]"] = float(mu_x[stim])
        values[f"mu_y[{stim}]"] = float(mu_y[stim])
        values[f"var_x[{stim}]"] = 1.0
        values[f"var_y[{stim}]"] = 1.0
        values[f"rho[{stim}]"] = 0.0
    if is_grtwind:
        for k in range(layout.n_subjects):
            values[f"kappa[{k}]"] = 1.0
            values[f"lambda[{k}]"] = 0.5
            values[f"cx[{k}]"] = float(cx[k])
            values[f"cy[{k}]"] = float(cy[k])
            values[f"slope_x[{k}]"] = 0.0
            values[f"slope_y[{k}]"] = 0.0
        return values
    for prefix, criteria in (("cx", cx), ("cy", cy)):
        values[f"{prefix}[0]"] = float(criteria[0])
        for i in range(1, len(criteria)):
            values[f"{prefix}_gap[{i}]"] = float(criteria[i] - criteria[i - 1])
    values["slope_x"] = 0.0
    values["slope_y"] = 0.0
    return values


def _log_likelihood_at(layout: ParameterLayout, data: AnyData, theta: np.ndarray) -> float:
    try:
        value = log_likelihood(layout.build(theta), data)
    except (GrtKitError, OverflowError, ValueError, FloatingPointError):
        return -math.inf
    return value if math.isfinite(value) else -math.inf


def _simplex_diameter(simplex: np.ndarray) -> float:
    """Largest coordinate distance of any vertex from the best one."""
    return float(np.max(np.abs(simplex[1:] - simplex[0]))) if len(simplex) > 1 else 0.0


def _run_restart(
    layout: ParameterLayout, data: AnyData, theta: np.ndarray, options: FitOptions, index: int
) -> _Restart:
    start = _log_likelihood_at(layout, data, theta)
    if not math.isfinite(start):
        logger.debug("restart %d: non-finite likelihood at the start", index)
        return _Restart(-math.inf, theta, False, 0)

    def objective(z: np.ndarray) -> float:
        return -_log_likelihood_at(layout, data, z)

    result = minimize(
        objective,
        theta,
        method="Nelder-Mead",
        options={
            "maxiter": options.max_iterations,
            "xatol": options.tolerance,
            "fatol": options.tolerance,
            "adaptive": True,
        },
    )
    converged = _simplex_diameter(result.final_simplex[0]) < options.tolerance
    value = -float(result.fun)
    logger.debug(
        "restart %d: log-likelihood %.10g after %d iterations (converged=%s)",
        index,
        value,
        result.nit,
        converged,
    )
    return _Restart(value, np.asarray(result.x, dtype=float), converged, int(result.nit))


def gradient_norm(layout: ParameterLayout, data: AnyData, theta: np.ndarray) -> float:
    """Norm of the central-difference gradient of the log-likelihood."""
    grad = np.empty_like(theta)
    for i in range(len(theta)):
        step = 1e-5 * max(1.0, abs(theta[i]))
        up = theta.copy()
        down = theta.copy()
        up[i] += step
        down[i] -= step
        grad[i] = (
            _log_likelihood_at(layout, data, up) - _log_likelihood_at(layout, data, down)
        ) / (2.0 * step)
    return float(np.linalg.norm(grad))


def restart_starts(theta0: np.ndarray, options: FitOptions) -> list[np.ndarray]:
    """
    Starting vectors of every restart.

    The first is ``theta0`` itself; restart r > 0 adds jitter drawn from the
    r-th child of ``SeedSequence(options.seed)``, so more restarts extend the
    same sequence of starts.
    """
    children = np.random.SeedSequence(options.seed).spawn(options.restarts)
    starts = [np.array(theta0, dtype=float)]
    for child in children[1:]:
        rng = np.random.default_rng(child)
        starts.append(theta0 + rng.normal(0.0, options.jitter, size=theta0.shape))
    return starts


def fit(
    data: AnyData,
    model_class: ModelClass | str,
    scheme: typ.Optional[ConstraintScheme] = None,
    options: typ.Optional[FitOptions] = None,
    levels: typ.Optional[tuple[int, int]] = None,
    initial_model: typ.Optional[AnyModel] = None,
) -> FitResult:
    """
    Fit a model class to confusion data by maximum likelihood.

    Args:
        data: One confusion matrix, or one per subject for GRTwIND.
        model_class (ModelClass | str): Class to fit.
        scheme (ConstraintScheme | None): Constraints; defaults to
            :func:`~grtkit.core.identifiability.default_scheme`.
        options (FitOptions | None): Fitter settings.
        levels (tuple[int, int] | None): Response levels (n, m) for
            multi-bound classes, inferred from square data when omitted.
        initial_model: Optional warm start replacing the z-score start.

    Returns:
        FitResult: The best restart.

    Raises:
        IdentifiabilityError: If the audit of the class and scheme fails.
        DataShapeError: If the data does not fit the class.
        OptimizationError: If no restart reaches a finite likelihood.
    """
    model_class = ModelClass(model_class)
    scheme = scheme or default_scheme(model_class)
    options = options or FitOptions()
    response_levels, n_subjects = resolve_levels(data, model_class, levels)

    dimensions = n_subjects if model_class is ModelClass.GrtWind else response_levels
    report = audit(model_class, dimensions, scheme)
    if not report.identifiable_under_scheme:
        raise IdentifiabilityError(
            f"{model_class.value} model is not identifiable under this scheme: {report.notes}",
            report,
        )

    layout = ParameterLayout.for_class(model_class, scheme, response_levels, n_subjects)
    if initial_model is not None:
        theta0 = layout.encode(initial_model)
    else:
        theta0 = layout.encode_values(initial_values(layout, data))
    starts = restart_starts(theta0, options)

    outcomes = Parallel(n_jobs=options.n_jobs or worker_count())(
        delayed(_run_restart)(layout, data, start, options, index)
        for index, start in enumerate(starts)
    )
    values = np.array([outcome.log_likelihood for outcome in outcomes])
    finite = np.isfinite(values)
    if not np.any(finite):
        logger.warning("every restart of the %s fit gave a non-finite likelihood", model_class.value)
        raise OptimizationError(
            f"all {options.restarts} restarts gave a non-finite likelihood"
        )
    best_index = int(np.argmax(np.where(finite, values, -np.inf)))
    best = outcomes[best_index]
    if not best.converged:
        logger.warning(
            "best restart %d did not converge within %d iterations",
            best_index,
            options.max_iterations,
        )

    k = layout.n_free
    total_trials = sum(matrix.total_trials for matrix in _matrices(data))
    ll = best.log_likelihood
    logger.info(
        "%s fit: log-likelihood %.10g from restart %d of %d (%d free parameters)",
        model_class.value,
        ll,
        best_index,
        options.restarts,
        k,
    )
    return FitResult(
        model=layout.build(best.theta),
        log_likelihood=ll,
        n_free_parameters=k,
        audited_parameters=report.free_parameters,
        aic=2.0 * k - 2.0 * ll,
        bic=k * math.log(total_trials) - 2.0 * ll,
        converged=best.converged,
        n_restarts_used=int(np.sum(finite)),
        gradient_norm_at_solution=gradient_norm(layout, data, best.theta),
        restart_log_likelihoods=tuple(float(v) for v in values),
    )
