"""
Predicates for perceptual independence (PI), perceptual separability (PS)
and decisional separability (DS).

All three are pure functions of a model value. PI and PS compare normalized
quantities against PREDICATE_TOL so that fitted (floating point) parameters
are judged sensibly; DS is an exact test on the stored slopes.

Example:
    >>> from grtkit.core.model import TwoByTwoModel
    >>> model = TwoByTwoModel.symmetric(separation=1.0)
    >>> check_pi(model)
    ((True, True), (True, True))
    >>> check_ps(model, Dimension.X), check_ds(model)[Dimension.Y]
    (True, True)
"""

from __future__ import annotations

import math
import typing as typ

from grtkit.core.distribution import Dimension, PerceptualDistribution
from grtkit.core.utils import PREDICATE_TOL, is_close_zero

if typ.TYPE_CHECKING:
    from grtkit.core.grtwind import GrtWindModel
    from grtkit.core.model import SingleSubjectModel

    AnyModel = typ.Union[SingleSubjectModel, GrtWindModel]


def _grid(model: "AnyModel") -> tuple[tuple[PerceptualDistribution, ...], ...]:
    if hasattr(model, "group_distributions"):
        return model.group_distributions
    return model.distributions


def check_pi(model: "AnyModel") -> tuple[tuple[bool, ...], ...]:
    """
    Perceptual independence per distribution.

    Args:
        model: A 2x2, multi-bound or GRTwIND model (group distributions).

    Returns:
        tuple[tuple[bool, ...], ...]: Grid of booleans, True where |rho| <= PREDICATE_TOL.
    """
    return tuple(
        tuple(is_close_zero(dist.correlation, PREDICATE_TOL) for dist in row)
        for row in _grid(model)
    )


def _same_marginal(
    first: PerceptualDistribution, second: PerceptualDistribution, dimension: Dimension
) -> bool:
    mean_a, var_a = first.marginal(dimension)
    mean_b, var_b = second.marginal(dimension)
    pooled_sd = math.sqrt(0.5 * (var_a + var_b))
    if not is_close_zero((mean_a - mean_b) / pooled_sd, PREDICATE_TOL):
        return False
    return is_close_zero((var_a - var_b) / (0.5 * (var_a + var_b)), PREDICATE_TOL)


def check_ps(model: "AnyModel", dimension: Dimension) -> bool:
    """
    Perceptual separability of one dimension.

    PS holds on x when, at every level A_i, the marginal x distribution is the
    same at every level of B (and symmetrically for y).

    Args:
        model: A 2x2, multi-bound or GRTwIND model (group distributions).
        dimension (Dimension): The dimension whose marginals are compared.

    Returns:
        bool: True iff all marginal means and variances agree within tolerance.
    """
    grid = _grid(model)
    if dimension is Dimension.X:
        groups = [list(row) for row in grid]
    else:
        groups = [[row[j] for row in grid] for j in range(len(grid[0]))]
    return all(
        _same_marginal(group[0], other, dimension) for group in groups for other in group[1:]
    )


def check_ds(model: "AnyModel") -> dict[Dimension, bool]:
    """
    Decisional separability per dimension.

    DS holds on a dimension iff every bound on it has slope exactly 0.0. For a
    GRTwIND model every subject's bounds are inspected.

    Returns:
        dict[Dimension, bool]: DS verdict for X and Y.
    """
    if hasattr(model, "subjects"):
        bounds_x = [subject.bound_x for subject in model.subjects]
        bounds_y = [subject.bound_y for subject in model.subjects]
    else:
        bounds_x = list(model.bounds_x)
        bounds_y = list(model.bounds_y)
    return {
        Dimension.X: all(bound.is_axis_aligned for bound in bounds_x),
        Dimension.Y: all(bound.is_axis_aligned for bound in bounds_y),
    }


def has_ds(model: "AnyModel") -> bool:
    """True iff DS holds on both dimensions."""
    return all(check_ds(model).values())
