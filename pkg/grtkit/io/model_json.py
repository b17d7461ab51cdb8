"""
JSON formats for models, transforms and reports.

A model document looks like

.. code:: json

    {
      "schema_version": 1,
      "class": "2x2",
      "distributions": [[{"mean": [0.0, 0.0], "covariance": [1.0, 0.0, 1.0]}, ...], ...],
      "bounds_x": [{"intercept": 0.0, "slope": 0.0}],
      "bounds_y": [{"intercept": 0.0, "slope": 0.0}],
      "constraints": {"location_fix": {...}, "scale_fix": {...}, "orthogonality_fix": "AssumeDS"}
    }

Multi-bound documents use ``"class": "multibound"`` with a ``"kind"`` of
``ConcurrentRatings`` or ``NxMIdentification``. GRTwIND documents keep the
group distributions under ``"distributions"`` and list
``{"kappa", "lambda", "bound_x", "bound_y"}`` per subject under ``"subjects"``.
Floats are written with ``repr`` precision, so parsing a written document
gives back the same values exactly.

Example:
    >>> from grtkit.core.model import TwoByTwoModel
    >>> model = TwoByTwoModel.symmetric(1.0)
    >>> loads_model(dumps_model(model)) == model
    True
"""

from __future__ import annotations

import json
import pathlib
import typing as typ

from grtkit.core.bounds import BoundOrientation, LinearBound
from grtkit.core.constraints import ConstraintScheme
from grtkit.core.distribution import PerceptualDistribution
from grtkit.core.grtwind import GrtWindModel, SubjectParams
from grtkit.core.model import MultiBoundKind, MultiBoundModel, TwoByTwoModel
from grtkit.exceptions import GrtKitError, SchemaError

SCHEMA_VERSION = 1

AnyModel = typ.Union[TwoByTwoModel, MultiBoundModel, GrtWindModel]


def distribution_to_dict(dist: PerceptualDistribution) -> dict[str, typ.Any]:
    return {"mean": list(dist.mean), "covariance": list(dist.covariance)}


def distribution_from_dict(data: dict[str, typ.Any]) -> PerceptualDistribution:
    return PerceptualDistribution(tuple(data["mean"]), tuple(data["covariance"]))


def bound_to_dict(bound: LinearBound) -> dict[str, float]:
    return {"intercept": bound.intercept, "slope": bound.slope}


def bound_from_dict(data: dict[str, typ.Any], orientation: BoundOrientation) -> LinearBound:
    return LinearBound(orientation, float(data["intercept"]), float(data.get("slope", 0.0)))


def _grid_to_list(grid) -> list[list[dict[str, typ.Any]]]:
    return [[distribution_to_dict(dist) for dist in row] for row in grid]


def _grid_from_list(rows) -> list[list[PerceptualDistribution]]:
    if not isinstance(rows, list) or not all(isinstance(row, list) for row in rows):
        raise SchemaError("'distributions' must be a list of rows")
    return [[distribution_from_dict(cell) for cell in row] for row in rows]


def model_to_dict(model: AnyModel) -> dict[str, typ.Any]:
    """Serialize any model class to a JSON-ready dictionary."""
    data: dict[str, typ.Any] = {"schema_version": SCHEMA_VERSION}
    if isinstance(model, GrtWindModel):
        data["class"] = "grtwind"
        data["distributions"] = _grid_to_list(model.group_distributions)
        data["subjects"] = [
            {
                "label": subject.label,
                "kappa": subject.kappa,
                "lambda": subject.lam,
                "bound_x": bound_to_dict(subject.bound_x),
                "bound_y": bound_to_dict(subject.bound_y),
            }
            for subject in model.subjects
        ]
    else:
        if isinstance(model, MultiBoundModel):
            data["class"] = "multibound"
            data["kind"] = model.kind.value
        else:
            data["class"] = "2x2"
        data["distributions"] = _grid_to_list(model.distributions)
        data["bounds_x"] = [bound_to_dict(bound) for bound in model.bounds_x]
        data["bounds_y"] = [bound_to_dict(bound) for bound in model.bounds_y]
    data["constraints"] = model.constraints.to_dict()
    return data


def model_from_dict(data: dict[str, typ.Any]) -> AnyModel:
    """
    Parse a model document.

    Raises:
        SchemaError: If the document is malformed.
        InvalidModelError: If it is well formed but describes an invalid model.
        DomainError: If a GRTwIND scaling parameter is out of range.
    """
    if not isinstance(data, dict):
        raise SchemaError(f"a model document must be a JSON object, got {type(data).__name__}")
    try:
        _check_version(data)
        grid = _grid_from_list(data["distributions"])
        constraints = ConstraintScheme.from_dict(data.get("constraints") or {})
        model_class = data["class"]
        if model_class == "grtwind":
            subjects = [
                SubjectParams(
                    float(subject["kappa"]),
                    float(subject["lambda"]),
                    bound_from_dict(subject["bound_x"], BoundOrientation.XBound),
                    bound_from_dict(subject["bound_y"], BoundOrientation.YBound),
                    str(subject.get("label", "")),
                )
                for subject in data["subjects"]
            ]
            return GrtWindModel(grid, tuple(subjects), constraints)
        bounds_x = [bound_from_dict(b, BoundOrientation.XBound) for b in data["bounds_x"]]
        bounds_y = [bound_from_dict(b, BoundOrientation.YBound) for b in data["bounds_y"]]
        if model_class == "2x2":
            if len(bounds_x) != 1 or len(bounds_y) != 1:
                raise SchemaError("a 2x2 model has exactly one bound per dimension")
            return TwoByTwoModel(grid, bounds_x[0], bounds_y[0], constraints)
        if model_class == "multibound":
            return MultiBoundModel(
                MultiBoundKind(data["kind"]), grid, tuple(bounds_x), tuple(bounds_y), constraints
            )
    except GrtKitError:
        raise
    except KeyError as e:
        raise SchemaError(f"model document is missing the field {e}") from e
    except (TypeError, ValueError, AttributeError) as e:
        raise SchemaError(f"malformed model document: {e}") from e
    raise SchemaError(f"unknown model class {data['class']!r}")


def _check_version(data: dict[str, typ.Any]) -> None:
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {version!r}, expected {SCHEMA_VERSION}")


def dumps(payload: dict[str, typ.Any]) -> str:
    """JSON text of a payload, stamped with the schema version."""
    return json.dumps({"schema_version": SCHEMA_VERSION, **payload}, indent=2) + "\n"


def loads(text: str) -> typ.Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"invalid JSON: {e}") from e


def dumps_model(model: AnyModel) -> str:
    return dumps(model_to_dict(model))


def loads_model(text: str) -> AnyModel:
    return model_from_dict(loads(text))


def read_model(path: str | pathlib.Path) -> AnyModel:
    """Read a model document from a file."""
    return loads_model(pathlib.Path(path).read_text())


def write_model(model: AnyModel, path: str | pathlib.Path) -> None:
    pathlib.Path(path).write_text(dumps_model(model))
