"""
The ``grtkit`` command.

Exit status is 0 on success, 1 when the library rejects the request (invalid
model, failed precondition, unidentifiable scheme, ...) and 2 when an input
cannot be read or parsed.
"""

from __future__ import annotations

import json
import logging
import pathlib
import sys
import typing as typ

import pandas as pd

from grtkit.cli.config import CliConfig, Command, TransformOp, parse_args
from grtkit.core.confusion import ConfusionMatrix
from grtkit.core.constraints import ConstraintScheme
from grtkit.core.fitting import fit, likelihood_twin_check, simulate
from grtkit.core.grtwind import (
    GrtWindModel,
    subject_specific_induce_ds,
    subject_specific_normalize,
)
from grtkit.core.identifiability import audit, equivalence_certificate
from grtkit.core.model import ModelClass
from grtkit.core.transforms import AffineTransform, ellipse_points, induce_ds, normalize_model
from grtkit.exceptions import DomainError, GrtKitError, IdentifiabilityError, SchemaError
from grtkit.io.model_json import dumps, loads, model_to_dict, read_model

logger = logging.getLogger(__name__)


class _Output:
    """Collects what a command prints and writes."""

    def __init__(self, config: CliConfig, stdout: typ.TextIO):
        self.config = config
        self.stdout = stdout

    def emit(self, text: str) -> None:
        """Artifacts go to --output when given, else to stdout."""
        if self.config.output_path is not None:
            self.config.output_path.write_text(text)
            logger.info("wrote %s", self.config.output_path)
        else:
            self.stdout.write(text)

    def report(self, payload: dict[str, typ.Any], text: str) -> None:
        self.stdout.write(dumps(payload) if self.config.json_output else text.rstrip("\n") + "\n")


def _read_scheme(path: typ.Optional[pathlib.Path]) -> typ.Optional[ConstraintScheme]:
    if path is None:
        return None
    data = loads(path.read_text())
    try:
        return ConstraintScheme.from_dict(data.get("constraints", data))
    except (AttributeError, KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"{path}: malformed constraint scheme: {e}") from e


def _read_data(paths: typ.Sequence[pathlib.Path], grtwind: bool):
    matrices = [ConfusionMatrix.from_csv(path) for path in paths]
    if grtwind:
        return matrices
    if len(matrices) != 1:
        raise DomainError(f"a single-subject model takes one data file, got {len(matrices)}")
    return matrices[0]


def _run_fit(config: CliConfig, out: _Output) -> None:
    grtwind = config.model_class is ModelClass.GrtWind
    data = _read_data(config.data_paths, grtwind)
    result = fit(
        data,
        config.model_class,
        scheme=_read_scheme(config.scheme_path),
        options=config.fit_options(),
        levels=config.levels,
    )
    document = {"kind": "fit", "result": result.to_dict(), "model": model_to_dict(result.model)}
    if config.output_path is not None:
        out.emit(dumps(document))
    text = "\n".join(
        [
            f"log-likelihood       {result.log_likelihood:.10g}",
            f"free parameters      {result.n_free_parameters} (used by AIC and BIC)",
            f"audited parameters   {result.audited_parameters}",
            f"AIC                  {result.aic:.10g}",
            f"BIC                  {result.bic:.10g}",
            f"converged            {str(result.converged).lower()}",
            f"restarts used        {result.n_restarts_used}",
            f"gradient norm        {result.gradient_norm_at_solution:.3g}",
        ]
    )
    out.report(document, text)


def _run_simulate(config: CliConfig, out: _Output) -> None:
    model = read_model(config.model_path)
    data = simulate(model, config.trials, seed=config.seed)
    if isinstance(data, ConfusionMatrix):
        out.emit(data.to_csv())
        return
    if config.output_path is None:
        raise DomainError("GRTwIND simulation writes one CSV per subject; pass --output")
    stem, suffix = config.output_path.stem, config.output_path.suffix or ".csv"
    for k, matrix in enumerate(data, start=1):
        path = config.output_path.with_name(f"{stem}_{k}{suffix}")
        matrix.to_csv(path)
        logger.info("wrote %s", path)


def _ellipse_frame(models: typ.Sequence[typ.Any]) -> pd.DataFrame:
    frames = []
    for subject, model in enumerate(models, start=1):
        for label, dist in zip(model.stimulus_labels, model.flat_distributions):
            points = ellipse_points(dist)
            frame = pd.DataFrame(points, columns=["x", "y"])
            frame.insert(0, "point", range(len(points)))
            frame.insert(0, "stimulus", label)
            if len(models) > 1:
                frame.insert(0, "subject", subject)
            frames.append(frame)
    return pd.concat(frames, ignore_index=True)


def _transform_single(model, op: TransformOp) -> tuple[typ.Any, list[AffineTransform]]:
    if op is TransformOp.InduceDS:
        image, transform = induce_ds(model)
        return image, [transform]
    return normalize_model(model)


def _run_transform(config: CliConfig, out: _Output) -> None:
    model = read_model(config.model_path)
    if isinstance(model, GrtWindModel):
        images, transforms = subject_specific_induce_ds(model)
        if config.op is TransformOp.Normalize:
            images, per_subject = subject_specific_normalize(images)
            transforms = [[t, *rest] for t, rest in zip(transforms, per_subject)]
        else:
            transforms = [[t] for t in transforms]
        document = {
            "kind": "transform",
            "op": config.op.value,
            "models": [model_to_dict(image) for image in images],
            "transforms": [[t.to_dict() for t in subject] for subject in transforms],
        }
        outputs = images
    else:
        image, transforms = _transform_single(model, config.op)
        document = {
            "kind": "transform",
            "op": config.op.value,
            "model": model_to_dict(image),
            "transforms": [t.to_dict() for t in transforms],
        }
        outputs = [image]
    out.emit(dumps(document))
    if config.ellipses_path is not None:
        _ellipse_frame(outputs).to_csv(config.ellipses_path, index=False, lineterminator="\n")
        logger.info("wrote %s", config.ellipses_path)


def _run_audit(config: CliConfig, out: _Output) -> None:
    if config.model_class is ModelClass.GrtWind:
        if config.subjects is None:
            raise DomainError("audit --class grtwind needs --subjects")
        dimensions = config.subjects
    else:
        dimensions = config.levels or (2, 2)
    report = audit(config.model_class, dimensions, _read_scheme(config.scheme_path))
    out.report({"kind": "audit", **report.to_dict()}, report.to_text())


def _twin_name(name: str, subject: typ.Optional[int]) -> str:
    return name if subject is None else f"{name} (subject {subject + 1})"


def _run_equiv_check(config: CliConfig, out: _Output) -> None:
    certificate = equivalence_certificate(read_model(config.model_path))
    twins = [
        {
            "name": twin.name,
            "subject": twin.subject,
            "discrepancy": twin.discrepancy,
            "identity": twin.is_identity,
        }
        for twin in certificate.twins
    ]
    payload = {
        "kind": "equivalence",
        "model_class": certificate.model_class.value,
        "max_discrepancy": certificate.max_discrepancy,
        "tolerance": certificate.tolerance,
        "passed": certificate.passed,
        "universal_perception_violated": certificate.universal_perception_violated,
        "twins": twins,
    }
    lines = [
        f"{_twin_name(twin['name'], twin['subject'])}  {twin['discrepancy']:.3e}" for twin in twins
    ]
    lines.append(f"max discrepancy  {certificate.max_discrepancy:.3e}")
    lines.append(f"passed           {str(certificate.passed).lower()}")
    if certificate.universal_perception_violated is not None:
        lines.append(
            f"universal perception violated  {str(certificate.universal_perception_violated).lower()}"
        )
    out.report(payload, "\n".join(lines))


def _run_twin_check(config: CliConfig, out: _Output) -> None:
    model = read_model(config.model_path)
    data = _read_data(config.data_paths, isinstance(model, GrtWindModel))
    report = likelihood_twin_check(data, model)
    lines = [
        f"{_twin_name(entry.name, entry.subject)}"
        f"  {entry.original:.10g} -> {entry.twin:.10g}  delta {entry.delta:.3e}"
        for entry in report.entries
    ]
    lines.append(f"total delta  {report.total_delta:.3e}")
    lines.append(f"passed       {str(report.passed).lower()}")
    out.report({"kind": "twin-check", **report.to_dict()}, "\n".join(lines))


_HANDLERS: dict[Command, typ.Callable[[CliConfig, _Output], None]] = {
    Command.Fit: _run_fit,
    Command.Simulate: _run_simulate,
    Command.Transform: _run_transform,
    Command.Audit: _run_audit,
    Command.EquivCheck: _run_equiv_check,
    Command.TwinCheck: _run_twin_check,
}


def run(
    config: CliConfig, stdout: typ.Optional[typ.TextIO] = None, stderr: typ.Optional[typ.TextIO] = None
) -> int:
    """
    Execute one command.

    Returns:
        int: The exit status.
    """
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        _HANDLERS[config.command](config, _Output(config, stdout))
    except SchemaError as e:
        stderr.write(f"grtkit: schema error: {e}\n")
        return 2
    except IdentifiabilityError as e:
        stderr.write(f"grtkit: {e}\n{e.report.to_text()}\n")
        return 1
    except GrtKitError as e:
        stderr.write(f"grtkit: {e}\n")
        return 1
    except (OSError, json.JSONDecodeError) as e:
        stderr.write(f"grtkit: cannot read input: {e}\n")
        return 2
    return 0


def main(argv: typ.Optional[typ.Sequence[str]] = None) -> int:
    try:
        config = parse_args(argv)
    except SchemaError as e:
        sys.stderr.write(f"grtkit: {e}\n")
        return 2
    logging.basicConfig(level=getattr(logging, config.log_level), format="%(levelname)s %(name)s: %(message)s")
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
