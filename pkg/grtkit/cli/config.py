"""Command-line configuration: the argparse parser and the CliConfig it produces."""

from __future__ import annotations

import argparse
import dataclasses
import enum
import pathlib
import typing as typ

from grtkit.core.fitting.fitter import FitOptions
from grtkit.core.model import ModelClass
from grtkit.exceptions import SchemaError

DEFAULT_SEED = 0


class Command(enum.Enum):
    Fit = "fit"
    Simulate = "simulate"
    Transform = "transform"
    Audit = "audit"
    EquivCheck = "equiv-check"
    TwinCheck = "twin-check"


class TransformOp(enum.Enum):
    InduceDS = "induce-ds"
    Normalize = "normalize"


_NEEDS_MODEL = {Command.Simulate, Command.Transform, Command.EquivCheck, Command.TwinCheck}
_NEEDS_DATA = {Command.Fit, Command.TwinCheck}


@dataclasses.dataclass(frozen=True)
class CliConfig:
    """
    One parsed invocation.

    Attributes:
        command (Command): Subcommand to run.
        model_path (pathlib.Path | None): Model JSON input.
        data_paths (tuple[pathlib.Path, ...]): Confusion-matrix CSV inputs, one per subject for GRTwIND.
        output_path (pathlib.Path | None): Where artifacts go; stdout when omitted.
        seed (int): Seed for simulation and restart jitter.
        restarts (int): Fitter restarts.
        tolerance (float): Fitter tolerance.
        json_output (bool): Print reports as JSON instead of text.
        model_class (ModelClass | None): Class for ``fit`` and ``audit``.
        levels (tuple[int, int] | None): Response levels for multi-bound classes.
        subjects (int | None): Subject count for ``audit --class grtwind``.
        scheme_path (pathlib.Path | None): Constraint scheme JSON for ``fit`` and ``audit``.
        trials (int): Trials per stimulus for ``simulate``.
        op (TransformOp): Transform to apply.
        ellipses_path (pathlib.Path | None): CSV of equal-likelihood contour points.
        n_jobs (int | None): joblib workers.
        log_level (str): Logging level name.
    """

    command: Command
    model_path: typ.Optional[pathlib.Path] = None
    data_paths: tuple[pathlib.Path, ...] = ()
    output_path: typ.Optional[pathlib.Path] = None
    seed: int = DEFAULT_SEED
    restarts: int = FitOptions.restarts
    tolerance: float = FitOptions.tolerance
    json_output: bool = False
    model_class: typ.Optional[ModelClass] = None
    levels: typ.Optional[tuple[int, int]] = None
    subjects: typ.Optional[int] = None
    scheme_path: typ.Optional[pathlib.Path] = None
    trials: int = 100
    op: TransformOp = TransformOp.InduceDS
    ellipses_path: typ.Optional[pathlib.Path] = None
    n_jobs: typ.Optional[int] = None
    log_level: str = "WARNING"

    def __post_init__(self):
        if self.command in _NEEDS_MODEL and self.model_path is None:
            raise SchemaError(f"{self.command.value} needs --model")
        if self.command in _NEEDS_DATA and not self.data_paths:
            raise SchemaError(f"{self.command.value} needs --data")
        if self.command in (Command.Fit, Command.Audit) and self.model_class is None:
            raise SchemaError(f"{self.command.value} needs --class")

    @classmethod
    def from_namespace(cls, ns: argparse.Namespace) -> CliConfig:
        def path(name: str) -> typ.Optional[pathlib.Path]:
            value = getattr(ns, name, None)
            return pathlib.Path(value) if value is not None else None

        model_class = getattr(ns, "model_class", None)
        levels = getattr(ns, "levels", None)
        return cls(
            command=Command(ns.command),
            model_path=path("model"),
            data_paths=tuple(pathlib.Path(p) for p in getattr(ns, "data", None) or ()),
            output_path=path("output"),
            seed=ns.seed,
            restarts=getattr(ns, "restarts", FitOptions.restarts),
            tolerance=getattr(ns, "tolerance", FitOptions.tolerance),
            json_output=ns.json,
            model_class=ModelClass(model_class) if model_class else None,
            levels=tuple(levels) if levels else None,
            subjects=getattr(ns, "subjects", None),
            scheme_path=path("scheme"),
            trials=getattr(ns, "trials", 100),
            op=TransformOp(getattr(ns, "op", TransformOp.InduceDS.value)),
            ellipses_path=path("emit_ellipses"),
            n_jobs=getattr(ns, "n_jobs", None),
            log_level=ns.log_level,
        )

    def fit_options(self) -> FitOptions:
        return FitOptions(
            restarts=self.restarts, tolerance=self.tolerance, seed=self.seed, n_jobs=self.n_jobs
        )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print reports as JSON")
    common.add_argument("--output", help="write artifacts to this file instead of stdout")
    common.add_argument(
        "--seed", type=int, default=DEFAULT_SEED, help="random seed (default: %(default)s)"
    )
    common.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="logging level (default: %(default)s)",
    )

    classes = [c.value for c in ModelClass]
    parser = argparse.ArgumentParser(
        prog="grtkit", description="Gaussian General Recognition Theory toolkit."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", parents=[common], help="fit a model class to confusion data")
    fit.add_argument("--class", dest="model_class", required=True, choices=classes)
    fit.add_argument("--data", nargs="+", required=True, help="confusion-matrix CSV file(s)")
    fit.add_argument("--levels", nargs=2, type=int, metavar=("N", "M"))
    fit.add_argument("--scheme", help="constraint scheme JSON")
    fit.add_argument("--restarts", type=int, default=FitOptions.restarts)
    fit.add_argument("--tolerance", type=float, default=FitOptions.tolerance)
    fit.add_argument("--n-jobs", type=int)

    simulate = sub.add_parser("simulate", parents=[common], help="simulate confusion data")
    simulate.add_argument("--model", required=True, help="model JSON")
    simulate.add_argument("--trials", type=int, default=100, help="trials per stimulus")

    transform = sub.add_parser(
        "transform", parents=[common], help="apply an equivalence transform to a model"
    )
    transform.add_argument("--model", required=True, help="model JSON")
    transform.add_argument(
        "--op", choices=[op.value for op in TransformOp], default=TransformOp.InduceDS.value
    )
    transform.add_argument(
        "--emit-ellipses", help="write equal-likelihood contour points of the result as CSV"
    )

    audit = sub.add_parser("audit", parents=[common], help="count data and parameter degrees of freedom")
    audit.add_argument("--class", dest="model_class", required=True, choices=classes)
    audit.add_argument("--levels", nargs=2, type=int, metavar=("N", "M"))
    audit.add_argument("--subjects", type=int)
    audit.add_argument("--scheme", help="constraint scheme JSON")

    equiv = sub.add_parser(
        "equiv-check", parents=[common], help="probability discrepancy of a model's equivalence twins"
    )
    equiv.add_argument("--model", required=True, help="model JSON")

    twin = sub.add_parser(
        "twin-check", parents=[common], help="log-likelihood of a model against its equivalence twins"
    )
    twin.add_argument("--model", required=True, help="model JSON")
    twin.add_argument("--data", nargs="+", required=True, help="confusion-matrix CSV file(s)")
    return parser


def parse_args(argv: typ.Optional[typ.Sequence[str]] = None) -> CliConfig:
    return CliConfig.from_namespace(build_parser().parse_args(argv))
