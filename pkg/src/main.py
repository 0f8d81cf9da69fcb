"""Main entry point: batch subcommands from seed graph to verdict JSON.

    python -m src.main tower ags-rose --levels 3
    python -m src.main walls cycle4 --level 3
    python -m src.main embed theta --levels 3
    python -m src.main ext-verify semidirect-swap --R 1 2 4 --eps 0.5 0.25 --delta 0.5 0.25
    python -m src.main envelope a.csv b.csv

Exit codes: 0 pass, 2 usage / I/O, 3 validation, 4 verification failure.
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from dotenv import load_dotenv

from .boxspace import (
    combined_envelope,
    cross_component_ratio,
    cross_ratio_within,
    distortion_envelope,
    from_tower,
    generating_set_change,
)
from .config import overridden_settings
from .covers import agreement_report, build_tower, wall_metric
from .embedding import negative_type_check, wall_box_metric, wall_embedding
from .errors import BadInput, BoxSpaceError, ConditionViolated, InequalityViolated
from .formats import (
    load_metric_csv,
    save_dot,
    save_envelope_csv,
    save_graph,
    save_json,
    save_matrix_csv,
    save_metric_csv,
    save_rows_csv,
    save_walls_csv,
)
from .graph import create_verification_app, recursion_limit
from .groups import Word
from .nodes import DEFAULT_GRID, init_dependencies
from .providers import resolve_seed
from .visualization import save_pipeline_image

DEFAULT_OUT = "out"
ENVELOPE_GENERATORS = ("a", "b", "ab")


@dataclass
class RunConfig:
    """Parsed flags plus environment defaults for one subcommand run."""

    subcommand: str
    inputs: list[str] = field(default_factory=list)
    out: Path = Path(DEFAULT_OUT)
    fmt: str = "json"
    levels: int | None = None
    level: int = 1
    cap: int | None = None
    R: list[float] = field(default_factory=list)
    eps: list[float] = field(default_factory=list)
    delta: list[float] = field(default_factory=list)
    t: float | None = None
    kernel: str = "auto"
    gaps: list[float] | None = None
    strict: bool = False
    metric: Path | None = None
    tol_psd: float | None = None
    tol_norm: float | None = None
    diagram: bool = False
    verbose: bool = False

    def __post_init__(self):
        for name in ("levels", "cap", "tol_psd", "tol_norm", "t"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise BadInput(f"--{name.replace('_', '-')} must be positive, got {value}")
        if self.level < 1:
            raise BadInput(f"--level must be at least 1, got {self.level}")

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        return cls(
            subcommand=args.command,
            inputs=list(getattr(args, "inputs", None) or []),
            out=Path(args.out),
            fmt=args.format,
            levels=getattr(args, "levels", None),
            level=getattr(args, "level", 1),
            cap=args.cap,
            R=list(getattr(args, "R", None) or []),
            eps=list(getattr(args, "eps", None) or []),
            delta=list(getattr(args, "delta", None) or []),
            t=getattr(args, "t", None),
            kernel=getattr(args, "kernel", "auto"),
            gaps=getattr(args, "gaps", None),
            strict=getattr(args, "strict", False),
            metric=Path(args.metric) if getattr(args, "metric", None) else None,
            tol_psd=args.tol_psd,
            tol_norm=args.tol_norm,
            diagram=getattr(args, "diagram", False),
            verbose=args.verbose,
        )

    def grid(self) -> list[dict]:
        """Cartesian grid of the given R, eps, delta lists (defaults where a list is empty)."""
        if not (self.R or self.eps or self.delta):
            return list(DEFAULT_GRID)
        Rs = self.R or sorted({p["R"] for p in DEFAULT_GRID})
        epss = self.eps or sorted({p["eps"] for p in DEFAULT_GRID}, reverse=True)
        deltas = self.delta or sorted({p["delta"] for p in DEFAULT_GRID}, reverse=True)
        return [{"R": R, "eps": eps, "delta": delta} for R in Rs for eps in epss for delta in deltas]

    def settings_overrides(self) -> dict:
        """Tolerance flags that replace the environment's values for this run."""
        return {"tol_psd": self.tol_psd, "tol_norm": self.tol_norm}


def _emit(payload: dict) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True, default=str))


# === Subcommands ===


def cmd_tower(config: RunConfig) -> int:
    """Tower report JSON and CSV, plus one graph file per level."""
    log = logging.getLogger("cmd_tower")
    seed = resolve_seed(config.inputs[0])
    report = build_tower(seed, max_levels=3 if config.levels is None else config.levels, size_cap=config.cap)

    save_json(report.to_dict(), config.out / "tower.json")
    rows = [
        (level, size, girth if girth != float("inf") else None, diameter)
        for level, (size, girth, diameter) in enumerate(zip(report.sizes, report.girths, report.diameters))
    ]
    save_rows_csv(config.out / "tower.csv", ["level", "size", "girth", "diameter"], rows)
    for level, g in enumerate(report.graphs):
        if config.fmt == "dot":
            save_dot(g, config.out / f"level_{level}.dot", name=f"level_{level}")
        elif config.fmt == "json":
            save_graph(g, config.out / f"level_{level}.json")

    log.info(f"Wrote {len(report.graphs)} levels to {config.out}")
    _emit(report.to_dict())
    return 0


def cmd_walls(config: RunConfig) -> int:
    """Wall table, wall metric and agreement report of one cover level."""
    seed = resolve_seed(config.inputs[0])
    report = build_tower(seed, max_levels=config.level + 1, size_cap=config.cap)
    if len(report.levels) < config.level:
        raise BadInput(f"Tower stopped at {len(report.levels)} cover levels, asked for level {config.level}")
    cover = report.levels[config.level - 1]

    save_walls_csv(cover.walls, config.out / "walls.csv")
    save_metric_csv(wall_metric(cover), config.out / "wall_metric.csv")
    agreement = {"level": config.level, **agreement_report(cover)}
    save_json(agreement, config.out / "agreement.json")
    _emit(agreement)
    return 0


def cmd_embed(config: RunConfig) -> int:
    """Point cloud of the wall box space and its negative-type margin.

    With --metric, only the negative-type check of that metric CSV is reported.
    """
    log = logging.getLogger("cmd_embed")
    if config.metric is not None:
        d = load_metric_csv(config.metric)
        check = negative_type_check(d)
        result = {"points": int(d.shape[0]), **check.to_dict()}
        save_json(result, config.out / "negative_type.json")
        _emit(result)
        return 0

    seed = resolve_seed(config.inputs[0])
    box = from_tower(build_tower(seed, max_levels=3 if config.levels is None else config.levels, size_cap=config.cap))
    d_w = wall_box_metric(box)
    cloud = wall_embedding(box)
    identity_exact = bool(np.array_equal(cloud.squared_distances(), d_w))
    check = negative_type_check(d_w)
    save_matrix_csv(cloud.coordinates, config.out / "points.csv", prefix="x")
    result = {
        "points": box.size,
        "dimension": cloud.dimension,
        "gaps": list(box.gaps),
        "embedding_exact": identity_exact,
        **check.to_dict(),
    }
    save_json(result, config.out / "negative_type.json")
    if not identity_exact:
        log.error("Squared distances of the wall embedding differ from the wall box metric")
    _emit(result)
    return 0 if identity_exact else 4


def run_verification(
    extension: str,
    grid: list[dict] | None = None,
    levels: int | None = None,
    size_cap: int | None = None,
    t: float | None = None,
    kernel: str = "auto",
    gaps: list[float] | None = None,
    strict: bool = False,
) -> dict:
    """Run the verification graph on an extension spec.

    Returns:
        The final state after verification
    """
    load_dotenv()
    init_dependencies()
    app = create_verification_app()
    grid = grid or list(DEFAULT_GRID)
    initial_state = {
        "extension": extension,
        "grid": grid,
        "levels": levels,
        "size_cap": size_cap,
        "t": t,
        "kernel": kernel,
        "gaps": gaps,
        "strict": strict,
    }
    return app.invoke(initial_state, config={"recursion_limit": recursion_limit(len(grid))})


def failure_error(summary: dict) -> BoxSpaceError | None:
    """The verification error a failed summary maps to, carrying its first witness."""
    for report in summary["lemma"]:
        if "error" in report:
            return InequalityViolated(report["error"]["message"], witness=report["error"]["witness"])
    for verdict in summary["verdicts"]:
        if not verdict["pass"]:
            return ConditionViolated(
                f"Conditions fail at R = {verdict['R']}, eps = {verdict['eps']}, delta = {verdict['delta']}",
                witness=verdict["witness"],
            )
    return None


def cmd_ext_verify(config: RunConfig) -> int:
    """Verdict JSON over the parameter grid; exit 0 iff every check passes."""
    if config.diagram:
        save_pipeline_image(str(config.out / "pipeline.png"))
    result = run_verification(
        config.inputs[0],
        grid=config.grid(),
        levels=config.levels,
        size_cap=config.cap,
        t=config.t,
        kernel=config.kernel,
        gaps=config.gaps,
        strict=config.strict,
    )
    summary = result["summary"]
    save_json(summary, config.out / "verdict.json")
    if config.fmt == "csv":
        columns = ["R", "eps", "delta", "S_G", "S_H", "M_Gamma", "N_R", "S", "t", "min_margin_1", "min_margin_2", "pass"]
        save_rows_csv(config.out / "verdict.csv", columns, [[v[c] for c in columns] for v in summary["verdicts"]])
    _emit(summary)

    error = summary["error"]
    if error is not None:
        print(json.dumps({k: error[k] for k in ("error", "message", "witness")}, sort_keys=True), file=sys.stderr)
        return int(error["exit_code"])
    failure = failure_error(summary)
    if failure is not None:
        raise failure
    return 0


def cmd_envelope(config: RunConfig) -> int:
    """Distortion envelope of two metrics on the same points.

    Without inputs, compares the ags-rose box space under {a, b} and {a, b, ab}.
    """
    if len(config.inputs) == 2:
        d1, d2 = (load_metric_csv(p) for p in config.inputs)
        extra = {}
    elif not config.inputs:
        levels = 3 if config.levels is None else config.levels
        report = build_tower(resolve_seed("ags-rose"), max_levels=levels, size_cap=config.cap)
        first, second = generating_set_change(report, [Word.parse(w) for w in ENVELOPE_GENERATORS])
        d1, d2 = first.global_matrix(), second.global_matrix()
        low, high = cross_component_ratio(first, second)
        extra = {
            "generators": list(ENVELOPE_GENERATORS),
            "gaps": list(first.gaps),
            "cross_ratio": [low, high],
            "cross_ratio_within_bound": cross_ratio_within(low, high),
        }
    else:
        raise BadInput("envelope takes two metric CSV files, or none for the builtin generating-set change")

    env = distortion_envelope(d1, d2)
    save_envelope_csv(env, config.out / "envelope.csv")
    save_envelope_csv(combined_envelope(env), config.out / "envelope_combined.csv")
    result = {**env.summary(), **extra}
    save_json(result, config.out / "envelope.json")
    _emit(result)
    return 0


COMMANDS = {
    "tower": cmd_tower,
    "walls": cmd_walls,
    "embed": cmd_embed,
    "ext-verify": cmd_ext_verify,
    "envelope": cmd_envelope,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=DEFAULT_OUT, help=f"Output directory (default: {DEFAULT_OUT})")
    common.add_argument("--format", choices=["json", "csv", "dot"], default="json", help="Output format selector")
    common.add_argument("--cap", type=int, default=None, help="Cover vertex cap")
    common.add_argument("--tol-psd", type=float, default=None, help="PSD eigenvalue tolerance")
    common.add_argument("--tol-norm", type=float, default=None, help="Unit-norm tolerance")
    common.add_argument("--verbose", action="store_true", help="Debug logging")

    parser = argparse.ArgumentParser(description="Box spaces of finite quotients and their Hilbert-space data")
    sub = parser.add_subparsers(dest="command", required=True)

    tower = sub.add_parser("tower", parents=[common], help="Iterate homology covers from a seed")
    tower.add_argument("inputs", nargs=1, metavar="SEED", help="Builtin seed name or graph JSON path")
    tower.add_argument("--levels", type=int, default=3, help="Graphs in the tower, seed included (default: 3)")

    walls = sub.add_parser("walls", parents=[common], help="Wall table and agreement radius of a cover")
    walls.add_argument("inputs", nargs=1, metavar="SEED")
    walls.add_argument("--level", type=int, default=1, help="Cover level (default: 1)")

    embed = sub.add_parser("embed", parents=[common], help="Wall embedding and negative-type check")
    embed.add_argument("inputs", nargs="?", metavar="SEED", default=None)
    embed.add_argument("--levels", type=int, default=3)
    embed.add_argument("--metric", default=None, help="Check a metric CSV instead of a tower")

    verify = sub.add_parser("ext-verify", parents=[common], help="Verify the extension conditions over a grid")
    verify.add_argument("inputs", nargs=1, metavar="EXTENSION", help="Builtin or catalogue extension name")
    verify.add_argument("--levels", type=int, default=None)
    verify.add_argument("--R", type=float, nargs="+", default=None)
    verify.add_argument("--eps", type=float, nargs="+", default=None)
    verify.add_argument("--delta", type=float, nargs="+", default=None)
    verify.add_argument("--t", type=float, default=None, help="Gaussian parameter override")
    verify.add_argument("--kernel", choices=["auto", "wall", "induced"], default="auto")
    verify.add_argument("--gaps", type=float, nargs="+", default=None, help="Explicit gap sequence")
    verify.add_argument("--strict", action="store_true", help="Stop at the first failing grid point")
    verify.add_argument("--diagram", action="store_true", help="Also render the pipeline diagram")

    envelope = sub.add_parser("envelope", parents=[common], help="Distortion envelope of two metrics")
    envelope.add_argument("inputs", nargs="*", metavar="METRIC_CSV")
    envelope.add_argument("--levels", type=int, default=3)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "embed":
        if args.inputs is None and args.metric is None:
            build_parser().error("embed needs a SEED or --metric")
        args.inputs = [args.inputs] if args.inputs else []

    try:
        config = RunConfig.from_args(args)
        with overridden_settings(**config.settings_overrides()) as settings:
            level = logging.DEBUG if config.verbose else getattr(logging, settings.log_level, logging.INFO)
            logging.getLogger().setLevel(level)
            return COMMANDS[config.subcommand](config)
    except BoxSpaceError as e:
        logging.getLogger("main").error(f"{type(e).__name__}: {e.message}")
        print(json.dumps(e.to_dict(), sort_keys=True, default=str), file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
