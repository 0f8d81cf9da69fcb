"""Acceptance harness for the box-space library and pipeline.

Each golden set case names a kind, i.e. one `_run_<kind>` method below that
computes a flat result dict. The case's `checks` block is then matched
against that dict:

    raises    error class name the computation must raise
    equals    key -> exact value
    at_least  key -> lower bound
    at_most   key -> upper bound
    true      keys whose value must be True

Kinds cover tower shape, wall/graph agreement, negative type, the distance
inequalities, full extension verification, spectral pullback, semidirect
certification, subgroup images and distortion envelopes.
"""

import logging
import math
import time
from collections import Counter
from dataclasses import asdict, dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Callable

import numpy as np
import yaml

from src.boxspace import (
    cross_component_ratio,
    cross_ratio_within,
    distortion_envelope,
    from_tower,
    generating_set_change,
)
from src.covers import agreement_report, build_tower, deck_transformation
from src.embedding import negative_type_check, wall_box_metric, wall_embedding
from src.errors import BadInput, BoxSpaceError
from src.extension import lemma_dg_check
from src.formats import load_metric_csv, save_json
from src.groups import QuotientGroup, Word, induced_automorphism, subgroup_image
from src.main import run_verification
from src.multigraph import LabeledMultigraph, is_label_isomorphic, spectrum
from src.providers import resolve_extension, resolve_seed
from src.semidirect import ActionSpec, build_semidirect, extension_from_tower

log = logging.getLogger("evaluator")

REQUIRED_KEYS = ("id", "category", "description", "kind")


@dataclass
class CaseResult:
    case_id: str
    category: str
    description: str
    passed: bool
    checks: dict[str, bool]
    details: dict[str, Any] = field(default_factory=dict)
    error: str | None = None
    seconds: float = 0.0

    @property
    def failed_checks(self) -> list[str]:
        return [name for name, ok in self.checks.items() if not ok]


@dataclass
class EvalReport:
    """Per-case results with pass counts grouped by category and by check kind."""

    results: list[CaseResult]
    by_category: dict[str, dict]
    by_check: dict[str, dict]
    timestamp: str

    @property
    def total_cases(self) -> int:
        return len(self.results)

    @property
    def passed_cases(self) -> int:
        return sum(r.passed for r in self.results)

    @property
    def pass_rate(self) -> float:
        return self.passed_cases / self.total_cases if self.results else 0.0

    @property
    def failed_cases(self) -> list[CaseResult]:
        return [r for r in self.results if not r.passed]


def klein_four_cayley() -> LabeledMultigraph:
    """(Z/2)^2 on bit pairs: label j flips bit j."""
    return LabeledMultigraph(
        vertex_count=4,
        edges=tuple((v, v ^ (1 << j), j) for j in range(2) for v in range(4)),
    )


def load_cases(path: str | Path) -> list[dict]:
    """Golden set cases, each checked for the keys the harness needs."""
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    except (OSError, yaml.YAMLError) as e:
        raise BadInput(f"cannot read golden set {path}: {e}") from e
    cases = data.get("test_cases") or []
    for position, case in enumerate(cases):
        missing = [key for key in REQUIRED_KEYS if key not in case]
        if missing:
            raise BadInput(f"golden set case #{position} lacks {', '.join(missing)}", witness={"case": case})
    return cases


def _compare(result: dict, checks_config: dict) -> tuple[dict[str, bool], dict[str, Any]]:
    """Match a result dict against a case's checks block."""
    rules: list[tuple[str, str, Any, Callable[[Any, Any], bool]]] = []
    if "raises" in checks_config:
        rules.append(("raises", "error", checks_config["raises"], lambda a, e: a == e))
    for key, expected in (checks_config.get("equals") or {}).items():
        rules.append((f"equals:{key}", key, expected, lambda a, e: a == e))
    for key, bound in (checks_config.get("at_least") or {}).items():
        rules.append((f"at_least:{key}", key, bound, lambda a, b: a is not None and a >= b))
    for key, bound in (checks_config.get("at_most") or {}).items():
        rules.append((f"at_most:{key}", key, bound, lambda a, b: a is not None and a <= b))
    for key in checks_config.get("true") or []:
        rules.append((f"true:{key}", key, True, lambda a, _: a is True))

    checks, details = {}, {}
    for name, key, expected, rule in rules:
        actual = result.get(key)
        checks[name] = bool(rule(actual, expected))
        details[name] = {"expected": expected, "actual": actual}
    return checks, details


def _tally(results: list[CaseResult], keys: Callable[[CaseResult], list[tuple[str, bool]]]) -> dict[str, dict]:
    totals, passes = Counter(), Counter()
    for result in results:
        for key, ok in keys(result):
            totals[key] += 1
            passes[key] += ok
    return {key: {"passed": passes[key], "total": n, "rate": passes[key] / n} for key, n in sorted(totals.items())}


class AcceptanceEvaluator:
    """Runs golden set cases against the library and the verification graph."""

    def __init__(self, golden_set_path: str | Path = "evals/golden_set.yaml"):
        self.golden_set_path = Path(golden_set_path)
        self.cases = load_cases(self.golden_set_path)
        self.results: list[CaseResult] = []

    def select(self, category: str | None = None, case_id: str | None = None) -> list[dict]:
        """Narrow the loaded cases in place; returns what is left."""
        if category:
            self.cases = [c for c in self.cases if c["category"] == category]
        if case_id:
            self.cases = [c for c in self.cases if c["id"] == case_id]
        return self.cases

    def run_all(self) -> EvalReport:
        self.results = [self._timed(case) for case in self.cases]
        return EvalReport(
            results=self.results,
            by_category=_tally(self.results, lambda r: [(r.category, r.passed)]),
            by_check=_tally(self.results, lambda r: [(name.split(":")[0], ok) for name, ok in r.checks.items()]),
            timestamp=datetime.now().isoformat(timespec="seconds"),
        )

    def _timed(self, case: dict) -> CaseResult:
        log.info(f"{case['id']} [{case['kind']}] {case['description']}")
        started = time.perf_counter()
        try:
            result = self.run_single(case)
        except Exception as e:
            log.error(f"{case['id']} crashed: {type(e).__name__}: {e}")
            result = CaseResult(case["id"], case["category"], case["description"], False, {}, error=f"{type(e).__name__}: {e}")
        result.seconds = round(time.perf_counter() - started, 3)
        log.info(f"{case['id']} {'PASS' if result.passed else 'FAIL'} in {result.seconds:.2f}s")
        return result

    def run_single(self, case: dict) -> CaseResult:
        """Compute the case's result dict and compare it with the expectations."""
        checks_config = case.get("checks") or {}
        runner = getattr(self, f"_run_{case['kind']}", None)
        if runner is None:
            raise BadInput(f"unknown case kind {case['kind']!r}")
        try:
            result = runner(**(case.get("params") or {}))
        except BoxSpaceError as e:
            if "raises" not in checks_config:
                raise
            result = {"error": type(e).__name__, "witness": e.witness}

        checks, details = _compare(result, checks_config)
        return CaseResult(
            case_id=case["id"],
            category=case["category"],
            description=case["description"],
            passed=bool(checks) and all(checks.values()),
            checks=checks,
            details=details,
        )

    # === Case kinds ===

    def _run_tower(self, seed: str, levels: int) -> dict:
        report = build_tower(resolve_seed(seed), max_levels=levels)
        first = report.levels[0].cover if report.levels else None
        deck_ok = True
        for level in report.levels:
            if level.sheets > 64:
                continue
            perms = [deck_transformation(level, s) for s in range(level.sheets)]
            for p in perms:
                deck_ok &= bool(np.array_equal(p[p], np.arange(len(p))))
                for q in perms:
                    deck_ok &= bool(np.array_equal(p[q], q[p]))
        return {
            "sizes": report.sizes,
            "deck_ranks": [level.deck_rank for level in report.levels],
            "level1_is_klein_four": bool(first is not None and is_label_isomorphic(first, klein_four_cayley())),
            "deck_elementary_abelian": deck_ok,
        }

    def _run_walls(self, seed: str, levels: int) -> dict:
        report = build_tower(resolve_seed(seed), max_levels=levels)
        reports = [agreement_report(level) for level in report.levels]
        return {
            "levels_checked": len(reports),
            "all_reach_girth": all(r["reaches_girth"] for r in reports),
            "agreement_radii": [r["agreement_radius"] for r in reports],
            "warnings": sum(len(r["warnings"]) for r in reports),
        }

    def _run_negative_type(self, seed: str | None = None, levels: int = 3, metric: str | None = None) -> dict:
        if metric is not None:
            return negative_type_check(load_metric_csv(metric)).to_dict()
        box = from_tower(build_tower(resolve_seed(seed), max_levels=levels))
        d_w = wall_box_metric(box)
        check = negative_type_check(d_w)
        return {
            **check.to_dict(),
            "points": box.size,
            "embedding_exact": bool(np.array_equal(wall_embedding(box).squared_distances(), d_w)),
        }

    def _run_lemma(self, extension: str) -> dict:
        spec = resolve_extension(extension)
        tower = build_tower(spec.seed, max_levels=spec.levels)
        triples = extension_from_tower(tower, [Word.parse(w) for w in spec.images], spec.acting_order)
        reports = [lemma_dg_check(t) for t in triples]
        return {
            "orders": [t.order for t in triples],
            "max_violation": max(r["max_violation"] for r in reports),
            "triples_checked": sum(r["triples_checked"] for r in reports),
        }

    def _run_ext_verify(self, extension: str, grid: list[dict] | None = None, gaps: list[float] | None = None) -> dict:
        final_state = run_verification(extension, grid=grid, gaps=gaps)
        summary = final_state["summary"]
        if summary["error"] is not None:
            return {"error": summary["error"]["error"], "pass": False}
        verdicts = summary["verdicts"]
        return {
            "pass": summary["pass"],
            "gamma_orders": summary["gamma_orders"],
            "grid_points": len(verdicts),
            "max_norm_error": max(v["max_norm_error"] for v in verdicts),
            "all_closeness_hold": all(v["min_margin_1"] is None or v["min_margin_1"] > 0 for v in verdicts),
            "all_separation_hold": all(v["min_margin_2"] is not None and v["min_margin_2"] > 0 for v in verdicts),
            "min_separation_pairs": min((v["pairs_checked_2"] for v in verdicts), default=0),
            "distinct_component_pairs": max((v["cases"]["distinct_components"] for v in verdicts), default=0),
        }

    def _run_spectral(self, seed: str, levels: int, closed_form: bool = False) -> dict:
        report = build_tower(resolve_seed(seed), max_levels=levels)
        graphs = report.graphs
        spectra = [spectrum(g) for g in graphs]
        worst = 0.0
        for base, cover in zip(spectra, spectra[1:]):
            gaps = np.abs(base[:, None] - cover[None, :]).min(axis=1)
            worst = max(worst, float(gaps.max()))
        result = {"pullback_error": worst}
        if closed_form:
            result["lambda2_error"] = max(
                abs(float(s[1]) - math.cos(2 * math.pi / g.vertex_count)) for g, s in zip(graphs, spectra)
            )
        return result

    def _run_semidirect(self, extension: str) -> dict:
        spec = resolve_extension(extension)
        tower = build_tower(spec.seed, max_levels=spec.levels)
        orders, quotients, normal = [], [], True
        for level in tower.levels:
            q = QuotientGroup(level.cover)
            perm = induced_automorphism(q, [Word.parse(w) for w in spec.images])
            fs = build_semidirect(ActionSpec(q, perm, spec.acting_order))
            g = fs.group
            members = np.zeros(g.order, dtype=bool)
            members[fs.h_part] = True
            conjugates = g.table[g.table[:, fs.h_part], g.inverses[:, None]]
            normal &= bool(members[conjugates].all())
            orders.append(g.order)
            quotients.append(fs.quotient_order)
        return {"orders": orders, "quotient_orders": quotients, "h_normal": normal}

    def _run_subgroup_image(self, seed: str, levels: int, gens: list[str]) -> dict:
        report = build_tower(resolve_seed(seed), max_levels=levels)
        words = [Word.parse(w) for w in gens]
        images = [subgroup_image(QuotientGroup(level.cover), words) for level in report.levels]
        first = QuotientGroup(report.levels[0].cover)
        even = sorted(v for v in range(first.order) if len(first.normal_form(v)) % 2 == 0)
        return {
            "image_orders": [len(image) for image in images],
            "first_is_parity_zero": images[0] == even,
            "orders_divide": all(
                QuotientGroup(level.cover).order % len(image) == 0 for level, image in zip(report.levels, images)
            ),
        }

    def _run_envelope(self, seed: str = "ags-rose", levels: int = 3, gens: list[str] | None = None) -> dict:
        report = build_tower(resolve_seed(seed), max_levels=levels)
        if gens is None:
            box = from_tower(report)
            d = box.global_matrix()
            env = distortion_envelope(d, d)
            return {**env.summary(), "diagonal": bool(np.array_equal(env.rho_minus, env.t) and np.array_equal(env.rho_plus, env.t))}
        first, second = generating_set_change(report, [Word.parse(w) for w in gens])
        env = distortion_envelope(first.global_matrix(), second.global_matrix())
        low, high = cross_component_ratio(first, second)
        return {
            **env.summary(),
            "cross_ratio_low": low,
            "cross_ratio_high": high,
            "cross_ratio_within_bound": cross_ratio_within(low, high),
        }



def _rate_rows(title: str, table: dict[str, dict]) -> list[str]:
    rows = [f"## {title}", "", f"| {title.split()[-1]} | Passed | Rate |", "|---|---|---|"]
    rows += [f"| {key} | {s['passed']}/{s['total']} | {s['rate']:.0%} |" for key, s in table.items()]
    return rows + [""]


def render_report(report: EvalReport) -> str:
    """Markdown summary: overall rate, two rate tables, then each failure with its details."""
    lines = [
        "# Acceptance Results",
        "",
        f"{report.passed_cases}/{report.total_cases} cases passed ({report.pass_rate:.1%}), "
        f"{sum(r.seconds for r in report.results):.1f}s total",
        "",
    ]
    lines += _rate_rows("By Category", report.by_category)
    lines += _rate_rows("By Check", report.by_check)
    for case in report.failed_cases:
        lines += [f"### {case.case_id}: {case.description}", ""]
        if case.error:
            lines.append(f"- error: `{case.error}`")
        for name in case.failed_checks:
            detail = case.details.get(name, {})
            lines.append(f"- `{name}` expected {detail.get('expected')!r}, got {detail.get('actual')!r}")
        lines.append("")
    return "\n".join(lines)


def print_report(report: EvalReport) -> None:
    print(render_report(report))


def save_report(report: EvalReport, path: str | Path) -> Path:
    """Write the report as JSON through the package codec (numpy values become plain JSON)."""
    payload = {
        "summary": {
            "total_cases": report.total_cases,
            "passed_cases": report.passed_cases,
            "pass_rate": report.pass_rate,
            "timestamp": report.timestamp,
        },
        "by_category": report.by_category,
        "by_check": report.by_check,
        "results": [asdict(r) for r in report.results],
    }
    written = save_json(payload, path)
    log.info(f"Report saved to {written}")
    return written
