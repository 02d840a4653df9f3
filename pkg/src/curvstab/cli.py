"""Batch front end: parse a JSON run configuration, dispatch, and serialize results.

Exit status: 0 success, 1 some verification Refuted, 2 invalid configuration,
3 only indeterminate results while ``--strict`` is set.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import sys
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any

from . import classifier, harness, spectral_forms
from .classifier import RegionGrid, RegionRow, Status, StabilityVerdict, classify, region_scan
from .errors import ConfigError, CurvstabError
from .geometry import functionals
from .harness import Verdict, VerificationReport
from .records import dumps, from_record, to_record
from .spectral_forms import (
    EinsteinFactor,
    FunctionalId,
    ProductSpace,
    QuadraticFormReport,
    TriState,
    VariationDirection,
    hessian,
)

EXIT_OK, EXIT_REFUTED, EXIT_CONFIG, EXIT_INDETERMINATE = 0, 1, 2, 3


class Command(str, Enum):
    CLASSIFY = "classify"
    HESSIAN = "hessian"
    VERIFY = "verify"
    REGION = "region"
    CATALOG = "catalog"


class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"


@dataclass(frozen=True)
class Tolerances:
    """Overrides; ``None`` keeps the default of the owning module."""

    spectral_rel_tol: float | None = None   # spectral_forms/classifier REL_TOL
    confirm_floor: float | None = None      # harness CONFIRM_FLOOR
    quadrature_tol: float | None = None     # geometry.functionals QUAD_TOL


_TOLERANCE_TARGETS = {
    "spectral_rel_tol": ((spectral_forms, "REL_TOL"), (classifier, "REL_TOL")),
    "confirm_floor": ((harness, "CONFIRM_FLOOR"),),
    "quadrature_tol": ((functionals, "QUAD_TOL"),),
}

SUITES = ("continuation", "consistency")


@dataclass(frozen=True)
class RunConfig:
    command: Command
    product: ProductSpace | None = None
    functional: FunctionalId | None = None
    directions: tuple[VariationDirection, ...] = ()
    grid: RegionGrid | None = None
    cases: tuple[str, ...] = ()
    suites: tuple[str, ...] = ()
    output: OutputFormat = OutputFormat.JSON
    tolerances: Tolerances = field(default_factory=Tolerances)
    strict: bool = False
    auto_rescale: bool = False


# -- configuration parsing ---------------------------------------------------------

# shorthand factor records: kind -> (constructor, allowed keys)
_SHORTHAND = {
    "Sphere": (lambda dim, radius=1.0: EinsteinFactor.sphere(dim, radius), {"dim", "radius"}),
    "HyperbolicQuotient": (
        lambda dim, mu=None, mu_oneform=None, ric_stable=TriState.UNKNOWN, ft_stable=():
        EinsteinFactor.hyperbolic(dim, mu, mu_oneform=mu_oneform, ric_stable=ric_stable,
                                  ft_stable=ft_stable),
        {"dim", "mu", "mu_oneform", "ric_stable", "ft_stable"}),
    "ComplexProjective": (lambda complex_dim: EinsteinFactor.complex_projective(complex_dim),
                          {"complex_dim"}),
}
_REQUIRED = {"Sphere": ("dim",), "HyperbolicQuotient": ("dim",), "ComplexProjective": ("complex_dim",)}


def _expand_factor(data: Any, path: str) -> Any:
    """Canonical factor record from shorthand (no ``einstein_const``) or pass through."""
    if not isinstance(data, dict) or "einstein_const" in data:
        return data
    kind = data.get("kind")
    if kind not in _SHORTHAND:
        if kind is None:
            raise ConfigError("missing required field", f"{path}.kind")
        raise ConfigError(f"kind {kind!r} needs explicit einstein_const", f"{path}.einstein_const")
    build, allowed = _SHORTHAND[kind]
    extra = sorted(set(data) - allowed - {"kind"})
    if extra:
        raise ConfigError(f"unknown field {extra[0]!r}", f"{path}.{extra[0]}")
    for req in _REQUIRED[kind]:
        if req not in data:
            raise ConfigError("missing required field", f"{path}.{req}")
    kwargs = {k: v for k, v in data.items() if k != "kind"}
    if not isinstance(kwargs.get("dim", kwargs.get("complex_dim")), int) or isinstance(
            kwargs.get("dim", kwargs.get("complex_dim")), bool):
        key = "dim" if "dim" in kwargs else "complex_dim"
        raise ConfigError("expected an integer", f"{path}.{key}")
    if isinstance(kwargs.get("ft_stable"), dict):
        kwargs["ft_stable"] = dict(kwargs["ft_stable"])
    try:
        return to_record(build(**kwargs))
    except CurvstabError as exc:
        raise ConfigError(str(exc), path) from None


def parse_config(data: Any) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object", "<root>")
    data = dict(data)
    product = data.get("product")
    if isinstance(product, dict) and isinstance(product.get("factors"), list):
        factors = [_expand_factor(f, f"product.factors[{i}]") for i, f in enumerate(product["factors"])]
        data["product"] = {**product, "factors": factors}
    config = from_record(RunConfig, data)
    _check_command(config)
    return config


def _check_command(c: RunConfig) -> None:
    need = {
        Command.CLASSIFY: ("product", "functional"),
        Command.HESSIAN: ("product", "functional", "directions"),
        Command.REGION: ("functional", "grid"),
    }.get(c.command, ())
    for name in need:
        if getattr(c, name) in (None, ()):
            raise ConfigError(f"required for command {c.command.value!r}", name)
    if c.command is Command.VERIFY:
        if not c.cases and not c.suites:
            raise ConfigError("verify needs 'cases' and/or 'suites'", "cases")
        known = set(harness.CASES) | set(harness.UNAVAILABLE)
        for i, case in enumerate(c.cases):
            if case not in known:
                raise ConfigError(f"unknown verification case {case!r}", f"cases[{i}]")
        for i, s in enumerate(c.suites):
            if s not in SUITES:
                raise ConfigError(f"unknown suite {s!r} (one of {', '.join(SUITES)})", f"suites[{i}]")
    if c.output is OutputFormat.CSV and c.command is not Command.REGION:
        raise ConfigError("csv output is offered for region tables only", "output")
    for name in ("spectral_rel_tol", "confirm_floor", "quadrature_tol"):
        v = getattr(c.tolerances, name)
        if v is not None and not v > 0:
            raise ConfigError("tolerances must be positive", f"tolerances.{name}")


@contextlib.contextmanager
def tolerance_overrides(tol: Tolerances):
    saved = []
    try:
        for name, targets in _TOLERANCE_TARGETS.items():
            value = getattr(tol, name)
            if value is None:
                continue
            for module, attr in targets:
                saved.append((module, attr, getattr(module, attr)))
                setattr(module, attr, value)
        yield
    finally:
        for module, attr, old in reversed(saved):
            setattr(module, attr, old)


# -- execution ---------------------------------------------------------------------


@dataclass(frozen=True)
class CatalogRow:
    item: str
    family: str
    functional: FunctionalId
    expected: Status
    observed: tuple[Status, ...]
    agrees: bool


@dataclass(frozen=True)
class RunResult:
    command: Command
    verdict: StabilityVerdict | None = None
    hessians: tuple[QuadraticFormReport, ...] = ()
    reports: tuple[VerificationReport, ...] = ()
    rows: tuple[RegionRow, ...] = ()
    catalog: tuple[CatalogRow, ...] = ()
    failed_cases: tuple[tuple[str, str], ...] = ()


def execute(config: RunConfig) -> RunResult:
    with tolerance_overrides(config.tolerances):
        c = config.command
        if c is Command.CLASSIFY:
            return RunResult(c, verdict=classify(config.functional, config.product, config.auto_rescale))
        if c is Command.HESSIAN:
            return RunResult(c, hessians=tuple(hessian(config.functional, config.product, d)
                                               for d in config.directions))
        if c is Command.VERIFY:
            reports, failed = [], []
            for case in config.cases:
                try:
                    reports.append(harness.verify_case(case))
                except CurvstabError as exc:
                    failed.append((case, f"{type(exc).__name__}: {exc}"))
            if "continuation" in config.suites:
                reports.extend(harness.continuation_suite())
            if "consistency" in config.suites:
                reports.extend(harness.consistency_suite())
            return RunResult(c, reports=tuple(reports), failed_cases=tuple(failed))
        if c is Command.REGION:
            return RunResult(c, rows=tuple(region_scan(config.functional, config.grid)))
        rows = []
        for entry, observed in classifier.check_catalog():
            rows.append(CatalogRow(entry.item, entry.family, entry.functional, entry.expected,
                                   tuple(observed), all(s is entry.expected for s in observed)))
        return RunResult(c, catalog=tuple(rows))


def exit_status(config: RunConfig, result: RunResult) -> int:
    if any(r.verdict is Verdict.REFUTED for r in result.reports):
        return EXIT_REFUTED
    if config.strict and _indeterminate_only(result):
        return EXIT_INDETERMINATE
    return EXIT_OK


def _indeterminate_only(result: RunResult) -> bool:
    c = result.command
    if c is Command.CLASSIFY:
        return result.verdict.status is Status.INDETERMINATE
    if c is Command.HESSIAN:
        return bool(result.hessians) and not any(h.defined for h in result.hessians)
    if c is Command.VERIFY:
        return all(r.verdict is Verdict.INCONCLUSIVE for r in result.reports)
    if c is Command.REGION:
        return bool(result.rows) and all(r.status == Status.INDETERMINATE.value for r in result.rows)
    return False


def render(result: RunResult, fmt: OutputFormat) -> str:
    if fmt is OutputFormat.CSV:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n0", "n1", "mu_ratio", "t", "status", "detail"])
        for r in result.rows:
            writer.writerow([r.n0, r.n1, _csv_num(r.mu_ratio), _csv_num(r.t), r.status, r.detail])
        return buf.getvalue()
    record = {k: v for k, v in to_record(result).items() if v not in (None, [])}
    return dumps(record) + "\n"


def _csv_num(x: float | None) -> str:
    return "" if x is None else format(x, ".17g")


def run(config: RunConfig) -> tuple[int, str]:
    result = execute(config)
    return exit_status(config, result), render(result, config.output)


# -- entry point -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="curvstab", description=(
        "Stability of quadratic curvature functionals at products of Einstein manifolds."))
    p.add_argument("--config", default="-", help="JSON configuration file ('-' or omitted: stdin)")
    p.add_argument("--output", choices=[f.value for f in OutputFormat], help="override the config's output format")
    p.add_argument("--strict", action="store_true", help="exit 3 when every result is indeterminate")
    p.add_argument("--auto-rescale", action="store_true", help="rescale factors to a common |lambda| before classifying")
    return p


def _error(message: str, path: str, kind: str) -> str:
    return json.dumps({"error": kind, "path": path, "message": message})


def main(argv: list[str] | None = None, stdin=None, stdout=None, stderr=None) -> int:
    stdin, stdout, stderr = stdin or sys.stdin, stdout or sys.stdout, stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        if args.config == "-":
            text = stdin.read()
        else:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        print(_error(str(exc), "--config", "ConfigError"), file=stderr)
        return EXIT_CONFIG
    try:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc.msg} (line {exc.lineno})", "<root>") from None
        config = parse_config(data)
        overrides = {}
        if args.output:
            overrides["output"] = OutputFormat(args.output)
        if args.strict:
            overrides["strict"] = True
        if args.auto_rescale:
            overrides["auto_rescale"] = True
        config = replace(config, **overrides)
        _check_command(config)
        status, text = run(config)
    except ConfigError as exc:
        print(_error(exc.reason, exc.path, "ConfigError"), file=stderr)
        return EXIT_CONFIG
    except CurvstabError as exc:
        # inadmissible data surfaced during evaluation is a configuration problem
        print(_error(str(exc), "", type(exc).__name__), file=stderr)
        return EXIT_CONFIG
    stdout.write(text)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
