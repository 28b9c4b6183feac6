"""Command-line interface.

Exit status: 0 on success, 1 when inputs fail validation (every violation is
listed on stderr), 2 on I/O or parse errors.  Output files are written
atomically, so a failed run never leaves a partial file behind.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import yaml

from pavecarbon.engine import STAGES, Scope, compare, scenario_footprint, scope_filter
from pavecarbon.model import ValidationError
from pavecarbon.pms import load_pms_params, load_published_breakdown, pms_total, reconcile_with_published
from pavecarbon.registry import FactorFileError, FactorSet, load_factor_set
from pavecarbon.report import FORMATS, atomic_write, fmt_number, fmt_sig, plot_data_rows, render
from pavecarbon.scenarios import (
    BUNDLED_SCENARIOS,
    ScenarioFileError,
    data_path,
    load_scenario,
)
from pavecarbon.sensitivity import load_vectors, make_spec, run_sweep

COMMANDS = ("pms", "footprint", "compare", "sweep", "reconcile")
BUNDLED_VECTORS = {"restricted": "vectors_restricted.csv", "extreme": "vectors_extreme.csv"}


@dataclass(frozen=True)
class RunConfig:
    command: str
    factors: Optional[str] = None
    scenarios: tuple[str, ...] = ()
    params: Optional[str] = None
    published: Optional[str] = None
    spec: Optional[str] = None
    out: Optional[str] = None
    fmt: str = "table"
    scope: str = "full"
    digits: int = 2
    threshold: float = 5.0
    provenance: bool = False
    workers: int = 1

    def violations(self) -> list[str]:
        out = []
        if self.command not in COMMANDS:
            out.append(f"unknown command {self.command!r}")
        if self.fmt not in FORMATS:
            out.append(f"unknown format {self.fmt!r}")
        if self.scope not in ("full", "service", "both"):
            out.append(f"unknown scope {self.scope!r}")
        if self.digits < 0:
            out.append("--digits must be >= 0")
        if self.threshold < 0:
            out.append("--threshold must be >= 0")
        return out


class _Failure(Exception):
    def __init__(self, status: int, messages: Sequence[str]):
        self.status = status
        self.messages = list(messages)


def _factors(config: RunConfig) -> FactorSet:
    bundled = load_factor_set(data_path("factors.csv"), "bundled")
    if config.factors is None:
        return bundled
    return bundled.updated(load_factor_set(config.factors))


def _scopes(config: RunConfig) -> tuple[Scope, ...]:
    return {"full": (Scope.FULL,), "service": (Scope.SERVICE,), "both": (Scope.FULL, Scope.SERVICE)}[config.scope]


def _provenance(config: RunConfig, label: str) -> list[str]:
    return [label] if config.provenance else []


def _scenario_paths(config: RunConfig) -> list[str]:
    return list(config.scenarios) or [str(data_path(n)) for n in BUNDLED_SCENARIOS]


def _pms_tables(config: RunConfig, reconcile_only: bool) -> str:
    params = load_pms_params(config.params or data_path("pms_params.yaml"))
    published = load_published_breakdown(config.published or data_path("published_table5.yaml"))
    computed = pms_total(params)
    rows = reconcile_with_published(computed, published, config.threshold / 100.0)
    d = config.digits
    if reconcile_only:
        headers = ["component", "computed_kg", "published_kg", "delta_kg", "ratio", "flagged"]
        body = [
            [r.component, fmt_number(r.computed, d), fmt_number(r.published, d),
             fmt_number(r.delta, d), fmt_number(r.ratio, 3), "yes" if r.flagged else "no"]
            for r in rows
        ]
    else:
        headers = ["component", "kg_co2eq", "share_pct", "published_kg", "ratio", "flagged"]
        body = []
        for r in rows:
            share = r.computed / computed.total * 100.0 if computed.total else 0.0
            body.append([r.component, fmt_number(r.computed, d), fmt_number(share, d),
                         fmt_number(r.published, d), fmt_number(r.ratio, 3), "yes" if r.flagged else "no"])
    if config.provenance:
        headers.append("provenance")
        for row in body:
            row.append("computed")
    return render(headers, body, config.fmt)


def _footprint_table(config: RunConfig) -> str:
    factors = _factors(config)
    scopes = _scopes(config)
    headers = ["scenario", "scope"] + [f"{s}_kg_per_sqm" for s in STAGES] + ["total_kg_per_sqm", "total_t"]
    headers += ["provenance"] if config.provenance else []
    body = []
    for path in _scenario_paths(config):
        b = scenario_footprint(load_scenario(path), factors)
        for scope in scopes:
            f = scope_filter(b, scope)
            body.append(
                [b.name, scope.value]
                + [fmt_number(f.per_sqm(s), config.digits) for s in STAGES]
                + [fmt_number(f.per_sqm(), config.digits), fmt_sig(f.total / 1000.0)]
                + _provenance(config, "calibrated")
            )
    return render(headers, body, config.fmt)


def _compare_table(config: RunConfig) -> str:
    factors = _factors(config)
    paths = _scenario_paths(config)
    if len(paths) < 2:
        raise _Failure(1, ["compare needs at least two scenarios"])
    headers = ["scenario", "scope", "total_t", "delta_t", "change_pct", "rank"]
    headers += ["provenance"] if config.provenance else []
    breakdowns = [scenario_footprint(load_scenario(p), factors) for p in paths]
    body = []
    for scope in _scopes(config):
        for row in compare([scope_filter(b, scope) for b in breakdowns]):
            body.append(
                [row.name, scope.value, fmt_sig(row.total_t), fmt_number(row.delta_t, config.digits),
                 fmt_number(row.change_pct, config.digits), str(row.rank)]
                + _provenance(config, "calibrated")
            )
    return render(headers, body, config.fmt)


def _sweep_table(config: RunConfig) -> str:
    spec_path = config.spec
    if spec_path in BUNDLED_VECTORS:
        spec_path = str(data_path(BUNDLED_VECTORS[spec_path]))
    if spec_path is None:
        raise _Failure(2, ["sweep needs a vector table"])
    vectors = load_vectors(spec_path)
    scenarios = [load_scenario(p) for p in _scenario_paths(config)]
    result = run_sweep(make_spec(vectors, scenarios, _scopes(config)), _factors(config), config.workers)
    headers, rows = plot_data_rows(result, config.digits, "calibrated" if config.provenance else "")
    return render(headers, rows, config.fmt)


def run(config: RunConfig, stdout=None, stderr=None) -> int:
    """Execute one command; returns the process exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    problems = config.violations()
    if problems:
        for p in problems:
            print(f"error: {p}", file=stderr)
        return 1
    try:
        if config.command in ("pms", "reconcile"):
            text = _pms_tables(config, config.command == "reconcile")
        elif config.command == "footprint":
            if not config.scenarios:
                raise _Failure(2, ["footprint needs a scenario file"])
            text = _footprint_table(config)
        elif config.command == "compare":
            text = _compare_table(config)
        else:
            text = _sweep_table(config)
        if config.out:
            atomic_write(config.out, text)
        else:
            stdout.write(text)
    except _Failure as exc:
        for m in exc.messages:
            print(f"error: {m}", file=stderr)
        return exc.status
    except ValidationError as exc:
        print("validation failed:", file=stderr)
        for v in exc.violations:
            print(f"  - {v}", file=stderr)
        return 1
    except (OSError, FactorFileError, ScenarioFileError, yaml.YAMLError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--factors", metavar="PATH", help="factor CSV overriding the bundled set")
    common.add_argument("--format", dest="fmt", choices=FORMATS, default="table")
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    common.add_argument("--digits", type=int, default=2, help="decimal places (default 2)")
    common.add_argument("--threshold", type=float, default=5.0, metavar="PCT",
                        help="reconciliation ratio threshold in percent (default 5)")
    common.add_argument("--provenance", action="store_true",
                        help="add a column labelling figures computed/published/calibrated")

    parser = argparse.ArgumentParser(prog="pavecarbon", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("pms", "reconcile"):
        p = sub.add_parser(name, parents=[common],
                           help="PMS footprint" if name == "pms" else "equations vs published PMS figures")
        p.add_argument("--params", metavar="PATH", help="PMS parameter file (YAML)")
        p.add_argument("--published", metavar="PATH", help="published breakdown (YAML)")

    p = sub.add_parser("footprint", parents=[common], help="stage breakdown of scenarios")
    p.add_argument("scenarios", nargs="+")
    p.add_argument("--scope", choices=("full", "service", "both"), default="full")

    p = sub.add_parser("compare", parents=[common], help="compare scenarios against the first")
    p.add_argument("scenarios", nargs="*", help="scenario files (default: bundled S1-S3)")
    p.add_argument("--scope", choices=("full", "service", "both"), default="full")

    p = sub.add_parser("sweep", parents=[common], help="subgrade sensitivity sweep")
    p.add_argument("spec", help="vector table (label,pf2,pf2qs,pf3) or 'restricted'/'extreme'")
    p.add_argument("--scenarios", nargs="+", default=[], metavar="PATH")
    p.add_argument("--scope", choices=("full", "service", "both"), default="both")
    p.add_argument("--workers", type=int, default=1)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    config = RunConfig(
        command=args.command,
        factors=args.factors,
        scenarios=tuple(getattr(args, "scenarios", ()) or ()),
        params=getattr(args, "params", None),
        published=getattr(args, "published", None),
        spec=getattr(args, "spec", None),
        out=args.out,
        fmt=args.fmt,
        scope=getattr(args, "scope", "full"),
        digits=args.digits,
        threshold=args.threshold,
        provenance=args.provenance,
        workers=getattr(args, "workers", 1),
    )
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
