"""Sweeps over subgrade-evolution vectors."""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, TextIO, Union

from pavecarbon.engine import Scope, saving_pct, scenario_footprint, scope_filter
from pavecarbon.model import Scenario, SubgradeClass, SubgradeProfile, ValidationError
from pavecarbon.registry import FactorSet

Pair = tuple[str, str]


@dataclass(frozen=True)
class SweepSpec:
    """Vectors to test, the scenario templates and the scopes to report.

    ``pairs`` are (candidate, baseline) scenario names; by default the last
    template is compared with each of the others.
    """

    vectors: tuple[tuple[str, SubgradeProfile], ...]
    scenarios: tuple[Scenario, ...]
    scopes: tuple[Scope, ...] = (Scope.FULL, Scope.SERVICE)
    pairs: Optional[tuple[Pair, ...]] = None

    def resolved_pairs(self) -> tuple[Pair, ...]:
        if self.pairs is not None:
            return self.pairs
        names = [s.name for s in self.scenarios]
        return tuple((names[-1], other) for other in names[:-1])

    def violations(self) -> list[str]:
        out = []
        if not self.vectors:
            out.append("sweep needs at least one vector")
        labels = [label for label, _ in self.vectors]
        if len(set(labels)) != len(labels):
            out.append("vector labels must be unique")
        for label, profile in self.vectors:
            out.extend(f"vector {label}: {v}" for v in profile.violations())
        names = [s.name for s in self.scenarios]
        if len(set(names)) != len(names):
            out.append("scenario names must be unique")
        for cand, base in self.resolved_pairs():
            for n in (cand, base):
                if n not in names:
                    out.append(f"pair references unknown scenario {n!r}")
        return out


@dataclass(frozen=True)
class SweepResult:
    """Totals per (vector, scenario, scope) and savings per (vector, pair, scope).

    Savings are positive when the candidate emits less than the baseline.
    """

    labels: tuple[str, ...]
    scenario_names: tuple[str, ...]
    scopes: tuple[Scope, ...]
    pairs: tuple[Pair, ...]
    vectors: dict[str, SubgradeProfile] = field(default_factory=dict)
    totals: dict[tuple[str, str, Scope], float] = field(default_factory=dict)
    savings: dict[tuple[str, Pair, Scope], float] = field(default_factory=dict)

    def saving_series(self, pair: Pair, scope: Scope = Scope.FULL,
                      labels: Optional[Sequence[str]] = None) -> list[float]:
        return [self.savings[(label, pair, scope)] for label in (labels or self.labels)]

    def max_saving(self, pair: Pair, scope: Scope = Scope.FULL) -> float:
        if scope not in self.scopes:
            raise KeyError(f"scope {scope.value} not in sweep result")
        return max(self.saving_series(pair, scope))

    def extrema(self) -> dict[tuple[Pair, Scope], tuple[str, float]]:
        """Label and value of the largest saving per pair and scope."""
        out = {}
        for pair in self.pairs:
            for scope in self.scopes:
                series = self.saving_series(pair, scope)
                best = max(range(len(series)), key=lambda i: (series[i], -i))
                out[(pair, scope)] = (self.labels[best], series[best])
        return out


def _evaluate(scenario: Scenario, profile: SubgradeProfile, factors: FactorSet,
              scopes: Sequence[Scope]) -> dict[Scope, float]:
    b = scenario_footprint(scenario.with_subgrade(profile), factors)
    return {scope: scope_filter(b, scope).total for scope in scopes}


def run_sweep(spec: SweepSpec, factors: FactorSet, workers: int = 1) -> SweepResult:
    """Evaluate every scenario template on every vector.

    With ``workers > 1`` vectors are evaluated on a thread pool; results are
    assembled in label order and are identical to a sequential run.
    """
    problems = spec.violations()
    if problems:
        raise ValidationError(problems)
    pairs = spec.resolved_pairs()

    def one_vector(item: tuple[str, SubgradeProfile]) -> dict[str, dict[Scope, float]]:
        _, profile = item
        return {s.name: _evaluate(s, profile, factors, spec.scopes) for s in spec.scenarios}

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_vector = list(pool.map(one_vector, spec.vectors))
    else:
        per_vector = [one_vector(item) for item in spec.vectors]

    totals: dict[tuple[str, str, Scope], float] = {}
    savings: dict[tuple[str, Pair, Scope], float] = {}
    for (label, _), values in zip(spec.vectors, per_vector):
        for name, by_scope in values.items():
            for scope, total in by_scope.items():
                totals[(label, name, scope)] = total
        for cand, base in pairs:
            for scope in spec.scopes:
                savings[(label, (cand, base), scope)] = saving_pct(
                    values[cand][scope], values[base][scope]
                )
    return SweepResult(
        labels=tuple(label for label, _ in spec.vectors),
        scenario_names=tuple(s.name for s in spec.scenarios),
        scopes=tuple(spec.scopes),
        pairs=pairs,
        vectors=dict(spec.vectors),
        totals=totals,
        savings=savings,
    )


@dataclass(frozen=True)
class TrendReport:
    labels: tuple[str, ...]
    axis_values: tuple[float, ...]
    savings: tuple[float, ...]
    nondecreasing: bool
    deterioration_labels: tuple[str, ...]
    deterioration_max_abs: float
    equivalent_on_deterioration: bool


def trend_check(
    r: SweepResult,
    axis: SubgradeClass = SubgradeClass.PF3,
    labels: Optional[Sequence[str]] = None,
    pair: Optional[Pair] = None,
    scope: Scope = Scope.FULL,
    threshold: float = 1.0,
    tolerance: float = 1e-9,
) -> TrendReport:
    """Check how savings evolve as the share of ``axis`` grows.

    ``labels`` (default: all, in result order) must be ordered by
    nondecreasing ``axis`` share.  Deterioration vectors are those with no
    PF3 and some PF2; on them the savings are expected to stay within
    ``threshold`` percentage points of zero.
    """
    labels = tuple(labels or r.labels)
    pair = pair or _default_pair(r)
    axis_values = tuple(r.vectors[label].share(axis) for label in labels)
    if any(b < a - tolerance for a, b in zip(axis_values, axis_values[1:])):
        raise ValueError(f"labels are not ordered by {axis.value} share")
    series = tuple(r.savings[(label, pair, scope)] for label in labels)
    nondecreasing = all(b >= a - tolerance for a, b in zip(series, series[1:]))
    deteriorating = tuple(
        label for label in labels
        if r.vectors[label].share_pf3 == 0 and r.vectors[label].share_pf2 > 0
    )
    worst = max((abs(r.savings[(label, pair, scope)]) for label in deteriorating), default=0.0)
    return TrendReport(labels, axis_values, series, nondecreasing, deteriorating, worst, worst < threshold)


def _default_pair(r: SweepResult) -> Pair:
    names = r.scenario_names
    if len(names) < 2:
        raise ValueError("need two scenarios for a saving pair")
    return (names[-1], names[-2])


def service_life_extrema(r: SweepResult, pairs: Optional[Sequence[Pair]] = None) -> tuple[float, ...]:
    """Largest service-life saving per pair.

    Default pairs are (last vs second-to-last, last vs first), i.e.
    (S3 vs S2, S3 vs S1) for the bundled templates.
    """
    if Scope.SERVICE not in r.scopes:
        raise KeyError("sweep result has no service-life scope")
    if pairs is None:
        names = r.scenario_names
        pairs = [(names[-1], names[-2]), (names[-1], names[0])]
    return tuple(r.max_saving(tuple(p), Scope.SERVICE) for p in pairs)


# ---------------------------------------------------------------------------
# Vector files
# ---------------------------------------------------------------------------

def load_vectors(source: Union[TextIO, str, Path]) -> tuple[tuple[str, SubgradeProfile], ...]:
    """Read a ``label,pf2,pf2qs,pf3`` table."""
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8", newline="") as fh:
            return load_vectors(fh)
    reader = csv.DictReader(row for row in source if row.strip() and not row.startswith("#"))
    missing = {"label", "pf2", "pf2qs", "pf3"} - set(reader.fieldnames or ())
    if missing:
        raise ValueError(f"vector table misses columns {sorted(missing)}")
    out = []
    for lineno, row in enumerate(reader, start=2):
        try:
            profile = SubgradeProfile(float(row["pf2"]), float(row["pf2qs"]), float(row["pf3"]))
        except (TypeError, ValueError):
            raise ValueError(f"row {lineno}: shares must be numbers") from None
        out.append((row["label"].strip(), profile))
    return tuple(out)


def make_spec(vectors: Iterable[tuple[str, SubgradeProfile]], scenarios: Sequence[Scenario],
              scopes: Sequence[Scope] = (Scope.FULL, Scope.SERVICE)) -> SweepSpec:
    return SweepSpec(tuple(vectors), tuple(scenarios), tuple(scopes))
