"""Life-cycle footprint of a built and maintained pavement section."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Sequence

from pavecarbon.model import (
    DimensionError,
    RoadworksOp,
    Scenario,
    SectionGeometry,
    SubgradeClass,
    UnitDim,
    ValidationError,
    require_kg,
    validate,
)
from pavecarbon.pms import pms_total
from pavecarbon.registry import FactorSet

STAGES = ("construction", "maintenance", "reconstruction", "pms")


class Scope(str, Enum):
    FULL = "full-lifecycle"
    SERVICE = "service-life"

    @classmethod
    def parse(cls, text: str) -> "Scope":
        aliases = {"full": cls.FULL, "service": cls.SERVICE}
        return aliases.get(text) or cls(text)


@dataclass(frozen=True)
class StageBreakdown:
    """kg CO2eq per life-cycle stage for one section."""

    construction: float = 0.0
    maintenance: float = 0.0
    reconstruction: float = 0.0
    pms: float = 0.0
    geometry: SectionGeometry = SectionGeometry()
    name: str = ""

    @property
    def total(self) -> float:
        return self.construction + self.maintenance + self.reconstruction + self.pms

    def stages(self) -> dict[str, float]:
        return {s: getattr(self, s) for s in STAGES}

    def per_sqm(self, stage: str = "total") -> float:
        return getattr(self, stage) / self.geometry.area

    def scaled(self, k: float) -> "StageBreakdown":
        return replace(self, **{s: getattr(self, s) * k for s in STAGES})


def operation_gwp(op: RoadworksOp, geom: SectionGeometry, factors: FactorSet) -> float:
    """kg CO2eq of one operation over its share of the section area."""
    ef = factors[op.factor_id]
    area = geom.width * geom.length * op.fraction
    if ef.unit is UnitDim.PER_SQM_CM:
        require_kg(ef.unit, {"m2": 1, "cm": 1})
        return area * op.thickness * ef.value
    if ef.unit is UnitDim.PER_SQM:
        require_kg(ef.unit, {"m2": 1})
        return area * ef.value
    raise DimensionError(
        f"factor {op.factor_id!r} is {ef.unit.value}; roadworks need per-sqm or per-sqm-cm"
    )


def stage_contributions(scenario: Scenario, factors: FactorSet) -> dict[str, list[float]]:
    """Share-weighted kg CO2eq of every operation, grouped by stage."""
    parts: dict[str, list[float]] = {s: [] for s in STAGES}
    for cls_ in SubgradeClass:
        share = scenario.subgrade.share(cls_)
        if share == 0:
            continue
        for op in scenario.operations(cls_):
            parts[op.kind.stage].append(share * operation_gwp(op, scenario.geometry, factors))
    if scenario.pms is not None:
        parts["pms"].append(pms_total(scenario.pms).total)
    return parts


def scenario_footprint(scenario: Scenario, factors: FactorSet) -> StageBreakdown:
    """Stage breakdown of a scenario, mixing per-class schedules by subgrade share.

    Raises :class:`ValidationError` listing every violation when the scenario
    is invalid or references unknown or mis-dimensioned factors.
    """
    problems = validate(scenario, factors)
    if problems:
        raise ValidationError(problems)
    parts = stage_contributions(scenario, factors)
    return StageBreakdown(
        **{s: math.fsum(v) for s, v in parts.items()},
        geometry=scenario.geometry,
        name=scenario.name,
    )


def scope_filter(b: StageBreakdown, scope: "Scope | str") -> StageBreakdown:
    """Service-life scope drops original construction; full scope is identity."""
    scope = Scope.parse(scope) if isinstance(scope, str) else scope
    if scope is Scope.FULL:
        return b
    return replace(b, construction=0.0)


@dataclass(frozen=True)
class SavingsRow:
    name: str
    total_kg: float
    delta_kg: float
    change_pct: float
    rank: int

    @property
    def total_t(self) -> float:
        return self.total_kg / 1000.0

    @property
    def delta_t(self) -> float:
        return self.delta_kg / 1000.0


def saving_pct(candidate: float, baseline: float) -> float:
    """Percentage by which ``candidate`` emits less than ``baseline``."""
    if baseline == 0:
        return 0.0 if candidate == 0 else -math.inf
    return (baseline - candidate) / baseline * 100.0


def compare(
    breakdowns: Sequence[StageBreakdown],
    baseline: int = 0,
    names: Optional[Sequence[str]] = None,
) -> list[SavingsRow]:
    """Totals relative to ``breakdowns[baseline]``.

    ``delta_kg`` and ``change_pct`` are negative when a scenario emits less
    than the baseline.  ``rank`` 1 is the lowest total; ties share order of
    appearance.
    """
    if len(breakdowns) < 2:
        raise ValueError("compare needs at least two breakdowns")
    base = breakdowns[baseline]
    for b in breakdowns:
        if b.geometry != base.geometry:
            raise ValueError(
                f"geometry mismatch: {b.name or '?'} differs from baseline {base.name or '?'}"
            )
    names = list(names) if names is not None else [b.name or f"#{i}" for i, b in enumerate(breakdowns)]
    order = sorted(range(len(breakdowns)), key=lambda i: (breakdowns[i].total, i))
    ranks = {i: r + 1 for r, i in enumerate(order)}
    rows = []
    for i, b in enumerate(breakdowns):
        delta = b.total - base.total
        pct = -saving_pct(b.total, base.total) if base.total else 0.0
        rows.append(SavingsRow(names[i], b.total, delta, pct + 0.0, ranks[i]))
    return rows
