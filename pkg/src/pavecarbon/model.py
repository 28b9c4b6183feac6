"""Domain types shared by the footprint, PMS and sweep modules.

Everything here is a frozen value object.  Constructors are deliberately
permissive: invariants are reported by :func:`validate` (and the
``violations`` helpers) so callers can list every problem at once instead of
stopping at the first one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import TYPE_CHECKING, Mapping, Optional, Sequence

if TYPE_CHECKING:
    from pavecarbon.pms import PmsParams
    from pavecarbon.registry import FactorSet

KG_CO2EQ = "kg CO2eq"
SHARE_TOLERANCE = 1e-9


class ValidationError(ValueError):
    """Raised when an object fails its invariants; carries every violation."""

    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class DimensionError(ValueError):
    """A factor was combined with an activity of the wrong dimension."""


# ---------------------------------------------------------------------------
# Unit dimensions
# ---------------------------------------------------------------------------

class UnitDim(str, Enum):
    """Denominator of an emission factor (the numerator is always kg CO2eq)."""

    PER_SQM = "per-sqm"
    PER_SQM_CM = "per-sqm-cm"
    PER_KM = "per-km"
    PER_TKM = "per-tkm"
    PER_GB = "per-GB"
    PER_KWH = "per-kWh"
    PER_ITEM = "per-item"
    PER_YEAR = "per-year"
    DIMENSIONLESS = "dimensionless"

    @classmethod
    def parse(cls, text: str) -> "UnitDim":
        try:
            return cls(text.strip())
        except ValueError:
            raise DimensionError(f"unknown unit dimension {text!r}") from None

    @property
    def exponents(self) -> dict[str, int]:
        return dict(_DENOMINATORS[self])


# Base-unit exponents of each factor's denominator, written as the activity
# quantity the factor must be multiplied by.
_DENOMINATORS: dict[UnitDim, tuple[tuple[str, int], ...]] = {
    UnitDim.PER_SQM: (("m2", 1),),
    UnitDim.PER_SQM_CM: (("m2", 1), ("cm", 1)),
    UnitDim.PER_KM: (("km", 1),),
    UnitDim.PER_TKM: (("t", 1), ("km", 1)),
    UnitDim.PER_GB: (("GB", 1),),
    UnitDim.PER_KWH: (("kWh", 1),),
    UnitDim.PER_ITEM: (("item", 1),),
    UnitDim.PER_YEAR: (("year", 1),),
    UnitDim.DIMENSIONLESS: (),
}


def _normalise(exponents: Mapping[str, int]) -> tuple[tuple[str, int], ...]:
    return tuple(sorted((k, v) for k, v in exponents.items() if v != 0))


def compose(unit: UnitDim, activity: Mapping[str, int]) -> "UnitDim | str":
    """Multiply a factor of dimension ``unit`` by an activity quantity.

    ``activity`` maps base units to exponents, e.g. ``{"m2": 1, "cm": 1}``
    for an area times a thickness, or ``{"t": 1}`` for a payload.  Returns
    ``KG_CO2EQ`` when the activity cancels the denominator entirely, the
    resulting :class:`UnitDim` when it cancels part of it, and raises
    :class:`DimensionError` for anything else.
    """
    remaining = dict(_DENOMINATORS[unit])
    for base, power in activity.items():
        remaining[base] = remaining.get(base, 0) - power
    key = _normalise(remaining)
    if not key:
        return KG_CO2EQ
    for candidate, denom in _DENOMINATORS.items():
        if candidate is not UnitDim.DIMENSIONLESS and _normalise(dict(denom)) == key:
            return candidate
    raise DimensionError(
        f"{unit.value} x {dict(activity)} does not yield kg CO2eq or a known factor unit"
    )


def require_kg(unit: UnitDim, activity: Mapping[str, int]) -> None:
    result = compose(unit, activity)
    if result != KG_CO2EQ:
        raise DimensionError(f"{unit.value} x {dict(activity)} leaves {result.value}")


# ---------------------------------------------------------------------------
# Geometry, factors, operations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SectionGeometry:
    """A road section: carriageway length and width, analysis period, traffic."""

    length: float = 10_000.0
    width: float = 7.0
    lifespan: int = 30
    heavy_vehicles_per_day: float = 500.0

    @property
    def area(self) -> float:
        return self.length * self.width

    def violations(self) -> list[str]:
        out = []
        if not self.length > 0:
            out.append(f"geometry length must be > 0 (got {self.length})")
        if not self.width > 0:
            out.append(f"geometry width must be > 0 (got {self.width})")
        if not self.lifespan > 0:
            out.append(f"geometry lifespan must be > 0 (got {self.lifespan})")
        if self.heavy_vehicles_per_day < 0:
            out.append("heavy_vehicles_per_day must be >= 0")
        return out


@dataclass(frozen=True)
class EmissionFactor:
    id: str
    value: float
    unit: UnitDim
    source: str = ""


class OpKind(str, Enum):
    CONSTRUCTION_LAYER = "construction-layer"
    OVERLAY = "overlay"
    MILL = "mill"
    MILL_AND_FILL = "mill-and-fill"
    SURFACE_TREATMENT = "surface-treatment"
    CRACK_FILLING = "crack-filling"
    RECONSTRUCTION = "reconstruction"

    @property
    def stage(self) -> str:
        if self is OpKind.CONSTRUCTION_LAYER:
            return "construction"
        if self is OpKind.RECONSTRUCTION:
            return "reconstruction"
        return "maintenance"


@dataclass(frozen=True)
class RoadworksOp:
    """One roadworks operation applied to ``fraction`` of the section area."""

    year: int
    kind: OpKind
    factor_id: str
    thickness: float = 0.0
    fraction: float = 1.0

    def violations(self, lifespan: Optional[int] = None) -> list[str]:
        out = []
        where = f"op {self.kind.value}@{self.year} ({self.factor_id})"
        if not 0.0 <= self.fraction <= 1.0:
            out.append(f"{where}: fraction {self.fraction} outside [0, 1]")
        if self.thickness < 0:
            out.append(f"{where}: negative thickness {self.thickness}")
        if self.year < 0:
            out.append(f"{where}: negative year")
        if lifespan is not None and self.year > lifespan:
            out.append(f"{where}: year beyond lifespan {lifespan}")
        return out


class SubgradeClass(str, Enum):
    """French subgrade bearing-capacity classes (plate-test modulus EV2)."""

    PF2 = "pf2"
    PF2QS = "pf2qs"
    PF3 = "pf3"


@dataclass(frozen=True)
class SubgradeProfile:
    """Average share of the section length in each subgrade class."""

    share_pf2: float
    share_pf2qs: float
    share_pf3: float

    @classmethod
    def from_mapping(cls, shares: Mapping[str, float]) -> "SubgradeProfile":
        return cls(
            float(shares.get("pf2", 0.0)),
            float(shares.get("pf2qs", 0.0)),
            float(shares.get("pf3", 0.0)),
        )

    def share(self, cls_: SubgradeClass) -> float:
        return {
            SubgradeClass.PF2: self.share_pf2,
            SubgradeClass.PF2QS: self.share_pf2qs,
            SubgradeClass.PF3: self.share_pf3,
        }[cls_]

    def items(self) -> list[tuple[SubgradeClass, float]]:
        return [(c, self.share(c)) for c in SubgradeClass]

    def violations(self) -> list[str]:
        out = []
        for cls_, value in self.items():
            if not 0.0 <= value <= 1.0:
                out.append(f"share of {cls_.value} {value} outside [0, 1]")
        total = math.fsum(v for _, v in self.items())
        if abs(total - 1.0) > SHARE_TOLERANCE:
            out.append(f"shares sum ≠ 1 (sum = {total:.12g})")
        return out

    @property
    def is_valid(self) -> bool:
        return not self.violations()


BASE_CASE_SUBGRADE = SubgradeProfile(0.25, 0.5, 0.25)


@dataclass(frozen=True)
class FailurePoint:
    year: int
    cumulative: float


@dataclass(frozen=True)
class ReconstructionSpec:
    """How a failed share of the section is rebuilt."""

    factor_id: str
    thickness: float = 0.0


def linear_failure_schedule(
    end_fraction: float = 0.05, lifespan: int = 30, onset: int = 0, step: int = 5
) -> tuple[FailurePoint, ...]:
    """Cumulative failed share growing linearly from ``onset`` to ``end_fraction``."""
    years = list(range(onset + step, lifespan, step)) + [lifespan]
    span = lifespan - onset
    return tuple(
        FailurePoint(y, end_fraction * (y - onset) / span) for y in years
    )


@dataclass(frozen=True)
class Scenario:
    """A design-build-maintain alternative.

    ``schedules`` and ``failures`` are keyed by subgrade class.  The footprint
    of the scenario is the share-weighted mix of the per-class schedules, each
    one extended with reconstructions of the share that fails prematurely.
    """

    name: str
    geometry: SectionGeometry
    subgrade: SubgradeProfile
    schedules: Mapping[SubgradeClass, tuple[RoadworksOp, ...]]
    failures: Mapping[SubgradeClass, tuple[FailurePoint, ...]] = field(default_factory=dict)
    reconstruction: Optional[ReconstructionSpec] = None
    pms: Optional["PmsParams"] = None
    description: str = ""

    def with_subgrade(self, subgrade: SubgradeProfile) -> "Scenario":
        return replace(self, subgrade=subgrade)

    def failure_operations(self, cls_: SubgradeClass) -> tuple[RoadworksOp, ...]:
        """Reconstruction ops for the increments of the class's failure curve."""
        points = self.failures.get(cls_, ())
        if not points or self.reconstruction is None:
            return ()
        ops = []
        previous = 0.0
        for point in sorted(points, key=lambda p: p.year):
            increment = point.cumulative - previous
            previous = point.cumulative
            if increment > 0:
                ops.append(
                    RoadworksOp(
                        point.year,
                        OpKind.RECONSTRUCTION,
                        self.reconstruction.factor_id,
                        self.reconstruction.thickness,
                        increment,
                    )
                )
        return tuple(ops)

    def operations(self, cls_: SubgradeClass) -> tuple[RoadworksOp, ...]:
        """Scheduled plus failure-driven operations for one subgrade class."""
        return tuple(self.schedules.get(cls_, ())) + self.failure_operations(cls_)


def _failure_violations(
    cls_: SubgradeClass, points: Sequence[FailurePoint], lifespan: int
) -> list[str]:
    out = []
    previous = 0.0
    last_year = -1
    for point in points:
        where = f"failure curve {cls_.value} @ year {point.year}"
        if point.year <= last_year:
            out.append(f"{where}: years must be strictly increasing")
        if not 0 <= point.year <= lifespan:
            out.append(f"{where}: year outside [0, {lifespan}]")
        if not 0.0 <= point.cumulative <= 1.0:
            out.append(f"{where}: cumulative fraction {point.cumulative} outside [0, 1]")
        if point.cumulative < previous:
            out.append(f"{where}: cumulative failed fraction decreases")
        previous = max(previous, point.cumulative)
        last_year = point.year
    return out


def validate(scenario: Scenario, factors: Optional["FactorSet"] = None) -> list[str]:
    """Return every invariant violation of ``scenario`` (empty when valid).

    When ``factors`` is given, factor ids are resolved and their dimensions
    checked against the operation they price.
    """
    out = list(scenario.geometry.violations())
    out.extend(scenario.subgrade.violations())
    lifespan = scenario.geometry.lifespan
    for cls_, ops in scenario.schedules.items():
        for op in ops:
            out.extend(f"{cls_.value}: {v}" for v in op.violations(lifespan))
    for cls_, points in scenario.failures.items():
        out.extend(_failure_violations(cls_, points, lifespan))
        if points and scenario.reconstruction is None:
            out.append(f"failure curve {cls_.value} given without a reconstruction spec")
    if scenario.pms is not None:
        out.extend(f"pms: {v}" for v in scenario.pms.violations())
    if factors is not None:
        seen = set()
        for cls_ in SubgradeClass:
            for op in scenario.operations(cls_):
                if op.factor_id in seen:
                    continue
                seen.add(op.factor_id)
                if op.factor_id not in factors:
                    out.append(f"unresolvable factor id {op.factor_id!r}")
                    continue
                unit = factors[op.factor_id].unit
                if unit not in (UnitDim.PER_SQM, UnitDim.PER_SQM_CM):
                    out.append(
                        f"factor {op.factor_id!r} has unit {unit.value}; "
                        "roadworks need per-sqm or per-sqm-cm"
                    )
    return out
