"""Emission-factor sets and the composite factors derived from them."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Optional, TextIO, Union

import yaml

from pavecarbon.model import DimensionError, EmissionFactor, UnitDim

FACTOR_COLUMNS = ("id", "value", "unit", "source")
HOURS_PER_DAY = 24.0


class FactorFileError(ValueError):
    """A factor file row could not be parsed or validated."""

    def __init__(self, message: str, row: Optional[int] = None):
        self.row = row
        super().__init__(f"row {row}: {message}" if row is not None else message)


@dataclass(frozen=True)
class FactorSet:
    """Immutable mapping of factor id to :class:`EmissionFactor`."""

    factors: Mapping[str, EmissionFactor] = field(default_factory=dict)
    name: str = ""
    provenance: str = ""

    def __contains__(self, factor_id: object) -> bool:
        return factor_id in self.factors

    def __getitem__(self, factor_id: str) -> EmissionFactor:
        try:
            return self.factors[factor_id]
        except KeyError:
            raise KeyError(f"unknown emission factor {factor_id!r}") from None

    def __iter__(self) -> Iterator[EmissionFactor]:
        return iter(self.factors.values())

    def __len__(self) -> int:
        return len(self.factors)

    def value(self, factor_id: str, unit: Optional[UnitDim] = None) -> float:
        ef = self[factor_id]
        if unit is not None and ef.unit is not unit:
            raise DimensionError(
                f"factor {factor_id!r} is {ef.unit.value}, expected {unit.value}"
            )
        return ef.value

    def scaled(self, k: float, ids: Optional[Iterable[str]] = None) -> "FactorSet":
        """Copy with every factor (or only ``ids``) multiplied by ``k``."""
        targets = set(self.factors) if ids is None else set(ids)
        return FactorSet(
            {
                fid: EmissionFactor(ef.id, ef.value * k if fid in targets else ef.value, ef.unit, ef.source)
                for fid, ef in self.factors.items()
            },
            self.name,
            self.provenance,
        )

    def updated(self, other: "FactorSet") -> "FactorSet":
        """Copy with the factors of ``other`` overriding ours."""
        merged = dict(self.factors)
        merged.update(other.factors)
        return FactorSet(merged, other.name or self.name, self.provenance)


def load_factor_set(source: Union[TextIO, str, Path], name: str = "") -> FactorSet:
    """Parse a ``id,value,unit,source`` CSV stream into a :class:`FactorSet`.

    Blank lines and lines starting with ``#`` are ignored.  An empty stream
    gives an empty set.  Row numbers in errors are 1-based file lines.
    """
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8", newline="") as fh:
            return load_factor_set(fh, name or Path(source).stem)

    factors: dict[str, EmissionFactor] = {}
    reader = csv.reader(source, skipinitialspace=True)
    header_seen = False
    for lineno, row in enumerate(reader, start=1):
        if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
            continue
        cells = [c.strip() for c in row]
        if not header_seen and tuple(c.lower() for c in cells[:4]) == FACTOR_COLUMNS:
            header_seen = True
            continue
        header_seen = True
        if len(cells) < 3:
            raise FactorFileError(f"expected {len(FACTOR_COLUMNS)} columns, got {len(cells)}", lineno)
        fid, raw_value, raw_unit = cells[:3]
        src = ",".join(cells[3:]).strip()
        if not fid:
            raise FactorFileError("empty factor id", lineno)
        try:
            value = float(raw_value)
        except ValueError:
            raise FactorFileError(f"value {raw_value!r} is not a number", lineno) from None
        if value != value or value in (float("inf"), float("-inf")):
            raise FactorFileError(f"value {raw_value!r} is not finite", lineno)
        if value < 0:
            raise FactorFileError(f"negative value {raw_value} for {fid!r}", lineno)
        try:
            unit = UnitDim.parse(raw_unit)
        except DimensionError as exc:
            raise FactorFileError(str(exc), lineno) from None
        if fid in factors:
            raise FactorFileError(f"duplicate factor id {fid!r}", lineno)
        factors[fid] = EmissionFactor(fid, value, unit, src)
    return FactorSet(factors, name)


def dump_factor_set(factors: FactorSet) -> str:
    """Serialise to the CSV layout read by :func:`load_factor_set`."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(FACTOR_COLUMNS)
    for ef in factors:
        writer.writerow([ef.id, repr(ef.value), ef.unit.value, ef.source])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Derived factors
# ---------------------------------------------------------------------------

def _nonnegative(**values: float) -> None:
    for name, value in values.items():
        if value < 0:
            raise ValueError(f"{name} must be >= 0 (got {value})")


def derive_vehicle_km_factor(freight_factor: float, avg_load: float) -> float:
    """kg CO2eq per vehicle-km from a per-tonne-km freight factor and payload (t)."""
    _nonnegative(freight_factor=freight_factor, avg_load=avg_load)
    return freight_factor * avg_load


def derive_transfer_factor(energy_intensity: float, grid_factor: float) -> float:
    """kg CO2eq per GB transferred from network kWh/GB and a grid kg/kWh factor."""
    _nonnegative(energy_intensity=energy_intensity, grid_factor=grid_factor)
    return energy_intensity * grid_factor


@dataclass(frozen=True)
class DeviceLine:
    name: str
    power_active: float
    hours_active: float
    power_idle: float = 0.0
    hours_idle: float = 0.0
    count: int = 1

    def violations(self) -> list[str]:
        out = []
        for attr in ("power_active", "hours_active", "power_idle", "hours_idle", "count"):
            if getattr(self, attr) < 0:
                out.append(f"device {self.name}: {attr} must be >= 0")
        if self.hours_active + self.hours_idle > HOURS_PER_DAY:
            out.append(
                f"device {self.name}: {self.hours_active} + {self.hours_idle} hours exceed 24 per day"
            )
        return out

    @property
    def daily_wh(self) -> float:
        return self.count * (self.power_active * self.hours_active + self.power_idle * self.hours_idle)


@dataclass(frozen=True)
class StationProfile:
    """A computing workstation used for maintenance planning.

    ``depreciation`` is in days and ``usage_coefficient`` in days of use per
    planning operation, per km and per year.
    """

    name: str
    devices: tuple[DeviceLine, ...] = ()
    embodied_gwp: float = 0.0
    depreciation: float = 1825.0
    usage_coefficient: float = 0.0

    def violations(self) -> list[str]:
        out = [v for d in self.devices for v in d.violations()]
        for attr in ("embodied_gwp", "depreciation", "usage_coefficient"):
            if getattr(self, attr) < 0:
                out.append(f"station {self.name}: {attr} must be >= 0")
        return out


def weighted_power(profile: StationProfile) -> float:
    """Daily-averaged electrical draw of a station, in W."""
    problems = [v for d in profile.devices for v in d.violations()]
    if problems:
        raise ValueError("; ".join(problems))
    return sum(d.daily_wh for d in profile.devices) / HOURS_PER_DAY


def station_factor(profile: StationProfile, grid_factor: float) -> float:
    """kg CO2eq per planning operation, per km and per year for one station.

    Amortised manufacturing per day of use plus one full day of electricity
    at the weighted power (W converted to kW).
    """
    if profile.depreciation == 0:
        raise ZeroDivisionError(f"station {profile.name}: zero depreciation period")
    _nonnegative(grid_factor=grid_factor)
    problems = profile.violations()
    if problems:
        raise ValueError("; ".join(problems))
    daily_kwh = HOURS_PER_DAY * weighted_power(profile) / 1000.0
    per_day = profile.embodied_gwp / profile.depreciation + daily_kwh * grid_factor
    return profile.usage_coefficient * per_day


def station_from_mapping(data: Mapping) -> StationProfile:
    devices = tuple(
        DeviceLine(
            name=str(d.get("name", f"device{i}")),
            power_active=float(d.get("power_active_w", 0.0)),
            hours_active=float(d.get("hours_active", 0.0)),
            power_idle=float(d.get("power_idle_w", 0.0)),
            hours_idle=float(d.get("hours_idle", 0.0)),
            count=int(d.get("count", 1)),
        )
        for i, d in enumerate(data.get("devices") or [])
    )
    return StationProfile(
        name=str(data.get("name", "")),
        devices=devices,
        embodied_gwp=float(data.get("embodied_gwp", 0.0)),
        depreciation=float(data.get("depreciation_days", 1825.0)),
        usage_coefficient=float(data.get("usage_coefficient", 0.0)),
    )


def load_station_profile(path: Union[str, Path]) -> StationProfile:
    with open(path, encoding="utf-8") as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise ValueError(f"{path}: station profile must be a mapping")
    return station_from_mapping(data)
