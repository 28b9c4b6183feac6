"""Direct footprint of a Pavement Management System.

Three use cases are priced: collecting condition data with an instrumented
truck, storing it in the PMS database, and planning maintenance on computing
stations (local work plus data transfer).  Everything is evaluated from the
defining equations; published figures are only used for reconciliation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping, Optional, Union

import yaml

from pavecarbon.model import ValidationError
from pavecarbon.registry import load_station_profile, station_factor

COMPONENTS = ("data_collection", "storage", "planning")


@dataclass(frozen=True)
class PmsParams:
    """Foreground and background inputs of the PMS footprint.

    Units: ``section_length`` and ``l_t`` in km, ``maintenance_period`` and
    ``delta_hard`` in years, ``f_m`` in kg CO2eq/km, ``i_hard`` in kg CO2eq,
    ``i_yrun`` in kg CO2eq/year, ``k_t`` in GB per operation, year and km,
    ``f_transfer`` in kg CO2eq/GB, ``f_adv`` and ``f_s`` in kg CO2eq per
    operation, year and km.  ``directions`` multiplies the monitored length.
    """

    n_round: float = 1.0
    maintenance_period: float = 30.0
    section_length: float = 10.0
    f_m: float = 0.92
    l_t: float = 2737.0
    k_database: float = 1.0
    i_hard: float = 167.0
    delta_hard: float = 5.0
    i_yrun: float = 1165.0
    n_operation: float = 1.0 / 15.0
    k_t: float = 3.33e-3
    f_transfer: float = 0.10782
    f_adv: float = 0.0
    f_s: float = 0.0
    directions: float = 1.0

    def violations(self) -> list[str]:
        out = [
            f"{f.name} must be >= 0 (got {getattr(self, f.name)})"
            for f in fields(self)
            if getattr(self, f.name) < 0
        ]
        if self.delta_hard <= 0:
            out.append("delta_hard must be > 0")
        if self.l_t <= 0:
            out.append("l_t must be > 0")
        if self.k_database > 1:
            out.append("k_database must be <= 1")
        return out

    def replace(self, **changes: float) -> "PmsParams":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return PmsParams(**values)


@dataclass(frozen=True)
class PmsBreakdown:
    """kg CO2eq per PMS use case, with storage and planning sub-splits.

    Computed breakdowns satisfy ``storage == storage_hardware +
    storage_running`` and ``planning == planning_local + planning_transfer``
    exactly; published ones keep the printed (rounded) figures verbatim.
    """

    data_collection: float
    storage: float
    planning: float
    storage_hardware: float = 0.0
    storage_running: float = 0.0
    planning_local: float = 0.0
    planning_transfer: float = 0.0

    @classmethod
    def from_parts(
        cls,
        data_collection: float,
        storage_hardware: float,
        storage_running: float,
        planning_local: float,
        planning_transfer: float,
    ) -> "PmsBreakdown":
        return cls(
            data_collection,
            storage_hardware + storage_running,
            planning_local + planning_transfer,
            storage_hardware,
            storage_running,
            planning_local,
            planning_transfer,
        )

    @property
    def total(self) -> float:
        return self.data_collection + self.storage + self.planning

    def rows(self) -> list[tuple[str, float]]:
        return [
            ("total", self.total),
            ("data_collection", self.data_collection),
            ("storage", self.storage),
            ("storage_hardware", self.storage_hardware),
            ("storage_running", self.storage_running),
            ("planning", self.planning),
            ("planning_local", self.planning_local),
            ("planning_transfer", self.planning_transfer),
        ]

    def share(self, component: str) -> float:
        return getattr(self, component) / self.total if self.total else 0.0


def _check(p: PmsParams) -> None:
    problems = p.violations()
    if problems:
        raise ValidationError(problems)


def data_collection_gwp(p: PmsParams) -> float:
    """Monitoring rounds x years x km monitored x truck factor."""
    _check(p)
    return p.n_round * (p.maintenance_period * p.section_length * p.directions * p.f_m)


def storage_gwp(p: PmsParams) -> tuple[float, float]:
    """(hardware, running) share of the database footprint for the section.

    The database cost is allocated by the km-years the section occupies
    against the total network length recorded in the database.
    """
    if p.l_t == 0 or p.delta_hard == 0:
        raise ZeroDivisionError("l_t and delta_hard must be non-zero")
    _check(p)
    allocation = p.maintenance_period * p.section_length / p.l_t * p.k_database
    return allocation * (p.i_hard / p.delta_hard), allocation * p.i_yrun


def planning_gwp(p: PmsParams) -> tuple[float, float]:
    """(local, transfer) footprint of maintenance planning work."""
    _check(p)
    base = p.n_operation * p.maintenance_period * p.section_length
    return base * (p.f_adv + p.f_s), base * (p.k_t * p.f_transfer)


def pms_total(p: PmsParams) -> PmsBreakdown:
    collection = data_collection_gwp(p)
    hardware, running = storage_gwp(p)
    local, transfer = planning_gwp(p)
    return PmsBreakdown.from_parts(collection, hardware, running, local, transfer)


# ---------------------------------------------------------------------------
# Reconciliation against published figures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReconciliationRow:
    component: str
    computed: float
    published: float
    delta: float
    ratio: float
    flagged: bool


def reconcile_with_published(
    computed: PmsBreakdown, published: PmsBreakdown, threshold: float = 0.05
) -> list[ReconciliationRow]:
    """Compare each component; flag those whose ratio strays beyond ``threshold``.

    ``threshold`` is a fraction (0.05 = 5 %).  A zero published value gives a
    ratio of 1 when the computed value is also zero, ``inf`` otherwise.
    """
    published_rows = dict(published.rows())
    out = []
    for name, value in computed.rows():
        ref = published_rows[name]
        if ref == 0:
            ratio = 1.0 if value == 0 else math.inf
        else:
            ratio = value / ref
        out.append(
            ReconciliationRow(name, value, ref, value - ref, ratio, abs(ratio - 1.0) > threshold)
        )
    return out


# ---------------------------------------------------------------------------
# File loading
# ---------------------------------------------------------------------------

def _number(value: Any, key: str) -> float:
    if isinstance(value, bool):
        raise ValueError(f"{key}: expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError):
            pass
    raise ValueError(f"{key}: expected a number or fraction, got {value!r}")


_ALIASES = {"p_m": "maintenance_period", "l_section": "section_length"}


def pms_params_from_mapping(data: Mapping[str, Any], base_dir: Optional[Path] = None) -> PmsParams:
    """Build :class:`PmsParams` from symbol-named keys.

    Station factors come either directly (``f_adv``, ``f_s``) or from station
    profile files listed under ``stations: {advanced: ..., standard: ...}``
    combined with ``f_elec``.
    """
    known = {f.name for f in fields(PmsParams)}
    values: dict[str, float] = {}
    stations = data.get("stations") or {}
    f_elec = data.get("f_elec")
    for key, raw in data.items():
        if key in ("stations", "f_elec", "name", "source"):
            continue
        name = _ALIASES.get(key, key)
        if name not in known:
            raise ValueError(f"unknown PMS parameter {key!r}")
        values[name] = _number(raw, key)
    for key, target in (("advanced", "f_adv"), ("standard", "f_s")):
        if key not in stations:
            continue
        if target in values:
            raise ValueError(f"{target} given both directly and via a station profile")
        if f_elec is None:
            raise ValueError("station profiles need f_elec")
        path = Path(stations[key])
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        values[target] = station_factor(load_station_profile(path), _number(f_elec, "f_elec"))
    return PmsParams(**values)


def load_pms_params(path: Union[str, Path]) -> PmsParams:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise ValueError(f"{path}: PMS parameters must be a mapping")
    return pms_params_from_mapping(data, path.parent)


def load_published_breakdown(path: Union[str, Path]) -> PmsBreakdown:
    """Read printed component values (kg CO2eq) from a YAML mapping."""
    with open(path, encoding="utf-8") as fh:
        data = yaml.safe_load(fh) or {}
    names = {f.name for f in fields(PmsBreakdown)}
    unknown = set(data) - names - {"total", "source", "note"}
    if unknown:
        raise ValueError(f"{path}: unknown keys {sorted(unknown)}")
    return PmsBreakdown(**{k: _number(v, k) for k, v in data.items() if k in names})
