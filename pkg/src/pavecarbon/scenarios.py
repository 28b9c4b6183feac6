"""Reading scenario files and the bundled datasets.

A scenario file is YAML::

    name: S2
    geometry: {length: 10000, width: 7, lifespan: 30, heavy_vehicles_per_day: 500}
    subgrade: {pf2: 0.25, pf2qs: 0.5, pf3: 0.25}
    reconstruction: {factor_id: full_depth_reconstruction, thickness: 27}
    operations:
      common:                      # copied into every subgrade class
        - [0, construction-layer, gb3_road_base, 10, 1.0]
      pf3:
        - [18, overlay, bbsg_semi_coarse, 3, 1.0]
    failures:
      pf2: [[10, 0.02], [30, 0.12]]   # (year, cumulative failed share)
    pms: pms_params.yaml           # optional, relative to this file

Operation rows are ``[year, kind, factor_id, thickness_cm, fraction]``.
The ``common`` / ``all`` keys apply to every class.
"""

from __future__ import annotations

from dataclasses import replace
from importlib import resources
from pathlib import Path
from typing import Any, Mapping, Optional, Union

import yaml

from pavecarbon.model import (
    FailurePoint,
    OpKind,
    ReconstructionSpec,
    RoadworksOp,
    Scenario,
    SectionGeometry,
    SubgradeClass,
    SubgradeProfile,
    BASE_CASE_SUBGRADE,
)
from pavecarbon.pms import (
    PmsBreakdown,
    PmsParams,
    load_pms_params,
    load_published_breakdown,
    pms_params_from_mapping,
)
from pavecarbon.registry import FactorSet, StationProfile, load_factor_set, load_station_profile

_ALL_KEYS = ("common", "all")
_KEYS = {"name", "description", "geometry", "subgrade", "reconstruction", "operations", "failures", "pms"}


class ScenarioFileError(ValueError):
    pass


def _classes(key: str) -> list[SubgradeClass]:
    if key in _ALL_KEYS:
        return list(SubgradeClass)
    try:
        return [SubgradeClass(key.lower())]
    except ValueError:
        raise ScenarioFileError(f"unknown subgrade class {key!r}") from None


def _op(row: Any, where: str) -> RoadworksOp:
    if isinstance(row, Mapping):
        row = [row.get("year"), row.get("kind"), row.get("factor_id"),
               row.get("thickness", row.get("thickness_cm", 0.0)), row.get("fraction", 1.0)]
    if not isinstance(row, (list, tuple)) or not 3 <= len(row) <= 5:
        raise ScenarioFileError(f"{where}: operation rows are [year, kind, factor_id, thickness_cm, fraction]")
    row = list(row) + [0.0, 1.0][len(row) - 3:]
    year, kind, factor_id, thickness, fraction = row
    try:
        return RoadworksOp(int(year), OpKind(str(kind)), str(factor_id), float(thickness), float(fraction))
    except (TypeError, ValueError) as exc:
        raise ScenarioFileError(f"{where}: {exc}") from None


def scenario_from_mapping(data: Mapping[str, Any], base_dir: Optional[Path] = None) -> Scenario:
    if not isinstance(data, Mapping):
        raise ScenarioFileError("scenario file must be a mapping")
    unknown = set(data) - _KEYS
    if unknown:
        raise ScenarioFileError(f"unknown scenario keys {sorted(unknown)}")
    geom = data.get("geometry") or {}
    try:
        geometry = SectionGeometry(
            length=float(geom.get("length", 10_000.0)),
            width=float(geom.get("width", 7.0)),
            lifespan=int(geom.get("lifespan", 30)),
            heavy_vehicles_per_day=float(geom.get("heavy_vehicles_per_day", 500.0)),
        )
        subgrade = (
            SubgradeProfile.from_mapping(data["subgrade"]) if "subgrade" in data else BASE_CASE_SUBGRADE
        )
    except (TypeError, ValueError, AttributeError) as exc:
        raise ScenarioFileError(f"geometry/subgrade: {exc}") from None

    schedules: dict[SubgradeClass, list[RoadworksOp]] = {c: [] for c in SubgradeClass}
    for key, rows in (data.get("operations") or {}).items():
        for i, row in enumerate(rows or []):
            op = _op(row, f"operations.{key}[{i}]")
            for cls_ in _classes(key):
                schedules[cls_].append(op)

    failures: dict[SubgradeClass, tuple[FailurePoint, ...]] = {}
    for key, rows in (data.get("failures") or {}).items():
        try:
            points = tuple(FailurePoint(int(y), float(f)) for y, f in rows or [])
        except (TypeError, ValueError) as exc:
            raise ScenarioFileError(f"failures.{key}: {exc}") from None
        for cls_ in _classes(key):
            failures[cls_] = points

    recon = data.get("reconstruction")
    reconstruction = None
    if recon:
        reconstruction = ReconstructionSpec(
            str(recon["factor_id"]), float(recon.get("thickness", recon.get("thickness_cm", 0.0)))
        )

    pms = None
    if data.get("pms"):
        ref = data["pms"]
        if isinstance(ref, Mapping):
            pms = pms_params_from_mapping(ref, base_dir)
        else:
            path = Path(ref)
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            pms = load_pms_params(path)

    return Scenario(
        name=str(data.get("name", "")),
        geometry=geometry,
        subgrade=subgrade,
        schedules={c: tuple(ops) for c, ops in schedules.items()},
        failures=failures,
        reconstruction=reconstruction,
        pms=pms,
        description=str(data.get("description", "")).strip(),
    )


def load_scenario(path: Union[str, Path]) -> Scenario:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        try:
            data = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ScenarioFileError(f"{path}: {exc}") from None
    scenario = scenario_from_mapping(data or {}, path.parent)
    if not scenario.name:
        scenario = replace(scenario, name=path.stem)
    return scenario


# ---------------------------------------------------------------------------
# Bundled data
# ---------------------------------------------------------------------------

def data_path(name: str) -> Path:
    return Path(str(resources.files("pavecarbon") / "data" / name))


BUNDLED_SCENARIOS = ("s1_massive.yaml", "s2_progressive.yaml", "s3_pms.yaml")


def bundled_factors() -> FactorSet:
    return load_factor_set(data_path("factors.csv"), "bundled")


def bundled_scenarios() -> list[Scenario]:
    return [load_scenario(data_path(n)) for n in BUNDLED_SCENARIOS]


def bundled_pms_params() -> PmsParams:
    return load_pms_params(data_path("pms_params.yaml"))


def published_pms_breakdown() -> PmsBreakdown:
    return load_published_breakdown(data_path("published_table5.yaml"))


def bundled_station(name: str) -> StationProfile:
    return load_station_profile(data_path(f"station_{name}.yaml"))
