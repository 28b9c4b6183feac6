"""Fit the bundled roadworks emission factors to the published anchor figures.

The per-layer inventories behind the original study are not public, so the
roadworks factors in ``data/factors.csv`` are fitted once with this script:
the operation schedules (thicknesses, failure curves) are fixed data, and
only the factor values of the roadworks techniques move.  Anchors are the
scenario ratios, the maintenance-stage intensities and the sensitivity
extrema; each residual is weighted by the inverse of its acceptance band.

Run from the repository root::

    python scripts/calibrate.py            # report only
    python scripts/calibrate.py --write    # rewrite data/factors.csv
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np
from scipy.optimize import least_squares

from pavecarbon.engine import Scope, scenario_footprint, scope_filter, saving_pct
from pavecarbon.model import BASE_CASE_SUBGRADE, EmissionFactor
from pavecarbon.registry import FactorSet, dump_factor_set, load_factor_set
from pavecarbon.scenarios import bundled_scenarios, data_path
from pavecarbon.sensitivity import load_vectors, make_spec, run_sweep

FITTED = (
    "gb3_road_base",
    "bbsg_semi_coarse",
    "bbsg_mill_and_fill",
    "bbtm_thin_overlay",
    "ecf_micro_surfacing",
    "milling",
    "crack_sealing",
    "full_depth_reconstruction",
)

# name: (target, half-width of the acceptance band)
TARGETS = {
    "s2_vs_s1_pct": (19.0, 1.0),
    "s3_vs_s1_pct": (22.0, 1.0),
    "s3_vs_s2_service_pct": (11.0, 2.0),
    "s2_maintenance_per_sqm": (13.3, 0.1),
    "s3_maintenance_per_sqm": (11.3, 0.1),
    "s2_reconstruction_per_sqm": (2.37, 1.0),
    "s3_reconstruction_per_sqm": (2.74, 1.0),
    "restricted_max_s3_vs_s2": (7.0, 3.0),
    "restricted_max_s3_vs_s1": (25.0, 3.0),
    "extreme_max_s3_vs_s2": (14.0, 3.0),
    "extreme_max_s3_vs_s1": (30.0, 3.0),
    "extreme_service_max_s3_vs_s2": (47.0, 3.0),
    "extreme_service_max_s3_vs_s1": (65.0, 3.0),
    "restricted_deterioration_max_abs": (0.0, 1.0),
    "extreme_deterioration_max_abs": (0.0, 1.0),
}


def with_values(base: FactorSet, values, source: str) -> FactorSet:
    factors = dict(base.factors)
    for fid, v in zip(FITTED, values):
        ef = factors[fid]
        factors[fid] = EmissionFactor(fid, float(v), ef.unit, source)
    return FactorSet(factors, base.name, base.provenance)


def metrics(factors: FactorSet) -> dict[str, float]:
    s1, s2, s3 = bundled_scenarios()
    b1, b2, b3 = (scenario_footprint(s.with_subgrade(BASE_CASE_SUBGRADE), factors) for s in (s1, s2, s3))
    out = {
        "s2_vs_s1_pct": saving_pct(b2.total, b1.total),
        "s3_vs_s1_pct": saving_pct(b3.total, b1.total),
        "s3_vs_s2_service_pct": saving_pct(
            scope_filter(b3, Scope.SERVICE).total, scope_filter(b2, Scope.SERVICE).total
        ),
        "s2_maintenance_per_sqm": b2.per_sqm("maintenance"),
        "s3_maintenance_per_sqm": b3.per_sqm("maintenance"),
        "s2_reconstruction_per_sqm": b2.per_sqm("reconstruction"),
        "s3_reconstruction_per_sqm": b3.per_sqm("reconstruction"),
    }
    scenarios = (s1, s2, s3)
    restricted = run_sweep(make_spec(load_vectors(data_path("vectors_restricted.csv")), scenarios, (Scope.FULL,)), factors)
    extreme = run_sweep(make_spec(load_vectors(data_path("vectors_extreme.csv")), scenarios), factors)
    p31, p32 = ("S3", "S1"), ("S3", "S2")
    out["restricted_max_s3_vs_s2"] = restricted.max_saving(p32)
    out["restricted_max_s3_vs_s1"] = restricted.max_saving(p31)
    out["extreme_max_s3_vs_s2"] = extreme.max_saving(p32)
    out["extreme_max_s3_vs_s1"] = extreme.max_saving(p31)
    out["extreme_service_max_s3_vs_s2"] = extreme.max_saving(p32, Scope.SERVICE)
    out["extreme_service_max_s3_vs_s1"] = extreme.max_saving(p31, Scope.SERVICE)
    out["restricted_deterioration_max_abs"] = max(
        abs(restricted.savings[(label, p32, Scope.FULL)]) for label in "abcde"
    )
    out["extreme_deterioration_max_abs"] = max(
        abs(extreme.savings[(label, p32, Scope.FULL)]) for label in "abcde"
    )
    return out


# anchors that sit on the edge of their band get a heavier weight in the fit
FIT_WEIGHTS = {"extreme_deterioration_max_abs": 3.0}


def residuals(values, base: FactorSet) -> np.ndarray:
    m = metrics(with_values(base, values, "fit"))
    return np.array([FIT_WEIGHTS.get(k, 1.0) * (m[k] - t) / band for k, (t, band) in TARGETS.items()])


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--write", action="store_true", help="rewrite data/factors.csv")
    args = parser.parse_args(argv)

    path = data_path("factors.csv")
    base = load_factor_set(path)
    x0 = np.array([base[fid].value for fid in FITTED])
    fit = least_squares(residuals, x0, args=(base,), bounds=(x0 * 0.2, x0 * 5.0), x_scale=x0)
    values = [float(f"{v:.4g}") for v in fit.x]
    fitted = with_values(base, values, "calibrated: fitted by scripts/calibrate.py to scenario anchors")
    m = metrics(fitted)
    for fid, v in zip(FITTED, values):
        print(f"{fid:28s} {v:10.4g} {fitted[fid].unit.value}")
    worst = 0.0
    for k, (t, band) in TARGETS.items():
        dev = (m[k] - t) / band
        worst = max(worst, abs(dev))
        print(f"{k:34s} {m[k]:9.3f}  target {t:6.2f} ± {band:<4}  {'ok' if abs(dev) <= 1 else 'OUT'}")
    if args.write:
        Path(path).write_text(dump_factor_set(fitted), encoding="utf-8")
        print(f"wrote {path}")
    return 0 if worst <= 1 else 1


if __name__ == "__main__":
    sys.exit(main())
