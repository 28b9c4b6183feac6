"""Life-cycle carbon footprint of pavement design-build-maintain scenarios,
including the direct footprint of a Pavement Management System."""

from pavecarbon.engine import Scope, StageBreakdown, compare, operation_gwp, scenario_footprint, scope_filter
from pavecarbon.model import (
    EmissionFactor,
    OpKind,
    RoadworksOp,
    Scenario,
    SectionGeometry,
    SubgradeClass,
    SubgradeProfile,
    UnitDim,
    validate,
)
from pavecarbon.pms import PmsBreakdown, PmsParams, pms_total, reconcile_with_published
from pavecarbon.registry import FactorSet, load_factor_set
from pavecarbon.sensitivity import SweepResult, SweepSpec, run_sweep, service_life_extrema, trend_check

__version__ = "0.1.0"
