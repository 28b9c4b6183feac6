import io

import pytest
from hypothesis import given, strategies as st

from pavecarbon.model import DimensionError, EmissionFactor, UnitDim
from pavecarbon.registry import (
    DeviceLine,
    FactorFileError,
    FactorSet,
    StationProfile,
    derive_transfer_factor,
    derive_vehicle_km_factor,
    dump_factor_set,
    load_factor_set,
    station_factor,
    weighted_power,
)
from pavecarbon.scenarios import bundled_station

SCREEN = DeviceLine("screen", 90, 8, 1, 16)


def test_load_row():
    fs = load_factor_set(io.StringIO("id,value,unit,source\nf_elec, 0.0599, per-kWh, Base carbone\n"))
    assert fs["f_elec"] == EmissionFactor("f_elec", 0.0599, UnitDim.PER_KWH, "Base carbone")


def test_empty_stream():
    assert len(load_factor_set(io.StringIO(""))) == 0


@pytest.mark.parametrize(
    "text, message",
    [
        ("id,value,unit,source\nx,-1,per-sqm,\n", "negative value"),
        ("id,value,unit,source\nx,1,per-sqm,\nx,2,per-sqm,\n", "duplicate"),
        ("id,value,unit,source\nx,1,per-acre,\n", "unknown unit"),
        ("id,value,unit,source\nx,abc,per-sqm,\n", "not a number"),
        ("id,value,unit,source\nx,1\n", "columns"),
    ],
)
def test_load_errors(text, message):
    with pytest.raises(FactorFileError, match=message) as info:
        load_factor_set(io.StringIO(text))
    assert info.value.row is not None


def test_error_row_number():
    with pytest.raises(FactorFileError) as info:
        load_factor_set(io.StringIO("id,value,unit,source\na,1,per-sqm,\n\nb,-3,per-sqm,\n"))
    assert info.value.row == 4


def test_bundled_background_values(factors):
    expected = {
        "f_m": 0.92, "i_hard": 167, "i_yrun": 1165, "f_elec": 59.9e-3,
        "f_transfer": 107.82e-3, "i_adv_device": 1052.43, "i_s_device": 942.31,
    }
    for fid, value in expected.items():
        assert factors[fid].value == value


def test_value_checks_unit(factors):
    assert factors.value("f_elec", UnitDim.PER_KWH) == 0.0599
    with pytest.raises(DimensionError):
        factors.value("f_elec", UnitDim.PER_GB)


_ids = st.text("abcdefghijklmnopqrstuvwxyz_0123456789", min_size=1, max_size=12)
_efs = st.builds(
    lambda value, unit, source: (value, unit, source),
    st.floats(0, 1e9, allow_nan=False, allow_infinity=False),
    st.sampled_from(list(UnitDim)),
    st.text("abc def-+./,", max_size=20).map(str.strip),
)


@given(st.dictionaries(_ids, _efs, max_size=10))
def test_round_trip(entries):
    fs = FactorSet({k: EmissionFactor(k, v, u, s) for k, (v, u, s) in entries.items()})
    again = load_factor_set(io.StringIO(dump_factor_set(fs)))
    assert again.factors == fs.factors


def test_bundled_round_trip(factors):
    assert load_factor_set(io.StringIO(dump_factor_set(factors))).factors == factors.factors


@pytest.mark.parametrize(
    "freight, load, expected",
    [(0.158895, 5.79, 0.92), (0, 5.79, 0.0), (1, 1, 1.0)],
)
def test_vehicle_km_factor(freight, load, expected):
    assert derive_vehicle_km_factor(freight, load) == pytest.approx(expected, abs=1e-5)


@pytest.mark.parametrize(
    "intensity, grid, expected",
    [(1.8, 0.0599, 0.10782), (0, 0.0599, 0.0), (2.0, 0.05, 0.1)],
)
def test_transfer_factor(intensity, grid, expected):
    assert derive_transfer_factor(intensity, grid) == pytest.approx(expected, rel=1e-12)


def test_derive_rejects_negative():
    with pytest.raises(ValueError):
        derive_vehicle_km_factor(-1, 5)
    with pytest.raises(ValueError):
        derive_transfer_factor(1.8, -0.1)


def test_weighted_power_examples():
    standard = StationProfile("s", (DeviceLine("laptop", 65, 8), DeviceLine("screen", 90, 8, 1, 16, count=2)))
    advanced = StationProfile("a", (DeviceLine("desktop", 300, 24), SCREEN))
    assert weighted_power(standard) == 83.0
    assert round(weighted_power(advanced), 2) == 330.67
    assert weighted_power(StationProfile("empty")) == 0.0


def test_bundled_station_profiles():
    assert weighted_power(bundled_station("standard")) == 83.0
    assert round(weighted_power(bundled_station("advanced")), 2) == 330.67
    assert round(weighted_power(bundled_station("advanced_two_screens")), 2) == 361.33


def test_hours_over_24_rejected():
    with pytest.raises(ValueError, match="exceed 24"):
        weighted_power(StationProfile("x", (DeviceLine("d", 10, 20, 1, 8),)))


# Hand recomputation: embodied/depreciation + 24 h x kW x grid, times usage.
# advanced: 1052.43/1825 = 0.5766740; 7.936 kWh x 0.0599 = 0.4753664
# standard:  942.31/1825 = 0.5163342; 1.992 kWh x 0.0599 = 0.1193208
@pytest.mark.parametrize(
    "name, expected",
    [("advanced", 1.0e-3 * (0.5766740 + 0.4753664)), ("standard", 2.6e-3 * (0.5163342 + 0.1193208))],
)
def test_station_factor(name, expected):
    assert station_factor(bundled_station(name), 0.0599) == pytest.approx(expected, rel=1e-6)


def test_station_factor_reference_values():
    assert station_factor(bundled_station("advanced"), 0.0599) == pytest.approx(1.05204e-3, rel=1e-5)
    assert station_factor(bundled_station("standard"), 0.0599) == pytest.approx(1.65271e-3, rel=1e-5)


def test_station_factor_zero_usage_and_depreciation():
    s = StationProfile("a", (SCREEN,), 1000, 1825, 0.0)
    assert station_factor(s, 0.06) == 0.0
    with pytest.raises(ZeroDivisionError):
        station_factor(StationProfile("a", (SCREEN,), 1000, 0, 1e-3), 0.06)


@given(st.floats(0, 1, allow_nan=False), st.floats(0, 10, allow_nan=False), st.floats(0, 2, allow_nan=False))
def test_station_factor_linearity(k, scale, grid):
    base = StationProfile("a", (DeviceLine("desktop", 300, 24), SCREEN), 1052.43, 1825, 1e-3)
    scaled = StationProfile("a", base.devices, base.embodied_gwp, base.depreciation, base.usage_coefficient * scale)
    assert station_factor(scaled, grid) == pytest.approx(scale * station_factor(base, grid), rel=1e-9, abs=1e-15)
    # electricity term is linear in the grid factor
    no_embodied = StationProfile("a", base.devices, 0.0, 1825, 1e-3)
    assert station_factor(no_embodied, grid * k) == pytest.approx(k * station_factor(no_embodied, grid), rel=1e-9, abs=1e-15)
