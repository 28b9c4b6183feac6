import pytest
from hypothesis import given, strategies as st

from pavecarbon.model import ValidationError
from pavecarbon.pms import (
    PmsBreakdown,
    PmsParams,
    data_collection_gwp,
    pms_params_from_mapping,
    pms_total,
    planning_gwp,
    reconcile_with_published,
    storage_gwp,
)
from pavecarbon.scenarios import published_pms_breakdown

# Values recomputed by hand from the bundled inputs:
# storage allocation 30 * 10 / 2737 = 0.10960906
#   hardware 0.10960906 * 167 / 5 = 3.660943, running * 1165 = 127.69456
# planning base 1/15 * 30 * 10 = 20
#   transfer 20 * 3.33e-3 * 0.10782 = 0.00718081
#   local    20 * (1.05204e-3 + 1.65271e-3) = 0.054095
HARDWARE = 3.660943
RUNNING = 127.69456
TRANSFER = 0.00718081
LOCAL = 0.054095

REFERENCE_INPUTS = dict(
    n_round=1, maintenance_period=30, section_length=10, f_m=0.92, l_t=2737,
    k_database=1, i_hard=167, delta_hard=5, i_yrun=1165, n_operation=1 / 15,
    k_t=3.33e-3, f_transfer=0.10782, f_adv=1.05204e-3, f_s=1.65271e-3,
)


@pytest.fixture
def table_params():
    return PmsParams(**REFERENCE_INPUTS)


def test_bundled_params_match_reference_inputs(pms_params):
    for key, value in REFERENCE_INPUTS.items():
        assert getattr(pms_params, key) == pytest.approx(value, rel=1e-5), key


@pytest.mark.parametrize("n_round, expected", [(1, 276.0), (0, 0.0), (1 / 3, 92.0)])
def test_data_collection(table_params, n_round, expected):
    assert data_collection_gwp(table_params.replace(n_round=n_round)) == pytest.approx(expected, rel=1e-12)


def test_collection_close_to_published(table_params):
    assert data_collection_gwp(table_params) / 277.9 == pytest.approx(0.993, abs=5e-4)


def test_storage(table_params):
    hardware, running = storage_gwp(table_params)
    assert hardware == pytest.approx(HARDWARE, rel=1e-6)
    assert running == pytest.approx(RUNNING, rel=1e-6)
    assert storage_gwp(table_params.replace(k_database=0)) == (0.0, 0.0)


def test_storage_full_allocation(table_params):
    p = table_params.replace(l_t=30 * 10)
    hardware, running = storage_gwp(p)
    assert hardware == pytest.approx(167 / 5)
    assert running == pytest.approx(1165)


def test_storage_zero_division(table_params):
    with pytest.raises(ZeroDivisionError):
        storage_gwp(table_params.replace(l_t=0))
    with pytest.raises(ZeroDivisionError):
        storage_gwp(table_params.replace(delta_hard=0))


def test_planning(table_params):
    local, transfer = planning_gwp(table_params)
    assert local == pytest.approx(LOCAL, rel=1e-4)
    assert transfer == pytest.approx(TRANSFER, rel=1e-5)
    assert planning_gwp(table_params.replace(n_operation=0)) == (0.0, 0.0)


def test_published_planning_split():
    published = published_pms_breakdown()
    assert published.planning_local / published.planning == pytest.approx(0.876, abs=0.015)
    assert published.planning_transfer / published.planning == pytest.approx(0.124, abs=0.015)


def test_total(table_params):
    b = pms_total(table_params)
    assert b.total == b.data_collection + b.storage + b.planning
    assert b.storage == b.storage_hardware + b.storage_running
    assert b.planning == b.planning_local + b.planning_transfer
    assert b.total == pytest.approx(276.0 + HARDWARE + RUNNING + LOCAL + TRANSFER, rel=1e-6)


def test_zero_activity_gives_zero_breakdown():
    zero = PmsParams(**{k: 0.0 for k in REFERENCE_INPUTS}).replace(l_t=2737, delta_hard=5)
    b = pms_total(zero)
    assert all(v == 0 for _, v in b.rows())


def test_published_total():
    published = published_pms_breakdown()
    assert 520.7 - 1e-9 <= published.total <= 520.8 + 1e-9


def test_invalid_params_listed():
    with pytest.raises(ValidationError) as info:
        pms_total(PmsParams(k_database=2, n_round=-1))
    assert len(info.value.violations) == 2


def test_reconcile_examples(table_params):
    rows = {r.component: r for r in reconcile_with_published(pms_total(table_params), published_pms_breakdown())}
    assert rows["data_collection"].ratio == pytest.approx(276.0 / 277.9)
    assert not rows["data_collection"].flagged
    assert rows["storage"].ratio == pytest.approx(0.545, abs=1e-3)
    assert rows["storage"].flagged
    assert rows["planning"].flagged


def test_reconcile_identical(table_params):
    b = pms_total(table_params)
    rows = reconcile_with_published(b, b)
    assert all(r.ratio == 1.0 and not r.flagged for r in rows)


def test_params_from_mapping_fraction_strings(tmp_path):
    p = pms_params_from_mapping({"n_operation": "1/15", "p_m": 30})
    assert p.n_operation == pytest.approx(1 / 15)
    with pytest.raises(ValueError, match="unknown PMS parameter"):
        pms_params_from_mapping({"bogus": 1})


positive = st.floats(0.01, 100, allow_nan=False)


@given(positive, positive, positive, positive, positive)
def test_collection_linear_and_independent(n_round, p_m, length, f_m, k):
    p = PmsParams(n_round=n_round, maintenance_period=p_m, section_length=length, f_m=f_m)
    c = data_collection_gwp(p)
    assert data_collection_gwp(p.replace(n_round=n_round * k)) == pytest.approx(k * c, rel=1e-12)
    assert data_collection_gwp(p.replace(f_m=f_m * k)) == pytest.approx(k * c, rel=1e-12)
    q = p.replace(n_round=n_round * k)
    assert storage_gwp(q) == storage_gwp(p)
    assert planning_gwp(q) == planning_gwp(p)


@given(st.floats(1, 1e5, allow_nan=False))
def test_doubling_network_halves_storage(l_t):
    p = PmsParams(l_t=l_t)
    h, r = storage_gwp(p)
    h2, r2 = storage_gwp(p.replace(l_t=2 * l_t))
    assert h2 == pytest.approx(h / 2, rel=1e-12)
    assert r2 == pytest.approx(r / 2, rel=1e-12)


@given(st.builds(PmsParams, *[positive] * 14), st.floats(0, 1, allow_nan=False))
def test_outputs_nonnegative(p, k_database):
    b = pms_total(p.replace(k_database=k_database))
    assert all(v >= 0 for _, v in b.rows())
    assert b.total == b.data_collection + b.storage + b.planning


def test_breakdown_rows_cover_components():
    b = PmsBreakdown.from_parts(1, 2, 3, 4, 5)
    assert dict(b.rows())["total"] == 15
