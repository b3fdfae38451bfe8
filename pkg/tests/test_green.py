import pytest
from hypothesis import given
from hypothesis import strategies as st

from gresilience.errors import DomainError
from gresilience.green import EnergyLedger, Source, co2e, record

entry_st = st.tuples(
    st.sampled_from(list(Source)),
    st.floats(0, 1e4, allow_nan=False),
    st.floats(0, 1e4, allow_nan=False),
)


def test_record_joules():
    assert record(None, Source.ARM, 60, 2).entries[0].joules == 120.0
    assert record(None, Source.ARM, 0, 100).entries[0].joules == 0.0
    assert record(None, Source.CONVEYOR, 30, 0).entries[0].joules == 0.0


@pytest.mark.parametrize("power, dur", [(-1, 1), (1, -1)])
def test_record_rejects_negative(power, dur):
    with pytest.raises(DomainError):
        record(None, Source.ARM, power, dur)


def test_one_kwh():
    ledger = record(None, Source.CONVEYOR, 1000, 3600)  # 3.6e6 J
    rep = co2e(ledger, 475)
    assert rep.total_kwh == 1.0
    assert rep.co2e_g == 475.0


def test_small_ledger():
    rep = co2e(record(None, Source.ARM, 60, 2), 475)
    assert rep.co2e_g == pytest.approx(120 / 3.6e6 * 475, abs=1e-9)
    assert rep.co2e_g == pytest.approx(0.0158333333, abs=1e-9)


def test_zero_intensity():
    assert co2e(record(None, Source.ARM, 60, 2), 0).co2e_g == 0.0


def test_negative_intensity():
    with pytest.raises(DomainError):
        co2e(EnergyLedger(), -1)


def test_by_source():
    ledger = EnergyLedger()
    ledger.record(Source.ARM, 10, 1)
    ledger.record(Source.ARM, 10, 2)
    ledger.record(Source.HUMAN_AID, 5, 2)
    rep = co2e(ledger)
    assert rep.joules_by_source[Source.ARM] == 30
    assert rep.joules_by_source[Source.HUMAN_AID] == 10
    assert rep.joules_by_source[Source.COMPUTE] == 0
    assert rep.wh_by_source()[Source.ARM] == pytest.approx(30 / 3600)


@given(st.lists(entry_st, max_size=20), st.lists(entry_st, max_size=20), st.floats(0, 1000))
def test_additivity(e1, e2, intensity):
    l1, l2 = EnergyLedger(), EnergyLedger()
    for e in e1:
        l1.record(*e)
    for e in e2:
        l2.record(*e)
    both = co2e(l1 + l2, intensity).co2e_g
    assert both == pytest.approx(co2e(l1, intensity).co2e_g + co2e(l2, intensity).co2e_g, abs=1e-9)


@given(st.lists(entry_st, min_size=1, max_size=30), st.floats(0, 1000))
def test_monotone(entries, intensity):
    ledger = EnergyLedger()
    prev_j, prev_g = 0.0, 0.0
    for e in entries:
        ledger.record(*e)
        rep = co2e(ledger, intensity)
        assert rep.total_joules >= prev_j and rep.co2e_g >= prev_g
        prev_j, prev_g = rep.total_joules, rep.co2e_g
