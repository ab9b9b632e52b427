import numpy as np
import pytest

from fsard_aoi.occupancy import (
    PrecisionLossError,
    singleton_pmf,
    singleton_pmf_closed,
    singleton_table,
)

from oracles import enumerate_singletons


def test_lone_contender_is_a_singleton():
    assert singleton_pmf(1, 4).probs.tolist() == [0.0, 1.0]
    assert singleton_pmf_closed(1, 4)[1] == pytest.approx(1.0, abs=1e-15)


def test_two_contenders_two_cells():
    pmf = singleton_pmf(2, 2)
    assert pmf[0] == pytest.approx(0.5, abs=1e-15)
    assert pmf[1] == 0.0
    assert pmf[2] == pytest.approx(0.5, abs=1e-15)


def test_three_contenders_two_cells():
    pmf = singleton_pmf(3, 2)
    assert pmf[0] == pytest.approx(0.25, abs=1e-15)
    assert pmf[1] == pytest.approx(0.75, abs=1e-15)


def test_closed_form_two_contenders_four_cells():
    pmf = singleton_pmf_closed(2, 4)
    assert pmf[0] == pytest.approx(0.25, abs=1e-12)
    assert pmf[2] == pytest.approx(0.75, abs=1e-12)


def test_closed_form_matches_dp_and_enumeration_for_k4_v3():
    exact = [float(x) for x in enumerate_singletons(4, 3)]
    np.testing.assert_allclose(singleton_pmf_closed(4, 3).probs, singleton_pmf(4, 3).probs, atol=1e-9)
    np.testing.assert_allclose(singleton_pmf(4, 3).probs, exact, atol=1e-12)


@pytest.mark.parametrize("k,v", [(7, 7), (8, 5), (12, 3), (10, 4), (19, 2)])
def test_dp_matches_enumeration_beyond_acceptance_range(k, v):
    exact = [float(x) for x in enumerate_singletons(k, v)]
    np.testing.assert_allclose(singleton_pmf(k, v).probs, exact, atol=1e-12, rtol=0)


def test_zero_contenders():
    assert singleton_pmf(0, 3).probs.tolist() == [1.0]


@pytest.mark.parametrize("k", [2, 3, 5, 9, 40])
@pytest.mark.parametrize("v", [1, 2, 4, 7])
def test_pmf_invariants(k, v):
    probs = singleton_pmf(k, v).probs
    assert len(probs) == min(k, v) + 1
    assert (probs >= 0).all()
    assert probs.sum() == pytest.approx(1.0, abs=1e-12)
    if k - 1 <= min(k, v):
        # a lone leftover ball has nothing to collide with
        assert probs[k - 1] == pytest.approx(0.0, abs=1e-15)


def test_table_rows_agree_with_single_calls():
    table = singleton_table(12, 5)
    for k in range(13):
        np.testing.assert_array_equal(table[k, : min(k, 5) + 1], singleton_pmf(k, 5).probs)
    assert not table.flags.writeable


def test_dp_stays_accurate_for_large_networks():
    probs = singleton_pmf(400, 16).probs
    assert probs.sum() == pytest.approx(1.0, abs=1e-12)
    # with 25 balls per cell a singleton is rare: E[N_s] = k (1 - 1/v)^(k-1)
    expected = 400 * (15 / 16) ** 399
    assert np.arange(17) @ probs == pytest.approx(expected, rel=1e-9)


def test_closed_form_flags_cancellation():
    with pytest.raises(PrecisionLossError):
        singleton_pmf_closed(50, 30)
    with pytest.raises(PrecisionLossError):
        singleton_pmf_closed(200, 50)


@pytest.mark.parametrize("k,v", [(-1, 3), (3, 0)])
def test_domain_errors(k, v):
    with pytest.raises(ValueError):
        singleton_pmf(k, v)
