import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opmindex.errors import CorruptComponent, InvalidInput, InvalidParams
from opmindex.transform import (
    Mode,
    OrderParams,
    delta_component,
    order_component,
    order_isomorphic,
    pattern_tables,
    reconstruct,
    stored_mask,
    verify_window,
)

from oracles import delta_component_ref, isomorphic_ref, order_component_ref

EXAMPLE = [3, 8, 3, 5, -2, 9, 6, 6]
WEAK4 = OrderParams(4)
STRICT4 = OrderParams(4, Mode.STRICT)

sequences = st.lists(st.integers(-(2**31), 2**31 - 1), min_size=1, max_size=60)
small_alphabet = st.lists(st.integers(-3, 3), min_size=1, max_size=60)


def test_order_component_example():
    assert order_component(EXAMPLE, WEAK4).tolist() == [0, 1, 2, 1, 0, 2, 3, 1]


def test_order_component_small_cases():
    for q in (3, 4, 9):
        for mode in Mode:
            assert order_component([5], OrderParams(q, mode)).tolist() == [0]
    assert order_component([1, 2, 3, 4], WEAK4).tolist() == [0, 1, 1, 1]
    assert order_component([5, 5, 7], STRICT4).tolist() == [0, 1, 2]


def test_delta_component_examples():
    To = order_component(EXAMPLE, WEAK4)
    assert delta_component(EXAMPLE, To, WEAK4).tolist() == [3, 5, 0, 2, 5, 4, 1, 0]
    assert delta_component([5], [0], WEAK4).tolist() == [5]
    assert delta_component([1, 2, 3, 4], [0, 1, 1, 1], WEAK4).tolist() == [1, 1, 1, 1]


def test_reconstruct_examples():
    out = reconstruct([0, 1, 2, 1, 0, 2, 3, 1], [3, 5, 0, 2, 5, 4, 1, 0], WEAK4)
    assert out.tolist() == EXAMPLE
    assert reconstruct([0], [5], WEAK4).tolist() == [5]
    To = order_component([5, 5, 7], STRICT4)
    assert reconstruct(To, delta_component([5, 5, 7], To, STRICT4), STRICT4).tolist() == [5, 5, 7]


def test_params_validation():
    with pytest.raises(InvalidParams):
        OrderParams(2)
    with pytest.raises(InvalidParams):
        OrderParams(4, "sideways")
    with pytest.raises(InvalidInput):
        order_component([], WEAK4)
    with pytest.raises(InvalidInput):
        order_component([2**31], WEAK4)
    with pytest.raises(InvalidInput):
        delta_component([1, 2], [0], WEAK4)


def test_reconstruct_rejects_pointer_before_start():
    with pytest.raises(CorruptComponent):
        reconstruct([0, 2], [1, 1], WEAK4)
    with pytest.raises(CorruptComponent):
        reconstruct([0, 1, 4], [1, 1, 1], WEAK4)


@settings(max_examples=300, deadline=None)
@given(st.one_of(sequences, small_alphabet), st.integers(3, 16), st.sampled_from(list(Mode)))
def test_components_match_reference_and_round_trip(T, q, mode):
    p = OrderParams(q, mode)
    To = order_component(T, p)
    assert To.tolist() == order_component_ref(T, q, p.strict)
    Td = delta_component(T, To, p)
    assert Td.tolist() == delta_component_ref(T, To.tolist(), q, p.strict)
    assert reconstruct(To, Td, p).tolist() == list(T)

    i = np.arange(1, len(T) + 1)
    if p.strict:
        assert To[0] == 0
        assert np.all(To <= 2 * (np.minimum(q, i) - 1))
        mask = stored_mask(To, p)
        assert np.all(Td[1:][mask[1:]] >= 1)
    else:
        assert np.all(To < np.minimum(q, i))
        assert np.all(Td[1:] >= 0)


@settings(max_examples=300, deadline=None)
@given(small_alphabet, st.integers(3, 8), st.data())
def test_copied_windows_keep_in_pattern_symbols(T, q, data):
    # a window copied out of T sees the same predecessor wherever the text's
    # predecessor lies inside the window
    i = data.draw(st.integers(0, len(T) - 1))
    p = data.draw(st.integers(1, len(T) - i))
    for mode in Mode:
        params = OrderParams(q, mode)
        To = order_component(T, params)
        Po = order_component(T[i : i + p], params)
        for j in range(2, p + 1):
            sym = int(To[i + j - 1])
            offset = (sym + 1) // 2 if params.strict else sym
            if sym and j - offset >= 1:
                assert sym == Po[j - 1]
            if params.strict and Po[j - 1] % 2 == 1:
                # an equal-valued predecessor inside the pattern pins the text symbol
                assert sym == Po[j - 1]


def test_pattern_tables_examples():
    t = pattern_tables([1, 3, 2])
    assert t.mu.tolist() == [0, 1, 1] and t.nu.tolist() == [0, 0, 2]
    t = pattern_tables([7])
    assert t.mu.tolist() == [0] and t.nu.tolist() == [0]
    t = pattern_tables([5, 5], Mode.STRICT)
    assert t.mu.tolist() == [0, 1] and t.eq.tolist() == [False, True]


@settings(max_examples=200, deadline=None)
@given(small_alphabet)
def test_pattern_tables_are_neighbours(P):
    t = pattern_tables(P)
    for j in range(len(P)):
        seen = [(P[k], k) for k in range(j)]
        below = [s for s in seen if s < (P[j], j)]
        above = [s for s in seen if s > (P[j], j)]
        assert t.mu[j] == (max(below)[1] + 1 if below else 0)
        assert t.nu[j] == (min(above)[1] + 1 if above else 0)
        assert t.mu[j] < j + 1 and t.nu[j] < j + 1


def test_verify_examples():
    assert verify_window(pattern_tables([1, 2, 3, 4, 5]), [10, 20, 25, 30, 31])
    assert not verify_window(pattern_tables([1, 3, 2]), [10, 30, 40])
    assert not verify_window(pattern_tables([5, 5], Mode.STRICT), [5, 6], Mode.STRICT)
    assert verify_window(pattern_tables([5, 5]), [5, 6])
    with pytest.raises(InvalidInput):
        verify_window(pattern_tables([1, 2]), [1, 2, 3])


@pytest.mark.parametrize("mode", list(Mode))
def test_verify_agrees_with_pairwise_check(mode):
    rng = np.random.default_rng(11)
    strict = mode is Mode.STRICT
    accepted = 0
    for _ in range(10_000):
        m = int(rng.integers(1, 9))
        span = int(rng.integers(1, 6))
        P = rng.integers(0, span, m).tolist()
        W = rng.integers(0, span, m).tolist() if rng.random() < 0.5 else sorted(P) if rng.random() < 0.3 else P[:]
        expect = isomorphic_ref(P, W, strict)
        assert verify_window(pattern_tables(P, mode), W, mode) == expect, (P, W)
        assert order_isomorphic(P, W, mode) == expect
        accepted += expect
    assert accepted > 1000
