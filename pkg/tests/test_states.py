import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from stpx.states import (
    InvalidStateError,
    LatticeSpec,
    booleanize,
    booleanize_array,
    debooleanize,
    dec,
    delta_index,
    digits_table,
    format_state,
    from_digits,
    ord_,
    parse_state,
    state_at,
)


def test_dec_examples():
    assert dec((1, 0, 0, 0, 0)) == 16
    assert dec((0, 0)) == 0
    assert dec((0, 1, 0, 2), 3) == 11
    assert ord_((0, 1, 0, 2), 3) == 12


def test_from_digits_examples():
    assert from_digits(4, LatticeSpec(3, 2)) == (1, 0, 0)
    assert from_digits(0, LatticeSpec(4, 5)) == (0, 0, 0, 0)
    assert from_digits(11, LatticeSpec(4, 3)) == (0, 1, 0, 2)
    with pytest.raises(ValueError):
        from_digits(8, LatticeSpec(3, 2))


def test_delta_index_examples():
    assert delta_index((0, 1, 1)) == 5
    assert delta_index((2, 2, 2), 3) == 1
    assert delta_index((0, 1, 0, 2), 3) == 70


def test_lattice_validation():
    with pytest.raises(ValueError):
        LatticeSpec(0, 2)
    with pytest.raises(ValueError):
        LatticeSpec(3, 1)
    with pytest.raises(OverflowError):
        LatticeSpec(64, 2)
    L = LatticeSpec(3, 3)
    with pytest.raises(InvalidStateError):
        L.validate((0, 3, 0))
    with pytest.raises(InvalidStateError):
        L.validate((0, 1))


@pytest.mark.parametrize("n,m", [(1, 2), (3, 2), (2, 5), (4, 3), (5, 6)])
def test_index_conventions_exhaustive(n, m):
    L = LatticeSpec(n, m)
    table = digits_table(L)
    for k, s in enumerate(itertools.product(range(m), repeat=n)):
        # itertools.product enumerates in lexicographic order
        assert dec(s, m) == k and ord_(s, m) == k + 1
        assert from_digits(dec(s, m), L) == s
        assert delta_index(s, m) == m**n - dec(s, m)
        assert state_at(delta_index(s, m), L) == s
        assert tuple(table[delta_index(s, m) - 1]) == s


@given(st.integers(1, 6), st.integers(2, 7), st.data())
def test_from_digits_round_trip(n, m, data):
    L = LatticeSpec(n, m)
    k = data.draw(st.integers(0, L.size - 1))
    assert dec(from_digits(k, L), m) == k


def test_booleanize_reference_array():
    expected = np.array([
        [0, 0, 0, 0, 0],
        [1, 0, 0, 0, 0],
        [0, 1, 0, 0, 0],
        [0, 0, 0, 1, 0],
    ])
    np.testing.assert_array_equal(booleanize_array((2, 3, 0, 4, 0), 5), expected)
    assert booleanize((0, 0, 0), 4) == (0,) * 9


@given(st.integers(2, 6).flatmap(lambda m: st.tuples(st.just(m), st.lists(st.integers(0, m - 1), min_size=1, max_size=7))))
def test_booleanize_round_trip(args):
    m, s = args
    b = booleanize(s, m)
    assert debooleanize(b, m) == tuple(s)
    assert (booleanize_array(s, m).sum(axis=0) <= 1).all()


def test_booleanize_injective():
    m, n = 4, 3
    images = {booleanize(s, m) for s in itertools.product(range(m), repeat=n)}
    assert len(images) == m**n


def test_debooleanize_rejects_double_occupancy():
    with pytest.raises(InvalidStateError):
        debooleanize([[1, 0], [1, 0]], 3)


def test_state_text_round_trip():
    L = LatticeSpec(3, 12)
    s = (0, 11, 3)
    assert format_state(s) == "0.11.3"
    assert parse_state("0.11.3", L) == s
    assert parse_state("0110", LatticeSpec(4)) == (0, 1, 1, 0)
    with pytest.raises(InvalidStateError):
        parse_state("012", LatticeSpec(3))
