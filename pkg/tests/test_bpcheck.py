import pytest

from seriesgroup.bpcheck import (
    commutation_free,
    default_order,
    independence_search,
    separation_check,
)
from seriesgroup.embed import eval_word, free_pair, surface_group
from seriesgroup.errors import PreconditionError, SeriesGroupError, TrivialElementError
from seriesgroup.liealg import VectorField, exp
from seriesgroup.series import compose, identity


@pytest.fixture(scope="module")
def XY():
    c = free_pair(16)
    return c.generator("X"), c.generator("Y")


def test_commutation_free_examples():
    e1, e2 = VectorField.basis(1, 5), VectorField.basis(2, 5)
    assert commutation_free([exp(e1), exp(e2)]) == (True, None)
    assert commutation_free([exp(e1), exp(e1.scale(2))]) == (False, 1)
    assert commutation_free([exp(e1)]) == (True, None)
    assert commutation_free([exp(e1), exp(e2), exp(e2.scale(3))]) == (False, 2)
    with pytest.raises(TrivialElementError, match="trivial tuple entry"):
        commutation_free([exp(e1), identity(5)])


def test_independence_free_pair(XY):
    rep = independence_search(list(XY), 3, 9)
    assert rep.witness_n == 1 and rep.window == (1, 10)
    assert len(rep.entries) == 100
    assert all(e.witness_index is not None for e in rep.entries)


def test_independence_singleton(XY):
    rep = independence_search([XY[0]], 1, 9)
    assert rep.witness_n == 1
    assert all(e.witness_index == 1 for e in rep.entries)


def test_independence_rejects_commuting_pair(XY):
    X = XY[0]
    with pytest.raises(PreconditionError) as info:
        independence_search([X, compose(X, identity(X.order))], 2, 3)
    assert info.value.index == 1


def test_separation_examples(XY):
    X, Y = XY
    I = identity(X.order)
    plain = independence_search([X, Y], 2, 4)
    unit = separation_check([X, Y], [I, I, I], 2, 4)
    assert unit.witness_n is not None and unit.witness_n <= plain.witness_n
    rep = separation_check([X, Y], [Y, X, Y], 2, 5)
    assert rep.found and all(e.witness_index for e in rep.entries)
    assert len(rep.entries) == 36
    with pytest.raises(SeriesGroupError, match="length mismatch"):
        separation_check([X, Y], [Y, X], 2, 5)


def test_separation_hypothesis_failure(XY):
    X, Y = XY
    # g2 = X: conjugating X by X gives X, and [X, X] = 1
    with pytest.raises(PreconditionError) as info:
        separation_check([X, X], [Y, X, Y], 1, 1)
    assert info.value.index == 1


def test_exhaustion_reports_no_witness(XY):
    X, Y = XY
    # g2 = (g1 X)^-1 makes the only window product the identity
    rep = separation_check([X], [Y, compose(Y, X).inverse()], 1, 0)
    assert not rep.found and rep.witness_n is None
    assert rep.entries[0].witness_index is None and rep.window == (1, 1)


def test_genus_two_tuple():
    c = surface_group(1, 8)
    u = [eval_word(c, w) for w in ("A", "B", "A'")]
    rep = independence_search(u, 1, 2)
    assert rep.witness_n == 1


def test_report_json_and_table(XY):
    rep = independence_search(list(XY), 1, 1)
    data = rep.to_json()
    assert data["witness_n"] == 1 and data["window"] == [1, 2]
    assert "evidence, not a proof" in data["note"]
    assert "witness n = 1" in rep.table()


def test_monotone_in_window(XY):
    small = independence_search(list(XY), 2, 2)
    big = independence_search(list(XY), 2, 5)
    assert small.found and big.found


def test_default_order():
    assert default_order(12, [1, 1]) == 32
    assert default_order(2, [1, 1]) == 8
