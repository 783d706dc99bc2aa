import pytest

from ifg.constraints import (
    Constant,
    Constraint,
    ConstraintSet,
    NameSupply,
    TOP,
    Variable,
)

A = Variable("A")
B = Variable("B")
sg = Constant("sg")


def test_variable_identity_is_exact():
    assert Variable("A") == Variable("A")
    assert Variable("A", 1) != Variable("A", 2)
    assert Variable("A") != Variable("B")


def test_constants_and_variables_are_disjoint():
    assert Variable("sg") != Constant("sg")


def test_ident_set_dedupes_keeping_first_occurrence():
    c = Constraint((A, B, A, sg, B))
    assert c.ident == (A, B, sg)


def test_empty_ident_set_rejected():
    with pytest.raises(ValueError):
        Constraint(())


def test_top_carries_no_constraints():
    assert TOP.top
    assert len(TOP) == 0
    with pytest.raises(ValueError):
        ConstraintSet((Constraint((A,)),), top=True)


def test_constraint_set_variables_in_document_order():
    cs = ConstraintSet(
        (
            Constraint((B,), (("l", A),)),
            Constraint((A, sg)),
        )
    )
    assert cs.variables() == [B, A]


def test_name_supply_never_repeats():
    supply = NameSupply()
    seen = {supply.fresh("X") for _ in range(100)}
    assert len(seen) == 100
    assert Variable("X") not in seen  # parse-time variables use index 0


def test_notation_round_trips_through_str():
    c = Constraint((A, sg), ())
    assert str(c) == "[[A,sg]]"
    c2 = Constraint((A,), (("l", B), ("n", sg)))
    assert str(c2) == "[[A],(l,B),(n,sg)]"
    assert str(TOP) == "TOP"
