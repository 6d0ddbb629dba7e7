"""Operator-expression language: tokenizer, parser, lowering, printer
round-trips, error reporting, and fuzzing."""

import random
import string

import pytest

from spinsplit.algebra import VectorExpr, commutator, gen_J, op_scalar
from spinsplit.identities import TEXT_CATALOG
from spinsplit.lang import LangError, format_expr, lower, parse
from spinsplit.scalars import Ring


@pytest.fixture(scope="module")
def ring():
    return Ring()


# -- parsing and lowering ----------------------------------------------------


def test_basic_expression(ring):
    e = lower(parse("Comm(J[1],J[2]) - i*J[3]"), ring)
    assert e.is_zero()


def test_whitespace_and_newlines(ring):
    e = lower(parse("Comm( J[1] ,\n  J[2] )\n - i * J[3]"), ring)
    assert e.is_zero()


def test_rational_powers(ring):
    e = lower(parse("Pow(Dot(P,P),1/2)"), ring)
    f = lower(parse("Pow(Dot(P,P),-1/2)"), ring)
    assert (e * f - op_scalar(ring, 1)).is_zero()


def test_vector_results(ring):
    v = lower(parse("Cross(P,J)"), ring)
    assert isinstance(v, VectorExpr)
    w = lower(parse("Dot(P,Cross(P,J))"), ring)
    assert w.is_zero()


def test_scalar_literals(ring):
    e = lower(parse("2*H - H - H"), ring)
    assert e.is_zero()
    e = lower(parse("(1/2)*H + (1/2)*H - H"), ring)
    assert e.is_zero()


def test_unary_minus(ring):
    e = lower(parse("-J[1] + J[1]"), ring)
    assert e.is_zero()
    e = lower(parse("--J[1] - J[1]"), ring)
    assert e.is_zero()


def test_adjoint_call(ring):
    e = lower(parse("Adjoint(i*H) + i*H"), ring)
    assert e.is_zero()


def test_massless_mode():
    r = Ring(massless=True)
    e = lower(parse("H - Pow(Dot(P,P),1/2)"), r)
    assert e.is_zero()


# -- printer round-trip -------------------------------------------------------


def _components(e):
    return list(e) if isinstance(e, VectorExpr) else [e]


def test_catalog_round_trip(ring):
    for src in TEXT_CATALOG:
        for comp in _components(lower(parse(src), ring)):
            printed = format_expr(comp)
            again = lower(parse(printed), ring)
            assert again == comp, (src, printed)


def test_structured_round_trip(ring):
    # random normal-form operators built programmatically round-trip
    # through the printer
    rng = random.Random(20240817)
    atoms = [lambda r=ring: gen_J(r, rng.randrange(3)),
             lambda r=ring: op_scalar(r, "I"),
             lambda r=ring: lower(parse("H"), r),
             lambda r=ring: lower(parse("K[2]"), r),
             lambda r=ring: lower(parse("Pow(H,-1)"), r)]
    for _ in range(60):
        e = atoms[rng.randrange(len(atoms))]()
        for _ in range(rng.randrange(4)):
            other = atoms[rng.randrange(len(atoms))]()
            op = rng.randrange(3)
            e = (e + other if op == 0
                 else e * other if op == 1
                 else commutator(e, other))
        printed = format_expr(e)
        assert lower(parse(printed), ring) == e, printed


# -- error reporting -----------------------------------------------------------


def test_truncated_input_position():
    with pytest.raises(LangError) as err:
        parse("Comm(J[1],")
    assert err.value.line == 1
    assert err.value.col >= 10


def test_error_line_tracking():
    with pytest.raises(LangError) as err:
        parse("H +\n  @")
    assert err.value.line == 2


def test_unknown_name(ring):
    with pytest.raises(LangError):
        lower(parse("Q[1]"), ring)


def test_bad_index(ring):
    with pytest.raises(LangError):
        lower(parse("J[4]"), ring)


def test_arity_mismatch(ring):
    with pytest.raises(LangError):
        lower(parse("Comm(J[1])"), ring)


def test_depth_guard_no_recursion_error():
    deep = "(" * 5000 + "H" + ")" * 5000
    with pytest.raises(LangError):
        parse(deep)


def test_division_by_zero_literal(ring):
    with pytest.raises(LangError):
        lower(parse("H/0"), ring)


# -- fuzzing --------------------------------------------------------------------


_FUZZ_ALPHABET = (
    list("HKJPim()[],+-*/ ")
    + ["Comm", "Dot", "Cross", "Pow", "Adjoint", "Phat",
       "1", "2", "3", "0", "1/2", "H", "J[1]", "K[2]", "P[3]"]
)


def test_fuzz_parser_never_crashes():
    # random token soup: the only permitted failure mode is LangError
    rng = random.Random(1234)
    n_parsed = 0
    for _ in range(20000):
        n = rng.randrange(1, 24)
        text = "".join(rng.choice(_FUZZ_ALPHABET) for _ in range(n))
        try:
            ast = parse(text)
        except LangError:
            continue
        n_parsed += 1
        try:
            lower(ast, Ring())
        except LangError:
            continue
    assert n_parsed > 100  # the soup does hit the happy path sometimes


def test_fuzz_printable_garbage():
    rng = random.Random(99)
    chars = string.printable
    for _ in range(5000):
        text = "".join(rng.choice(chars)
                       for _ in range(rng.randrange(1, 40)))
        try:
            parse(text)
        except LangError:
            pass
