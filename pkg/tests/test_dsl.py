import cmath

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cfinsler import dsl
from cfinsler.dsl import Binary, Num, Pow, Unary, Var
from cfinsler.errors import ArityError, DomainError, ExprSyntaxError, UnboundVariable, UnknownIdentifier


def test_product_node():
    e = dsl.parse("z1*conj(z1)")
    assert e == Binary("*", Var("z", 1), Unary("conj", Var("z", 1)))


def test_nested_parse():
    e = dsl.parse("exp(2*(z1*conj(z1)+z2*conj(z2))/2)")
    assert isinstance(e, Unary) and e.op == "exp"
    assert dsl.variables(e) == {("z", 1), ("z", 2)}


def test_fractional_power_rejected():
    with pytest.raises(ExprSyntaxError) as info:
        dsl.parse("eta1^(1/2)")
    assert info.value.byte_offset == 7  # the slash


def test_syntax_error_offset_and_expected():
    with pytest.raises(ExprSyntaxError) as info:
        dsl.parse("z1 + * z2")
    assert info.value.byte_offset == 5
    assert info.value.expected


def test_offset_counts_bytes():
    with pytest.raises(ExprSyntaxError) as info:
        dsl.parse("z1 + é")
    assert info.value.byte_offset == 5


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifier):
        dsl.parse("sin(z1)")
    with pytest.raises(UnknownIdentifier):
        dsl.parse("w1 + z1")


def test_arity():
    with pytest.raises(ArityError):
        dsl.parse("exp(z1, z2)")


def test_imaginary_unit_and_pow():
    assert dsl.evaluate_at(dsl.parse("i^2"), [0j]) == -1
    assert dsl.parse("z1^3") == Pow(Var("z", 1), 3)


def test_evaluate_functions():
    z = [0.3 + 0.4j]
    eta = [1 - 2j]
    v = dsl.evaluate_at(dsl.parse("abs2(z1) + conj(eta1) + exp(z1) + log(eta1) + sqrt(eta1)"), z, eta)
    want = abs(z[0]) ** 2 + eta[0].conjugate() + cmath.exp(z[0]) + cmath.log(eta[0]) + cmath.sqrt(eta[0])
    assert abs(v - want) < 1e-14


def test_domain_errors_name_subexpression():
    with pytest.raises(DomainError) as info:
        dsl.evaluate_at(dsl.parse("1/(z1 - z1)"), [0.5])
    assert "z1" in str(info.value)
    with pytest.raises(DomainError):
        dsl.evaluate_at(dsl.parse("log(z1)"), [0j])


def test_unbound():
    with pytest.raises(UnboundVariable):
        dsl.evaluate(dsl.parse("z2"), {("z", 1): 1.0})


def test_substitute():
    e = dsl.substitute(dsl.parse("z1*conj(z1)"), {("z", 1): dsl.parse("2*z2")})
    assert abs(dsl.evaluate_at(e, [0, 1j]) - 4) < 1e-15


# ---- property: printing and re-parsing is the identity on values

LEAVES = st.one_of(
    st.sampled_from([Var("z", 1), Var("z", 2), Var("eta", 1), Var("eta", 2)]),
    st.integers(1, 9).map(lambda k: Num(complex(k))),
    st.floats(0.1, 3.0).map(lambda x: Num(complex(round(x, 3)))),
)


def _extend(children):
    return st.one_of(
        st.tuples(st.sampled_from("+-*"), children, children).map(lambda t: Binary(*t)),
        st.tuples(st.sampled_from(["conj", "abs2", "neg"]), children).map(lambda t: Unary(*t)),
        st.tuples(children, st.integers(0, 3)).map(lambda t: Pow(*t)),
    )


EXPRS = st.recursive(LEAVES, _extend, max_leaves=8)


@settings(max_examples=150, deadline=None)
@given(EXPRS)
def test_print_parse_roundtrip(e):
    text = dsl.to_text(e)
    again = dsl.parse(text)
    z, eta = [0.3 + 0.2j, -0.1 + 0.4j], [0.7 - 0.2j, 0.5 + 0.5j]
    a, b = dsl.evaluate_at(e, z, eta), dsl.evaluate_at(again, z, eta)
    assert abs(a - b) <= 1e-12 * (1 + abs(a))
    assert dsl.to_text(again) == text
