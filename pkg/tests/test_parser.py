from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crjets.parser import ParseError, parse_expression, parse_series
from crjets.series import TruncatedSeries, complex_space, real_space, realify

from oracles import padd, pmul, poly, ppow

C = complex_space(1, 1)
R = real_space(1, 1)


def test_conjugate_variables():
    assert parse_series("~z1*z1", C, 2).to_text() == "z1*~z1"


def test_binomial():
    assert parse_series("(x1+y1)^2", R, 2).to_text() == "x1^2 + 2*x1*y1 + y1^2"


def test_imaginary_part_identity():
    im_w = parse_series("-1/2*i*w1 + 1/2*i*~w1", C, 2)
    assert realify(im_w, R).to_text() == "v1"
    # (i/2)(w - ~w) = (i/2)(2iv) = -v
    assert realify(parse_series("1/2*i*w1 - 1/2*i*~w1", C, 2), R).to_text() == "-v1"


def test_precedence():
    assert parse_series("-x1^2", R, 3).to_text() == "-x1^2"
    assert parse_series("2*x1^2", R, 3).to_text() == "2*x1^2"
    assert parse_series("1 - x1 - y1", R, 3).to_text() == "1 - x1 - y1"
    assert parse_series("x1 - (y1 - u1)", R, 3).to_text() == "x1 - y1 + u1"
    assert parse_series("1/2/2*x1", R, 3).to_text() == "1/4*x1"


def test_literals():
    assert parse_series("0.25*x1", R, 2).to_text() == "1/4*x1"
    assert parse_series("(1/2, -3)*z1", C, 2).to_text() == "(1/2, -3)*z1"
    assert parse_series("i^2", C, 2).to_text() == "-1"
    assert parse_series("x1/(2*i)", R, 2).to_text() == "(0, -1/2)*x1"


def test_truncation():
    assert parse_series("(1 + x1)^5", R, 2).to_text() == "1 + 5*x1 + 10*x1^2"


def test_canonical_text_parses_back():
    s = TruncatedSeries(C, 3, {(1, 0, 0, 0): (1, 2), (2, 1, 0, 0): Fraction(-3, 7), (0, 0, 1, 1): 5})
    assert parse_series(s.to_text(), C, 3) == s


@pytest.mark.parametrize(
    "text, position",
    [
        ("x1 +", 4),
        ("x1 * * y1", 5),
        ("(x1", 3),
        ("x1 $", 3),
        ("x1^-2", 3),
        ("x1^1.5", 3),
        ("x1^y1", 3),
        ("", 0),
        ("q7", 0),
        ("x1/y1", 2),
        ("x1/0", 2),
        ("(x1, 2)", 0),
    ],
)
def test_errors_carry_positions(text, position):
    with pytest.raises(ParseError) as info:
        parse_series(text, R, 3)
    assert info.value.position == position


# -- random expressions against a direct term-list evaluation -------------------------

NAMES = R.names
ONE = (Fraction(1), Fraction(0))


def leaf():
    return st.one_of(
        st.builds(lambda n: ("num", Fraction(n)), st.integers(0, 6)),
        st.builds(lambda p, q: ("num", Fraction(p, q)), st.integers(0, 6), st.integers(1, 5)),
        st.builds(lambda n: ("var", n), st.sampled_from(NAMES)),
        st.just(("i",)),
    )


def extend(children):
    return st.one_of(
        st.tuples(st.sampled_from(["+", "-", "*"]), children, children),
        st.tuples(st.just("^"), children, st.integers(0, 3)),
        st.tuples(st.just("neg"), children),
    )


trees = st.recursive(leaf(), extend, max_leaves=8)


def render(node):
    kind = node[0]
    if kind == "num":
        v = node[1]
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if kind == "var":
        return node[1]
    if kind == "i":
        return "i"
    if kind == "neg":
        return f"-({render(node[1])})"
    if kind == "^":
        return f"({render(node[1])})^{node[2]}"
    return f"({render(node[1])} {kind} {render(node[2])})"


def direct(node, k):
    nv = len(NAMES)
    zero = (0,) * nv
    kind = node[0]
    if kind == "num":
        return {zero: (node[1], Fraction(0))} if node[1] else {}
    if kind == "i":
        return {zero: (Fraction(0), Fraction(1))}
    if kind == "var":
        e = [0] * nv
        e[NAMES.index(node[1])] = 1
        return {tuple(e): ONE} if k >= 1 else {}
    if kind == "neg":
        return {e: (-a, -b) for e, (a, b) in direct(node[1], k).items()}
    if kind == "^":
        return ppow(direct(node[1], k), node[2], nv, k)
    a, b = direct(node[1], k), direct(node[2], k)
    if kind == "+":
        return padd(a, b)
    if kind == "-":
        return padd(a, {e: (-x, -y) for e, (x, y) in b.items()})
    return pmul(a, b, k)


@settings(max_examples=200, deadline=None)
@given(trees, st.integers(0, 4))
def test_random_expressions_match_direct_construction(tree, k):
    text = render(tree)
    parsed = parse_series(text, R, k)
    built = TruncatedSeries(R, k, direct(tree, k))
    assert parsed == built
    assert poly(parsed) == direct(tree, k)
    assert parse_expression(text) == parse_expression(text)
