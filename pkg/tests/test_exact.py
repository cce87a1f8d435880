"""Exact scalar and polynomial layer."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wigreg.exact import (
    GR_I,
    GR_ONE,
    GR_ZERO,
    GaussianRational,
    MultiPoly,
    Substitution,
    format_rational,
    parse_rational,
)

# ---------------------------------------------------------------------------
# rationals and Gaussian rationals
# ---------------------------------------------------------------------------


def test_parse_rational_accepts_integer_and_fraction_strings():
    assert parse_rational("3") == Fraction(3)
    assert parse_rational("-7/2") == Fraction(-7, 2)
    assert parse_rational("+4/6") == Fraction(2, 3)


@pytest.mark.parametrize("bad", ["", "1.5", "1e3", "a/b", "1/0", "2/", "/3", "1 / 2"])
def test_parse_rational_rejects_garbage(bad):
    with pytest.raises(ValueError):
        parse_rational(bad)


def test_format_round_trips_parse():
    for text in ["0", "5", "-12", "7/3", "-1/9"]:
        assert format_rational(parse_rational(text)) == text


def test_gaussian_rational_basic_identities():
    z = GaussianRational(Fraction(1, 2), Fraction(-3))
    assert z + GR_ZERO == z
    assert z * GR_ONE == z
    assert GR_I * GR_I == GaussianRational(Fraction(-1))
    assert (z * z.conjugate()).im == 0
    assert z / z == GR_ONE


def test_gaussian_rational_division_and_power():
    z = GaussianRational(Fraction(2), Fraction(1))
    w = GaussianRational(Fraction(0), Fraction(-3))
    assert (z / w) * w == z
    assert z ** 3 == z * z * z
    assert z ** 0 == GR_ONE
    with pytest.raises(ZeroDivisionError):
        z / GR_ZERO


scalars = st.builds(
    GaussianRational,
    st.fractions(min_value=-20, max_value=20, max_denominator=12),
    st.fractions(min_value=-20, max_value=20, max_denominator=12),
)


@given(scalars, scalars, scalars)
def test_gaussian_rational_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a
    assert a * b == b * a


@given(scalars)
def test_gaussian_rational_json_round_trip(z):
    assert GaussianRational.from_json(z.to_json()) == z


def test_gaussian_rational_to_complex():
    z = GaussianRational(Fraction(1, 4), Fraction(-2))
    assert z.to_complex() == 0.25 - 2j


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------


@st.composite
def polys(draw, vars_=("x", "xi"), max_terms=6, max_degree=5):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        exp = tuple(draw(st.integers(0, max_degree)) for _ in vars_)
        terms[exp] = draw(scalars)
    return MultiPoly(vars_, terms)


def test_constructors_and_degree():
    x = MultiPoly.variable("x")
    assert x.total_degree() == 1
    assert MultiPoly.zero(("x",)).total_degree() == -1
    five = MultiPoly.constant(GaussianRational(Fraction(5)), ("x", "xi"))
    assert five.total_degree() == 0
    assert five.constant_term() == GaussianRational(Fraction(5))


def test_monomial_arithmetic_example():
    x = MultiPoly.variable("x")
    xi = MultiPoly.variable("xi")
    p = (x + xi) * (x - xi)
    assert p == x * x - xi * xi
    assert p.coefficient({"x": 1, "xi": 1}).is_zero()


def test_unknown_variable_rejected():
    with pytest.raises(ValueError):
        MultiPoly.variable("zeta")
    x = MultiPoly.variable("x")
    with pytest.raises(ValueError):
        x.diff("nope", 1)


@given(polys(), polys(), polys())
@settings(max_examples=60)
def test_poly_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@given(polys(), polys())
@settings(max_examples=60)
def test_diff_is_a_derivation(a, b):
    lhs = (a * b).diff("x", 1)
    rhs = a.diff("x", 1) * b + a * b.diff("x", 1)
    assert lhs == rhs


@given(polys())
@settings(max_examples=60)
def test_mixed_partials_commute(a):
    assert a.diff("x", 1).diff("xi", 1) == a.diff("xi", 1).diff("x", 1)


@given(polys(), polys())
@settings(max_examples=40)
def test_substitution_is_a_ring_homomorphism(a, b):
    images = {
        "x": MultiPoly.variable("x") + MultiPoly.variable("xi"),
        "xi": MultiPoly.variable("x") * MultiPoly.variable("xi"),
    }
    sub = Substitution(images)
    assert (a + b).substitute(sub) == a.substitute(sub) + b.substitute(sub)
    assert (a * b).substitute(sub) == a.substitute(sub) * b.substitute(sub)


def test_substitution_requires_every_variable():
    p = MultiPoly.variable("x") + MultiPoly.variable("xi")
    with pytest.raises(ValueError):
        p.substitute({"x": MultiPoly.variable("x")})


def test_identity_substitution_fixes_everything():
    p = MultiPoly.variable("x") ** 3 - MultiPoly.variable("xi")
    assert p.substitute(Substitution.identity(p.vars)) == p


@given(polys())
@settings(max_examples=60)
def test_poly_json_round_trip(a):
    assert MultiPoly.from_json(a.to_json()) == a


def test_promote_and_restrict():
    x = MultiPoly.variable("x")
    up = x.promote(("x", "y", "xi"))
    assert up.vars == ("x", "y", "xi")
    assert up.restrict(("x",)) == x
    with pytest.raises(ValueError):
        (up * MultiPoly.variable("y").promote(("x", "y", "xi"))).restrict(("x",))


def test_eval_numpy_matches_horner_by_hand():
    import numpy as np

    x = MultiPoly.variable("x")
    xi = MultiPoly.variable("xi")
    p = x * x + xi.scale(GaussianRational(Fraction(0), Fraction(2)))
    xs = np.linspace(-2, 2, 7)
    vals = p.eval_numpy({"x": xs, "xi": xs})
    assert np.allclose(vals, xs ** 2 + 2j * xs)


def test_leading_form_and_coefficient():
    x = MultiPoly.variable("x")
    xi = MultiPoly.variable("xi")
    p = x ** 4 + x * xi + xi
    assert p.leading_form() == x ** 4
    assert p.coefficient({"x": 1, "xi": 1}) == GR_ONE
    assert p.degree_in("xi") == 1
