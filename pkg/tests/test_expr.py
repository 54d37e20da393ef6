import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from prequantum import expr as ex
from prequantum.expr import DomainError, ExprSyntaxError, UnknownIdentifier

COORDS = ("q1", "p1")
q1, p1 = ex.sym("q1"), ex.sym("p1")


def P(text, params=()):
    return ex.parse(text, COORDS, params)


# strategies ---------------------------------------------------------------

leaves = st.one_of(
    st.sampled_from([q1, p1]),
    st.integers(-4, 4).map(ex.const),
    st.fractions(max_denominator=5).filter(lambda f: abs(f) < 5).map(ex.const),
)


def _grow(children):
    return st.one_of(
        st.tuples(children, children).map(lambda t: ex.add(*t)),
        st.tuples(children, children).map(lambda t: ex.mul(*t)),
        st.tuples(children, children).map(lambda t: ex.sub(*t)),
        st.tuples(children, st.integers(0, 3)).map(lambda t: ex.pow_(*t)),
    )


polys = st.recursive(leaves, _grow, max_leaves=6)
smooth = st.recursive(
    leaves,
    lambda c: st.one_of(_grow(c), st.tuples(st.sampled_from(["sin", "cos", "exp"]), c)
                        .map(lambda t: ex.func(*t))),
    max_leaves=5,
)


def _safe(build):
    def go(args):
        try:
            return build(*args)
        except DomainError:
            return args[0]
    return go


anything = st.recursive(
    st.one_of(leaves, st.just(ex.PI), st.just(ex.I), st.just(ex.const(complex(1.5, -2)))),
    lambda c: st.one_of(
        _grow(c),
        st.tuples(c, c).map(_safe(ex.div)),
        st.tuples(c, st.integers(-3, -1)).map(_safe(ex.pow_)),
        st.tuples(st.sampled_from(ex.FUNCTIONS), c).map(lambda t: ex.func(*t)),
    ),
    max_leaves=6,
)


# parse --------------------------------------------------------------------


def test_parse_hamiltonian_with_params():
    H = P("p1^2/(2*m)+U", params=("m", "U"))
    env = {"q1": 0.0, "p1": 3.0, "m": 2.0, "U": 0.5}
    assert ex.evaluate(H, env) == pytest.approx(9 / 4 + 0.5)
    assert ex.free_symbols(H) == {"p1", "m", "U"}


def test_parse_variable_node():
    assert P("q1") == ex.Sym("q1")


def test_unbalanced_paren_reports_offset():
    with pytest.raises(ExprSyntaxError) as info:
        P("(q1")
    assert info.value.position == 3


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifier) as info:
        P("q1 + zeta")
    assert info.value.name == "zeta"
    assert info.value.position == 5


@pytest.mark.parametrize("text", ["q1 +", "2 ** q1", "q1^1.5", "sin q1", "", "q1 p1", "3i i"])
def test_syntax_errors(text):
    with pytest.raises(ex.ParseError):
        P(text)


def test_precedence_and_associativity():
    assert ex.expr_equal(P("2^3^2"), ex.const(512))
    assert ex.expr_equal(P("-q1^2"), ex.neg(ex.pow_(q1, 2)))
    assert ex.expr_equal(P("q1 - p1 - 1"), q1 - p1 - 1)
    assert ex.expr_equal(P("q1 / p1 * 2"), ex.mul(2, ex.div(q1, p1)))


def test_imaginary_literals_and_pi():
    assert ex.evaluate(P("2.5i"), {}) == 2.5j
    assert ex.evaluate(P("i*i"), {}) == -1
    assert ex.evaluate(P("pi"), {}) == pytest.approx(math.pi)


@given(anything)
@settings(max_examples=200, deadline=None)
def test_parse_print_roundtrip(e):
    assert ex.parse(ex.to_str(e), COORDS) == e


# diff ---------------------------------------------------------------------


def test_power_rule():
    assert ex.expr_equal(ex.diff(P("q1^2"), "q1"), P("2*q1"))


def test_independent_variable():
    assert ex.diff(q1, "p1") == ex.ZERO


def test_diff_matches_central_difference():
    e = P("sin(q1*p1)")
    d = ex.diff(e, "q1")
    h = 1e-6
    fd = (ex.evaluate(e, {"q1": 0.3 + h, "p1": 0.7}) - ex.evaluate(e, {"q1": 0.3 - h, "p1": 0.7})) / (2 * h)
    assert abs(ex.evaluate(d, {"q1": 0.3, "p1": 0.7}) - fd) < 1e-7


def test_diff_of_quotient_and_functions():
    e = P("log(q1) + sqrt(q1) + 1/q1 + exp(p1)*cos(q1)")
    expected = P("1/q1 + 1/(2*sqrt(q1)) - 1/q1^2 - exp(p1)*sin(q1)")
    assert ex.expr_equal(ex.diff(e, "q1"), expected, domain=(0.5, 3))


@given(smooth, smooth)
@settings(max_examples=60, deadline=None)
def test_diff_linear(a, b):
    lhs = ex.diff(ex.add(a, b), "q1")
    assert ex.expr_equal(lhs, ex.add(ex.diff(a, "q1"), ex.diff(b, "q1")), tol=1e-8)


@given(smooth, smooth)
@settings(max_examples=60, deadline=None)
def test_leibniz(a, b):
    lhs = ex.diff(ex.mul(a, b), "p1")
    rhs = ex.add(ex.mul(ex.diff(a, "p1"), b), ex.mul(a, ex.diff(b, "p1")))
    assert ex.expr_equal(lhs, rhs, tol=1e-8)


@given(smooth)
@settings(max_examples=60, deadline=None)
def test_mixed_partials_commute(a):
    assert ex.expr_equal(ex.diff(ex.diff(a, "q1"), "p1"), ex.diff(ex.diff(a, "p1"), "q1"), tol=1e-8)


@given(polys, polys)
@settings(max_examples=100, deadline=None)
def test_polynomial_leibniz_is_exact(a, b):
    lhs = ex.expand(ex.diff(ex.mul(a, b), "q1"))
    rhs = ex.expand(ex.add(ex.mul(ex.diff(a, "q1"), b), ex.mul(a, ex.diff(b, "q1"))))
    assert ex.to_poly(ex.sub(lhs, rhs)) == {}


# evaluate -----------------------------------------------------------------


def test_evaluate_sum():
    assert ex.evaluate(P("q1+p1"), {"q1": 1, "p1": 2}) == 3


def test_euler_identity():
    assert abs(ex.evaluate(P("exp(2*pi*i*0.5)"), {}) - (-1)) < 1e-12


def test_pole_is_domain_error():
    with pytest.raises(DomainError):
        ex.evaluate(P("1/q1"), {"q1": 0.0})


def test_log_of_zero_is_domain_error():
    with pytest.raises(DomainError):
        ex.evaluate(P("log(q1)"), {"q1": 0.0})


def test_log_uses_principal_branch():
    assert ex.evaluate(P("log(q1)"), {"q1": -1.0}) == pytest.approx(cmath.log(-1))


def test_vectorized_evaluation():
    xs = np.linspace(0, 1, 5)
    out = ex.evaluate(P("q1*p1 + 1"), {"q1": xs, "p1": 2.0})
    assert np.allclose(out, 2 * xs + 1)


# expr_equal ---------------------------------------------------------------


def test_binomial_is_exactly_equal():
    a, b = P("(q1+p1)^2"), P("q1^2+2*q1*p1+p1^2")
    assert ex.is_polynomial(a) and ex.is_polynomial(b)
    assert ex.expr_equal(a, b)


def test_distinct_variables_differ():
    assert not ex.expr_equal(q1, p1)


def test_pythagoras_by_sampling():
    assert ex.expr_equal(P("sin(q1)^2+cos(q1)^2"), ex.ONE, domain=(-3, 3), trials=100, tol=1e-10)


def test_exact_disagreement_overrides_sampling():
    # differs by 1e-13, below the sampling tolerance but not zero
    a = P("q1")
    b = ex.add(q1, ex.const(Fraction(1, 10 ** 13)))
    assert not ex.expr_equal(a, b, tol=1e-10)


def test_laurent_monomials_cancel_exactly():
    assert ex.expr_equal(P("q1/q1"), ex.ONE)
    assert ex.expand(P("p1^2/(2*q1) * q1")) == ex.expand(P("p1^2/2"))


def test_retry_budget_exhaustion_raises():
    e = P("log(q1) + sin(p1)")
    with pytest.raises(DomainError):
        ex.expr_equal(e, e, domain={"q1": (0.0, 0.0), "p1": (-1, 1)}, retry_budget=5)


def test_pi_stays_exact():
    e = ex.expand(P("2*pi*q1 - pi*q1 - pi*q1"))
    assert e == ex.ZERO


def test_conjugate_and_parts():
    e = P("(2 + 3i) * q1")
    assert ex.expr_equal(ex.real_part(e), P("2*q1"))
    assert ex.expr_equal(ex.imag_part(e), P("3*q1"))
    assert ex.expr_equal(ex.conjugate(e), P("(2 - 3i) * q1"))
