from hypothesis import given, settings, strategies as st

from prequantum import expr as ex
from prequantum.forms import DiffForm, VectorField, differential

COORDS = ("x", "y", "z")
x, y, z = (ex.sym(c) for c in COORDS)

coefficients = st.sampled_from([
    x * y, ex.sin(x) * z, ex.exp(y * z), x ** 3 - y, ex.const(2), ex.cos(x + y) * z ** 2,
])


@given(st.lists(coefficients, min_size=3, max_size=3))
@settings(max_examples=40, deadline=None)
def test_d_squared_vanishes_on_one_forms(comps):
    w = DiffForm.one_form(COORDS, comps)
    assert w.d().d().equals(DiffForm(COORDS, 3, {}))


@given(coefficients)
@settings(max_examples=20, deadline=None)
def test_d_squared_vanishes_on_functions(f):
    assert differential(f, COORDS).d().equals(DiffForm(COORDS, 2, {}))


def test_from_names_resigns_unordered_basis():
    w = DiffForm.from_names(COORDS, {("y", "x"): ex.ONE})
    assert w[(0, 1)] == ex.const(-1)
    assert w[(1, 0)] == ex.ONE


def test_two_form_on_fields_is_antisymmetric():
    w = DiffForm.from_names(COORDS, {("x", "y"): z})
    X = VectorField(COORDS, (ex.ONE, ex.ZERO, ex.ZERO))
    Y = VectorField(COORDS, (ex.ZERO, ex.ONE, ex.ZERO))
    assert ex.expr_equal(w(X, Y), z)
    assert ex.expr_equal(w(Y, X), ex.neg(z))


def test_pullback_under_translation_and_scaling():
    w = DiffForm.from_names(("u", "v"), {("u", "v"): ex.sym("u")})
    # u = 2a + 1, v = b - 3
    a, b = ex.sym("a"), ex.sym("b")
    pulled = w.pullback(("a", "b"), (2 * a + 1, b - 3))
    assert pulled.equals(DiffForm.from_names(("a", "b"), {("a", "b"): 2 * (2 * a + 1)}))


def test_pullback_commutes_with_d():
    w = DiffForm.one_form(("u", "v"), (ex.sym("u") * ex.sym("v"), ex.sin(ex.sym("u"))))
    a, b = ex.sym("a"), ex.sym("b")
    phi = (a + b ** 2, a * b)
    assert w.pullback(("a", "b"), phi).d().equals(w.d().pullback(("a", "b"), phi))
