from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from prequantum import expr as ex
from prequantum.cech import (Chart, Cochain, CoverError, CoverPotentials, GoodCover, PotentialError,
                             SpreadError, cech_delta, cocycle_of_omega, cohomology_rank,
                             integrality_check, is_coboundary, is_cocycle, random_cochain)
from prequantum.fixtures import arc_jump, torus_cover, torus_potentials
from prequantum.forms import DiffForm

COVER = torus_cover()
BASE = torus_potentials(1, COVER)


def test_torus_nerve_shape():
    assert [len(COVER.nerve(p)) for p in range(4)] == [9, 36, 36, 9]
    COVER.validate()
    assert COVER.metadata["good"] is True


def test_arc_jumps_are_antisymmetric():
    for a in range(3):
        for b in range(3):
            assert arc_jump(a, b) == -arc_jump(b, a)


def test_torus_betti_numbers():
    assert [cohomology_rank(COVER, p) for p in range(3)] == [1, 2, 1]


# delta ---------------------------------------------------------------------


def test_delta_of_zero_cochain():
    mu = Cochain(0, "Z", {(i,): 10 * i + 1 for i in range(9)})
    d = cech_delta(mu, COVER)
    for i, j in COVER.nerve(1):
        assert d[(i, j)] == mu[(j,)] - mu[(i,)]
        assert d[(j, i)] == -d[(i, j)]


def test_delta_of_constant_vanishes():
    assert cech_delta(Cochain(0, "Q", {(i,): Fraction(7, 3) for i in range(9)}), COVER).is_zero()


@pytest.mark.parametrize("degree", [0, 1])
def test_delta_squared_vanishes(degree):
    for seed in range(100):
        c = random_cochain(COVER, degree, seed)
        assert cech_delta(cech_delta(c, COVER), COVER).is_zero()


@given(st.integers(0, 10 ** 6), st.integers(0, 10 ** 6))
@settings(max_examples=30, deadline=None)
def test_delta_is_additive(s1, s2):
    a, b = random_cochain(COVER, 1, s1), random_cochain(COVER, 1, s2)
    lhs = cech_delta(a + b, COVER)
    rhs = cech_delta(a, COVER) + cech_delta(b, COVER)
    assert lhs.max_abs_diff(rhs) == 0


@given(st.integers(0, 10 ** 6))
@settings(max_examples=30, deadline=None)
def test_ring_embedding_commutes_with_delta(seed):
    c = random_cochain(COVER, 1, seed, ring="Z")
    via_z = cech_delta(c, COVER).to_ring("R")
    via_r = cech_delta(c.to_ring("R"), COVER)
    assert via_z.max_abs_diff(via_r) == 0


def test_delta_beyond_recorded_depth_is_an_error():
    with pytest.raises(CoverError):
        cech_delta(random_cochain(COVER, 3, 0), COVER)


def test_signed_lookup():
    c = Cochain(1, "Q", {(0, 1): Fraction(1, 2)})
    assert c[(1, 0)] == Fraction(-1, 2)
    assert c[(0, 0)] == 0


def test_integer_ring_rejects_fractions():
    with pytest.raises(ValueError):
        Cochain(1, "Z", {(0, 1): Fraction(1, 2)})


# cocycles and coboundaries ----------------------------------------------------


def test_zero_cochain_is_cocycle_and_coboundary():
    z = Cochain.zero(COVER, 1, "Z")
    assert is_cocycle(z, COVER)
    eta = is_coboundary(z, COVER)
    assert eta is not None and cech_delta(eta, COVER).is_zero()


@pytest.mark.parametrize("ring", ["Z", "Q", "R"])
def test_coboundaries_are_recognised(ring):
    for seed in range(10):
        c = random_cochain(COVER, 1, seed, ring="Z" if ring == "Z" else "Q").to_ring(ring)
        target = cech_delta(c, COVER)
        eta = is_coboundary(target, COVER)
        assert eta is not None
        assert cech_delta(eta, COVER).max_abs_diff(target) < 1e-9


def test_torus_class_is_integral_but_not_a_coboundary():
    mu = cocycle_of_omega(BASE).mu
    mu_z = Cochain(2, "Z", {t: round(v) for t, v in mu.values.items()})
    assert is_cocycle(mu_z, COVER)
    assert is_coboundary(mu_z, COVER) is None
    assert is_coboundary(mu_z.to_ring("Q"), COVER) is None


def test_twice_the_generator_is_not_a_coboundary():
    mu = Cochain(2, "Z", {t: 2 * round(v) for t, v in cocycle_of_omega(BASE).mu.values.items()})
    assert is_coboundary(mu, COVER) is None


# potentials and the cocycle of omega -------------------------------------------


def test_torus_potentials_satisfy_invariants():
    BASE.validate()
    assert max(BASE.overlap_residuals().values()) < 1e-12


def test_zero_potentials_give_zero_cocycle():
    cp = torus_potentials(0, COVER)
    assert cocycle_of_omega(cp).mu.is_zero()


def test_mu_takes_integer_values_for_k1():
    result = cocycle_of_omega(BASE)
    assert result.spread_max < 1e-8 and result.cocycle_checked
    assert all(abs(v - round(v)) < 1e-12 for v in result.mu.values.values())
    assert {round(v) for v in result.mu.values.values()} == {0, 1}


@pytest.mark.parametrize("k", [Fraction(1, 2), -2, 3, Fraction(3, 2)])
def test_mu_scales_linearly(k):
    base = cocycle_of_omega(BASE).mu
    scaled = cocycle_of_omega(torus_potentials(k, COVER)).mu
    assert scaled.max_abs_diff(base.scale(float(k))) < 1e-12
    assert cocycle_of_omega(BASE.scale(k)).mu.max_abs_diff(scaled) < 1e-12


@pytest.mark.parametrize("k", [-2, -1, 0, 1, 2, 3])
def test_integral_levels(k):
    report = integrality_check(torus_potentials(k, COVER))
    assert report.verdict and report.witness is None
    assert report.to_json()["verdict"] == "integral"


@pytest.mark.parametrize("k", [Fraction(1, 2), Fraction(3, 2)])
def test_fractional_levels(k):
    report = integrality_check(torus_potentials(k, COVER))
    assert not report.verdict
    triple, value = report.witness
    assert (value - float(k) * round(cocycle_of_omega(BASE).mu.values[triple])) == pytest.approx(0)
    assert abs(value - round(value)) == pytest.approx(0.5)
    assert report.to_json()["verdict"] == "not_integral"


def test_inconsistent_overlap_function_is_rejected():
    f = dict(BASE.f)
    pair = COVER.nerve(1)[0]
    f[pair] = ex.add(f[pair], ex.mul(ex.const(Fraction(1, 10)), ex.sym("x")))
    bad = CoverPotentials(COVER, BASE.omega, BASE.alpha, f)
    with pytest.raises(PotentialError):
        bad.validate()


def test_nonconstant_mu_raises_spread_error():
    f = dict(BASE.f)
    i, j = next(p for p in COVER.nerve(1) if any(p[:2] == t[:2] for t in COVER.nerve(2)))
    f[(i, j)] = ex.add(f[(i, j)], ex.mul(ex.sym("x"), ex.sym("y")))
    with pytest.raises(SpreadError):
        cocycle_of_omega(CoverPotentials(COVER, BASE.omega, BASE.alpha, f))
    assert integrality_check(CoverPotentials(COVER, BASE.omega, BASE.alpha, f)).verdict is False


def test_alpha_must_be_a_primitive():
    alpha = dict(BASE.alpha)
    alpha[0] = DiffForm(("x", "y"), 1, {(1,): ex.mul(2, ex.sym("x"))})
    with pytest.raises(PotentialError):
        CoverPotentials(COVER, BASE.omega, alpha, BASE.f).validate()


# cover validation ---------------------------------------------------------------


def _line_cover(samples, simplices=((0, 1),)):
    charts = (Chart("A", ("t",)), Chart("B", ("s",)))
    maps = {(0, 1): (ex.sym("t") - 1,), (1, 0): (ex.sym("s") + 1,)}
    return GoodCover(charts, frozenset(simplices), samples, maps, {"good": True})


def test_cover_validation_catches_bad_samples():
    good = _line_cover({(0, 1): [{0: (1.5,), 1: (0.5,)}, {0: (1.2,), 1: (0.2,)}]})
    good.validate()
    with pytest.raises(CoverError):
        _line_cover({(0, 1): [{0: (1.5,), 1: (0.6,)}, {0: (1.2,), 1: (0.2,)}]}).validate()
    with pytest.raises(CoverError):
        _line_cover({(0, 1): [{0: (1.5,), 1: (0.5,)}]}).validate()


def test_cover_validation_requires_downward_closure():
    charts = tuple(Chart(n, ("t",)) for n in "ABC")
    cover = GoodCover(charts, frozenset({(0, 1, 2)}), {}, {})
    with pytest.raises(CoverError):
        cover.validate()
