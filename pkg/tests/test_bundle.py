import cmath
from fractions import Fraction

import numpy as np
import pytest

from prequantum import expr as ex
from prequantum.bundle import (SectionFamily, TransitionData, connection_consistency,
                               curvature_per_chart, from_integral_cocycle, glue_section,
                               hermitian_compatibility, section_from_tree, verify_cocycle)
from prequantum.cech import CoverPotentials, cocycle_of_omega, integrality_check
from prequantum.fixtures import single_chart_potentials, torus_cover, torus_potentials
from prequantum.forms import DiffForm
from prequantum.prequant import ConnectionPotential, curvature
from prequantum.symplectic import CanonicalChart

COVER = torus_cover()
KS = [-2, -1, 0, 1, 2, 3, Fraction(1, 2), Fraction(3, 2)]


def potentials(k):
    return torus_potentials(k, COVER)


def trivial_transitions():
    return TransitionData(COVER, {(i, j): ex.ONE for a, b in COVER.nerve(1) for i, j in ((a, b), (b, a))})


def test_trivial_transitions_have_no_defect():
    td = trivial_transitions()
    assert verify_cocycle(td).deviation == 0
    assert td.invariant_violations() == []


def test_zero_overlap_functions_give_trivial_transitions():
    td = from_integral_cocycle(potentials(0))
    assert all(ex.evaluate(g, {"x": 0.3, "y": -0.2}) == 1 for g in td.g.values())


@pytest.mark.parametrize("k", KS)
def test_cocycle_condition_matches_integrality(k):
    cp = potentials(k)
    cocycle = verify_cocycle(from_integral_cocycle(cp))
    assert cocycle.verdict == integrality_check(cp).verdict


def test_integral_level_passes_cocycle_check():
    report = verify_cocycle(from_integral_cocycle(potentials(1)))
    assert report.verdict and report.deviation < 1e-10 and report.witness is None


def test_half_level_has_minus_one_holonomy():
    report = verify_cocycle(from_integral_cocycle(potentials(Fraction(1, 2))))
    assert not report.verdict
    assert report.deviation == pytest.approx(abs(cmath.exp(1j * cmath.pi) - 1), abs=1e-12)
    triple, sample = report.witness
    assert COVER.is_nonempty(triple) and 0 <= sample < len(COVER.samples[triple])


@pytest.mark.parametrize("k", [1, Fraction(1, 2), Fraction(3, 2), 2])
def test_holonomy_is_exp_of_mu(k):
    cp = potentials(k)
    td = from_integral_cocycle(cp)
    mu = cocycle_of_omega(cp).mu
    for i, j, l in COVER.nerve(2):
        t = (i, j, l)
        g = (td.values(i, j, t) * np.array([ex.evaluate(td.g[(j, l)], e) for e in COVER.sample_envs(t, j)])
             * np.array([ex.evaluate(td.g[(l, i)], e) for e in COVER.sample_envs(t, l)]))
        assert np.max(np.abs(g - cmath.exp(2j * cmath.pi * mu.values[t]))) < 1e-8


def test_transition_invariants_hold_for_fixture():
    assert from_integral_cocycle(potentials(Fraction(1, 2))).invariant_violations() == []


def test_transition_invariants_catch_authoring_errors():
    td = trivial_transitions()
    i, j = COVER.nerve(1)[0]
    td.g[(j, i)] = ex.const(2)
    td.g[(i, j)] = ex.ZERO
    problems = {why for _, why in td.invariant_violations()}
    assert problems == {"vanishes", "g_ij g_ji != 1"}


# connection ------------------------------------------------------------------


@pytest.mark.parametrize("k", KS)
def test_connection_consistency_from_cocycle(k):
    cp = potentials(k)
    report = connection_consistency(cp, from_integral_cocycle(cp))
    assert report.verdict and report.global_connection and report.residual_max < 1e-8


def test_trivial_connection_is_consistent():
    cp = CoverPotentials(COVER, {i: DiffForm(("x", "y"), 2, {}) for i in range(9)},
                         {i: DiffForm(("x", "y"), 1, {}) for i in range(9)},
                         {ij: ex.ZERO for ij in COVER.nerve(1)})
    assert connection_consistency(cp, trivial_transitions()).residual_max == 0


def test_perturbed_potential_breaks_consistency():
    cp = potentials(1)
    td = from_integral_cocycle(cp)
    alpha = dict(cp.alpha)
    alpha[4] = alpha[4] + DiffForm(("x", "y"), 1, {(1,): ex.const(Fraction(1, 10))})
    report = connection_consistency(CoverPotentials(COVER, cp.omega, alpha, cp.f), td)
    assert not report.verdict
    assert report.residual_max >= 0.1 - 1e-8


# curvature -------------------------------------------------------------------


@pytest.mark.parametrize("k", [1, Fraction(1, 2), -2])
def test_curvature_is_two_pi_i_omega(k):
    report = curvature_per_chart(potentials(k))
    assert report.verdict and report.matches_omega and report.overlap_max < 1e-8
    expected = DiffForm(("x", "y"), 2, {(0, 1): ex.mul(2, ex.PI, ex.I, ex.const(k))})
    assert all(R.equals(expected) for R in report.curvature.values())


def test_closed_potentials_are_flat():
    cp = potentials(0)
    report = curvature_per_chart(cp)
    assert all(not R.components or R.equals(DiffForm(("x", "y"), 2, {})) for R in report.curvature.values())


@pytest.mark.parametrize("make", [ConnectionPotential.q_dp, ConnectionPotential.minus_p_dq])
def test_single_chart_agrees_with_prequant_curvature(make):
    chart = CanonicalChart(2)
    B = make(chart)
    report = curvature_per_chart(single_chart_potentials(chart, B))
    assert report.curvature[0].equals(curvature(B))


# hermitian structure -------------------------------------------------------------


def test_real_overlap_functions_are_hermitian():
    cp = potentials(1)
    report = hermitian_compatibility(cp, from_integral_cocycle(cp))
    assert report.verdict and report.alpha_real and report.unitary_max < 1e-12


def test_imaginary_overlap_functions_are_not_hermitian():
    cp = potentials(1)
    td = TransitionData(COVER, {})
    for i, j in COVER.nerve(1):
        f = ex.mul(ex.I, ex.sym("y"))
        td.g[(i, j)] = ex.exp(ex.mul(2, ex.PI, ex.I, f))
        td.g[(j, i)] = ex.exp(ex.mul(-2, ex.PI, ex.I, COVER.transport(f, i, j)))
    report = hermitian_compatibility(cp, td)
    assert not report.verdict
    assert report.unitary_max > 0.1


def test_complex_potential_is_not_hermitian():
    cp = potentials(1)
    alpha = {i: a + DiffForm(("x", "y"), 1, {(0,): ex.I}) for i, a in cp.alpha.items()}
    report = hermitian_compatibility(CoverPotentials(COVER, cp.omega, alpha, cp.f),
                                     from_integral_cocycle(cp))
    assert not report.alpha_real and not report.verdict


# sections -------------------------------------------------------------------------


def test_zero_section_glues():
    td = from_integral_cocycle(potentials(Fraction(1, 2)))
    assert glue_section(SectionFamily({i: ex.ZERO for i in range(9)}), td).verdict


def test_tree_section_glues_for_integral_level():
    td = from_integral_cocycle(potentials(1))
    sf = section_from_tree(td, 0, ex.ONE)
    assert glue_section(sf, td, within=[0]).verdict


def test_tree_section_fails_for_half_level():
    td = from_integral_cocycle(potentials(Fraction(1, 2)))
    psi0 = ex.const(3)
    report = glue_section(section_from_tree(td, 0, psi0), td, within=[0])
    assert not report.verdict
    assert report.deviation == pytest.approx(2 * 3)


def test_no_nonvanishing_global_section_on_degree_one_bundle():
    # a nowhere-zero section would trivialise a bundle with c1 = 1, so the
    # tree-transported frame must fail somewhere away from the root
    td = from_integral_cocycle(potentials(1))
    report = glue_section(section_from_tree(td, 0, ex.ONE), td)
    assert not report.verdict


def test_trivial_bundle_has_global_frame():
    td = from_integral_cocycle(potentials(0))
    assert glue_section(section_from_tree(td, 0, ex.ONE), td).verdict
