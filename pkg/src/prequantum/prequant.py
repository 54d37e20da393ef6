"""Prequantization on the trivial Hermitian line bundle over R^2n.

A connection is given by a complex potential one-form B, with
``nabla_xi s = xi(s) + 2 pi i B(xi) s`` and curvature ``2 pi i dB``.
Sections are functions (Expr) on the chart.  The prequantum operator is
``Q_f = i nabla_{X_f} + 2 pi f``; compositions are nested symbolic
applications, so commutator identities can be checked exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import expr as ex
from .expr import Expr
from .forms import ChartMismatch, DiffForm, VectorField
from .symplectic import CanonicalChart, hamiltonian_vector_field, poisson_bracket

__all__ = [
    "ConnectionPotential", "Section", "CurvatureConditionError", "BoundaryError",
    "PrequantOperator", "DiracReport", "covariant_derivative", "curvature",
    "prequant_apply", "dirac_check", "inner_product", "symmetry_check",
    "bump_factor", "bump_cut", "gauss_legendre_grid",
]

TWO_PI_I = ex.mul(2, ex.PI, ex.I)


class CurvatureConditionError(ValueError):
    """The potential does not satisfy dB = omega."""


class BoundaryError(ValueError):
    """Sections were not cut off by the boundary-vanishing bump factor."""


@dataclass(frozen=True)
class ConnectionPotential:
    chart: CanonicalChart
    components: tuple

    def __post_init__(self):
        if len(self.components) != self.chart.dim:
            raise ValueError(f"potential needs {self.chart.dim} components")
        object.__setattr__(self, "components", tuple(map(ex._coerce, self.components)))

    @classmethod
    def q_dp(cls, chart: CanonicalChart) -> "ConnectionPotential":
        """B = sum_j q_j dp_j."""
        return cls(chart, (ex.ZERO,) * chart.n + tuple(ex.sym(q) for q in chart.q))

    @classmethod
    def minus_p_dq(cls, chart: CanonicalChart) -> "ConnectionPotential":
        """B = -sum_j p_j dq_j."""
        return cls(chart, tuple(ex.neg(ex.sym(p)) for p in chart.p) + (ex.ZERO,) * chart.n)

    @classmethod
    def exact(cls, chart: CanonicalChart, F: Expr) -> "ConnectionPotential":
        return cls(chart, tuple(ex.diff(F, x) for x in chart.coords))

    @classmethod
    def default(cls, chart: CanonicalChart) -> "ConnectionPotential":
        return cls.q_dp(chart)

    @property
    def form(self) -> DiffForm:
        return DiffForm.one_form(self.chart.coords, self.components)

    def __call__(self, xi: VectorField) -> Expr:
        _same_chart(self.chart, xi)
        return ex.add(*(ex.mul(b, c) for b, c in zip(self.components, xi.components)))

    def satisfies_curvature_condition(self) -> bool:
        return self.form.d().equals(self.chart.omega())

    def is_real(self) -> bool:
        return all(ex.is_zero(ex.imag_part(b)) for b in self.components)

    def __add__(self, other: "ConnectionPotential") -> "ConnectionPotential":
        return ConnectionPotential(self.chart, tuple(
            ex.add(a, b) for a, b in zip(self.components, other.components)))


@dataclass(frozen=True)
class Section:
    """A section of the trivial bundle, identified with a function.

    ``cutoff_box`` is set by :func:`bump_cut` and records that the section
    vanishes (with all derivatives) on the boundary of that box.
    """

    chart: CanonicalChart
    value: Expr
    cutoff_box: tuple | None = None

    def __str__(self) -> str:
        return ex.to_str(self.value)


def _same_chart(chart: CanonicalChart, xi: VectorField) -> None:
    if tuple(xi.coords) != chart.coords:
        raise ChartMismatch("vector field is not on the potential's chart")


def _as_section(s, chart: CanonicalChart) -> Section:
    if isinstance(s, Section):
        if s.chart != chart:
            raise ChartMismatch("section lives on a different chart")
        return s
    return Section(chart, ex._coerce(s))


def covariant_derivative(B: ConnectionPotential, xi: VectorField, s) -> Section:
    s = _as_section(s, B.chart)
    _same_chart(B.chart, xi)
    value = ex.add(xi.apply(s.value), ex.mul(TWO_PI_I, B(xi), s.value))
    return Section(B.chart, ex.expand(value))


def curvature(B: ConnectionPotential) -> DiffForm:
    """R = 2 pi i dB."""
    return B.form.d().scale(TWO_PI_I)


class PrequantOperator:
    """Q_f = i nabla_{X_f} + 2 pi f for a potential with dB = omega."""

    def __init__(self, f: Expr, potential: ConnectionPotential, check: bool = True):
        if check and not potential.satisfies_curvature_condition():
            raise CurvatureConditionError(
                f"dB = {potential.form.d()} is not omega = {potential.chart.omega()}")
        self.f = ex._coerce(f)
        self.potential = potential
        self.field = hamiltonian_vector_field(self.f, potential.chart)

    def __call__(self, s) -> Section:
        chart = self.potential.chart
        s = _as_section(s, chart)
        nabla = covariant_derivative(self.potential, self.field, s).value
        value = ex.add(ex.mul(ex.I, nabla), ex.mul(2, ex.PI, self.f, s.value))
        return Section(chart, ex.expand(value), s.cutoff_box)


def prequant_apply(f: Expr, B: ConnectionPotential, s, check: bool = True) -> Section:
    return PrequantOperator(f, B, check=check)(s)


@dataclass
class DiracReport:
    residual: Expr
    verdict: bool
    exact: bool
    residual_norm: float


def dirac_check(f: Expr, g: Expr, B: ConnectionPotential, s, check: bool = True,
                trials: int = 100, tol: float = 1e-8, seed: int = 0,
                domain=(-3.0, 3.0)) -> DiracReport:
    """Residual Q_{f,g} s + i (Q_f Q_g s - Q_g Q_f s).

    Exact when every input is polynomial; otherwise the residual is sampled at
    ``trials`` seeded points in ``domain`` and must stay within ``tol``.
    """
    chart = B.chart
    s = _as_section(s, chart)
    Qf = PrequantOperator(f, B, check=check)
    Qg = PrequantOperator(g, B, check=check)
    Qfg = PrequantOperator(poisson_bracket(f, g, chart), B, check=check)
    commutator = ex.sub(Qf(Qg(s)).value, Qg(Qf(s)).value)
    residual = ex.expand(ex.add(Qfg(s).value, ex.mul(ex.I, commutator)))
    poly = ex.to_poly(residual)
    if poly is not None:
        norm = max((abs(complex(c)) for c in poly.values()), default=0.0)
        return DiracReport(residual, not poly, True, norm)
    verdict = ex.expr_equal(residual, ex.ZERO, domain=domain, trials=trials, tol=tol, seed=seed)
    rng = np.random.default_rng(seed)
    names = sorted(ex.free_symbols(residual))
    pts = {n: rng.uniform(*domain, size=trials) for n in names}
    norm = float(np.max(np.abs(ex.evaluate(residual, pts)))) if names else abs(ex.evaluate(residual, {}))
    return DiracReport(residual, verdict, False, norm)


# ---------------------------------------------------------------------------
# quadrature


def gauss_legendre_grid(box: Sequence[tuple], grid: int):
    """Tensor-product Gauss-Legendre nodes and weights on a box.

    Returns a list of node arrays (one per axis, broadcastable) and the
    matching weight array.
    """
    if grid < 2:
        raise ValueError("grid must be at least 2 per axis")
    x, w = np.polynomial.legendre.leggauss(grid)
    axes, weights = [], []
    for lo, hi in box:
        half = 0.5 * (hi - lo)
        axes.append(0.5 * (hi + lo) + half * x)
        weights.append(half * w)
    nodes = np.meshgrid(*axes, indexing="ij")
    weight = weights[0]
    for extra in weights[1:]:
        weight = np.multiply.outer(weight, extra)
    return nodes, weight


def inner_product(s1, s2, box: Sequence[tuple], grid: int, chart: CanonicalChart | None = None) -> complex:
    """(s1, s2) = integral of s1 * conj(s2) against omega^n over the box.

    omega^n = n! dq_1 dp_1 ... dq_n dp_n; for n = 1 this is the Lebesgue
    measure. Summation is numpy's pairwise reduction, so results are
    bit-stable for a fixed grid.
    """
    if chart is None:
        chart = s1.chart if isinstance(s1, Section) else s2.chart
    s1, s2 = _as_section(s1, chart), _as_section(s2, chart)
    if len(box) != chart.dim:
        raise ValueError(f"box has {len(box)} intervals, chart has dimension {chart.dim}")
    nodes, weight = gauss_legendre_grid(box, grid)
    env = dict(zip(chart.coords, nodes))
    integrand = ex.evaluate(s1.value, env) * np.conj(ex.evaluate(s2.value, env))
    total = np.sum(integrand * weight)
    return complex(math.factorial(chart.n) * total)


def bump_factor(chart: CanonicalChart, box: Sequence[tuple]) -> Expr:
    """prod_k exp(-1/(1 - ((x_k - c_k)/L_k)^2)), vanishing on the box boundary."""
    factors = []
    for x, (lo, hi) in zip(chart.coords, box):
        centre = ex.const((lo + hi) / 2)
        half = ex.const((hi - lo) / 2)
        u = ex.div(ex.sub(ex.sym(x), centre), half)
        factors.append(ex.func("exp", ex.neg(ex.div(ex.ONE, ex.sub(ex.ONE, ex.pow_(u, 2))))))
    return ex.mul(*factors)


def bump_cut(s, box: Sequence[tuple], chart: CanonicalChart | None = None) -> Section:
    if chart is None:
        chart = s.chart
    s = _as_section(s, chart)
    box = tuple((float(lo), float(hi)) for lo, hi in box)
    return Section(chart, ex.mul(s.value, bump_factor(chart, box)), box)


def symmetry_check(f: Expr, B: ConnectionPotential, s1: Section, s2: Section,
                   box: Sequence[tuple], grid: int) -> float:
    """|(Q_f s1, s2) - (s1, Q_f s2)| by quadrature over ``box``."""
    box = tuple((float(lo), float(hi)) for lo, hi in box)
    for s in (s1, s2):
        if not isinstance(s, Section) or s.cutoff_box != box:
            raise BoundaryError("sections must be bump_cut to the integration box")
    Q = PrequantOperator(f, B)
    lhs = inner_product(Q(s1), s2, box, grid)
    rhs = inner_product(s1, Q(s2), box, grid)
    return abs(lhs - rhs)
