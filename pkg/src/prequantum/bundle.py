"""Local systems given by transition functions g_ij on a sampled good cover.

The bundle is never built as a quotient space: the transition data is the
bundle, and every statement about it is checked at the cover's sample points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import expr as ex
from .cech import CoverPotentials, GoodCover
from .expr import Expr
from .forms import DiffForm

__all__ = [
    "TransitionData", "SectionFamily", "CocycleReport", "verify_cocycle",
    "from_integral_cocycle", "connection_consistency", "ConsistencyReport",
    "curvature_per_chart", "CurvatureReport", "hermitian_compatibility",
    "HermitianReport", "glue_section", "GlueReport", "section_from_tree",
]

COCYCLE_TOL = 1e-10
CONNECTION_TOL = 1e-8
TWO_PI_I = ex.mul(2, ex.PI, ex.I)


@dataclass
class TransitionData:
    """g[(i, j)] for every ordered overlap, in chart i coordinates (s_i = g_ij s_j)."""

    cover: GoodCover
    g: dict

    def values(self, i: int, j: int, simplex=None, params: Mapping | None = None) -> np.ndarray:
        envs = self.cover.sample_envs(simplex or (i, j), i, params)
        return np.array([ex.evaluate(self.g[(i, j)], env) for env in envs])

    def invariant_violations(self) -> list:
        """Samples where g_ij vanishes or g_ij g_ji != 1."""
        bad = []
        for i, j in self.cover.nerve(1):
            gij = self.values(i, j)
            gji = np.array([ex.evaluate(self.g[(j, i)], env)
                            for env in self.cover.sample_envs((i, j), j)])
            if np.any(np.abs(gij) <= 1e-12):
                bad.append(((i, j), "vanishes"))
            if np.max(np.abs(gij * gji - 1), initial=0.0) > COCYCLE_TOL:
                bad.append(((i, j), "g_ij g_ji != 1"))
        return bad


@dataclass
class SectionFamily:
    psi: dict


@dataclass
class CocycleReport:
    verdict: bool
    deviation: float
    witness: tuple | None
    per_triple: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "verdict": "pass" if self.verdict else "fail",
            "deviation": self.deviation,
            "witness": None if self.witness is None else
            {"triple": list(self.witness[0]), "sample": self.witness[1]},
        }


def _at(e: Expr, cover: GoodCover, simplex, chart: int) -> np.ndarray:
    return np.array([ex.evaluate(e, env) for env in cover.sample_envs(simplex, chart)])


def verify_cocycle(td: TransitionData, tol: float = COCYCLE_TOL) -> CocycleReport:
    """max |g_ik - g_ij g_jk| over triple intersections and their samples."""
    cover = td.cover
    worst, witness, per_triple = 0.0, None, {}
    for t in cover.nerve(2):
        i, j, k = t
        dev = np.abs(_at(td.g[(i, k)], cover, t, i)
                     - _at(td.g[(i, j)], cover, t, i) * _at(td.g[(j, k)], cover, t, j))
        per_triple[t] = float(dev.max(initial=0.0))
        if per_triple[t] > worst:
            worst, witness = per_triple[t], (t, int(np.argmax(dev)))
    verdict = worst < tol
    return CocycleReport(verdict, worst, None if verdict else witness, per_triple)


def from_integral_cocycle(cp: CoverPotentials) -> TransitionData:
    """g_ij = exp(2 pi i f_ij)."""
    g = {}
    for i, j in cp.cover.nerve(1):
        g[(i, j)] = ex.func("exp", ex.mul(TWO_PI_I, cp.f_ij(i, j)))
        g[(j, i)] = ex.func("exp", ex.mul(TWO_PI_I, cp.f_ij(j, i)))
    return TransitionData(cp.cover, g)


@dataclass
class ConsistencyReport:
    verdict: bool
    residual: dict
    residual_max: float
    global_connection: bool


def connection_consistency(cp: CoverPotentials, td: TransitionData,
                           tol: float = CONNECTION_TOL) -> ConsistencyReport:
    """alpha_i - alpha_j - (1/2 pi i) dg_ij / g_ij on each overlap's samples.

    When every residual is below ``tol`` the local potentials patch to one
    covariant derivative on the bundle defined by ``td``.
    """
    cover = cp.cover
    residual = {}
    for i, j in cover.nerve(1):
        coords = cover.coords(i)
        gij = td.g[(i, j)]
        diff = cp.alpha[i] - cover.pullback(cp.alpha[j], j, i)
        worst = 0.0
        for env in cover.sample_envs((i, j), i):
            g_val = ex.evaluate(gij, env)
            for a, x in enumerate(coords):
                log_deriv = ex.evaluate(ex.diff(gij, x), env) / g_val / (2j * math.pi)
                worst = max(worst, abs(ex.evaluate(diff[(a,)], env) - log_deriv))
        residual[(i, j)] = worst
    residual_max = max(residual.values(), default=0.0)
    ok = residual_max < tol
    return ConsistencyReport(ok, residual, residual_max, ok)


@dataclass
class CurvatureReport:
    curvature: dict
    matches_omega: bool
    overlap_max: float
    verdict: bool


def curvature_per_chart(cp: CoverPotentials, tol: float = CONNECTION_TOL) -> CurvatureReport:
    """R_i = 2 pi i d alpha_i, compared with 2 pi i omega and across overlaps."""
    cover = cp.cover
    curv = {i: a.d().scale(TWO_PI_I) for i, a in cp.alpha.items()}
    matches = all(cp.alpha[i].d().equals(cp.omega[i]) for i in cp.alpha)
    worst = 0.0
    for i, j in cover.nerve(1):
        diff = cp.alpha[i].d() - cover.pullback(cp.alpha[j].d(), j, i)
        for env in cover.sample_envs((i, j), i):
            for v in diff.evaluate(env).values():
                worst = max(worst, abs(v))
    return CurvatureReport(curv, matches, worst, matches and worst < tol)


@dataclass
class HermitianReport:
    verdict: bool
    unitary_max: float
    alpha_real: bool


def hermitian_compatibility(cp: CoverPotentials, td: TransitionData) -> HermitianReport:
    """|g_ij| = 1 at the samples and every alpha_i real-valued."""
    worst = 0.0
    for i, j in td.g:
        vals = td.values(i, j)
        if len(vals):
            worst = max(worst, float(np.max(np.abs(np.abs(vals) - 1))))
    real = all(ex.is_zero(ex.imag_part(c)) for a in cp.alpha.values() for c in a.components.values())
    return HermitianReport(worst < COCYCLE_TOL and real, worst, real)


@dataclass
class GlueReport:
    verdict: bool
    deviation: float
    witness: tuple | None


def glue_section(sf: SectionFamily, td: TransitionData, within=None,
                 tol: float = COCYCLE_TOL) -> GlueReport:
    """max |psi_i - g_ij psi_j| over overlap samples.

    With ``within`` set (a collection of chart indices), only samples of
    intersections U_i n U_j n U_r for some r in ``within`` are used; that is
    where a family pulled along a spanning tree rooted at r is defined.
    """
    cover = td.cover
    worst, witness = 0.0, None
    for i, j in cover.nerve(1):
        if within is None:
            regions = [(i, j)]
        else:
            regions = [tuple(sorted({i, j, r})) for r in within]
            regions = [s for s in regions if cover.is_nonempty(s)]
        for s in regions:
            dev = np.abs(_at(sf.psi[i], cover, s, i)
                         - _at(td.g[(i, j)], cover, s, i) * _at(sf.psi[j], cover, s, j))
            if len(dev) and dev.max() > worst:
                worst, witness = float(dev.max()), (s, (i, j))
    verdict = worst < tol
    return GlueReport(verdict, worst, None if verdict else witness)


def section_from_tree(td: TransitionData, root: int, psi_root: Expr) -> SectionFamily:
    """psi_i = g_{i parent} psi_parent along a BFS spanning tree of the nerve."""
    cover = td.cover
    psi = {root: psi_root}
    frontier = [root]
    while frontier:
        nxt = []
        for parent in frontier:
            for i in range(len(cover.charts)):
                if i not in psi and cover.is_nonempty((i, parent)):
                    psi[i] = ex.mul(td.g[(i, parent)], cover.transport(psi[parent], parent, i))
                    nxt.append(i)
        frontier = nxt
    return SectionFamily(psi)
