"""Built-in covers: the torus R^2/Z^2 and single-chart R^2n.

Torus: each circle factor is covered by three arcs of length 1/2 centred at
0, 1/3 and 2/3. Any two arcs overlap in one interval and the three never
meet, so a product chart set U_{a b} is a nonempty (convex) intersection
exactly when it uses at most two distinct arcs in each factor. Chart U_{a b}
uses the lift of (x, y) lying in its arcs, and omega = k dx^dy has the
primitives alpha_{ab} = k x dy. On an overlap x_j = x_i + n, so
alpha_i - alpha_j = d(-k n y_i), which is the stored f_ij.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Sequence

from . import expr as ex
from .cech import Chart, CoverPotentials, GoodCover
from .forms import DiffForm
from .symplectic import CanonicalChart

ARC_HALF_WIDTH = Fraction(1, 4)
ARC_CENTRES = (Fraction(0), Fraction(1, 3), Fraction(2, 3))
SAMPLE_FRACTIONS = ((0.25, 0.3), (0.5, 0.7), (0.75, 0.5))


def _arc(a: int, shift: int = 0) -> tuple:
    c = ARC_CENTRES[a] + shift
    return c - ARC_HALF_WIDTH, c + ARC_HALF_WIDTH


def _intersect(u: tuple, v: tuple):
    lo, hi = max(u[0], v[0]), min(u[1], v[1])
    return (lo, hi) if lo < hi else None


def arc_jump(a: int, b: int) -> int:
    """The integer n with x_b = x_a + n on the overlap of arcs a and b."""
    if a == b:
        return 0
    hits = [m for m in (-1, 0, 1) if _intersect(_arc(a), _arc(b, m))]
    if len(hits) != 1:
        raise ValueError(f"arcs {a} and {b} overlap {len(hits)} times")
    return -hits[0]


def arc_region(arcs: Sequence[int]):
    """Overlap of a set of arcs in the lift of the first arc, or None."""
    base = arcs[0]
    region = _arc(base)
    for a in arcs[1:]:
        region = _intersect(region, _arc(a, -arc_jump(base, a)))
        if region is None:
            return None
    return region


def torus_cover(max_degree: int = 3) -> GoodCover:
    labels = [(a, b) for a in range(3) for b in range(3)]
    charts = tuple(Chart(f"U{a}{b}", ("x", "y")) for a, b in labels)
    simplices = set()
    samples = {}
    for size in range(1, max_degree + 2):
        for s in itertools.combinations(range(len(labels)), size):
            xs = sorted({labels[i][0] for i in s})
            ys = sorted({labels[i][1] for i in s})
            rx, ry = arc_region(xs), arc_region(ys)
            if rx is None or ry is None:
                continue
            simplices.add(s)
            if size == 1:
                continue
            points = []
            for fx, fy in SAMPLE_FRACTIONS:
                x0 = float(rx[0] + (rx[1] - rx[0]) * Fraction(fx))
                y0 = float(ry[0] + (ry[1] - ry[0]) * Fraction(fy))
                points.append({i: (x0 + arc_jump(xs[0], labels[i][0]),
                                   y0 + arc_jump(ys[0], labels[i][1])) for i in s})
            samples[s] = points
    transitions = {}
    for i, j in itertools.permutations(range(len(labels)), 2):
        (ai, bi), (aj, bj) = labels[i], labels[j]
        transitions[(i, j)] = (ex.add(ex.sym("x"), arc_jump(ai, aj)),
                               ex.add(ex.sym("y"), arc_jump(bi, bj)))
    return GoodCover(charts, frozenset(simplices), samples, transitions,
                     {"name": "torus", "good": True,
                      "note": "3x3 product of arcs; intersections are products of intervals"})


def torus_potentials(k=1, cover: GoodCover | None = None) -> CoverPotentials:
    """omega = k dx^dy with alpha_i = k x dy and f_ij = -k n_ij y (chart i)."""
    cover = cover or torus_cover()
    k = k if isinstance(k, ex.Expr) else ex.const(k)
    x, y = ex.sym("x"), ex.sym("y")
    coords = ("x", "y")
    omega = {i: DiffForm(coords, 2, {(0, 1): k}) for i in range(len(cover.charts))}
    alpha = {i: DiffForm(coords, 1, {(1,): ex.mul(k, x)}) for i in range(len(cover.charts))}
    labels = [(int(c.name[1]), int(c.name[2])) for c in cover.charts]
    f = {}
    for i, j in cover.nerve(1):
        n = arc_jump(labels[i][0], labels[j][0])
        f[(i, j)] = ex.expand(ex.mul(-n, k, y))
    return CoverPotentials(cover, omega, alpha, f)


def single_chart_cover(chart: CanonicalChart) -> GoodCover:
    return GoodCover((Chart("R2n", chart.coords),), frozenset({(0,)}), {}, {},
                     {"name": f"R^{chart.dim}", "good": True})


def single_chart_potentials(chart: CanonicalChart, B) -> CoverPotentials:
    """Cover potentials of R^2n carrying the one-form ``B`` (a ConnectionPotential)."""
    cover = single_chart_cover(chart)
    return CoverPotentials(cover, {0: chart.omega()}, {0: B.form}, {})
