"""Good covers as combinatorial data, Cech cochains, and the integrality test.

A cover is never an open set here: it is a nerve (the nonempty
intersections), a handful of sample points on each intersection written in
every member chart's coordinates, and coordinate transition maps between
charts. Everything the constructions need is evaluated on those samples.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from . import expr as ex
from . import intlinalg
from .expr import Expr
from .forms import DiffForm, _sort_with_sign

__all__ = [
    "Chart", "GoodCover", "CoverError", "Cochain", "CoverPotentials", "PotentialError",
    "SpreadError", "cech_delta", "is_cocycle", "is_coboundary", "coboundary_matrix",
    "cohomology_rank", "cocycle_of_omega", "OmegaCocycle", "integrality_check",
    "IntegralityReport", "random_cochain",
]

RINGS = ("Z", "Q", "R")


class CoverError(ValueError):
    pass


class PotentialError(ValueError):
    pass


class SpreadError(ValueError):
    """mu_ijk is not constant on a triple intersection."""


@dataclass(frozen=True)
class Chart:
    name: str
    coords: tuple


@dataclass
class GoodCover:
    """Nerve, samples and transitions of a good cover.

    ``simplices`` holds every nonempty intersection as a sorted index tuple.
    ``samples[sigma]`` is a list of points; each point maps chart index to
    that chart's coordinates. ``transitions[(i, j)]`` expresses chart ``j``'s
    coordinates in terms of chart ``i``'s. Whether each intersection really
    is connected and simply connected is the fixture author's claim and is
    recorded in ``metadata``, not checked.
    """

    charts: tuple
    simplices: frozenset
    samples: dict = field(default_factory=dict)
    transitions: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.charts = tuple(self.charts)
        self.simplices = frozenset(tuple(sorted(s)) for s in self.simplices)
        for i in range(len(self.charts)):
            if (i,) not in self.simplices:
                self.simplices = self.simplices | {(i,)}

    @property
    def max_degree(self) -> int:
        return max(len(s) for s in self.simplices) - 1

    def nerve(self, p: int) -> list:
        return sorted(s for s in self.simplices if len(s) == p + 1)

    def is_nonempty(self, idx: Sequence[int]) -> bool:
        return tuple(sorted(idx)) in self.simplices

    def coords(self, i: int) -> tuple:
        return self.charts[i].coords

    def transport(self, e: Expr, src: int, dst: int) -> Expr:
        """Rewrite an expression in chart ``src`` coordinates into chart ``dst``."""
        if src == dst:
            return e
        return ex.substitute(e, dict(zip(self.coords(src), self.transitions[(dst, src)])))

    def pullback(self, form: DiffForm, src: int, dst: int) -> DiffForm:
        """Pull a form on chart ``src`` back to chart ``dst`` coordinates."""
        if src == dst:
            return form
        return form.pullback(self.coords(dst), self.transitions[(dst, src)])

    def sample_envs(self, simplex: Sequence[int], chart: int, params: Mapping | None = None) -> list:
        envs = []
        for point in self.samples.get(tuple(sorted(simplex)), []):
            env = dict(zip(self.coords(chart), point[chart]))
            env.update(params or {})
            envs.append(env)
        return envs

    def validate(self, tol: float = 1e-10) -> None:
        for s in self.simplices:
            for face in itertools.combinations(s, len(s) - 1):
                if face and face not in self.simplices:
                    raise CoverError(f"intersection {s} is nonempty but its face {face} is not")
        for s in self.simplices:
            if len(s) < 2:
                continue
            for i, j in itertools.permutations(s, 2):
                if (i, j) not in self.transitions:
                    raise CoverError(f"missing transition map {i} -> {j}")
            points = self.samples.get(s, [])
            if len(points) < 2:
                raise CoverError(f"intersection {s} needs at least two sample points")
            for point in points:
                for i, j in itertools.permutations(s, 2):
                    env = dict(zip(self.coords(i), point[i]))
                    mapped = [ex.evaluate(e, env) for e in self.transitions[(i, j)]]
                    if max(abs(a - b) for a, b in zip(mapped, point[j])) > tol:
                        raise CoverError(f"sample on {s} is inconsistent under transition {i} -> {j}")


# ---------------------------------------------------------------------------
# cochains


def _to_ring(value, ring: str):
    if ring == "Z":
        if Fraction(value).denominator != 1:
            raise ValueError(f"{value} is not an integer")
        return int(value)
    if ring == "Q":
        return Fraction(value)
    return float(value)


@dataclass
class Cochain:
    """Values on strictly increasing index tuples of the nerve.

    Lookups with unsorted tuples pick up the alternating sign; tuples with a
    repeated index give zero.
    """

    degree: int
    ring: str
    values: dict

    def __post_init__(self):
        if self.ring not in RINGS:
            raise ValueError(f"ring must be one of {RINGS}")
        self.values = {tuple(k): _to_ring(v, self.ring) for k, v in self.values.items()}

    @classmethod
    def zero(cls, cover: GoodCover, degree: int, ring: str = "Q") -> "Cochain":
        return cls(degree, ring, {s: 0 for s in cover.nerve(degree)})

    def __getitem__(self, idx):
        sign, key = _sort_with_sign(idx)
        if not sign:
            return _to_ring(0, self.ring)
        return sign * self.values.get(key, _to_ring(0, self.ring))

    def __add__(self, other: "Cochain") -> "Cochain":
        keys = set(self.values) | set(other.values)
        return Cochain(self.degree, _join(self.ring, other.ring),
                       {k: self.values.get(k, 0) + other.values.get(k, 0) for k in keys})

    def scale(self, k) -> "Cochain":
        if isinstance(k, float) or self.ring == "R":
            ring = "R"
        elif Fraction(k).denominator != 1:
            ring = "Q"
        else:
            ring = self.ring
        return Cochain(self.degree, ring, {s: k * v for s, v in self.values.items()})

    def to_ring(self, ring: str) -> "Cochain":
        return Cochain(self.degree, ring, self.values)

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(v) <= tol for v in self.values.values())

    def max_abs_diff(self, other: "Cochain") -> float:
        keys = set(self.values) | set(other.values)
        return max((abs(float(self.values.get(k, 0)) - float(other.values.get(k, 0))) for k in keys),
                   default=0.0)


def _join(a: str, b: str) -> str:
    return RINGS[max(RINGS.index(a), RINGS.index(b))]


def cech_delta(c: Cochain, cover: GoodCover) -> Cochain:
    """(delta c)_{i_0..i_{p+1}} = sum_j (-1)^j c_{i_0..^i_j..i_{p+1}}."""
    if cover.max_degree < c.degree + 1:
        raise CoverError(f"cover records no {c.degree + 2}-fold intersections")
    out = {}
    for s in cover.nerve(c.degree + 1):
        total = 0
        for j in range(len(s)):
            term = c[s[:j] + s[j + 1:]]
            total = total + term if j % 2 == 0 else total - term
        out[s] = total
    return Cochain(c.degree + 1, c.ring, out)


def coboundary_matrix(cover: GoodCover, p: int) -> list:
    """Matrix of delta from p-cochains to (p+1)-cochains in the nerve's sorted bases."""
    cols = {s: k for k, s in enumerate(cover.nerve(p))}
    rows = []
    for s in cover.nerve(p + 1):
        row = [0] * len(cols)
        for j in range(len(s)):
            row[cols[s[:j] + s[j + 1:]]] += (-1) ** j
        rows.append(row)
    return rows


def is_cocycle(c: Cochain, cover: GoodCover, tol: float = 1e-10) -> bool:
    return cech_delta(c, cover).is_zero(0.0 if c.ring != "R" else tol)


def is_coboundary(c: Cochain, cover: GoodCover, tol: float = 1e-10):
    """A preimage eta with delta(eta) = c, or None.

    Over Z the question is answered by integer row reduction (Hermite form),
    over Q by exact elimination, over R by least squares.
    """
    if c.degree == 0:
        return Cochain(-1, c.ring, {}) if c.is_zero(tol if c.ring == "R" else 0.0) else None
    basis = cover.nerve(c.degree - 1)
    A = coboundary_matrix(cover, c.degree - 1)
    b = [c.values.get(s, 0) for s in cover.nerve(c.degree)]
    if c.ring == "Z":
        x = intlinalg.solve_integer(A, b)
    elif c.ring == "Q":
        x = intlinalg.solve_rational(A, b)
    else:
        An = np.array(A, dtype=float).reshape(len(b), len(basis))
        sol, *_ = np.linalg.lstsq(An, np.array(b, dtype=float), rcond=None)
        x = list(sol) if np.max(np.abs(An @ sol - b), initial=0.0) <= tol else None
    if x is None:
        return None
    return Cochain(c.degree - 1, c.ring, dict(zip(basis, x)))


def cohomology_rank(cover: GoodCover, p: int) -> int:
    """dim over Q of ker(delta_p) / im(delta_{p-1})."""
    n_p = len(cover.nerve(p))
    kernel = n_p - intlinalg.rank(coboundary_matrix(cover, p))
    image = intlinalg.rank(coboundary_matrix(cover, p - 1)) if p > 0 else 0
    return kernel - image


def random_cochain(cover: GoodCover, degree: int, seed: int, ring: str = "Q",
                   bound: int = 9) -> Cochain:
    rng = random.Random(seed)
    values = {}
    for s in cover.nerve(degree):
        num = rng.randint(-bound, bound)
        values[s] = num if ring == "Z" else Fraction(num, rng.randint(1, bound))
    return Cochain(degree, ring, values)


# ---------------------------------------------------------------------------
# local primitives of omega and the cocycle they define


@dataclass
class CoverPotentials:
    """Per-chart primitives alpha_i of omega and overlap functions f_ij.

    ``f`` stores f_ij for i < j in chart i coordinates; f_ji = -f_ij.
    """

    cover: GoodCover
    omega: dict
    alpha: dict
    f: dict

    def f_ij(self, i: int, j: int, chart: int | None = None) -> Expr:
        """f_ij rewritten in ``chart`` coordinates (default chart i)."""
        if i == j:
            return ex.ZERO
        if i < j:
            e, home = self.f[(i, j)], i
        else:
            e, home = ex.neg(self.f[(j, i)]), j
        return self.cover.transport(e, home, i if chart is None else chart)

    def scale(self, k) -> "CoverPotentials":
        return CoverPotentials(
            self.cover,
            {i: w.scale(k) for i, w in self.omega.items()},
            {i: a.scale(k) for i, a in self.alpha.items()},
            {ij: ex.expand(ex.mul(k, e)) for ij, e in self.f.items()},
        )

    def overlap_residuals(self) -> dict:
        """max |alpha_i - alpha_j - d f_ij| on sample points of each U_ij, i < j."""
        out = {}
        for i, j in self.cover.nerve(1):
            coords = self.cover.coords(i)
            diff = (self.alpha[i] - self.cover.pullback(self.alpha[j], j, i)
                    - DiffForm(coords, 0, {(): self.f_ij(i, j)}).d())
            worst = 0.0
            for env in self.cover.sample_envs((i, j), i):
                for value in diff.evaluate(env).values():
                    worst = max(worst, abs(value))
            out[(i, j)] = worst
        return out

    def validate(self, tol: float = 1e-8) -> None:
        for i in range(len(self.cover.charts)):
            if not self.alpha[i].d().equals(self.omega[i]):
                raise PotentialError(f"d alpha_{i} != omega on chart {i}")
        for ij, worst in self.overlap_residuals().items():
            if worst >= tol:
                raise PotentialError(f"alpha_i - alpha_j != d f_ij on {ij} (residual {worst:.3g})")


@dataclass
class OmegaCocycle:
    mu: Cochain
    spread: dict
    spread_max: float
    imag_max: float
    cocycle_checked: bool


def _mu_samples(cp: CoverPotentials) -> dict:
    out = {}
    for i, j, k in cp.cover.nerve(2):
        e = ex.add(ex.neg(cp.f_ij(i, j)), cp.f_ij(i, k), ex.neg(cp.f_ij(j, k, chart=i)))
        out[(i, j, k)] = np.array([ex.evaluate(e, env)
                                   for env in cp.cover.sample_envs((i, j, k), i)])
    return out


def cocycle_of_omega(cp: CoverPotentials, max_spread: float = 1e-6) -> OmegaCocycle:
    """mu_ijk = -f_ij + f_ik - f_jk, averaged over the samples of U_ijk."""
    samples = _mu_samples(cp)
    spread = {t: float(np.ptp(v.real) + np.ptp(v.imag)) if len(v) else 0.0
              for t, v in samples.items()}
    spread_max = max(spread.values(), default=0.0)
    if spread_max > max_spread:
        worst = max(spread, key=spread.get)
        raise SpreadError(f"mu is not constant on {worst} (spread {spread_max:.3g})")
    imag_max = max((float(np.max(np.abs(v.imag))) for v in samples.values() if len(v)), default=0.0)
    mu = Cochain(2, "R", {t: float(np.mean(v.real)) if len(v) else 0.0 for t, v in samples.items()})
    checked = cp.cover.max_degree >= 3
    if checked and not is_cocycle(mu, cp.cover, tol=1e-8):
        raise SpreadError("delta(mu) != 0: potentials are inconsistent with the cover")
    return OmegaCocycle(mu, spread, spread_max, imag_max, checked)


@dataclass
class IntegralityReport:
    verdict: bool
    mu: dict
    spread_max: float
    tol: float
    witness: tuple | None = None

    def to_json(self) -> dict:
        return {
            "verdict": "integral" if self.verdict else "not_integral",
            "mu": {",".join(map(str, t)): v for t, v in self.mu.items()},
            "spread_max": self.spread_max,
            "tol": self.tol,
            "witness": None if self.witness is None else
            {"triple": list(self.witness[0]), "value": self.witness[1]},
        }


def integrality_check(cp: CoverPotentials, tol: float = 1e-6) -> IntegralityReport:
    samples = _mu_samples(cp)
    mu, witness, spread_max = {}, None, 0.0
    for t, v in samples.items():
        spread = float(np.ptp(v.real) + np.ptp(v.imag)) if len(v) else 0.0
        spread_max = max(spread_max, spread)
        value = complex(np.mean(v)) if len(v) else 0j
        mu[t] = value.real
        off = abs(value.real - round(value.real)) + abs(value.imag)
        if witness is None and (off >= tol or spread >= tol):
            witness = (t, value.real)
    return IntegralityReport(witness is None, mu, spread_max, tol, witness)
