"""Chart-level vector fields and differential forms with Expr coefficients."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Sequence

from . import expr as ex
from .expr import Expr


class ChartMismatch(ValueError):
    pass


def _check_same(a: tuple, b: tuple) -> None:
    if tuple(a) != tuple(b):
        raise ChartMismatch(f"coordinate lists differ: {list(a)} vs {list(b)}")


@dataclass(frozen=True)
class VectorField:
    """Components along the coordinate directions ``d/d coords[k]``."""

    coords: tuple
    components: tuple

    def __post_init__(self):
        if len(self.coords) != len(self.components):
            raise ValueError("one component per coordinate is required")

    @classmethod
    def zero(cls, coords: Sequence[str]) -> "VectorField":
        return cls(tuple(coords), (ex.ZERO,) * len(coords))

    def apply(self, f: Expr) -> Expr:
        """Directional derivative of ``f`` along this field."""
        return ex.add(*(ex.mul(c, ex.diff(f, x)) for x, c in zip(self.coords, self.components)))

    def expanded(self) -> "VectorField":
        return VectorField(self.coords, tuple(ex.expand(c) for c in self.components))

    def __add__(self, other: "VectorField") -> "VectorField":
        _check_same(self.coords, other.coords)
        return VectorField(self.coords, tuple(ex.add(a, b) for a, b in
                                              zip(self.components, other.components)))

    def scale(self, k) -> "VectorField":
        return VectorField(self.coords, tuple(ex.mul(k, c) for c in self.components))

    def equals(self, other: "VectorField", **kwargs) -> bool:
        _check_same(self.coords, other.coords)
        return all(ex.expr_equal(a, b, **kwargs)
                   for a, b in zip(self.components, other.components))


def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    """[X, Y] with components X(Y^k) - Y(X^k)."""
    _check_same(X.coords, Y.coords)
    return VectorField(X.coords, tuple(
        ex.expand(ex.sub(X.apply(yk), Y.apply(xk)))
        for xk, yk in zip(X.components, Y.components)))


def _sort_with_sign(idx: Sequence[int]):
    """Sort an index tuple, returning (sign, sorted) or (0, None) on repeats."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return 0, None
    sign = 1
    for a in range(len(idx)):
        for b in range(len(idx) - 1 - a):
            if idx[b] > idx[b + 1]:
                idx[b], idx[b + 1] = idx[b + 1], idx[b]
                sign = -sign
    return sign, tuple(idx)


@dataclass(frozen=True)
class DiffForm:
    """A degree-``degree`` form sum_I c_I dx^I over strictly increasing I.

    ``components`` maps index tuples (into ``coords``) to coefficients; absent
    keys are zero.
    """

    coords: tuple
    degree: int
    components: Mapping = field(default_factory=dict)

    def __post_init__(self):
        for key in self.components:
            if len(key) != self.degree or list(key) != sorted(set(key)):
                raise ValueError(f"bad component index {key} for a {self.degree}-form")
        object.__setattr__(self, "coords", tuple(self.coords))
        object.__setattr__(self, "components", {
            k: ex.expand(v) for k, v in sorted(self.components.items())
            if not (isinstance(v, ex.Const) and not v.value)})

    def __hash__(self):
        return hash((self.coords, self.degree, tuple(self.components.items())))

    @classmethod
    def one_form(cls, coords: Sequence[str], components: Sequence) -> "DiffForm":
        return cls(tuple(coords), 1, {(k,): ex._coerce(c) for k, c in enumerate(components)})

    @classmethod
    def from_names(cls, coords: Sequence[str], terms: Mapping[tuple, Expr]) -> "DiffForm":
        """Build from ``{("q1", "p1"): coeff}``; unordered names are re-signed."""
        coords = tuple(coords)
        degree = len(next(iter(terms))) if terms else 0
        comps: dict = {}
        for names, c in terms.items():
            sign, key = _sort_with_sign([coords.index(n) for n in names])
            if sign:
                comps[key] = ex.add(comps.get(key, ex.ZERO), ex.mul(sign, c))
        return cls(coords, degree, comps)

    def __getitem__(self, key: tuple) -> Expr:
        sign, k = _sort_with_sign(key)
        if not sign:
            return ex.ZERO
        return ex.mul(sign, self.components.get(k, ex.ZERO))

    def component_list(self) -> list:
        return [self[(k,)] for k in range(len(self.coords))] if self.degree == 1 else None

    def __add__(self, other: "DiffForm") -> "DiffForm":
        _check_same(self.coords, other.coords)
        if self.degree != other.degree:
            raise ValueError("degree mismatch")
        keys = set(self.components) | set(other.components)
        return DiffForm(self.coords, self.degree,
                        {k: ex.add(self.components.get(k, ex.ZERO),
                                   other.components.get(k, ex.ZERO)) for k in keys})

    def __sub__(self, other: "DiffForm") -> "DiffForm":
        return self + other.scale(-1)

    def scale(self, k) -> "DiffForm":
        return DiffForm(self.coords, self.degree,
                        {key: ex.mul(k, v) for key, v in self.components.items()})

    def d(self) -> "DiffForm":
        """Exterior derivative."""
        out: dict = {}
        for key, c in self.components.items():
            for j, x in enumerate(self.coords):
                dc = ex.diff(c, x)
                if isinstance(dc, ex.Const) and not dc.value:
                    continue
                sign, k = _sort_with_sign((j,) + key)
                if sign:
                    out[k] = ex.add(out.get(k, ex.ZERO), ex.mul(sign, dc))
        return DiffForm(self.coords, self.degree + 1, out)

    def __call__(self, *fields: VectorField) -> Expr:
        """Evaluate on vector fields: sum over I of c_I det(X_a^{I_b})."""
        if len(fields) != self.degree:
            raise ValueError(f"a {self.degree}-form takes {self.degree} vector fields")
        for X in fields:
            _check_same(self.coords, X.coords)
        terms = []
        for key, c in self.components.items():
            terms.append(ex.mul(c, _det([[X.components[i] for i in key] for X in fields])))
        return ex.expand(ex.add(*terms))

    def equals(self, other: "DiffForm", **kwargs) -> bool:
        _check_same(self.coords, other.coords)
        if self.degree != other.degree:
            return False
        keys = set(self.components) | set(other.components)
        return all(ex.expr_equal(self.components.get(k, ex.ZERO),
                                 other.components.get(k, ex.ZERO), **kwargs) for k in keys)

    def evaluate(self, env: Mapping) -> dict:
        return {k: ex.evaluate(v, env) for k, v in self.components.items()}

    def pullback(self, source_coords: Sequence[str], target_of_source: Sequence[Expr]) -> "DiffForm":
        """Pull back along x_target = phi(x_source).

        ``target_of_source[b]`` expresses target coordinate ``self.coords[b]``
        in terms of ``source_coords``.
        """
        source_coords = tuple(source_coords)
        mapping = dict(zip(self.coords, target_of_source))
        jac = [[ex.diff(phi, s) for s in source_coords] for phi in target_of_source]
        out: dict = {}
        for key, c in self.components.items():
            c_src = ex.substitute(c, mapping)
            for src in combinations(range(len(source_coords)), self.degree):
                minor = _det([[jac[b][a] for a in src] for b in key])
                if isinstance(minor, ex.Const) and not minor.value:
                    continue
                out[src] = ex.add(out.get(src, ex.ZERO), ex.mul(c_src, minor))
        return DiffForm(source_coords, self.degree, out)

    def __str__(self) -> str:
        if not self.components:
            return "0"
        parts = []
        for key, c in self.components.items():
            basis = "^".join(f"d{self.coords[i]}" for i in key)
            parts.append(f"{ex.to_str(c)}*{basis}" if basis else ex.to_str(c))
        return " + ".join(parts)


def _det(m: list) -> Expr:
    n = len(m)
    if n == 0:
        return ex.ONE
    if n == 1:
        return m[0][0]
    terms = []
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        terms.append(ex.mul((-1) ** j, m[0][j], _det(minor)))
    return ex.add(*terms)


def differential(f: Expr, coords: Sequence[str]) -> DiffForm:
    return DiffForm(tuple(coords), 0, {(): f}).d()
