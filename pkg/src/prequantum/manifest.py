"""TOML/JSON manifests: charts, covers, potentials, transitions and named expressions.

Parameters declared under ``[params]`` with a numeric value are substituted
as exact rationals after parsing; names listed in ``symbols`` stay symbolic.
Every expression string is parsed against its chart's coordinates, so
undeclared names fail at load time.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Mapping

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

import tomli_w

from . import expr as ex
from .bundle import SectionFamily, TransitionData
from .cech import Chart, CoverPotentials, GoodCover
from .expr import Expr
from .forms import DiffForm
from .symplectic import CanonicalChart

__all__ = ["Manifest", "ManifestError", "load_manifest", "read_manifest_data",
           "write_manifest", "torus_manifest", "parse_number"]

VERSION = 1


class ManifestError(ValueError):
    """The manifest does not follow the schema."""


def parse_number(value) -> Fraction:
    """Exact rational from an int, a float literal or a string such as "1/2"."""
    if isinstance(value, bool):
        raise ManifestError(f"expected a number, got {value!r}")
    try:
        if isinstance(value, float):
            return Fraction(repr(value))
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ManifestError(f"expected a number, got {value!r}") from None


def read_manifest_data(path) -> dict:
    path = Path(path)
    text = path.read_text()
    try:
        if path.suffix == ".json":
            return json.loads(text)
        return tomllib.loads(text)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as err:
        raise ManifestError(f"{path}: {err}") from None


def write_manifest(data: Mapping, path) -> None:
    path = Path(path)
    if path.suffix == ".json":
        path.write_text(json.dumps(data, indent=1) + "\n")
    else:
        path.write_text(tomli_w.dumps(data))


def _require(table: Mapping, key: str, where: str):
    if key not in table:
        raise ManifestError(f"{where}: missing key {key!r}")
    return table[key]


def _form_key(key: str, coords: tuple) -> tuple:
    names = tuple(part.strip()[1:] for part in key.split("^"))
    if any(n not in coords for n in names) or not all(p.strip().startswith("d") for p in key.split("^")):
        raise ManifestError(f"form basis {key!r} is not made of d<coord> factors of {coords}")
    return names


def _form_to_table(form: DiffForm) -> dict:
    return {"^".join("d" + form.coords[k] for k in idx): ex.to_str(c)
            for idx, c in sorted(form.components.items())}


@dataclass
class Manifest:
    version: int
    params: dict
    symbols: tuple
    charts: tuple
    cover: GoodCover | None = None
    potentials: CoverPotentials | None = None
    transitions: TransitionData | None = None
    sections: SectionFamily | None = None
    mechanics: CanonicalChart | None = None
    named: dict = field(default_factory=dict)
    potential_spec: object = None

    def expression(self, text: str, coords, extra_symbols=()) -> Expr:
        return _Builder.parse_with(text, coords, self.params, self.symbols + tuple(extra_symbols))


class _Builder:
    def __init__(self, data: Mapping, overrides: Mapping | None):
        self.data = data
        params = data.get("params", {})
        if not isinstance(params, Mapping):
            raise ManifestError("params must be a table of name = number")
        self.params = {name: parse_number(v) for name, v in params.items()}
        for name, v in (overrides or {}).items():
            self.params[name] = parse_number(v)
        self.symbols = tuple(data.get("symbols", ()))
        for name in self.symbols:
            if name in self.params:
                raise ManifestError(f"{name!r} is both a numeric param and a symbol")

    @staticmethod
    def parse_with(text, coords, params, symbols) -> Expr:
        if not isinstance(text, str):
            text = str(text)
        e = ex.parse(text, coords, tuple(params) + tuple(symbols))
        return ex.substitute(e, {k: ex.const(v) for k, v in params.items()}) if params else e

    def parse(self, text, coords) -> Expr:
        return self.parse_with(text, coords, self.params, self.symbols)

    def form(self, table: Mapping, coords: tuple, degree: int, where: str) -> DiffForm:
        if not isinstance(table, Mapping):
            raise ManifestError(f"{where}: a form is a table of basis = expression")
        terms = {}
        for key, value in table.items():
            names = _form_key(key, coords)
            if len(names) != degree:
                raise ManifestError(f"{where}: {key!r} is not a degree-{degree} basis element")
            terms[names] = self.parse(value, coords)
        if not terms:
            return DiffForm(coords, degree, {})
        return DiffForm.from_names(coords, terms)

    def charts(self) -> tuple:
        charts = []
        for k, entry in enumerate(self.data.get("charts", ())):
            coords = tuple(_require(entry, "coords", f"charts[{k}]"))
            charts.append(Chart(entry.get("name", f"U{k}"), coords))
        return tuple(charts)

    def cover(self, charts: tuple) -> GoodCover:
        block = self.data["cover"]
        if not charts:
            raise ManifestError("cover needs a charts list")
        m = len(charts)
        simplices = set()
        for s in _require(block, "simplices", "cover"):
            s = tuple(sorted(int(v) for v in s))
            if len(set(s)) != len(s) or any(not 0 <= v < m for v in s):
                raise ManifestError(f"cover.simplices: bad simplex {list(s)}")
            simplices.add(s)
        maps = {}
        for k, entry in enumerate(block.get("maps", ())):
            i, j = int(_require(entry, "from", f"cover.maps[{k}]")), int(_require(entry, "to", f"cover.maps[{k}]"))
            exprs = _require(entry, "map", f"cover.maps[{k}]")
            if len(exprs) != len(charts[j].coords):
                raise ManifestError(f"cover.maps[{k}]: chart {j} has {len(charts[j].coords)} coordinates")
            maps[(i, j)] = tuple(self.parse(e, charts[i].coords) for e in exprs)
        samples = {}
        for k, entry in enumerate(block.get("samples", ())):
            s = tuple(int(v) for v in _require(entry, "simplex", f"cover.samples[{k}]"))
            if list(s) != sorted(s):
                raise ManifestError(f"cover.samples[{k}]: simplex must be increasing")
            points = []
            for point in _require(entry, "points", f"cover.samples[{k}]"):
                if len(point) != len(s):
                    raise ManifestError(f"cover.samples[{k}]: each point lists one coordinate tuple per member chart")
                points.append({i: tuple(float(v) for v in xs) for i, xs in zip(s, point)})
            samples[s] = points
        return GoodCover(charts, frozenset(simplices), samples, maps, dict(block.get("metadata", {})))

    def potentials(self, cover: GoodCover) -> CoverPotentials:
        block = self.data["potentials"]
        per_chart = {int(_require(e, "chart", "potentials.charts")): e for e in block.get("charts", ())}
        omega, alpha = {}, {}
        for i, chart in enumerate(cover.charts):
            entry = per_chart.get(i, {})
            w = entry.get("omega", block.get("omega"))
            a = entry.get("alpha", block.get("alpha"))
            if w is None or a is None:
                raise ManifestError(f"potentials: chart {i} has no omega/alpha")
            omega[i] = self.form(w, chart.coords, 2, f"potentials omega (chart {i})")
            alpha[i] = self.form(a, chart.coords, 1, f"potentials alpha (chart {i})")
        f = {}
        for k, entry in enumerate(block.get("overlaps", ())):
            i, j = (int(v) for v in _require(entry, "pair", f"potentials.overlaps[{k}]"))
            if not cover.is_nonempty((i, j)) or i == j:
                raise ManifestError(f"potentials.overlaps[{k}]: ({i}, {j}) is not an overlap")
            value = self.parse(_require(entry, "f", f"potentials.overlaps[{k}]"), cover.coords(i))
            if i > j:
                i, j, value = j, i, ex.neg(cover.transport(value, i, j))
            f[(i, j)] = value
        for pair in cover.nerve(1):
            if pair not in f:
                raise ManifestError(f"potentials.overlaps: no f for overlap {list(pair)}")
        return CoverPotentials(cover, omega, alpha, f)

    def transitions(self, cover: GoodCover) -> TransitionData:
        g = {}
        for k, entry in enumerate(self.data["transitions"]):
            i, j = (int(v) for v in _require(entry, "pair", f"transitions[{k}]"))
            g[(i, j)] = self.parse(_require(entry, "g", f"transitions[{k}]"), cover.coords(i))
        for i, j in cover.nerve(1):
            if (i, j) not in g or (j, i) not in g:
                raise ManifestError(f"transitions: both orders of overlap ({i}, {j}) are required")
        return TransitionData(cover, g)

    def sections(self, cover: GoodCover) -> SectionFamily:
        psi = {}
        for k, entry in enumerate(self.data["sections"]):
            i = int(_require(entry, "chart", f"sections[{k}]"))
            psi[i] = self.parse(_require(entry, "psi", f"sections[{k}]"), cover.coords(i))
        if set(psi) != set(range(len(cover.charts))):
            raise ManifestError("sections: one psi per chart is required")
        return SectionFamily(psi)

    def mechanics(self):
        block = self.data["mechanics"]
        chart = CanonicalChart(int(_require(block, "n", "mechanics")))
        named = {}
        for kind in ("hamiltonians", "observables", "sections"):
            for name, text in block.get(kind, {}).items():
                if name in named:
                    raise ManifestError(f"mechanics: name {name!r} defined twice")
                named[name] = text
        parsed = {}
        # Named expressions may refer to each other; resolve in dependency order.
        pending = dict(named)
        while pending:
            progress = False
            for name, text in list(pending.items()):
                try:
                    e = self.parse_with(text, chart.coords, self.params,
                                        self.symbols + tuple(parsed) + tuple(pending))
                except ex.ParseError as err:
                    raise ManifestError(f"mechanics.{name}: {err}") from None
                if ex.free_symbols(e) & set(pending):
                    continue
                parsed[name] = ex.substitute(e, parsed)
                del pending[name]
                progress = True
            if not progress:
                raise ManifestError(f"mechanics: circular definitions among {sorted(pending)}")
        return chart, parsed, block.get("potential")


def load_manifest(path_or_data, overrides: Mapping | None = None) -> Manifest:
    """Load and validate a manifest; ``overrides`` replaces numeric params."""
    data = path_or_data if isinstance(path_or_data, Mapping) else read_manifest_data(path_or_data)
    version = data.get("version")
    if version != VERSION:
        raise ManifestError(f"unsupported manifest version {version!r} (expected {VERSION})")
    b = _Builder(data, overrides)
    try:
        charts = b.charts()
        m = Manifest(VERSION, b.params, b.symbols, charts)
        if "cover" in data:
            m.cover = b.cover(charts)
            m.cover.validate()
        for key in ("potentials", "transitions", "sections"):
            if key in data:
                if m.cover is None:
                    raise ManifestError(f"{key} needs a cover block")
                setattr(m, key, getattr(b, key)(m.cover))
        if "mechanics" in data:
            m.mechanics, m.named, m.potential_spec = b.mechanics()
    except ex.ParseError as err:
        raise ManifestError(f"expression error: {err}") from None
    except (TypeError, KeyError, AttributeError) as err:
        raise ManifestError(f"malformed manifest: {err!r}") from None
    return m


def cover_to_data(cover: GoodCover) -> dict:
    maps = [{"from": i, "to": j, "map": [ex.to_str(e) for e in exprs]}
            for (i, j), exprs in sorted(cover.transitions.items())]
    samples = [{"simplex": list(s), "points": [[list(point[i]) for i in s] for point in pts]}
               for s, pts in sorted(cover.samples.items())]
    return {
        "simplices": [list(s) for s in sorted(cover.simplices, key=lambda s: (len(s), s)) if len(s) > 1],
        "metadata": dict(cover.metadata),
        "maps": maps,
        "samples": samples,
    }


def torus_manifest(max_degree: int = 3, k=1) -> dict:
    """The torus fixture as manifest data, with omega = k dx^dy and k a param."""
    from .fixtures import torus_cover, torus_potentials

    cover = torus_cover(max_degree)
    cp = torus_potentials(ex.sym("k"), cover)
    return {
        "version": VERSION,
        "params": {"k": k},
        "charts": [{"name": c.name, "coords": list(c.coords)} for c in cover.charts],
        "cover": cover_to_data(cover),
        "potentials": {
            "omega": _form_to_table(cp.omega[0]),
            "alpha": _form_to_table(cp.alpha[0]),
            "overlaps": [{"pair": list(ij), "f": ex.to_str(e)} for ij, e in sorted(cp.f.items())],
        },
    }
