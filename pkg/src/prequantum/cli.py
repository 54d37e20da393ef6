"""``prequantum`` command line: mech, prequant, cech, bundle and fixture subcommands.

Reports go to stdout as JSON (trajectories as CSV), diagnostics to stderr.
Exit codes: 0 success, 1 input error, 2 a check failed.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import expr as ex
from .bundle import (connection_consistency, curvature_per_chart, from_integral_cocycle,
                     glue_section, hermitian_compatibility, section_from_tree, verify_cocycle)
from .cech import CoverError, PotentialError, SpreadError, cohomology_rank, integrality_check
from .manifest import ManifestError, load_manifest, parse_number, torus_manifest, write_manifest
from .prequant import (ConnectionPotential, CurvatureConditionError, PrequantOperator,
                       bump_cut, dirac_check, symmetry_check)
from .symplectic import (CanonicalChart, NonSeparableHamiltonian, conservation_check,
                         integrate_flow, poisson_bracket)

EXIT_OK, EXIT_INPUT, EXIT_CHECK = 0, 1, 2


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, Fraction):
        return float(value)
    if isinstance(value, ex.Expr):
        return ex.to_str(value)
    return value


def emit(report: dict) -> None:
    sys.stdout.write(json.dumps(_jsonable(report), ensure_ascii=False) + "\n")


def _overrides(args) -> dict:
    out = {}
    for item in getattr(args, "set", None) or ():
        name, sep, value = item.partition("=")
        if not sep:
            raise InputError(f"--set expects NAME=VALUE, got {item!r}")
        out[name.strip()] = value.strip()
    if getattr(args, "k", None) is not None:
        out["k"] = args.k
    return out


def _load(path: str, args):
    if not Path(path).is_file():
        raise InputError(f"no such manifest: {path}")
    return load_manifest(path, _overrides(args))


# ---------------------------------------------------------------------------
# expression context for mech / prequant


class Context:
    """Canonical chart plus named expressions and parameters for argument parsing."""

    def __init__(self, args, texts):
        self.manifest = None
        path = getattr(args, "manifest", None)
        if path:
            self.manifest = _load(path, args)
        params = dict(self.manifest.params) if self.manifest else {}
        for name, value in _overrides(args).items():
            params[name] = parse_number(value)
        self.params = params
        self.symbols = tuple(self.manifest.symbols if self.manifest else ()) + tuple(args.param or ())
        self.named = dict(self.manifest.named) if self.manifest else {}
        n = args.n
        if n is None and self.manifest and self.manifest.mechanics:
            n = self.manifest.mechanics.n
        if n is None:
            found = [int(m) for t in texts for m in re.findall(r"\b[qp](\d+)\b", t)]
            n = max(found, default=1)
        self.chart = CanonicalChart(n)

    def parse(self, text: str) -> ex.Expr:
        names = tuple(self.params) + self.symbols + tuple(self.named)
        try:
            e = ex.parse(text, self.chart.coords, names)
        except ex.ParseError as err:
            raise _ExprInputError(text, err) from None
        return ex.substitute(e, {**self.named, **{k: ex.const(v) for k, v in self.params.items()}})

    def potential(self, spec) -> ConnectionPotential:
        if spec is None and self.manifest is not None:
            spec = self.manifest.potential_spec
        if spec is None or spec == "q_dp":
            return ConnectionPotential.q_dp(self.chart)
        if spec == "minus_p_dq":
            return ConnectionPotential.minus_p_dq(self.chart)
        parts = spec if isinstance(spec, list) else spec.split(",")
        if len(parts) != self.chart.dim:
            raise InputError(f"--potential needs {self.chart.dim} comma-separated components "
                             f"(order {', '.join(self.chart.coords)}) or q_dp / minus_p_dq")
        return ConnectionPotential(self.chart, tuple(self.parse(p.strip()) for p in parts))


class _ExprInputError(InputError):
    def __init__(self, text: str, err: ex.ParseError):
        super().__init__(f"{err}\n  {text}\n  {' ' * err.position}^")


def _vector(text: str, size: int | None = None, what: str = "point") -> list:
    body = text.strip().strip("()[]")
    try:
        values = [float(v) for v in body.split(",") if v.strip()]
    except ValueError:
        raise InputError(f"cannot read {what} {text!r}") from None
    if size is not None and len(values) != size:
        raise InputError(f"{what} {text!r} needs {size} values")
    return values


def numeric_terms(e: ex.Expr):
    """[(monomial, complex coefficient)] with pi evaluated, or None if not polynomial."""
    poly = ex.to_poly(ex.expand(e))
    if poly is None:
        return None
    grouped: dict = {}
    for mono, c in poly.items():
        rest = tuple((n, k) for n, k in mono if n != "pi")
        power = sum(k for n, k in mono if n == "pi")
        grouped[rest] = grouped.get(rest, 0j) + complex(c) * math.pi ** power
    out = []
    for mono in sorted(grouped, key=lambda m: (sum(k for _, k in m), m)):
        label = ex.to_str(ex.from_poly({mono: ex.Number.of(1)})) if mono else "1"
        out.append([label, grouped[mono]])
    return out


# ---------------------------------------------------------------------------
# mech


def _hamiltonian(ctx: Context, text: str, args) -> ex.Expr:
    if text.endswith((".toml", ".json")) or Path(text).is_file():
        m = _load(text, args)
        if m.mechanics is None:
            raise InputError(f"{text} has no [mechanics] block")
        ctx.chart, ctx.named = m.mechanics, {**ctx.named, **m.named}
        ctx.params = {**m.params, **ctx.params}
        ctx.symbols = ctx.symbols + tuple(m.symbols)
        if "H" not in m.named:
            raise InputError(f"{text} defines no Hamiltonian named H")
        return ctx.parse("H")
    return ctx.parse(text)


def cmd_mech(args) -> int:
    texts = [t for t in (args.bracket or args.conserved or args.flow or ()) if isinstance(t, str)]
    ctx = Context(args, texts)
    if args.bracket:
        f, g = (ctx.parse(t) for t in args.bracket)
        emit({"f": f, "g": g, "bracket": poisson_bracket(f, g, ctx.chart)})
        return EXIT_OK
    if args.flow:
        H_text, x0_text, t1_text, dt_text = args.flow
        H = _hamiltonian(ctx, H_text, args)
        x0 = ctx.chart.point(_vector(x0_text, ctx.chart.dim, "initial state"))
        try:
            t1, dt = float(t1_text), float(dt_text)
        except ValueError:
            raise InputError("t and dt must be numbers") from None
        traj = integrate_flow(H, x0, t1, dt, method=args.method)
        csv_text = traj.to_csv()
        if args.output:
            Path(args.output).write_text(csv_text)
            emit({"method": traj.method, "steps": len(traj.times) - 1,
                  "t1": float(traj.times[-1]), "final": list(map(float, traj.final)),
                  "output": args.output})
        else:
            sys.stdout.write(csv_text)
        return EXIT_OK
    f_text, H_text = args.conserved
    H = _hamiltonian(ctx, H_text, args)
    f = ctx.parse(f_text)
    traj = None
    if args.along:
        x0_text, t1_text, dt_text = args.along
        traj = integrate_flow(H, ctx.chart.point(_vector(x0_text, ctx.chart.dim, "initial state")),
                              float(t1_text), float(dt_text), method=args.method)
    report = conservation_check(f, H, ctx.chart, trajectory=traj)
    out = {"f": f, "H": H, "bracket": report.bracket,
           "verdict": "conserved" if report.conserved else "not_conserved"}
    if traj is not None:
        out["max_deviation"] = report.max_deviation
    emit(out)
    return EXIT_OK if report.conserved else EXIT_CHECK


# ---------------------------------------------------------------------------
# prequant


def _box(text: str, dim: int) -> tuple:
    values = _vector(text, 2 * dim, "box")
    box = tuple((values[2 * k], values[2 * k + 1]) for k in range(dim))
    if any(lo >= hi for lo, hi in box):
        raise InputError("box intervals must have lo < hi")
    return box


def cmd_prequant(args) -> int:
    texts = [t for group in (args.apply, args.dirac, args.symmetry) if group for t in group]
    if args.potential:
        texts.append(args.potential)
    ctx = Context(args, texts)
    B = ctx.potential(args.potential)
    base = {"potential": [ex.to_str(b) for b in B.components]}
    try:
        if args.apply:
            f, s = (ctx.parse(t) for t in args.apply)
            out = PrequantOperator(f, B)(s)
            emit({"operator": "apply", "inputs": {"f": f, "s": s}, **base,
                  "section": out.value, "terms": numeric_terms(out.value),
                  "residual_norm": None, "verdict": "pass", "grid": None, "box": None})
            return EXIT_OK
        if args.dirac:
            f, g, s = (ctx.parse(t) for t in args.dirac)
            rep = dirac_check(f, g, B, s, trials=args.trials, seed=args.seed, tol=args.tol or 1e-8)
            emit({"operator": "dirac", "inputs": {"f": f, "g": g, "s": s}, **base,
                  "residual": rep.residual, "exact": rep.exact,
                  "residual_norm": rep.residual_norm,
                  "verdict": "pass" if rep.verdict else "fail", "grid": None, "box": None})
            return EXIT_OK if rep.verdict else EXIT_CHECK
        f, s1, s2 = (ctx.parse(t) for t in args.symmetry)
        if not args.box:
            raise InputError("--symmetry needs --box")
        box = _box(args.box, ctx.chart.dim)
        sections = [bump_cut(s, box, ctx.chart) for s in (s1, s2)]
        dev = symmetry_check(f, B, *sections, box, args.grid)
        tol = args.tol or 1e-6
        emit({"operator": "symmetry", "inputs": {"f": f, "s1": s1, "s2": s2}, **base,
              "residual_norm": dev, "verdict": "pass" if dev < tol else "fail",
              "grid": args.grid, "box": [list(b) for b in box]})
        return EXIT_OK if dev < tol else EXIT_CHECK
    except CurvatureConditionError as err:
        emit({"operator": "apply" if args.apply else "dirac" if args.dirac else "symmetry",
              **base, "error": "curvature_condition", "message": str(err),
              "dB": str(B.form.d()), "verdict": "fail"})
        return EXIT_CHECK


# ---------------------------------------------------------------------------
# cech / bundle


def _potentials(m, path):
    if m.potentials is None:
        raise InputError(f"{path} has no potentials block")
    m.potentials.validate()
    return m.potentials


def cmd_cech(args) -> int:
    if args.rank:
        m = _load(args.rank, args)
        if m.cover is None:
            raise InputError(f"{args.rank} has no cover block")
        emit({"degree": args.degree, "ring": "Q", "rank": cohomology_rank(m.cover, args.degree)})
        return EXIT_OK
    m = _load(args.integrality, args)
    cp = _potentials(m, args.integrality)
    report = integrality_check(cp, tol=args.tol)
    emit(report.to_json())
    return EXIT_OK if report.verdict else EXIT_CHECK


def _named_forms(forms: dict, cover) -> dict:
    return {cover.charts[i].name: str(f) for i, f in sorted(forms.items())}


def cmd_bundle(args) -> int:
    path = args.build_and_verify or args.verify
    m = _load(path, args)
    if m.cover is None:
        raise InputError(f"{path} has no cover block")
    cp = None
    if args.build_and_verify:
        cp = _potentials(m, path)
        td = from_integral_cocycle(cp)
    else:
        if m.transitions is None:
            raise InputError(f"{path} has no transitions block")
        td = m.transitions
        if m.potentials is not None:
            cp = _potentials(m, path)
    report = {}
    cocycle = verify_cocycle(td)
    report["cocycle"] = cocycle.to_json()
    violations = td.invariant_violations()
    report["transition_invariants"] = {
        "verdict": "pass" if not violations else "fail",
        "violations": [{"pair": list(ij), "problem": why} for ij, why in violations]}
    checks = [cocycle.verdict, not violations]
    if cp is not None:
        conn = connection_consistency(cp, td)
        curv = curvature_per_chart(cp)
        herm = hermitian_compatibility(cp, td)
        report["connection"] = {"verdict": "pass" if conn.verdict else "fail",
                                "residual_max": conn.residual_max,
                                "global_connection": conn.global_connection}
        report["curvature"] = {"verdict": "pass" if curv.verdict else "fail",
                               "form": "2πi·ω" if curv.matches_omega else None,
                               "overlap_max": curv.overlap_max,
                               "per_chart": _named_forms(curv.curvature, m.cover)}
        report["hermitian"] = {"verdict": "pass" if herm.verdict else "fail",
                               "unitary_max": herm.unitary_max, "alpha_real": herm.alpha_real}
        checks += [conn.verdict, curv.verdict, herm.verdict]
    if m.sections is not None:
        glue = glue_section(m.sections, td)
    else:
        glue = glue_section(section_from_tree(td, 0, ex.ONE), td, within=[0])
    report["glue"] = {"verdict": "pass" if glue.verdict else "fail", "deviation": glue.deviation,
                      "source": "manifest" if m.sections is not None else "spanning_tree",
                      "scope": "all overlaps" if m.sections is not None else "simplices containing chart 0",
                      "witness": None if glue.witness is None else
                      {"simplex": list(glue.witness[0]), "pair": list(glue.witness[1])}}
    checks.append(glue.verdict)
    report["verdict"] = "pass" if all(checks) else "fail"
    emit(report)
    return EXIT_OK if all(checks) else EXIT_CHECK


def cmd_fixture(args) -> int:
    data = torus_manifest(args.max_degree, k=args.k_default)
    if args.out:
        write_manifest(data, args.out)
    else:
        import tomli_w
        sys.stdout.write(tomli_w.dumps(data))
    return EXIT_OK


# ---------------------------------------------------------------------------


def _expr_options(p):
    p.add_argument("--manifest", help="manifest with [mechanics] named expressions and params")
    p.add_argument("--n", type=int, help="degrees of freedom (default: inferred from q<j>/p<j>)")
    p.add_argument("--param", action="append", metavar="NAME", help="declare a symbolic constant")
    p.add_argument("--set", action="append", metavar="NAME=VALUE", help="give a parameter a value")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="prequantum", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    mech = sub.add_parser("mech", help="Poisson brackets, flows and conserved quantities")
    _expr_options(mech)
    group = mech.add_mutually_exclusive_group(required=True)
    group.add_argument("--bracket", nargs=2, metavar=("F", "G"))
    group.add_argument("--flow", nargs=4, metavar=("H", "X0", "T", "DT"),
                       help="H is an expression or a manifest defining H")
    group.add_argument("--conserved", nargs=2, metavar=("F", "H"))
    mech.add_argument("--method", choices=("verlet", "rk4"))
    mech.add_argument("--output", help="write the CSV trajectory here instead of stdout")
    mech.add_argument("--along", nargs=3, metavar=("X0", "T", "DT"),
                      help="with --conserved: trajectory for the deviation diagnostic")
    mech.set_defaults(func=cmd_mech)

    pq = sub.add_parser("prequant", help="prequantum operators on the trivial bundle over R^2n")
    _expr_options(pq)
    group = pq.add_mutually_exclusive_group(required=True)
    group.add_argument("--apply", nargs=2, metavar=("F", "S"))
    group.add_argument("--dirac", nargs=3, metavar=("F", "G", "S"))
    group.add_argument("--symmetry", nargs=3, metavar=("F", "S1", "S2"))
    pq.add_argument("--potential", help="q_dp (default), minus_p_dq, or comma-separated components")
    pq.add_argument("--box", help="lo,hi per coordinate, e.g. -4,4,-4,4")
    pq.add_argument("--grid", type=int, default=64)
    pq.add_argument("--trials", type=int, default=100)
    pq.add_argument("--seed", type=int, default=0)
    pq.add_argument("--tol", type=float)
    pq.set_defaults(func=cmd_prequant)

    cech = sub.add_parser("cech", help="integrality of [omega] on a cover manifest")
    group = cech.add_mutually_exclusive_group(required=True)
    group.add_argument("--integrality", metavar="MANIFEST")
    group.add_argument("--rank", metavar="MANIFEST", help="rank of the nerve's cohomology over Q")
    cech.add_argument("--degree", type=int, default=2)
    cech.add_argument("--k", help="value for the manifest parameter k")
    cech.add_argument("--set", action="append", metavar="NAME=VALUE")
    cech.add_argument("--tol", type=float, default=1e-6)
    cech.set_defaults(func=cmd_cech)

    bundle = sub.add_parser("bundle", help="line bundle from transition functions")
    group = bundle.add_mutually_exclusive_group(required=True)
    group.add_argument("--build-and-verify", metavar="MANIFEST",
                       help="build g_ij = exp(2 pi i f_ij) from the potentials and check everything")
    group.add_argument("--verify", metavar="MANIFEST", help="check the manifest's own transitions")
    bundle.add_argument("--k", help="value for the manifest parameter k")
    bundle.add_argument("--set", action="append", metavar="NAME=VALUE")
    bundle.set_defaults(func=cmd_bundle)

    fixture = sub.add_parser("fixture", help="write a built-in fixture manifest")
    fixture.add_argument("name", choices=("torus",))
    fixture.add_argument("--out", help=".toml or .json path (default: TOML on stdout)")
    fixture.add_argument("--max-degree", type=int, default=3)
    fixture.add_argument("--k-default", type=int, default=1)
    fixture.set_defaults(func=cmd_fixture)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as stop:
        return stop.code
    try:
        return args.func(args)
    except (InputError, ManifestError, CoverError, PotentialError, SpreadError,
            NonSeparableHamiltonian, ex.DomainError, OSError) as err:
        print(f"prequantum {args.command}: {err}", file=sys.stderr)
        return EXIT_INPUT
    except ex.ParseError as err:
        print(f"prequantum {args.command}: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
