"""Canonical symplectic structure on R^2n.

Conventions (fixed throughout the package, and pinned by the tests):

* omega = sum_j dq_j ^ dp_j
* X_f = sum_j (-df/dp_j d/dq_j + df/dq_j d/dp_j), i.e. X_f _| omega = -df
* {f, g} = omega(X_f, X_g) = X_f(g) = sum_j (df/dq_j dg/dp_j - df/dp_j dg/dq_j)

With these, {q_i, p_j} = delta_ij, [X_f, X_g] = X_{f,g} and the prequantum
operators of :mod:`prequantum.prequant` obey Q_{f,g} = -i[Q_f, Q_g] for a
potential with dB = omega. Physical motion (Hamilton's equations
dq/dt = dH/dp, dp/dt = -dH/dq) is the flow of -X_H.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import expr as ex
from .expr import Expr
from .forms import DiffForm, VectorField, lie_bracket

__all__ = [
    "CanonicalChart", "Point", "Trajectory", "NonSeparableHamiltonian",
    "hamiltonian_vector_field", "poisson_bracket", "lie_bracket", "integrate_flow",
    "conservation_check", "ConservationReport", "is_separable",
]


class NonSeparableHamiltonian(ValueError):
    pass


@dataclass(frozen=True)
class CanonicalChart:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")

    @property
    def q(self) -> tuple:
        return tuple(f"q{j}" for j in range(1, self.n + 1))

    @property
    def p(self) -> tuple:
        return tuple(f"p{j}" for j in range(1, self.n + 1))

    @property
    def coords(self) -> tuple:
        return self.q + self.p

    @property
    def dim(self) -> int:
        return 2 * self.n

    def parse(self, text: str, params: Sequence[str] = ()) -> Expr:
        return ex.parse(text, self.coords, params)

    def omega(self) -> DiffForm:
        return DiffForm(self.coords, 2, {(j, self.n + j): ex.ONE for j in range(self.n)})

    def point(self, values: Sequence[float]) -> "Point":
        return Point(self, tuple(float(v) for v in values))


@dataclass(frozen=True)
class Point:
    chart: CanonicalChart
    x: tuple

    def __post_init__(self):
        if len(self.x) != self.chart.dim:
            raise ValueError(f"expected {self.chart.dim} coordinates, got {len(self.x)}")

    def env(self) -> dict:
        return dict(zip(self.chart.coords, self.x))


def hamiltonian_vector_field(f: Expr, chart: CanonicalChart) -> VectorField:
    q_part = [ex.expand(ex.neg(ex.diff(f, p))) for p in chart.p]
    p_part = [ex.expand(ex.diff(f, q)) for q in chart.q]
    return VectorField(chart.coords, tuple(q_part + p_part))


def poisson_bracket(f: Expr, g: Expr, chart: CanonicalChart) -> Expr:
    terms = []
    for q, p in zip(chart.q, chart.p):
        terms.append(ex.mul(ex.diff(f, q), ex.diff(g, p)))
        terms.append(ex.neg(ex.mul(ex.diff(f, p), ex.diff(g, q))))
    return ex.expand(ex.add(*terms))


# ---------------------------------------------------------------------------
# flows


@dataclass
class Trajectory:
    chart: CanonicalChart
    times: np.ndarray
    states: np.ndarray
    method: str
    dt: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t", *self.chart.coords])
        for t, row in zip(self.times, self.states):
            writer.writerow([f"{t:.17g}", *(f"{v:.17g}" for v in row)])
        return buf.getvalue()

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def observe(self, f: Expr, params: dict | None = None) -> np.ndarray:
        env = {name: self.states[:, k] for k, name in enumerate(self.chart.coords)}
        env.update(params or {})
        return np.real(ex.evaluate(f, env))


def is_separable(H: Expr, chart: CanonicalChart) -> bool:
    """True when every additive term of H involves only q's or only p's."""
    e = ex.expand(H)
    terms = e.terms if isinstance(e, ex.Add) else (e,)
    qs, ps = set(chart.q), set(chart.p)
    for t in terms:
        names = ex.free_symbols(t)
        if names & qs and names & ps:
            return False
    return True


def _gradient_fn(exprs, chart, params):
    names = chart.coords

    def fn(x):
        env = dict(zip(names, x))
        env.update(params)
        return np.array([ex.evaluate(e, env).real for e in exprs])

    return fn


def _time_grid(t1: float, dt: float) -> np.ndarray:
    steps = int(np.floor(t1 / dt + 1e-9))
    grid = dt * np.arange(steps + 1)
    if t1 - grid[-1] > 1e-12 * max(1.0, abs(t1)):
        grid = np.append(grid, t1)
    return grid


def integrate_flow(H: Expr, x0: Point, t1: float, dt: float, method: str | None = None,
                   params: dict | None = None, t0: float = 0.0) -> Trajectory:
    """Integrate Hamilton's equations from ``t0`` to ``t1``.

    ``dt`` is negative when running backwards in time (``t1 < t0``). The grid
    is uniform with a final partial step landing exactly on ``t1``. ``method`` is ``"verlet"`` (kick-drift-kick Stormer-
    Verlet, separable H only), ``"rk4"``, or None to choose verlet when H is
    separable.
    """
    chart = x0.chart
    params = dict(params or {})
    span = t1 - t0
    if dt == 0 or (span != 0 and np.sign(dt) != np.sign(span)):
        raise ValueError("dt must be nonzero and point from t0 towards t1")
    separable = is_separable(H, chart)
    if method is None:
        method = "verlet" if separable else "rk4"
    if method not in ("verlet", "rk4"):
        raise ValueError(f"unknown method {method!r}")
    if method == "verlet" and not separable:
        raise NonSeparableHamiltonian("Stormer-Verlet needs H = T(p) + V(q)")

    sign = 1.0 if dt > 0 else -1.0
    grid = t0 + sign * _time_grid(abs(span), abs(dt))
    n = chart.n
    dH_dq = _gradient_fn([ex.diff(H, q) for q in chart.q], chart, params)
    dH_dp = _gradient_fn([ex.diff(H, p) for p in chart.p], chart, params)
    states = np.empty((len(grid), 2 * n))
    states[0] = x0.x
    x = np.array(x0.x, dtype=float)
    for k in range(1, len(grid)):
        h = grid[k] - grid[k - 1]
        if method == "verlet":
            x[n:] -= 0.5 * h * dH_dq(x)
            x[:n] += h * dH_dp(x)
            x[n:] -= 0.5 * h * dH_dq(x)
        else:
            def rhs(y):
                return np.concatenate([dH_dp(y), -dH_dq(y)])
            k1 = rhs(x)
            k2 = rhs(x + 0.5 * h * k1)
            k3 = rhs(x + 0.5 * h * k2)
            k4 = rhs(x + h * k3)
            x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        states[k] = x
    return Trajectory(chart, grid, states, method, dt)


@dataclass
class ConservationReport:
    bracket: Expr
    conserved: bool
    max_deviation: float | None = None


def conservation_check(f: Expr, H: Expr, chart: CanonicalChart,
                       trajectory: Trajectory | None = None,
                       params: dict | None = None) -> ConservationReport:
    bracket = poisson_bracket(f, H, chart)
    fixed = {k: float(v) for k, v in (params or {}).items()}
    verdict = ex.is_zero(bracket, env=fixed)
    deviation = None
    if trajectory is not None:
        values = trajectory.observe(f, params)
        deviation = float(np.max(np.abs(values - values[0])))
    return ConservationReport(bracket, verdict, deviation)
