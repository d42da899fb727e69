"""Sampled parametric immersions and the built-in shape catalog."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
import sympy as sp

from . import fd
from .errors import CatalogError, ConfigError, DegenerateImmersionError, ValidationError


@dataclass(frozen=True)
class Grid:
    """Uniform rectangular lattice; periodic axes exclude the right endpoint."""

    axes: tuple
    periodic: tuple

    @classmethod
    def uniform(cls, ranges, sizes, periodic) -> "Grid":
        axes = []
        for (lo, hi), size, per in zip(ranges, sizes, periodic):
            axes.append(np.linspace(lo, hi, int(size), endpoint=not per))
        return cls(tuple(axes), tuple(bool(p) for p in periodic))

    @property
    def shape(self) -> tuple:
        return tuple(len(a) for a in self.axes)

    @property
    def spacing(self) -> tuple:
        return tuple(float(a[1] - a[0]) for a in self.axes)

    @property
    def ndim(self) -> int:
        return len(self.axes)

    def mesh(self) -> list[np.ndarray]:
        return np.meshgrid(*self.axes, indexing="ij")

    def interior(self, width: int = 1):
        """Index tuple selecting samples away from open boundaries."""
        return tuple(slice(None) if p else slice(width, -width) for p in self.periodic)


@dataclass(frozen=True)
class ImmersionChart:
    """A sampled immersion ``x: R^k -> R^n``.

    ``samples`` has shape ``(*grid.shape, n)``; the optional analytic jet
    holds ``d1`` with shape ``(*grid.shape, k, n)`` and ``d2`` with shape
    ``(*grid.shape, k, k, n)``.
    """

    k: int
    n: int
    grid: Grid
    samples: np.ndarray
    d1: np.ndarray | None = None
    d2: np.ndarray | None = None
    name: str = "sampled"
    params: dict = field(default_factory=dict)

    @property
    def has_jet(self) -> bool:
        return self.d1 is not None and self.d2 is not None

    def first_derivatives(self, use_jet: bool = True) -> np.ndarray:
        if use_jet and self.d1 is not None:
            return self.d1
        return fd.gradient(self.samples, self.grid.spacing, self.grid.periodic)

    def second_derivatives(self, use_jet: bool = True) -> np.ndarray:
        if use_jet and self.d2 is not None:
            return self.d2
        return fd.hessian(self.samples, self.grid.spacing, self.grid.periodic)

    def without_jet(self) -> "ImmersionChart":
        return replace(self, d1=None, d2=None)

    def scaled(self, lam: float) -> "ImmersionChart":
        """The chart ``lam * x`` on the same parameter grid."""
        return replace(
            self,
            samples=lam * self.samples,
            d1=None if self.d1 is None else lam * self.d1,
            d2=None if self.d2 is None else lam * self.d2,
            params={**self.params, "scale": self.params.get("scale", 1.0) * lam},
        )

    def embedded(self, n_new: int) -> "ImmersionChart":
        """Pad with constant zero coordinates into a higher-dimensional space."""
        if n_new < self.n:
            raise ValidationError("cannot embed into a lower dimension")
        def _pad(a):
            return None if a is None else np.pad(a, [(0, 0)] * (a.ndim - 1) + [(0, n_new - self.n)])

        return replace(self, n=n_new, samples=_pad(self.samples), d1=_pad(self.d1), d2=_pad(self.d2))

    def validate(self) -> None:
        jac = self.first_derivatives()
        sv = np.linalg.svd(jac, compute_uv=False)[..., -1]
        if np.min(sv) <= 1e-8:
            idx = np.unravel_index(np.argmin(sv), sv.shape)
            raise DegenerateImmersionError(f"Jacobian rank-deficient at sample {idx}", index=idx)
        for ax, per in enumerate(self.grid.periodic):
            if not per:
                continue
            x = np.moveaxis(self.samples, ax, 0)
            step = np.max(np.linalg.norm(np.diff(x, axis=0), axis=-1))
            wrap = np.max(np.linalg.norm(x[0] - x[-1], axis=-1))
            if wrap > 3 * step:
                raise ValidationError(f"periodic axis {ax} does not wrap (gap {wrap:.3g}, step {step:.3g})")


# --- catalog ----------------------------------------------------------------

_u, _v = sp.symbols("u v", real=True)


@dataclass(frozen=True)
class ShapeSpec:
    name: str
    k: int
    defaults: dict
    ranges: object  # callable(params) -> list of (lo, hi)
    periodic: tuple
    expr: object  # callable(params) -> list of sympy expressions
    description: str = ""


def _graph_expr(p):
    a = p["a"]
    F = {
        "paraboloid": a * (_u**2 + _v**2),
        "saddle": a * (_u**2 - _v**2),
        "wave": a * sp.sin(_u) * sp.cos(_v),
    }
    if p["F"] not in F:
        raise CatalogError(f"unknown graph function {p['F']!r}; choose from {sorted(F)}")
    return [_u, _v, F[p["F"]]]


def _helix_expr(p):
    L = sp.sqrt(p["R"] ** 2 + p["c"] ** 2)
    return [p["R"] * sp.cos(_u / L), p["R"] * sp.sin(_u / L), p["c"] * _u / L]


def _sphere_expr(p):
    d = 1 + _u**2 + _v**2
    return [p["R"] * 2 * _u / d, p["R"] * 2 * _v / d, p["R"] * (_u**2 + _v**2 - 1) / d]


def _torus_expr(p):
    r1, r2 = p["r1"], p["r2"]
    return [r1 * sp.cos(_u / r1), r1 * sp.sin(_u / r1), r2 * sp.cos(_v / r2), r2 * sp.sin(_v / r2)]


SHAPES = {
    s.name: s
    for s in [
        ShapeSpec("line", 1, {}, lambda p: [(-1.0, 1.0)], (False,), lambda p: [_u, sp.Integer(0)],
                  "straight line in E^2"),
        ShapeSpec("circle", 1, {"R": 1.0}, lambda p: [(0.0, 2 * np.pi * p["R"])], (True,),
                  lambda p: [p["R"] * sp.cos(_u / p["R"]), p["R"] * sp.sin(_u / p["R"])],
                  "circle of radius R in E^2, arclength chart"),
        ShapeSpec("helix", 1, {"R": 1.0, "c": 0.5},
                  lambda p: [(0.0, 2 * np.pi * float(np.hypot(p["R"], p["c"])))], (False,), _helix_expr,
                  "circular helix in E^3, arclength chart"),
        ShapeSpec("plane", 2, {}, lambda p: [(-1.0, 1.0), (-1.0, 1.0)], (False, False),
                  lambda p: [_u, _v, sp.Integer(0)], "coordinate plane in E^3"),
        ShapeSpec("sphere", 2, {"R": 1.0}, lambda p: [(-1.0, 1.0), (-1.0, 1.0)], (False, False), _sphere_expr,
                  "sphere of radius R, stereographic chart from the north pole"),
        ShapeSpec("catenoid", 2, {"a": 1.0}, lambda p: [(0.0, 2 * np.pi), (-1.0, 1.0)], (True, False),
                  lambda p: [p["a"] * sp.cosh(_v) * sp.cos(_u), p["a"] * sp.cosh(_v) * sp.sin(_u), p["a"] * _v],
                  "catenoid, conformal chart"),
        ShapeSpec("enneper", 2, {}, lambda p: [(-1.0, 1.0), (-1.0, 1.0)], (False, False),
                  lambda p: [_u - _u**3 / 3 + _u * _v**2, _v - _v**3 / 3 + _v * _u**2, _u**2 - _v**2],
                  "Enneper surface, conformal chart"),
        ShapeSpec("product_torus", 2, {"r1": 1.0, "r2": 1.0},
                  lambda p: [(0.0, 2 * np.pi * p["r1"]), (0.0, 2 * np.pi * p["r2"])], (True, True), _torus_expr,
                  "product of circles in E^4, conformal (flat) chart"),
        ShapeSpec("graph", 2, {"F": "paraboloid", "a": 0.5}, lambda p: [(-1.0, 1.0), (-1.0, 1.0)], (False, False),
                  _graph_expr, "graph (u, v, F(u, v)) over the square"),
    ]
}


@lru_cache(maxsize=None)
def _lambdified(name: str, frozen_params: tuple):
    spec = SHAPES[name]
    p = dict(frozen_params)
    syms = [_u, _v][: spec.k]
    X = [sp.sympify(e) for e in spec.expr(p)]
    J = [[sp.diff(e, a) for e in X] for a in syms]
    H = [[[sp.diff(e, a, b) for e in X] for b in syms] for a in syms]
    return (
        sp.lambdify(syms, X, "numpy"),
        sp.lambdify(syms, J, "numpy"),
        sp.lambdify(syms, H, "numpy"),
        len(X),
    )


def _broadcast(values, shape):
    return np.stack([np.broadcast_to(np.asarray(v, dtype=float), shape) for v in values], axis=-1)


def list_shapes() -> list[str]:
    return sorted(SHAPES)


def make_chart(
    name: str,
    params: dict | None = None,
    sizes=32,
    ranges=None,
    periodic=None,
    jet: str = "analytic",
    n: int | None = None,
) -> ImmersionChart:
    """Sample a catalog shape on a uniform grid.

    Parameters
    ----------
    name : str
        Catalog key, see :func:`list_shapes`.
    params : dict, optional
        Shape parameters; ``scale`` multiplies the whole immersion.
    sizes : int or sequence of int
        Samples per axis.
    jet : {"analytic", "finite_difference"}
        Whether to attach exact derivatives.
    n : int, optional
        Embed into ``E^n`` by padding zero coordinates.
    """
    if name not in SHAPES:
        raise CatalogError(f"unknown shape {name!r}; available: {', '.join(list_shapes())}")
    spec = SHAPES[name]
    params = dict(params or {})
    scale = float(params.pop("scale", 1.0))
    unknown = set(params) - set(spec.defaults)
    if unknown:
        raise CatalogError(f"unknown parameter(s) {sorted(unknown)} for shape {name!r}")
    p = {**spec.defaults, **params}
    if jet not in ("analytic", "finite_difference"):
        raise ConfigError(f"jet must be 'analytic' or 'finite_difference', got {jet!r}")
    if isinstance(sizes, (int, np.integer)):
        sizes = (int(sizes),) * spec.k
    ranges = ranges if ranges is not None else spec.ranges(p)
    periodic = tuple(periodic) if periodic is not None else spec.periodic
    grid = Grid.uniform(ranges, sizes, periodic)
    fx, fj, fh, n_native = _lambdified(name, tuple(sorted(p.items())))
    mesh = grid.mesh()
    shape = grid.shape
    X = _broadcast(fx(*mesh), shape)
    d1 = d2 = None
    if jet == "analytic":
        J = fj(*mesh)
        d1 = np.stack([_broadcast(row, shape) for row in J], axis=-2)
        H = fh(*mesh)
        d2 = np.stack([np.stack([_broadcast(c, shape) for c in row], axis=-2) for row in H], axis=-3)
    chart = ImmersionChart(spec.k, n_native, grid, X, d1, d2, name=name, params={**p, "scale": 1.0})
    if scale != 1.0:
        chart = chart.scaled(scale)
    if n is not None and n != n_native:
        chart = chart.embedded(n)
    return chart


def chart_from_dict(doc: dict) -> ImmersionChart:
    """Build a chart from ``{shape, params, grid: {sizes, ranges, periodic}, jet, n}``."""
    if "shape" not in doc:
        raise ConfigError("chart document needs a 'shape' key")
    g = doc.get("grid", {})
    return make_chart(
        doc["shape"],
        doc.get("params"),
        sizes=g.get("sizes", 32),
        ranges=g.get("ranges"),
        periodic=g.get("periodic"),
        jet=doc.get("jet", "analytic"),
        n=doc.get("n"),
    )


def load_chart(path) -> ImmersionChart:
    with open(path, encoding="utf-8") as fh:
        return chart_from_dict(json.load(fh))
