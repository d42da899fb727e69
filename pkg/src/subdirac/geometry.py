"""Sampled differential geometry of immersions.

Conventions
-----------
Arrays carry the grid axes first. For a chart ``x: R^k -> R^n`` with
``c = n - k`` normals:

* ``metric``      ``(*grid, k, k)``
* ``normals``     ``(*grid, c, n)``
* ``h``           ``(*grid, c, k, k)``, ``h[a, al, be] = e_a . d_al d_be x``
* ``weingarten``  ``(*grid, c, k, k)``, ``W[a, al, be] = h[a, al, ga] g^{ga be}``
* ``mean_trace``  ``(*grid, c)``, ``t_a = tr W_a``

The stored ``W`` carries the ``e . d^2 x`` sign, so the shape-operator
convention ``d_al e_a = -W[a, al, be] d_be x + (normal part)`` holds.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import fd
from .charts import Grid, ImmersionChart, chart_from_dict, list_shapes, load_chart, make_chart
from .errors import (
    AccuracyError,
    DegenerateImmersionError,
    FocalRadiusError,
    FrameError,
    NonConformalChartError,
    UnsupportedCaseError,
)

__all__ = [
    "Grid",
    "ImmersionChart",
    "make_chart",
    "chart_from_dict",
    "load_chart",
    "list_shapes",
    "ShapeData",
    "TubularMetric",
    "ConformalData",
    "induced_metric",
    "normal_frame",
    "shape_data",
    "tubular_metric",
    "conformal_data",
    "schrodinger_potential_E3",
]

_SEED_THRESHOLD = 0.2


def induced_metric(chart: ImmersionChart, use_jet: bool = True):
    """Pullback metric and its inverse.

    Returns
    -------
    g, ginv : ndarray
        Both of shape ``(*grid, k, k)``.
    """
    J = chart.first_derivatives(use_jet)
    sv = np.linalg.svd(J, compute_uv=False)[..., -1]
    if np.min(sv) <= 1e-8:
        idx = np.unravel_index(np.argmin(sv), sv.shape)
        raise DegenerateImmersionError(f"Jacobian rank-deficient at sample {idx}", index=idx)
    g = np.einsum("...ai,...bi->...ab", J, J)
    return g, np.linalg.inv(g)


def _orthonormal_tangents(J: np.ndarray) -> np.ndarray:
    # Gram-Schmidt in chart-axis order keeps the chart orientation.
    rows = []
    for a in range(J.shape[-2]):
        v = J[..., a, :].copy()
        for r in rows:
            v -= np.sum(v * r, axis=-1, keepdims=True) * r
        rows.append(v / np.linalg.norm(v, axis=-1, keepdims=True))
    return np.stack(rows, axis=-2)


def _hodge_complete(M: np.ndarray) -> np.ndarray:
    """Unit vector ``v`` with ``v_i = det([M; e_i])``; ``det([M; v]) > 0``."""
    n = M.shape[-1]
    out = np.empty(M.shape[:-2] + (n,))
    for i in range(n):
        e = np.zeros(M.shape[:-2] + (1, n))
        e[..., 0, i] = 1.0
        out[..., i] = np.linalg.det(np.concatenate([M, e], axis=-2))
    norm = np.linalg.norm(out, axis=-1, keepdims=True)
    if np.min(norm) < 1e-12:
        raise FrameError("Hodge completion degenerate")
    return out / norm


def _project_out(v, rows):
    for r in rows:
        v = v - np.sum(v * r, axis=-1, keepdims=True) * r
    return v


def _seeded_normals(T: np.ndarray, count: int) -> list[np.ndarray]:
    """The first ``count`` normals from projected ambient axes.

    An axis is accepted when its projection stays above the threshold on
    the whole grid, which keeps the frame continuous. If no axis qualifies,
    each sample takes the first axis that is non-degenerate there.
    """
    n = T.shape[-1]
    rows = [T[..., a, :] for a in range(T.shape[-2])]
    out = []
    for _ in range(count):
        chosen = None
        candidates = []
        for i in range(n):
            e = np.zeros(T.shape[:-2] + (n,))
            e[..., i] = 1.0
            v = _project_out(e, rows)
            norm = np.linalg.norm(v, axis=-1)
            candidates.append((v, norm))
            if np.min(norm) > _SEED_THRESHOLD:
                chosen = v / norm[..., None]
                break
        if chosen is None:
            vs = np.stack([c[0] for c in candidates])
            norms = np.stack([c[1] for c in candidates])
            ok = norms > _SEED_THRESHOLD
            if not np.all(ok.any(axis=0)):
                raise FrameError("Gram-Schmidt breakdown: every ambient seed is degenerate somewhere")
            pick = np.argmax(ok, axis=0)
            v = np.take_along_axis(vs, pick[None, ..., None], axis=0)[0]
            chosen = v / np.linalg.norm(v, axis=-1, keepdims=True)
        out.append(chosen)
        rows.append(chosen)
    return out


def _parallel_transport(chart: ImmersionChart, T: np.ndarray, first: np.ndarray) -> list[np.ndarray]:
    """Double-reflection transport of the normals at sample 0 along a curve."""
    x = chart.samples
    t = T[:, 0, :]
    frame = np.empty((len(x),) + first.shape)
    frame[0] = first
    for i in range(len(x) - 1):
        v1 = x[i + 1] - x[i]
        c1 = v1 @ v1
        rL = frame[i] - (2 / c1) * np.outer(frame[i] @ v1, v1)
        tL = t[i] - (2 / c1) * (v1 @ t[i]) * v1
        v2 = t[i + 1] - tL
        c2 = v2 @ v2
        frame[i + 1] = rL if c2 < 1e-300 else rL - (2 / c2) * np.outer(rL @ v2, v2)
    return [frame[:, j, :] for j in range(first.shape[0])]


def normal_frame(chart: ImmersionChart, parallel_frame: bool = False, use_jet: bool = True) -> np.ndarray:
    """Orthonormal normal frame, shape ``(*grid, n - k, n)``.

    The frame (tangents, normals) is positively oriented. All but the last
    normal come from ambient axes projected off the tangent space; the last
    one is the Hodge completion.

    Parameters
    ----------
    parallel_frame : bool
        Curves only: transport the normals so the normal connection
        vanishes to second order in the grid spacing.
    """
    k, n = chart.k, chart.n
    if k >= n:
        raise FrameError(f"no normal space for k={k}, n={n}")
    T = _orthonormal_tangents(chart.first_derivatives(use_jet))
    seeded = _seeded_normals(T, n - k - 1)
    if parallel_frame and seeded:
        if k != 1:
            raise UnsupportedCaseError("parallel_frame is only available for curves")
        first = np.stack([s[0] for s in seeded])
        seeded = _parallel_transport(chart, T, first)
    rows = [T] + [s[..., None, :] for s in seeded]
    last = _hodge_complete(np.concatenate(rows, axis=-2))
    return np.stack(seeded + [last], axis=-2)


@dataclass(frozen=True)
class ShapeData:
    """Extrinsic data of a sampled immersion (see module docstring for shapes)."""

    chart: ImmersionChart
    metric: np.ndarray
    inverse: np.ndarray
    tangents: np.ndarray
    normals: np.ndarray
    h: np.ndarray
    weingarten: np.ndarray
    normal_connection: np.ndarray
    mean_trace: np.ndarray
    parallel: bool = False

    @property
    def codim(self) -> int:
        return self.normals.shape[-2]

    def principal_curvature_bound(self) -> float:
        eig = np.linalg.eigvals(self.weingarten)
        return float(np.max(np.abs(eig))) if eig.size else 0.0


def shape_data(
    chart: ImmersionChart,
    parallel_frame: bool = False,
    normals: np.ndarray | None = None,
    use_jet: bool = True,
    strict: bool = False,
) -> ShapeData:
    """Metric, normal frame, second fundamental form and Weingarten data.

    Parameters
    ----------
    normals : ndarray, optional
        Use this orthonormal normal frame instead of the seeded one.
    strict : bool
        Escalate the coarse-grid accuracy warning to :class:`AccuracyError`.
    """
    if not (use_jet and chart.has_jet) and max(chart.grid.spacing) > 0.5:
        msg = f"finite-difference jet on a coarse grid (h = {max(chart.grid.spacing):.3g} > 0.5)"
        if strict:
            raise AccuracyError(msg)
        warnings.warn(msg, stacklevel=2)
    g, ginv = induced_metric(chart, use_jet)
    J = chart.first_derivatives(use_jet)
    H2 = chart.second_derivatives(use_jet)
    if normals is None:
        normals = normal_frame(chart, parallel_frame, use_jet)
    h = np.einsum("...ai,...bci->...abc", normals, H2)
    W = np.einsum("...abg,...gd->...abd", h, ginv)
    grid = chart.grid
    dN = fd.gradient(normals, grid.spacing, grid.periodic)  # (*grid, k, c, n)
    conn = np.einsum("...ai,...lbi->...lab", normals, dN)
    return ShapeData(
        chart=chart,
        metric=g,
        inverse=ginv,
        tangents=J,
        normals=normals,
        h=h,
        weingarten=W,
        normal_connection=conn,
        mean_trace=np.trace(W, axis1=-2, axis2=-1),
        parallel=parallel_frame,
    )


@dataclass(frozen=True)
class TubularMetric:
    """Metric of the parallel submanifold at normal offset ``q``.

    ``frame`` stacks the offset tangent vectors ``E_al`` over the normals,
    shape ``(*grid, n, n)``. ``order1`` has shape ``(*grid, c)`` and
    ``order2`` shape ``(*grid, c, c)``, so that
    ``rho ~ 1 + order1 . q + q . order2 . q``.
    """

    q: np.ndarray
    frame: np.ndarray
    metric: np.ndarray
    full_metric: np.ndarray
    rho_exact: np.ndarray
    order1: np.ndarray
    order2: np.ndarray

    def rho_expansion(self, q=None) -> np.ndarray:
        q = self.q if q is None else np.asarray(q, dtype=float)
        return 1.0 + self.order1 @ q + np.einsum("...ab,a,b->...", self.order2, q, q)

    @property
    def block_determinant(self) -> np.ndarray:
        return np.linalg.det(self.full_metric)


def tubular_metric(chart: ImmersionChart, shape: ShapeData, q, focal_factor: float = 0.5) -> TubularMetric:
    """Tubular-neighbourhood metric at the constant normal offset ``q``.

    The offset tangents are ``E_al = P_al^be d_be x`` with
    ``P = I - q^a W_a``, which gives ``g_q = P g P^T`` and
    ``rho = det g_q / det g = det(P)^2``.
    """
    q = np.atleast_1d(np.asarray(q, dtype=float))
    c = shape.codim
    if q.shape != (c,):
        raise ValueError(f"offset must have {c} components, got shape {q.shape}")
    kappa = shape.principal_curvature_bound()
    if np.linalg.norm(q) * kappa >= focal_factor:
        raise FocalRadiusError(
            f"|q| = {np.linalg.norm(q):.3g} exceeds the focal bound {focal_factor}/{kappa:.3g}"
        )
    W = shape.weingarten
    k = W.shape[-1]
    P = np.eye(k) - np.einsum("a,...abc->...bc", q, W)
    E_tan = np.einsum("...ab,...bi->...ai", P, shape.tangents)
    frame = np.concatenate([E_tan, shape.normals], axis=-2)
    g_q = np.einsum("...ab,...bc,...dc->...ad", P, shape.metric, P)
    full = np.einsum("...ai,...bi->...ab", frame, frame)
    rho = np.linalg.det(g_q) / np.linalg.det(shape.metric)
    t = shape.mean_trace
    order1 = -2.0 * t
    order2 = 2.0 * t[..., :, None] * t[..., None, :] - np.einsum("...abc,...dcb->...ad", W, W)
    return TubularMetric(q, frame, g_q, full, rho, order1, order2)


@dataclass(frozen=True)
class ConformalData:
    """Conformal factor of a 2-dimensional chart, with ``z = s1 + i s2``."""

    rho: np.ndarray
    conformality_residual: float
    tolerance: float

    @property
    def valid(self) -> bool:
        return self.conformality_residual <= self.tolerance


def conformal_data(chart: ImmersionChart, tol: float | None = None, strict: bool = True,
                   use_jet: bool = True) -> ConformalData:
    """Read off ``rho`` from ``g = rho * identity`` and measure the defect.

    The default tolerance is ``1e-6`` with an analytic jet and ``10 h^2``
    otherwise.
    """
    if chart.k != 2:
        raise UnsupportedCaseError("conformal data needs a 2-dimensional chart")
    g, _ = induced_metric(chart, use_jet)
    rho = 0.5 * (g[..., 0, 0] + g[..., 1, 1])
    defect = (np.abs(g[..., 0, 0] - g[..., 1, 1]) + 2 * np.abs(g[..., 0, 1])) / rho
    resid = float(np.max(defect))
    if tol is None:
        tol = 1e-6 if (use_jet and chart.has_jet) else 10 * max(chart.grid.spacing) ** 2
    data = ConformalData(rho, resid, tol)
    if strict and not data.valid:
        raise NonConformalChartError(f"conformality residual {resid:.3g} exceeds tolerance {tol:.3g}")
    return data


def schrodinger_potential_E3(chart: ImmersionChart, shape: ShapeData | None = None) -> np.ndarray:
    """``H^2 - K`` for a surface in E^3, with ``H = t/2`` and ``K = det W``.

    Equals ``((k1 - k2) / 2)^2`` and is therefore non-negative.
    """
    if (chart.k, chart.n) != (2, 3):
        raise UnsupportedCaseError(f"needs k=2, n=3, got k={chart.k}, n={chart.n}")
    shape = shape or shape_data(chart)
    W = shape.weingarten[..., 0, :, :]
    H = 0.5 * shape.mean_trace[..., 0]
    return H**2 - np.linalg.det(W)
