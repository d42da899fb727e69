"""Submanifold Dirac operators on sampled charts.

Every operator is stored in first-order form

    D psi = sum_al A_al(s) d_al psi + B(s) psi,

with ``A`` of shape ``(k, *grid, d, d)`` and ``B`` of shape ``(*grid, d, d)``.
Only tangential stencils appear, so the operator never sees a normal
derivative. The intrinsic conformal operator is the one exception: it is
applied literally as ``rho^-1 sigma^al d_al (rho^1/2 psi)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from . import fd
from .charts import Grid, ImmersionChart
from .clifford import PAULI, CliffordRep, build_clifford
from .errors import (
    DimensionMismatchError,
    FrameRequirementError,
    InvalidMetricError,
    UnsupportedCaseError,
)
from .geometry import ConformalData, ShapeData, shape_data, tubular_metric

# Weight of the mean-curvature potential in the curvature form of the operator.
POTENTIAL_FACTOR = 0.5
# The same potential expressed through d = (d1 - i d2)/2 in the 4x4 surface form.
SURFACE_POTENTIAL_FACTOR = 0.25


@dataclass(frozen=True)
class SpinorField:
    """Spinor values on a grid, shape ``(*grid, d)``.

    ``twist`` holds ``+1`` or ``-1`` per axis: on a periodic axis the field
    satisfies ``psi(s + period) = twist * psi(s)``.
    """

    values: np.ndarray
    grid: Grid
    twist: tuple = None

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex))
        if self.twist is None:
            object.__setattr__(self, "twist", (1,) * self.grid.ndim)

    def __add__(self, other: "SpinorField") -> "SpinorField":
        return SpinorField(self.values + other.values, self.grid, self.twist)

    def __rmul__(self, c) -> "SpinorField":
        return SpinorField(c * self.values, self.grid, self.twist)


@dataclass(frozen=True)
class DiracOperatorSpec:
    kind: str
    rep: CliffordRep | None
    grid: Grid
    A: np.ndarray
    B: np.ndarray
    coefficients: dict = field(default_factory=dict)
    potential_factor: float = POTENTIAL_FACTOR

    @property
    def spinor_dim(self) -> int:
        return self.B.shape[-1]

    def symbol(self, wavevector) -> np.ndarray:
        """Principal symbol ``i sum_al k_al A_al`` per sample."""
        return 1j * np.einsum("a,a...ij->...ij", np.asarray(wavevector, dtype=float), self.A)


def _field_grid(op: DiracOperatorSpec, psi: SpinorField):
    expected = op.grid.shape + (op.spinor_dim,)
    if psi.values.shape != expected:
        raise DimensionMismatchError(f"field shape {psi.values.shape} does not match operator {expected}")


def apply_dirac(op: DiracOperatorSpec, psi: SpinorField) -> SpinorField:
    """Central-difference application of ``op`` to ``psi``."""
    _field_grid(op, psi)
    grid = op.grid
    if op.kind == "intrinsic_conformal":
        rho = op.coefficients["rho"]
        phi = np.sqrt(rho)[..., None] * psi.values
        out = np.zeros_like(phi)
        for a, sig in enumerate((PAULI.sigma1, PAULI.sigma2)):
            dphi = fd.d1(phi, a, grid.spacing[a], grid.periodic[a], psi.twist[a])
            out += np.einsum("ij,...j->...i", sig, dphi)
        return SpinorField(out / rho[..., None], grid, psi.twist)
    out = np.einsum("...ij,...j->...i", op.B, psi.values)
    for a in range(grid.ndim):
        dpsi = fd.d1(psi.values, a, grid.spacing[a], grid.periodic[a], psi.twist[a])
        out = out + np.einsum("...ij,...j->...i", op.A[a], dpsi)
    return SpinorField(out, grid, psi.twist)


def residual_norms(op: DiracOperatorSpec, psi: SpinorField, trim: int = 1) -> tuple[float, float]:
    """Max and root-mean-square of ``|D psi|`` away from open boundaries."""
    r = apply_dirac(op, psi).values[op.grid.interior(trim)]
    mag = np.linalg.norm(r, axis=-1)
    return float(np.max(mag)), float(np.sqrt(np.mean(mag**2)))


def build_curve_dirac(chart: ImmersionChart, shape: ShapeData | None = None) -> DiracOperatorSpec:
    """``D = gamma(ds) g^-1/2 d_s + 1/2 sum_a gamma(dq^a) t_a`` for a curve.

    ``gamma(ds)`` is the first generator and ``gamma(dq^a)`` the following
    ones, matching the positively oriented frame (tangent, normals).
    """
    if chart.k != 1 or chart.n not in (2, 3):
        raise UnsupportedCaseError(f"curve operator needs k=1, n in (2, 3); got k={chart.k}, n={chart.n}")
    if shape is None:
        shape = shape_data(chart, parallel_frame=chart.n == 3)
    if chart.n == 3 and not shape.parallel:
        raise FrameRequirementError("curves in E^3 need the parallel normal frame")
    rep = build_clifford(chart.n)
    inv_len = 1.0 / np.sqrt(shape.metric[..., 0, 0])
    A = (inv_len[..., None, None] * rep[0])[None]
    t = shape.mean_trace
    B = POTENTIAL_FACTOR * sum(t[..., a, None, None] * rep[a + 1] for a in range(chart.n - 1))
    return DiracOperatorSpec("curve", rep, chart.grid, A, np.asarray(B, dtype=complex),
                             {"kappa": t, "inv_len": inv_len}, POTENTIAL_FACTOR)


def surface_potential(conformal: ConformalData, shape: ShapeData) -> np.ndarray:
    """``p = -1/4 rho^1/2 (t_3 + i t_4)`` from the curvature pipeline."""
    t = shape.mean_trace
    if t.shape[-1] != 2:
        raise UnsupportedCaseError("surface potential needs two normals")
    return -SURFACE_POTENTIAL_FACTOR * np.sqrt(conformal.rho) * (t[..., 0] + 1j * t[..., 1])


def surface_operator_from_potential(grid: Grid, p: np.ndarray) -> DiracOperatorSpec:
    """The 4x4 operator acting on ``(f, g, m, n)``.

    Its rows read ``2(pbar m + d n)``, ``2(dbar m - p n)``,
    ``2(p f + d g)`` and ``2(dbar f - pbar g)`` with
    ``d = (d1 - i d2)/2``.
    """
    shp = grid.shape
    A = np.zeros((2,) + shp + (4, 4), dtype=complex)
    # 2 d = d1 - i d2 at (0,3), (2,1); 2 dbar = d1 + i d2 at (1,2), (3,0).
    for (i, j), sgn in (((0, 3), -1), ((2, 1), -1), ((1, 2), 1), ((3, 0), 1)):
        A[0, ..., i, j] = 1.0
        A[1, ..., i, j] = sgn * 1j
    B = np.zeros(shp + (4, 4), dtype=complex)
    B[..., 0, 2] = 2 * np.conj(p)
    B[..., 1, 3] = -2 * p
    B[..., 2, 0] = 2 * p
    B[..., 3, 1] = -2 * np.conj(p)
    return DiracOperatorSpec("surface_E4", None, grid, A, B, {"p": p}, POTENTIAL_FACTOR)


def build_surface_dirac_E4(chart: ImmersionChart, shape: ShapeData, conformal: ConformalData) -> DiracOperatorSpec:
    """Surface operator of a conformal chart in E^4 (or E^3 padded to E^4).

    The normals of ``shape`` fix the potential: use the spinor-induced frame
    when testing extracted zero modes.
    """
    if chart.k != 2 or chart.n not in (3, 4):
        raise UnsupportedCaseError(f"surface operator needs k=2, n in (3, 4); got k={chart.k}, n={chart.n}")
    if shape.codim == 1:
        shape = e4_shape_data(chart, shape)
    return surface_operator_from_potential(chart.grid, surface_potential(conformal, shape))


def e4_shape_data(chart: ImmersionChart, shape: ShapeData | None = None) -> ShapeData:
    """Shape data of an E^3 chart seen in E^4, normals ``(nu, 0)`` and ``(0, 0, 0, 1)``.

    The pair is positively oriented together with the tangents, and the
    potential built from it is real.
    """
    if chart.n == 4:
        return shape if shape is not None else shape_data(chart)
    shape = shape if shape is not None else shape_data(chart)
    nu = np.concatenate([shape.normals[..., 0, :], np.zeros(shape.normals.shape[:-2] + (1,))], axis=-1)
    e4 = np.zeros_like(nu)
    e4[..., 3] = 1.0
    chart4 = chart.embedded(4)
    # det[t1, t2, nu, e4] = det[t1, t2, nu] > 0, so (nu, e4) keeps the orientation.
    return shape_data(chart4, normals=np.stack([nu, e4], axis=-2))


def build_intrinsic_conformal_dirac(conformal: ConformalData, grid: Grid) -> DiracOperatorSpec:
    """``rho^-1 sigma^al d_al rho^1/2`` on 2-component spinors."""
    rho = np.asarray(conformal.rho, dtype=float)
    if np.any(rho <= 0):
        raise InvalidMetricError("conformal factor must be positive")
    sq = np.sqrt(rho)
    A = np.stack([(1 / sq)[..., None, None] * PAULI.sigma1, (1 / sq)[..., None, None] * PAULI.sigma2])
    B = np.zeros(grid.shape + (2, 2), dtype=complex)
    return DiracOperatorSpec("intrinsic_conformal", None, grid, A, B, {"rho": rho}, POTENTIAL_FACTOR)


def curve_zero_mode(op: DiracOperatorSpec, psi0, rtol: float = 1e-11) -> SpinorField:
    """Integrate ``psi' = 1/2 sum_a t_a gamma_a gamma_0 psi`` along the curve.

    The curvature samples are interpolated by a cubic spline, so the result
    is a zero mode up to the spline error, far below the stencil error. On
    a closed curve the field gets twist ``+1`` or ``-1`` when it returns to
    ``+-psi0`` after one period, and ``0`` (no consistent wrap) otherwise.
    """
    if op.kind != "curve":
        raise UnsupportedCaseError("curve_zero_mode needs a curve operator")
    s = op.grid.axes[0]
    rep = op.rep
    g0 = rep[0]
    gens = [rep[a + 1] @ g0 for a in range(rep.n - 1)]
    # speed |x'| = g^1/2 converts the arclength derivative back to d_s
    speed = CubicSpline(s, 1.0 / op.coefficients["inv_len"])
    kap = CubicSpline(s, op.coefficients["kappa"], axis=0)
    d = rep.spinor_dim

    def rhs(si, y):
        psi = y[:d] + 1j * y[d:]
        k = kap(si)
        M = POTENTIAL_FACTOR * sum(k[a] * gens[a] for a in range(len(gens))) * speed(si)
        out = M @ psi
        return np.concatenate([out.real, out.imag])

    psi0 = np.asarray(psi0, dtype=complex)
    grid = op.grid
    periodic = grid.periodic[0]
    t_eval = np.append(s, s[-1] + grid.spacing[0]) if periodic else s
    sol = solve_ivp(rhs, (t_eval[0], t_eval[-1]), np.concatenate([psi0.real, psi0.imag]), t_eval=t_eval,
                    rtol=rtol, atol=rtol * 1e-2, method="DOP853")
    y = sol.y.T
    values = y[:, :d] + 1j * y[:, d:]
    twist = (1,)
    if periodic:
        # after one period the spinor returns to +-psi0 only if the holonomy is trivial
        end = values[-1]
        values = values[:-1]
        gap = min(np.linalg.norm(end - psi0), np.linalg.norm(end + psi0))
        if gap <= 1e-6 * max(1.0, np.linalg.norm(psi0)):
            twist = (1,) if np.linalg.norm(end - psi0) <= np.linalg.norm(end + psi0) else (-1,)
        else:
            twist = (0,)
    return SpinorField(values, grid, twist)


def sa_transform_check(chart: ImmersionChart, shape: ShapeData, dq: float = 1e-4) -> dict:
    """Measure the zeroth-order term of ``rho^1/4 d_q rho^-1/4`` at ``q = 0``.

    ``rho`` is differenced at offsets ``+-dq`` along each normal. The term
    equals ``-1/4 d_q log rho = +1/2 t_a`` in the stored ``e . d^2 x``
    convention, which is ``-1/2`` the trace of the opposite-sign Weingarten
    map ``-W``.
    """
    c = shape.codim
    measured = np.empty(chart.grid.shape + (c,))
    for a in range(c):
        e = np.zeros(c)
        e[a] = dq
        lp = np.log(tubular_metric(chart, shape, e).rho_exact)
        lm = np.log(tubular_metric(chart, shape, -e).rho_exact)
        measured[..., a] = -0.25 * (lp - lm) / (2 * dq)
    expected = -0.5 * np.trace(-shape.weingarten, axis1=-2, axis2=-1)
    err = np.abs(measured - expected)
    return {
        "measured": measured,
        "expected": expected,
        "max_abs_error": float(np.max(err)),
        "l2_error": float(np.sqrt(np.mean(err**2))),
    }
