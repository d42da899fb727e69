"""Spinor data of conformal surfaces in E^4 and the frame identity.

A conformal chart ``x: R^2 -> E^4`` is written as ``Z1 = x1 + i x2`` and
``Z2 = x3 + i x4``. With ``d = (d1 - i d2)/2`` the four derivatives

    A = d Z1,  B = dbar Z1,  C = d Z2,  D = dbar Z2

factor through spinors ``(f, g, m, n)``:

    f m = A,  -g n = B,  f nbar = C,  g mbar = D.

Extraction fixes the gauge ``|f|^2 + |g|^2 = |m|^2 + |n|^2 = rho^1/2`` and
then solves for the phase of ``f`` so that ``(f, g)`` and ``(m, n)`` are
zero modes of the surface operator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fd
from .charts import ImmersionChart
from .clifford import PAULI, build_clifford, frame_spinors, kron, spin_lift_field
from .dirac import SpinorField, residual_norms, surface_operator_from_potential, surface_potential
from .errors import DegenerateSpinorError, InconsistentSpinorError, NonConformalDataError, UnsupportedCaseError
from .geometry import ConformalData, conformal_data, shape_data

# Exponent e in (|f|^2 + |g|^2)(|m|^2 + |n|^2) = rho^e for the extracted spinors.
NORMALIZATION_EXPONENT = 1.0
CONVENTIONAL_EXPONENT = 0.5


# --- fixed frames of the 4x4 representation ---------------------------------

def fixed_frame_gammas() -> list[np.ndarray]:
    """``gamma(dx^i) = sigma1 x sigma^i`` for ``i = 1, 2, 3`` and ``sigma2 x 1`` for ``i = 4``."""
    return [kron(PAULI.sigma1, PAULI.sigma1), kron(PAULI.sigma1, PAULI.sigma2), kron(PAULI.sigma1, PAULI.sigma3), kron(PAULI.sigma2, PAULI.sigma0)]


FIXED_FRAME_PSI = np.array([[1, 0, 1, 0], [0, 1, 0, 1], [1, 0, 0, 1], [0, 1, 1, 0]])
FIXED_FRAME_DUAL = np.array([[0, 1, 0, 1], [1, 0, 1, 0], [0, -1, 1, 0], [1, 0, 0, -1]])
# Coefficients of dx^1..dx^4 in 2dZ1, 2dZ1bar, 2dZ2, 2dZ2bar.
FIXED_FRAME_TARGETS = np.array([[2, 2j, 0, 0], [2, -2j, 0, 0], [0, 0, 2, 2j], [0, 0, 2, -2j]])


def fixed_frame_bilinears() -> dict:
    """The four spinor/dual pairs and the coefficient table they produce.

    Returns a dict with ``pairs`` (list of ``(psi, dual)``), ``coefficients``
    (4x4 complex integer table, row ``a`` holds ``dual_a gamma(dx^i) psi_a``)
    and ``exact`` (whether the table equals the targets exactly).
    """
    gam = fixed_frame_gammas()
    coeff = np.array([[FIXED_FRAME_DUAL[a] @ gam[i] @ FIXED_FRAME_PSI[a] for i in range(4)] for a in range(4)])
    return {
        "pairs": list(zip(FIXED_FRAME_PSI, FIXED_FRAME_DUAL)),
        "coefficients": coeff,
        "targets": FIXED_FRAME_TARGETS,
        "exact": bool(np.array_equal(coeff, FIXED_FRAME_TARGETS)),
    }


# --- extraction -------------------------------------------------------------

@dataclass(frozen=True)
class WeierstrassSpinors:
    """Extracted spinor fields with their diagnostics."""

    f: np.ndarray
    g: np.ndarray
    m: np.ndarray
    n: np.ndarray
    rho: np.ndarray
    twist: tuple
    gauge: str
    normalization_exponent: float
    normalization_residual: float
    compatibility_residual: float
    phase_closedness: float
    degenerate: np.ndarray

    def field(self, which: str, grid) -> SpinorField:
        z = np.zeros_like(self.f)
        cols = {
            "phi1": (self.f, self.g, z, z),
            "phi2": (z, z, self.m, self.n),
            "phi3": (-np.conj(self.g), np.conj(self.f), z, z),
            "phi4": (z, z, -np.conj(self.n), np.conj(self.m)),
        }[which]
        return SpinorField(np.stack(cols, axis=-1), grid, self.twist)

    def products(self) -> tuple:
        """``(f m, -g n, f nbar, g mbar)``, which should equal ``(A, B, C, D)``."""
        return (self.f * self.m, -self.g * self.n, self.f * np.conj(self.n), self.g * np.conj(self.m))

    def gauge_transformed(self, lam) -> "WeierstrassSpinors":
        """Apply ``(f, g, m, n) -> (lam f, lambar g, m / lam, n / lambar)``.

        The four products are unchanged for any nonzero ``lam``; the zero-mode
        equations stay intact for holomorphic ``lam`` of unit modulus, with
        the potential rotating to ``lam^-2 p`` in the constant case.
        """
        lam = np.asarray(lam, dtype=complex)
        lb = np.conj(lam)
        return WeierstrassSpinors(
            lam * self.f, lb * self.g, self.m / lam, self.n / lb, self.rho, self.twist,
            self.gauge + "+lambda", self.normalization_exponent, self.normalization_residual,
            self.compatibility_residual, self.phase_closedness, self.degenerate,
        )


def complex_derivatives(chart: ImmersionChart, use_jet: bool = True):
    """``(A, B, C, D)`` and, when second derivatives are requested, their ``d``/``dbar``."""
    if chart.k != 2:
        raise UnsupportedCaseError("Weierstrass data needs a surface chart")
    if chart.n == 3:
        chart = chart.embedded(4)
    if chart.n != 4:
        raise UnsupportedCaseError(f"Weierstrass data needs E^3 or E^4, got n={chart.n}")
    J = chart.first_derivatives(use_jet)
    Z1 = J[..., 0] + 1j * J[..., 1]
    Z2 = J[..., 2] + 1j * J[..., 3]
    A = 0.5 * (Z1[..., 0] - 1j * Z1[..., 1])
    B = 0.5 * (Z1[..., 0] + 1j * Z1[..., 1])
    C = 0.5 * (Z2[..., 0] - 1j * Z2[..., 1])
    D = 0.5 * (Z2[..., 0] + 1j * Z2[..., 1])
    return A, B, C, D


def complex_second_derivatives(chart: ImmersionChart, use_jet: bool = True) -> dict:
    """``d`` and ``dbar`` of ``A, B, C, D`` from the second-derivative jet."""
    chart = chart.embedded(4) if chart.n == 3 else chart
    H = chart.second_derivatives(use_jet)
    out = {}
    for name, (i, j) in (("1", (0, 1)), ("2", (2, 3))):
        Z = H[..., i] + 1j * H[..., j]
        uu, uv, vv = Z[..., 0, 0], Z[..., 0, 1], Z[..., 1, 1]
        dd = 0.25 * (uu - 2j * uv - vv)
        mixed = 0.25 * (uu + vv)
        bb = 0.25 * (uu + 2j * uv - vv)
        holo, anti = ("A", "B") if name == "1" else ("C", "D")
        out[holo] = (dd, mixed)
        out[anti] = (mixed, bb)
    return out


def _d_abs2(X, dX, dbX):
    """``d |X|^2`` from ``d X`` and ``dbar X``."""
    return dX * np.conj(X) + X * np.conj(dbX)


def _dz(F, grid):
    """``d F = (F_1 - i F_2)/2`` by central differences."""
    Fu = fd.d1(F, 0, grid.spacing[0], grid.periodic[0])
    Fv = fd.d1(F, 1, grid.spacing[1], grid.periodic[1])
    return 0.5 * (Fu - 1j * Fv)


def _fill_degenerate(F, mask):
    # average of valid 4-neighbours, repeated until the holes are filled
    F = F.copy()
    mask = mask.copy()
    for _ in range(max(F.shape)):
        if not mask.any():
            break
        acc = np.zeros_like(F)
        cnt = np.zeros(F.shape)
        for ax in range(2):
            for sh in (1, -1):
                valid = ~np.roll(mask, sh, axis=ax)
                acc += np.where(valid, np.roll(F, sh, axis=ax), 0)
                cnt += valid
        fill = mask & (cnt > 0)
        F[fill] = acc[fill] / cnt[fill]
        mask = mask & ~fill
    return F


def _quantize_periods(theta_u, theta_v, grid):
    """Remove the drift that keeps ``exp(i theta / 2)`` from closing up.

    On a periodic axis the phase gained over one period must be a multiple
    of ``pi`` (periodic or antiperiodic spinors). The discrete integrand
    misses that by ``O(h^2)``; spreading the defect evenly over each line
    restores exact (anti)periodicity without changing the order of
    accuracy. Returns the corrected integrands and the per-axis twist.
    """
    parts = [theta_u.copy(), theta_v.copy()]
    twist = []
    for ax in range(2):
        if not grid.periodic[ax]:
            twist.append(1)
            continue
        h = grid.spacing[ax]
        period = h * grid.shape[ax]
        total = h * np.sum(parts[ax], axis=ax, keepdims=True)
        target = np.pi * np.round(total / np.pi)
        parts[ax] = parts[ax] - (total - target) / period
        turns = np.unique(np.round(target / np.pi).astype(int) % 2)
        if turns.size != 1:
            raise InconsistentSpinorError(f"spinor twist differs between lines along axis {ax}")
        twist.append(-1 if turns[0] else 1)
    return parts[0], parts[1], tuple(twist)


def _integrate_phase(theta_u, theta_v, grid):
    """Trapezoid integral of ``d theta`` from sample (0, 0) along both path orders."""
    hu, hv = grid.spacing
    # axis 0 first along the bottom row, then up each column
    a = fd.cumulative_trapezoid(theta_u[:, :1], 0, hu) + fd.cumulative_trapezoid(theta_v, 1, hv)
    b = fd.cumulative_trapezoid(theta_v[:1, :], 1, hv) + fd.cumulative_trapezoid(theta_u, 0, hu)
    return a, float(np.max(np.abs(a - b)))


def spinors_from_immersion_E4(
    chart: ImmersionChart,
    conformal: ConformalData | None = None,
    base_phase: float = 0.0,
    tol: float | None = None,
    eps: float = 1e-10,
    use_jet: bool = True,
) -> WeierstrassSpinors:
    """Extract ``(f, g, m, n)`` from a conformal chart in E^4 (or E^3).

    ``|f|`` is fixed by the gauge, ``g = beta fbar`` with ``beta`` from the
    better-conditioned branch, and the phase ``theta`` of ``f`` solves

        d theta = -i (r dr + betabar r d(beta r)) / rho^1/2

    so that ``d g = -p f`` holds. ``base_phase`` is ``theta`` at sample (0, 0).
    """
    grid = chart.grid
    conformal = conformal if conformal is not None else conformal_data(chart, use_jet=use_jet)
    A, B, C, D = complex_derivatives(chart, use_jet)
    rho = np.abs(A) ** 2 + np.abs(B) ** 2 + np.abs(C) ** 2 + np.abs(D) ** 2
    compat = float(np.max(np.abs(np.conj(A) * B + np.conj(C) * D) / rho))
    if tol is None:
        tol = 1e-6 if (use_jet and chart.has_jet) else 10 * max(grid.spacing) ** 2
    if compat > tol:
        raise NonConformalDataError(f"compatibility residual {compat:.3g} exceeds {tol:.3g}")
    sq = np.sqrt(rho)
    ac = np.abs(A) ** 2 + np.abs(C) ** 2
    degenerate = ac <= eps * rho
    if degenerate.all():
        raise DegenerateSpinorError("every sample is a branch point")
    r = np.sqrt(ac / sq)
    with np.errstate(divide="ignore", invalid="ignore"):
        beta = np.where(np.abs(C) >= np.abs(A), -B / np.conj(C), D / np.conj(A))
    beta = _fill_degenerate(np.where(degenerate, 0, beta), degenerate)
    # derivatives of r and beta from the second-order jet keep the phase
    # accurate up to the boundary, where one-sided differences would not
    J2 = complex_second_derivatives(chart, use_jet)
    dP = _d_abs2(A, *J2["A"]) + _d_abs2(C, *J2["C"])
    drho = dP + _d_abs2(B, *J2["B"]) + _d_abs2(D, *J2["D"])
    with np.errstate(divide="ignore", invalid="ignore"):
        dr = (dP / sq - 0.5 * ac * drho / rho / sq) / (2 * r)
        dbeta = np.where(
            np.abs(C) >= np.abs(A),
            -J2["B"][0] / np.conj(C) + B * np.conj(J2["C"][1]) / np.conj(C) ** 2,
            J2["D"][0] / np.conj(A) - D * np.conj(J2["A"][1]) / np.conj(A) ** 2,
        )
    dr = _fill_degenerate(np.where(degenerate, 0, dr), degenerate)
    dbeta = _fill_degenerate(np.where(degenerate, 0, dbeta), degenerate)
    dtheta = -1j * ((1 + np.abs(beta) ** 2) * r * dr + np.conj(beta) * r**2 * dbeta) / sq
    theta_u, theta_v = 2 * dtheta.real, -2 * dtheta.imag
    theta_u, theta_v, twist = _quantize_periods(theta_u, theta_v, grid)
    theta, closed = _integrate_phase(theta_u, theta_v, grid)
    f = r * np.exp(1j * (theta + base_phase))
    with np.errstate(divide="ignore", invalid="ignore"):
        m = A / f
        n = np.conj(C) / np.conj(f)
    m = _fill_degenerate(np.where(degenerate, 0, m), degenerate)
    n = _fill_degenerate(np.where(degenerate, 0, n), degenerate)
    g = beta * np.conj(f)
    norm = (np.abs(f) ** 2 + np.abs(g) ** 2) * (np.abs(m) ** 2 + np.abs(n) ** 2)
    return WeierstrassSpinors(
        f, g, m, n, rho, twist, "equal-chiral-norm",
        NORMALIZATION_EXPONENT, float(np.max(np.abs(norm - rho**NORMALIZATION_EXPONENT))),
        compat, closed, degenerate,
    )


def fit_normalization_exponent(spinors: WeierstrassSpinors) -> float:
    """Least-squares ``e`` in ``log N = e log rho`` (falls back to the ratio at one sample)."""
    N = (np.abs(spinors.f) ** 2 + np.abs(spinors.g) ** 2) * (np.abs(spinors.m) ** 2 + np.abs(spinors.n) ** 2)
    lr = np.log(spinors.rho).ravel()
    ln = np.log(N).ravel()
    if np.ptp(lr) < 1e-12:
        return float(ln[0] / lr[0]) if abs(lr[0]) > 1e-12 else float("nan")
    return float(np.dot(lr, ln) / np.dot(lr, lr))


def spinor_normal_frame(sp: WeierstrassSpinors) -> np.ndarray:
    """Normal pair induced by the spinors, shape ``(*grid, 2, 4)``.

    ``N1 = (g m, g nbar)`` and ``N2 = (f n, -f mbar)`` in ``C^2 = R^4``;
    ``e3 = -(N1 + N2)/rho^1/2`` and ``e4 = -i (N2 - N1)/rho^1/2``.
    """
    N1 = np.stack([sp.g * sp.m, sp.g * np.conj(sp.n)], axis=-1)
    N2 = np.stack([sp.f * sp.n, -sp.f * np.conj(sp.m)], axis=-1)
    sq = np.sqrt(sp.rho)[..., None]
    e3 = -(N1 + N2) / sq
    e4 = -1j * (N2 - N1) / sq

    def real4(c):
        return np.stack([c[..., 0].real, c[..., 0].imag, c[..., 1].real, c[..., 1].imag], axis=-1)

    return np.stack([real4(e3), real4(e4)], axis=-2)


def verify_zero_mode(chart: ImmersionChart, spinors: WeierstrassSpinors | None = None, use_jet: bool = True) -> dict:
    """Apply the surface operator to the extracted spinors and their partners.

    The potential comes from the curvature pipeline with the spinor-induced
    normal frame. Residual norms skip one sample at open boundaries.
    """
    conf = conformal_data(chart, use_jet=use_jet)
    sp = spinors if spinors is not None else spinors_from_immersion_E4(chart, conf, use_jet=use_jet)
    chart4 = chart.embedded(4) if chart.n == 3 else chart
    shape = shape_data(chart4, normals=spinor_normal_frame(sp), use_jet=use_jet)
    p = surface_potential(conf, shape)
    op = surface_operator_from_potential(chart.grid, p)
    out = {"p": p, "operator": op}
    for name in ("phi1", "phi2", "phi3", "phi4"):
        mx, l2 = residual_norms(op, sp.field(name, chart.grid))
        out[name] = {"max": mx, "l2": l2}
    out["max_residual"] = max(out[k]["max"] for k in ("phi1", "phi2", "phi3", "phi4"))
    out["l2_residual"] = max(out[k]["l2"] for k in ("phi1", "phi2", "phi3", "phi4"))
    return out


# --- reconstruction ---------------------------------------------------------

@dataclass(frozen=True)
class ReconstructionResult:
    Z1: np.ndarray
    Z2: np.ndarray
    closedness_residual: float
    alignment_error: float
    closedness_bound: float


def _second_difference_max(F, grid) -> float:
    out = 0.0
    for ax in range(2):
        G = np.moveaxis(F, ax, 0)
        if G.shape[0] >= 3:
            out = max(out, float(np.max(np.abs(G[2:] - 2 * G[1:-1] + G[:-2]))) / grid.spacing[ax] ** 2)
    return out


def _from_index(F, axis, h, start):
    """Trapezoid integral of ``F`` along ``axis`` measured from sample ``start``."""
    out = fd.cumulative_trapezoid(F, axis, h)
    return out - np.take(out, [start], axis=axis)


def reconstruct_immersion(
    spinors: WeierstrassSpinors,
    chart: ImmersionChart,
    base_point=(0, 0),
    strict: bool = True,
) -> ReconstructionResult:
    """Integrate ``dZ1 = f m dz - g n dzbar`` and ``dZ2 = f nbar dz + g mbar dzbar``.

    Integration runs by trapezoid along axis 0 then axis 1 from
    ``base_point``; the other path order gives the closedness residual.
    The alignment error is measured after matching the translation at the
    base point.
    """
    grid = chart.grid
    sp = spinors
    fm, gn = sp.f * sp.m, sp.g * sp.n
    fnb, gmb = sp.f * np.conj(sp.n), sp.g * np.conj(sp.m)
    forms = [(fm - gn, 1j * (fm + gn)), (fnb + gmb, 1j * (fnb - gmb))]
    hu, hv = grid.spacing
    i0, j0 = base_point
    Zs, closed, bound = [], 0.0, 0.0
    span = grid.shape[0] * hu + grid.shape[1] * hv
    for Zu, Zv in forms:
        a = _from_index(Zu[:, j0], 0, hu, i0)[:, None] + _from_index(Zv, 1, hv, j0)
        b = _from_index(Zv[i0, :], 0, hv, j0)[None, :] + _from_index(Zu, 0, hu, i0)
        Zs.append(a)
        closed = max(closed, float(np.max(np.abs(a - b))))
        curv = max(_second_difference_max(Zu, grid), _second_difference_max(Zv, grid))
        bound = max(bound, 2 * span * max(hu, hv) ** 2 * curv / 12)
    x = chart.samples if chart.n == 4 else np.pad(chart.samples, [(0, 0)] * 2 + [(0, 1)])
    Z1 = Zs[0] + (x[i0, j0, 0] + 1j * x[i0, j0, 1])
    Z2 = Zs[1] + (x[i0, j0, 2] + 1j * x[i0, j0, 3])
    align = float(max(np.max(np.abs(Z1 - (x[..., 0] + 1j * x[..., 1]))),
                      np.max(np.abs(Z2 - (x[..., 2] + 1j * x[..., 3])))))
    if strict and closed > 10 * bound + 1e-12:
        raise InconsistentSpinorError(
            f"closedness residual {closed:.3g} exceeds ten times the trapezoid bound {bound:.3g}"
        )
    return ReconstructionResult(Z1, Z2, closed, align, bound)


# --- frame identity -----------------------------------------------------------

@dataclass(frozen=True)
class FrameVerification:
    residual: np.ndarray  # (*grid, k, n): reconstructed minus true d_al x^i
    max_residual: float
    gauge: np.ndarray  # e^Omega field, (*grid, d, d)


def _frame_rotations(chart: ImmersionChart, use_jet: bool = True, normals=None) -> tuple[np.ndarray, np.ndarray]:
    from .geometry import _orthonormal_tangents, normal_frame

    J = chart.first_derivatives(use_jet)
    T = _orthonormal_tangents(J)
    if chart.k < chart.n:
        N = normals if normals is not None else normal_frame(chart, parallel_frame=False, use_jet=use_jet)
        frame = np.concatenate([T, N], axis=-2)
    else:
        frame = T
    # columns are the frame vectors, so Lambda e_mu = frame_mu
    return np.swapaxes(frame, -1, -2), J


def verify_weierstrass_frame(
    chart: ImmersionChart,
    use_jet: bool = True,
    omega0: np.ndarray | None = None,
    normals: np.ndarray | None = None,
) -> FrameVerification:
    """Rebuild ``d_al x^i`` from frame spinors gauged by the spin lift of the frame.

    With ``Lambda`` the rotation whose columns are (orthonormal tangents,
    normals) and ``S = e^Omega`` its lift, evaluate

        sum_mu G_{al mu}  Psibar^(i) S gamma_mu S^-1 Psi^(i)

    where ``G_{al mu} = d_al x . Lambda e_mu`` are the coframe
    coefficients. In the unrotated gauge only tangential ``mu`` contribute
    and ``G`` equals ``g (E^-1)^T`` with ``E`` the tangent coframe matrix.

    The frame is built from the jet selected by ``use_jet``; the reference
    derivatives always come from the analytic jet when the chart has one,
    so a finite-difference frame shows its ``O(h^2)`` error. A constant
    ``omega0`` composes the frame with ``exp(omega0)``, and the bilinears
    absorb the change.
    """
    from scipy.linalg import expm

    rep = build_clifford(chart.n)
    Lam, J = _frame_rotations(chart, use_jet, normals)
    if omega0 is not None:
        Lam = Lam @ expm(np.asarray(omega0, dtype=float))
    S = spin_lift_field(rep, Lam)
    Sinv = np.linalg.inv(S)
    k, n = chart.k, chart.n
    # Rotated frame gamma matrices: S gamma_mu S^-1 = sum_j Lambda_j mu gamma_j.
    gam = np.stack([S @ rep[mu] @ Sinv for mu in range(n)], axis=-3)  # (*grid, n, d, d)
    spinors = frame_spinors(rep)
    bil = np.empty(chart.grid.shape + (n, n), dtype=complex)  # [i, mu]
    for i, (psi, psibar) in enumerate(spinors):
        bil[..., i, :] = np.einsum("j,...mjk,k->...m", psibar, gam, psi)
    # tangent frame vectors after the optional constant rotation
    frame = np.swapaxes(Lam, -1, -2)  # (*grid, n, n) rows = frame vectors
    G = np.einsum("...ai,...mi->...am", J, frame)  # d_al x in the rotated frame (k x n)
    recon = np.einsum("...am,...im->...ai", G, bil)
    resid = recon.real - chart.first_derivatives(True)
    err = float(max(np.max(np.abs(resid)), np.max(np.abs(recon.imag))))
    return FrameVerification(resid, err, S)
