"""Independent closed-form oracles used by the tests.

Nothing here calls into the package: every value is written out by hand
from the analytic shapes so the pipeline is checked against an
independent source.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import solve_ivp

S1 = np.array([[0, 1], [1, 0]], dtype=complex)
S2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
S3 = np.array([[1, 0], [0, -1]], dtype=complex)


# --- stereographic sphere --------------------------------------------------

def sphere_rho(u, v, R=1.0):
    return 4 * R**2 / (1 + u**2 + v**2) ** 2


def sphere_potential_abs(u, v):
    """|p| = rho^1/2 * |t| / 4 with t = 2/R, independent of R."""
    return 1.0 / (1 + u**2 + v**2)


def sphere_spinors(u, v, R=1.0):
    """(f, g) with f^2 = dZ1, -g^2 = dbar Z1 and f gbar = d x3; m = f, n = g."""
    s = u + 1j * v
    d = 1 + u**2 + v**2
    f = np.sqrt(2 * R) / d + 0j
    g = np.sqrt(2 * R) * s / d
    return f, g, f, g


def offset_sphere_rho(q, R=1.0):
    """Area ratio of the parallel sphere shifted by q towards the centre."""
    return (1 - q / R) ** 4


def offset_circle_rho(q, R):
    return (1 - q / R) ** 2


# --- product torus --------------------------------------------------------------

def torus_spinors(u, v):
    """Zero modes of the unit product torus (e^{iu}, e^{iv}); p = (-1 + i)/4."""
    e_plus = np.exp(0.5j * (u + v)) / np.sqrt(2)
    e_minus = np.exp(0.5j * (u - v)) / np.sqrt(2)
    return e_plus, -1j * e_plus, 1j * e_minus, e_minus


TORUS_POTENTIAL = (-1 + 1j) / 4


def torus_derivatives(u, v):
    """(A, B, C, D) = (d Z1, dbar Z1, d Z2, dbar Z2) for Z = (e^{iu}, e^{iv})."""
    A = 0.5j * np.exp(1j * u)
    B = 0.5j * np.exp(1j * u)
    C = 0.5 * np.exp(1j * v)
    D = -0.5 * np.exp(1j * v)
    return A, B, C, D


# --- circle --------------------------------------------------------------------

def circle_zero_mode(s, R, psi0):
    """exp(-i theta sigma3 / 2) psi0 with theta = s / R."""
    theta = s / R
    return np.stack([np.exp(-0.5j * theta) * psi0[0], np.exp(0.5j * theta) * psi0[1]], axis=-1)


# --- helix --------------------------------------------------------------------

def helix_frenet(s, R, c):
    L = np.hypot(R, c)
    ph = s / L
    T = np.stack([-R / L * np.sin(ph), R / L * np.cos(ph), c / L + 0 * ph], axis=-1)
    N = np.stack([-np.cos(ph), -np.sin(ph), 0 * ph], axis=-1)
    B = np.stack([c / L * np.sin(ph), -c / L * np.cos(ph), R / L + 0 * ph], axis=-1)
    return T, N, B, R / L**2, c / L**2


def helix_bishop(s, R, c, psi0):
    """Rotation-minimizing normals e1 = cos N + sin B, e2 = T x e1, angle psi0 - tau s."""
    T, N, B, kappa, tau = helix_frenet(s, R, c)
    ang = psi0 - tau * s
    e1 = np.cos(ang)[:, None] * N + np.sin(ang)[:, None] * B
    e2 = -np.sin(ang)[:, None] * N + np.cos(ang)[:, None] * B
    return e1, e2, kappa * np.cos(ang), -kappa * np.sin(ang)


def helix_zero_mode(s, R, c, psi0_angle, spinor0, gammas):
    """Solve psi' = 1/2 (k1 g1 g0 + k2 g2 g0) psi with the analytic Bishop curvatures."""
    _, _, kappa, tau = helix_frenet(np.zeros(1), R, c)[1:]
    g0, g1, g2 = gammas
    d = g0.shape[0]

    def rhs(si, y):
        ang = psi0_angle - tau * si
        M = 0.5 * kappa * (np.cos(ang) * g1 @ g0 - np.sin(ang) * g2 @ g0)
        z = M @ (y[:d] + 1j * y[d:])
        return np.concatenate([z.real, z.imag])

    y0 = np.concatenate([np.real(spinor0), np.imag(spinor0)])
    sol = solve_ivp(rhs, (s[0], s[-1]), y0, t_eval=s, rtol=1e-12, atol=1e-14, method="DOP853")
    return sol.y[:d].T + 1j * sol.y[d:].T


# --- frame bilinears ------------------------------------------------------------

# Coefficients of dx^1..dx^4 in 2 dZ1, 2 dZ1bar, 2 dZ2, 2 dZ2bar.
FIXED_FRAME_TABLE = [
    [2, 2j, 0, 0],
    [2, -2j, 0, 0],
    [0, 0, 2, 2j],
    [0, 0, 2, -2j],
]
