"""Second-order finite differences on uniform grids.

Fields are arrays whose leading axes are grid axes. Periodic axes wrap
with an optional ``twist`` (``-1`` for antiperiodic spinor fields); open
axes use one-sided second-order stencils at the ends.
"""

from __future__ import annotations

import numpy as np


def _wrapped(f, axis, shift, twist):
    """``f`` shifted by ``shift`` samples with the wrapped slab multiplied by ``twist``."""
    out = np.roll(f, -shift, axis=axis)
    if twist != 1:
        n = f.shape[axis]
        idx = [slice(None)] * f.ndim
        idx[axis] = slice(n - 1, n) if shift == 1 else slice(0, 1)
        out[tuple(idx)] *= twist
    return out


def d1(f, axis: int, h: float, periodic: bool, twist: int = 1) -> np.ndarray:
    f = np.asarray(f)
    if periodic:
        return (_wrapped(f, axis, 1, twist) - _wrapped(f, axis, -1, twist)) / (2 * h)
    return np.gradient(f, h, axis=axis, edge_order=2)


def d2(f, axis: int, h: float, periodic: bool, twist: int = 1) -> np.ndarray:
    f = np.asarray(f)
    if periodic:
        return (_wrapped(f, axis, 1, twist) - 2 * f + _wrapped(f, axis, -1, twist)) / h**2
    f = np.moveaxis(f, axis, 0)
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - 2 * f[1:-1] + f[:-2]) / h**2
    out[0] = (2 * f[0] - 5 * f[1] + 4 * f[2] - f[3]) / h**2
    out[-1] = (2 * f[-1] - 5 * f[-2] + 4 * f[-3] - f[-4]) / h**2
    return np.moveaxis(out, 0, axis)


def gradient(f, spacing, periodic, twist=None) -> np.ndarray:
    """Stack of first derivatives along every grid axis, new axis inserted after the grid."""
    ndim = len(spacing)
    twist = twist or (1,) * ndim
    parts = [d1(f, ax, spacing[ax], periodic[ax], twist[ax]) for ax in range(ndim)]
    return np.stack(parts, axis=ndim)


def hessian(f, spacing, periodic) -> np.ndarray:
    """Second derivatives, two new axes inserted after the grid."""
    ndim = len(spacing)
    shape = f.shape[:ndim] + (ndim, ndim) + f.shape[ndim:]
    out = np.empty(shape, dtype=np.result_type(f, float))
    for a in range(ndim):
        out[(slice(None),) * ndim + (a, a)] = d2(f, a, spacing[a], periodic[a])
        for b in range(a + 1, ndim):
            mixed = d1(d1(f, a, spacing[a], periodic[a]), b, spacing[b], periodic[b])
            out[(slice(None),) * ndim + (a, b)] = mixed
            out[(slice(None),) * ndim + (b, a)] = mixed
    return out


def cumulative_trapezoid(f, axis: int, h: float) -> np.ndarray:
    """Running trapezoid integral starting at zero on the first sample."""
    f = np.moveaxis(np.asarray(f), axis, 0)
    out = np.zeros_like(f)
    out[1:] = np.cumsum(0.5 * h * (f[1:] + f[:-1]), axis=0)
    return np.moveaxis(out, 0, axis)


def convergence_order(hs, errors) -> float:
    """Least-squares slope of ``log(error)`` against ``log(h)``; nan if any error is zero."""
    hs = np.asarray(hs, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if hs.size < 2 or np.any(errors <= 0):
        return float("nan")
    slope, _ = np.polyfit(np.log(hs), np.log(errors), 1)
    return float(slope)
