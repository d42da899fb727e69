"""Mean-curvature potentials on a few catalog surfaces and curves.

The surface potential p vanishes on minimal surfaces and is a pure
profile 1/(1 + |s|^2) on the stereographic sphere, whatever its radius.
Along a helix the curve operator has an explicit zero mode obtained by
integrating along the rotation-minimizing frame.
Run with ``python3 demos/curvature_potentials.py``.
"""

import numpy as np

from subdirac.dirac import build_curve_dirac, build_surface_dirac_E4, curve_zero_mode, residual_norms
from subdirac.geometry import conformal_data, make_chart, schrodinger_potential_E3, shape_data

for name, params in [("catenoid", {}), ("enneper", {}), ("sphere", {"R": 0.5}), ("sphere", {"R": 3.0})]:
    chart = make_chart(name, params, sizes=48)
    shape = shape_data(chart)
    op = build_surface_dirac_E4(chart, shape, conformal_data(chart))
    p = op.coefficients["p"]
    u, v = chart.grid.mesh()
    gap = f"{np.max(np.abs(np.abs(p) - 1 / (1 + u**2 + v**2))):.1e}" if name == "sphere" else "   -   "
    print(f"{name:9s} {params!s:12s} max|p| = {np.max(np.abs(p)):.1e}   "
          f"|p| vs 1/(1+|s|^2): {gap}   min(H^2-K) = {schrodinger_potential_E3(chart).min():+.2e}")

for N in (64, 128, 256):
    helix = make_chart("helix", {"R": 1.0, "c": 0.5}, sizes=N)
    op = build_curve_dirac(helix)
    psi = curve_zero_mode(op, [1.0, 0.0])
    mx, _ = residual_norms(op, psi)
    print(f"helix N={N:3d}: stencil residual of the integrated zero mode {mx:.2e}")
