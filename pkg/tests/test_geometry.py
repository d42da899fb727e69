import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from subdirac import fd
from subdirac.errors import (
    AccuracyError,
    CatalogError,
    ConfigError,
    FocalRadiusError,
    NonConformalChartError,
    UnsupportedCaseError,
)
from subdirac.geometry import (
    conformal_data,
    induced_metric,
    list_shapes,
    make_chart,
    normal_frame,
    schrodinger_potential_E3,
    shape_data,
    tubular_metric,
)


def test_catalog_lists_expected_shapes():
    assert {"plane", "circle", "helix", "sphere", "catenoid", "enneper", "product_torus", "graph"} <= set(list_shapes())


@pytest.mark.parametrize("name,params", [("nope", {}), ("sphere", {"r": 1}), ("graph", {"F": "cubic"})])
def test_catalog_errors(name, params):
    with pytest.raises(CatalogError):
        make_chart(name, params, sizes=8)


def test_bad_jet_rejected():
    with pytest.raises(ConfigError):
        make_chart("plane", sizes=8, jet="spline")


@pytest.mark.parametrize("name", ["plane", "sphere", "catenoid", "enneper", "product_torus", "circle", "helix"])
def test_charts_validate(name):
    make_chart(name, sizes=16).validate()


def test_plane_metric_is_identity():
    g, ginv = induced_metric(make_chart("plane", sizes=12))
    assert np.allclose(g, np.eye(2), atol=1e-15)
    assert np.allclose(ginv, np.eye(2), atol=1e-15)


@pytest.mark.parametrize("R", [0.5, 1.0, 3.0])
def test_sphere_metric_is_conformal(R):
    c = make_chart("sphere", {"R": R}, sizes=24)
    u, v = c.grid.mesh()
    g, _ = induced_metric(c)
    rho = oracles.sphere_rho(u, v, R)
    assert np.allclose(g[..., 0, 0], rho, atol=1e-12)
    assert np.allclose(g[..., 1, 1], rho, atol=1e-12)
    assert np.allclose(g[..., 0, 1], 0, atol=1e-12)


def test_torus_metric_is_flat():
    g, _ = induced_metric(make_chart("product_torus", sizes=16))
    assert np.allclose(g, np.eye(2), atol=1e-14)


@pytest.mark.parametrize("name", ["sphere", "enneper", "catenoid"])
def test_fd_metric_converges(name):
    errs, hs = [], []
    for N in (16, 32, 64):
        c = make_chart(name, sizes=N)
        g_exact, _ = induced_metric(c)
        g_fd, _ = induced_metric(c.without_jet())
        errs.append(np.max(np.abs(g_fd - g_exact)[c.grid.interior(1)]))
        hs.append(c.grid.spacing[0])
    assert 1.7 <= fd.convergence_order(hs, errs) <= 2.3


def test_plane_normal_is_constant():
    N = normal_frame(make_chart("plane", sizes=8))
    assert np.allclose(np.abs(N[..., 0, :]), [0, 0, 1])


@pytest.mark.parametrize("name", ["sphere", "catenoid", "enneper", "product_torus", "helix"])
def test_normals_orthonormal_and_normal(name):
    c = make_chart(name, sizes=16)
    s = shape_data(c, parallel_frame=(c.k == 1))
    N = s.normals
    gram = np.einsum("...ai,...bi->...ab", N, N)
    assert np.allclose(gram, np.eye(s.codim), atol=1e-10)
    assert np.max(np.abs(np.einsum("...ai,...bi->...ab", N, s.tangents))) < 1e-10


def test_circle_normal_is_radial():
    c = make_chart("circle", {"R": 2.0}, sizes=32)
    s = shape_data(c, parallel_frame=True)
    radial = c.samples / 2.0
    assert np.allclose(np.abs(np.einsum("...i,...i->...", s.normals[:, 0], radial)), 1.0, atol=1e-12)
    # x'' = -x / R^2, so t = e . x'' = +-1/R
    assert np.allclose(np.abs(s.mean_trace[:, 0]), 0.5, atol=1e-12)


def test_helix_bishop_frame_matches_oracle():
    R, c = 1.0, 0.5
    ch = make_chart("helix", {"R": R, "c": c}, sizes=128)
    s = shape_data(ch, parallel_frame=True)
    sg = ch.grid.axes[0]
    _, N, B, _, _ = oracles.helix_frenet(sg, R, c)
    psi0 = np.arctan2(s.normals[0, 0] @ B[0], s.normals[0, 0] @ N[0])
    e1, e2, k1, k2 = oracles.helix_bishop(sg, R, c, psi0)
    assert np.max(np.abs(s.normals[:, 0] - e1)) < 1e-7
    assert np.max(np.abs(s.normals[:, 1] - e2)) < 1e-7
    assert np.allclose(s.mean_trace[:, 0], k1, atol=1e-7)
    assert np.allclose(s.mean_trace[:, 1], k2, atol=1e-7)


def test_helix_parallel_frame_connection_converges():
    hs, errs = [], []
    for N in (32, 64, 128):
        c = make_chart("helix", sizes=N)
        s = shape_data(c, parallel_frame=True)
        hs.append(c.grid.spacing[0])
        errs.append(np.max(np.abs(s.normal_connection[..., 0, 0, 1])))
    assert fd.convergence_order(hs, errs) >= 1.7


def test_weingarten_is_h_times_inverse_metric():
    s = shape_data(make_chart("enneper", sizes=16))
    assert np.array_equal(s.weingarten, np.einsum("...abg,...gd->...abd", s.h, s.inverse))


def test_coarse_grid_warns_or_raises():
    c = make_chart("sphere", sizes=4, ranges=[(-2, 2), (-2, 2)]).without_jet()
    with pytest.warns(UserWarning):
        shape_data(c)
    with pytest.raises(AccuracyError):
        shape_data(c, strict=True)


def test_umbilic_sphere_and_catenoid():
    sph = make_chart("sphere", {"R": 2.0}, sizes=32)
    assert np.max(np.abs(schrodinger_potential_E3(sph))) <= 1e-8
    cat = make_chart("catenoid", sizes=32)
    assert np.min(schrodinger_potential_E3(cat)) > 0


def test_potential_E3_needs_surface_in_E3():
    with pytest.raises(UnsupportedCaseError):
        schrodinger_potential_E3(make_chart("product_torus", sizes=8))


@settings(max_examples=20, deadline=None)
@given(F=st.sampled_from(["paraboloid", "saddle", "wave"]), a=st.floats(-2, 2))
def test_potential_E3_nonnegative_on_graphs(F, a):
    c = make_chart("graph", {"F": F, "a": a}, sizes=12)
    assert np.min(schrodinger_potential_E3(c)) >= -1e-12


@pytest.mark.parametrize("q", [0.1, 0.05, 0.025])
def test_offset_sphere_rho_matches_oracle(q):
    c = make_chart("sphere", sizes=16)
    s = shape_data(c)
    # t = e . x'' is positive along the inward normal
    sign = np.sign(s.mean_trace[0, 0, 0])
    tm = tubular_metric(c, s, [sign * q])
    assert np.allclose(tm.rho_exact, oracles.offset_sphere_rho(q), atol=1e-12)


@pytest.mark.parametrize("R", [1.0, 2.0])
def test_offset_circle_expansion_is_exact(R):
    c = make_chart("circle", {"R": R}, sizes=32)
    s = shape_data(c)
    sign = np.sign(s.mean_trace[0, 0])
    tm = tubular_metric(c, s, [sign * 0.2])
    assert np.allclose(tm.rho_exact, oracles.offset_circle_rho(0.2, R), atol=1e-12)
    assert np.allclose(tm.rho_expansion(), tm.rho_exact, atol=1e-12)


def test_tubular_expansion_is_third_order_on_sphere():
    c = make_chart("sphere", sizes=16)
    s = shape_data(c)
    qs = [0.1, 0.05, 0.025]
    errs = [np.max(np.abs(tubular_metric(c, s, [q]).rho_exact - tubular_metric(c, s, [q]).rho_expansion())) for q in qs]
    assert fd.convergence_order(qs, errs) >= 2.7


@settings(max_examples=25, deadline=None)
@given(q=st.tuples(st.floats(-0.2, 0.2), st.floats(-0.2, 0.2)))
def test_tubular_rho_tends_to_one(q):
    c = make_chart("product_torus", sizes=8)
    s = shape_data(c)
    small = 1e-3 * np.array(q)
    # |t| = sqrt(2) on the unit torus, so rho - 1 ~ -2 t . q stays below 3|q|
    tm = tubular_metric(c, s, small)
    assert np.max(np.abs(tm.rho_exact - 1)) <= 3 * np.linalg.norm(small) + 1e-12
    assert np.allclose(tm.block_determinant, np.linalg.det(tm.metric), atol=1e-12)


def test_focal_radius_rejected():
    c = make_chart("sphere", sizes=8)
    with pytest.raises(FocalRadiusError):
        tubular_metric(c, shape_data(c), [0.9])


@pytest.mark.parametrize("name", ["sphere", "catenoid", "enneper", "product_torus", "plane"])
def test_conformal_charts(name):
    cd = conformal_data(make_chart(name, sizes=16))
    assert cd.valid and cd.conformality_residual <= 1e-12


def test_non_conformal_chart_rejected():
    c = make_chart("graph", {"F": "paraboloid", "a": 1.0}, sizes=16)
    with pytest.raises(NonConformalChartError):
        conformal_data(c)
    assert not conformal_data(c, strict=False).valid


def test_scaling_rescales_metric():
    c = make_chart("product_torus", {"scale": 2.0}, sizes=8)
    assert np.allclose(conformal_data(c).rho, 4.0)


def test_embedding_pads_coordinates():
    c = make_chart("sphere", sizes=8, n=4)
    assert c.n == 4 and np.all(c.samples[..., 3] == 0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        s = shape_data(c)
    assert s.codim == 2
