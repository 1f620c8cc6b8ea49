import math

import numpy as np
import pytest

from meshkit.density import ShockTrain, Uniform
from meshkit.errors import NonMonotoneTable
from meshkit.exact import build_R, exact_jacobian, exact_map, invert_R, \
    solve_separable
from meshkit.metric import eig_sym2
from meshkit.presets import get_preset

SQ2 = math.sqrt(2.0)


def flat_train():
    return ShockTrain(amplitude=0.0, sharpness=1.0,
                      direction=np.array([1.0, 0.0]), scale=1.0)


def ex1_train():
    return ShockTrain(amplitude=50.0, sharpness=50.0,
                      direction=np.array([1.0, 1.0]) / SQ2, scale=SQ2)


def test_build_R_flat_is_identity():
    table = build_R(flat_train())
    assert np.abs(table.rs - table.xs).max() <= 1e-12


def test_build_R_period_totals():
    t1 = build_R(ex1_train())
    # table covers one fundamental period 1/s; theta * L total mass
    assert t1.rs[-1] - t1.rs[0] == pytest.approx(t1.theta * t1.period,
                                                 abs=1e-8)
    assert t1.theta == pytest.approx(3.0, abs=1e-8)
    t2 = build_R(ShockTrain(amplitude=10.0, sharpness=25.0,
                            direction=np.array([1.0, -1.0]) / SQ2,
                            scale=SQ2))
    assert t2.theta == pytest.approx(1.8, abs=1e-8)


def test_invert_R_roundtrip():
    table = build_R(ex1_train())
    inv = invert_R(table)
    rng = np.random.default_rng(3)
    xp = rng.uniform(-1.0, 2.0, size=1000)
    t = ex1_train().antiderivative(xp)
    assert np.abs(inv(t) - xp).max() <= 1e-7
    # half-mass point is the bump-interval midpoint
    mid = 1.0 / (2.0 * SQ2)
    assert inv(ex1_train().antiderivative(mid)) == pytest.approx(mid,
                                                                 abs=1e-8)


def test_invert_rejects_non_monotone():
    table = build_R(flat_train())
    table.rs[5] = table.rs[7]
    with pytest.raises(NonMonotoneTable):
        invert_R(table)


def test_exact_map_uniform_identity():
    sol = solve_separable(Uniform())
    xi = np.linspace(0, 1, 13)
    x, y = exact_map(sol, xi, xi ** 2, reduce=False)
    assert np.abs(x - xi).max() <= 1e-10
    assert np.abs(y - xi ** 2).max() <= 1e-10


def test_exact_map_origin_fixed():
    sol = solve_separable(get_preset("example1"))
    x, y = exact_map(sol, 0.0, 0.0)
    assert abs(x) <= 1e-10 and abs(y) <= 1e-10


def test_exact_map_concentration():
    """Images crowd the shock lines ~10x beyond the uniform share."""
    sol = solve_separable(get_preset("example1"))
    t = np.arange(60) / 60
    xi, eta = np.meshgrid(t, t, indexing="ij")
    x, y = exact_map(sol, xi, eta)
    xp = (x + y) / SQ2
    width = 1.0 / (50.0 * SQ2)
    u = xp * SQ2
    dist = np.abs(u - np.round(u)) / SQ2
    frac = (dist < width).mean()
    uniform_frac = 2 * width / (1 / SQ2)
    assert frac >= 10 * uniform_frac


def test_exact_jacobian_uniform_and_feature():
    sol = solve_separable(Uniform())
    jac = exact_jacobian(sol, 0.3, 0.4)
    assert np.allclose(jac, [1.0, 0.0, 1.0], atol=1e-12)

    sol = solve_separable(get_preset("example1"))
    pair = eig_sym2(exact_jacobian(sol, 0.0, 0.0))
    assert pair.lam1 == pytest.approx(3.0 / 51.0, abs=1e-10)
    assert pair.lam2 == pytest.approx(1.0, abs=1e-10)


def test_exact_jacobian_example2_intersection():
    sol = solve_separable(get_preset("example2"))
    pair = eig_sym2(exact_jacobian(sol, 0.0, 0.0))
    assert pair.lam1 == pytest.approx(3.0 / 51.0, abs=1e-9)
    assert pair.lam2 == pytest.approx(1.8 / 11.0, abs=1e-9)


def test_exact_jacobian_matches_fd_of_map():
    sol = solve_separable(get_preset("example1"))
    rng = np.random.default_rng(11)
    xi = rng.uniform(0, 1, size=200)
    eta = rng.uniform(0, 1, size=200)
    # the map's third derivative at shock edges is ~1e3, so h = 1e-3
    # leaves ~1e-3 truncation error; h = 1e-4 puts it well under 1e-4
    h = 1e-4
    xr, yr = exact_map(sol, xi + h, eta, reduce=False)
    xl, yl = exact_map(sol, xi - h, eta, reduce=False)
    xu, yu = exact_map(sol, xi, eta + h, reduce=False)
    xd, yd = exact_map(sol, xi, eta - h, reduce=False)
    j11 = (xr - xl) / (2 * h)
    j12 = (xu - xd) / (2 * h)
    j22 = (yu - yd) / (2 * h)
    jac = exact_jacobian(sol, xi, eta)
    err = np.stack([j11 - jac[..., 0], j12 - jac[..., 1],
                    j22 - jac[..., 2]], axis=-1)
    assert np.abs(err).max() <= 1e-4


def test_exact_map_double_periodicity():
    sol = solve_separable(get_preset("example2"))
    rng = np.random.default_rng(5)
    xi = rng.uniform(0, 1, 300)
    eta = rng.uniform(0, 1, 300)
    x0, y0 = exact_map(sol, xi, eta, reduce=False)
    x1, y1 = exact_map(sol, xi + 1.0, eta, reduce=False)
    assert np.abs(x1 - x0 - 1.0).max() <= 1e-8
    assert np.abs(y1 - y0).max() <= 1e-8


def test_monge_ampere_residual_random_points():
    for name in ("example1", "example2"):
        d = get_preset(name)
        sol = solve_separable(d)
        theta = sol.theta
        rng = np.random.default_rng(17)
        xi = rng.uniform(0, 1, 10000)
        eta = rng.uniform(0, 1, 10000)
        x, y = exact_map(sol, xi, eta)
        jac = exact_jacobian(sol, xi, eta)
        det = jac[..., 0] * jac[..., 2] - jac[..., 1] ** 2
        resid = np.abs(d(x, y) * det - theta)
        assert resid.max() <= 1e-6 * theta


def test_solve_separable_rejects_non_orthogonal():
    with pytest.raises(ValueError):
        solve_separable(get_preset("example3"))
