import math

import numpy as np
import pytest

from meshkit.density import LevelSet, ProductTrains, ShockTrain, SingleTrain, \
    Uniform, density_from_json, eval_density, theta_2d, theta_separable
from meshkit.errors import ConfigError
from meshkit.presets import get_preset

SQ2 = math.sqrt(2.0)


def ex1_train():
    return ShockTrain(amplitude=50.0, sharpness=50.0,
                      direction=np.array([1.0, 1.0]) / SQ2, scale=SQ2)


def test_train_requires_unit_direction():
    with pytest.raises(ValueError):
        ShockTrain(amplitude=1.0, sharpness=1.0,
                   direction=np.array([1.0, 1.0]), scale=1.0)


def test_uniform_is_one():
    d = Uniform()
    assert eval_density(d, 0.3, 0.9) == 1.0


def test_example1_on_and_off_feature():
    d = get_preset("example1")
    # on the feature line x . e1 = 0
    x, y = 0.25, -0.25
    assert eval_density(d, x, y) == pytest.approx(51.0, rel=1e-15)
    # midway between bumps: x' = 1/(2 sqrt 2)
    x = y = 1.0 / (4.0 * SQ2) * SQ2 / SQ2  # x + y = 1/(2*sqrt2) over e1
    xp = 1.0 / (2.0 * SQ2)
    assert eval_density(d, xp / SQ2, xp / SQ2) == pytest.approx(1.0, abs=1e-10)


def test_theta_separable_values():
    assert theta_separable(ex1_train()) == pytest.approx(3.0, abs=1e-8)
    t2 = ShockTrain(amplitude=10.0, sharpness=25.0,
                    direction=np.array([1.0, -1.0]) / SQ2, scale=SQ2)
    assert theta_separable(t2) == pytest.approx(1.8, abs=1e-8)
    t0 = ShockTrain(amplitude=0.0, sharpness=1.0,
                    direction=np.array([1.0, 0.0]), scale=1.0)
    assert theta_separable(t0) == pytest.approx(1.0, abs=1e-12)


def test_theta_2d_values():
    assert theta_2d(Uniform()) == pytest.approx(1.0, abs=1e-12)
    assert theta_2d(get_preset("example1")) == pytest.approx(3.0, abs=1e-6)
    assert theta_2d(get_preset("example2")) == pytest.approx(5.4, abs=1e-5)


def test_theta_2d_product_identity_orthogonal():
    d = get_preset("example2")
    assert d.orthogonal
    assert theta_2d(d) == pytest.approx(
        theta_separable(d.train1) * theta_separable(d.train2), abs=1e-6)


def test_theta_2d_quadrature_stable():
    for name in ("example1", "example2", "example3", "example4"):
        d = get_preset(name)
        assert theta_2d(d, q=512) == pytest.approx(theta_2d(d, q=1024),
                                                   abs=1e-8)


@pytest.mark.parametrize("name", ["example1", "example2", "example3",
                                  "example4"])
def test_double_periodicity(name):
    d = get_preset(name)
    rng = np.random.default_rng(42)
    x = rng.uniform(-1, 2, size=1000)
    y = rng.uniform(-1, 2, size=1000)
    base = eval_density(d, x, y)
    assert np.abs(eval_density(d, x + 1, y) - base).max() <= 1e-10
    assert np.abs(eval_density(d, x, y + 1) - base).max() <= 1e-10
    assert np.all(base >= 1.0)


def test_antiderivative_matches_profile():
    t = ex1_train()
    xp = np.linspace(-1, 2, 301)
    h = 1e-6
    num = (t.antiderivative(xp + h) - t.antiderivative(xp - h)) / (2 * h)
    assert np.abs(num - t.profile(xp)).max() <= 1e-3
    assert t.antiderivative(0.0) == 0.0


def test_example3_is_not_orthogonal():
    d = get_preset("example3")
    assert isinstance(d, ProductTrains)
    assert not d.orthogonal


def test_levelset_gradient():
    d = get_preset("example4")
    assert isinstance(d, LevelSet)
    g = d.grad_psi(0.0, 0.5)
    assert g[0] == pytest.approx(-0.4 * np.pi)
    assert g[1] == 1.0
    # density peaks on the curve
    assert eval_density(d, 0.25, 0.2 * np.sin(np.pi / 2) + 0.5) \
        == pytest.approx(51.0, rel=1e-12)


def test_density_from_json_roundtrip():
    doc = {"variant": "single_train",
           "train": {"amplitude": 50.0, "sharpness": 50.0,
                     "direction": [1.0 / SQ2, 1.0 / SQ2], "scale": SQ2}}
    d = density_from_json(doc)
    assert isinstance(d, SingleTrain)
    assert eval_density(d, 0.5, -0.5) == pytest.approx(51.0, rel=1e-12)


def test_density_from_json_rejects_unknown_key():
    with pytest.raises(ConfigError):
        density_from_json({"variant": "uniform", "oops": 1})
    with pytest.raises(ConfigError):
        density_from_json({"variant": "nope"})
