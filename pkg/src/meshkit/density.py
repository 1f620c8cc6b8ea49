"""Analytic, doubly-periodic mesh density functions and their means.

Every density evaluates pointwise as rho(x, y) > 0 on the unit torus.
Shock trains are sums of sech^2 bumps along parallel lines; the bump
pattern repeats with period 1 in the scaled coordinate s*x', which is
what makes the 2D density exactly 1-periodic in both coordinates.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

# translates kept on each side of the nearest bump; the discarded tail
# is below sech^2(k * 2.5) with k >= 1, i.e. under double precision
# for every sharpness used here
_TRANSLATES = range(-3, 4)

_PROBE_N = 256


@dataclass(frozen=True)
class ShockTrain:
    """1D periodic profile 1 + A * sum_m sech^2(k*(s*x' - c_m - j)), j integer."""

    amplitude: float
    sharpness: float
    direction: tuple
    scale: float
    offsets: tuple = (0.0,)

    def __post_init__(self):
        e = np.asarray(self.direction, dtype=float)
        if abs(np.hypot(e[0], e[1]) - 1.0) > 1e-12:
            raise ValueError("direction must be a unit vector")
        if self.amplitude < 0 or self.sharpness <= 0 or self.scale <= 0:
            raise ValueError("amplitude must be >= 0, sharpness and scale > 0")

    @property
    def e(self):
        return np.asarray(self.direction, dtype=float)

    @property
    def period(self):
        """Fundamental period of the profile in the rotated coordinate x'."""
        return 1.0 / self.scale

    def profile(self, xp):
        """rho_1(x') for array input; exactly periodic by translate reduction."""
        u = self.scale * np.asarray(xp, dtype=float)
        out = np.ones_like(u)
        for c in self.offsets:
            w = u - c
            w = w - np.round(w)
            for j in _TRANSLATES:
                out = out + self.amplitude / np.cosh(self.sharpness * (w - j)) ** 2
        return out

    def antiderivative(self, xp):
        """R(x') = integral of the profile from 0, via the tanh closed form."""
        xp = np.asarray(xp, dtype=float)
        u = self.scale * xp
        lo = math.floor(float(u.min())) - 3
        hi = math.ceil(float(u.max())) + 3
        out = xp.astype(float).copy()
        coef = self.amplitude / (self.sharpness * self.scale)
        k = self.sharpness
        for c in self.offsets:
            for m in range(lo, hi + 1):
                out += coef * (np.tanh(k * (u - c - m)) - np.tanh(k * (-c - m)))
        return out


def theta_separable(train, q=4096):
    """Mean of the train profile over one period (periodic trapezoid rule)."""
    if q < 64:
        raise ValueError("need at least 64 quadrature points")
    s = train.period * np.arange(q) / q
    return float(train.profile(s).mean())


class Density:
    """Base class; subclasses implement __call__(x, y) -> rho > 0."""

    def __call__(self, x, y):
        raise NotImplementedError

    def _check_positive(self):
        t = np.arange(_PROBE_N) / _PROBE_N
        x, y = np.meshgrid(t, t, indexing="ij")
        v = self(x, y)
        if not np.all(np.isfinite(v)) or v.min() <= 0:
            raise ValueError("density is not strictly positive on the probe grid")


class Uniform(Density):
    def __call__(self, x, y):
        return np.ones_like(np.asarray(x, dtype=float))


class SingleTrain(Density):
    """rho(x) = rho_1(x . e1) for one shock train."""

    def __init__(self, train):
        self.train = train
        self._check_positive()

    def __call__(self, x, y):
        e = self.train.e
        return self.train.profile(np.asarray(x) * e[0] + np.asarray(y) * e[1])


class ProductTrains(Density):
    """rho(x) = rho_1(x . e1) * rho_2(x . e2); directions need not be orthogonal."""

    def __init__(self, train1, train2):
        self.train1 = train1
        self.train2 = train2
        self._check_positive()

    @property
    def orthogonal(self):
        return abs(float(self.train1.e @ self.train2.e)) <= 1e-12

    def factors(self, x, y):
        e1, e2 = self.train1.e, self.train2.e
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        r1 = self.train1.profile(x * e1[0] + y * e1[1])
        r2 = self.train2.profile(x * e2[0] + y * e2[1])
        return r1, r2

    def __call__(self, x, y):
        r1, r2 = self.factors(x, y)
        return r1 * r2


class LevelSet(Density):
    """Density concentrated near the sine-wave curve Psi(x, y) = 0,

    Psi = y - curve_amplitude * sin(2*pi*x) - curve_offset, periodized
    over integer shifts of Psi.
    """

    def __init__(self, amplitude, sharpness, curve_amplitude, curve_offset):
        if amplitude < 0 or sharpness <= 0:
            raise ValueError("amplitude must be >= 0 and sharpness > 0")
        self.amplitude = amplitude
        self.sharpness = sharpness
        self.curve_amplitude = curve_amplitude
        self.curve_offset = curve_offset
        self._check_positive()

    def psi(self, x, y):
        return (np.asarray(y, dtype=float)
                - self.curve_amplitude * np.sin(2 * np.pi * np.asarray(x, dtype=float))
                - self.curve_offset)

    def grad_psi(self, x, y):
        gx = -2 * np.pi * self.curve_amplitude * np.cos(2 * np.pi * np.asarray(x, dtype=float))
        return np.stack([gx, np.ones_like(gx)], axis=-1)

    def __call__(self, x, y):
        p = self.psi(x, y)
        p = p - np.round(p)
        out = np.ones_like(p)
        for j in _TRANSLATES:
            out = out + self.amplitude / np.cosh(self.sharpness * np.abs(p - j)) ** 2
        return out


class ArclengthFromU(Density):
    """rho = sqrt(1 + alpha_h * |grad u|^2) with an analytic gradient callback.

    grad_u(x, y) must return the pair (du/dx, du/dy) and be 1-periodic.
    """

    def __init__(self, grad_u, alpha_h):
        if alpha_h <= 0:
            raise ValueError("alpha_h must be positive")
        self.grad_u = grad_u
        self.alpha_h = alpha_h
        self._check_positive()

    def __call__(self, x, y):
        ux, uy = self.grad_u(x, y)
        return np.sqrt(1.0 + self.alpha_h * (np.asarray(ux) ** 2 + np.asarray(uy) ** 2))


class HessianFromU(Density):
    """rho = sqrt(1 + alpha_h * (|u_xx| + |u_yy|)) with analytic second derivatives.

    hess_u(x, y) must return the pair (u_xx, u_yy) and be 1-periodic.
    """

    def __init__(self, hess_u, alpha_h):
        if alpha_h <= 0:
            raise ValueError("alpha_h must be positive")
        self.hess_u = hess_u
        self.alpha_h = alpha_h
        self._check_positive()

    def __call__(self, x, y):
        uxx, uyy = self.hess_u(x, y)
        return np.sqrt(1.0 + self.alpha_h * (np.abs(uxx) + np.abs(uyy)))


def eval_density(density, x, y):
    return density(x, y)


def theta_2d(density, q=512):
    """Mean of rho over the torus by the q x q periodic trapezoid rule."""
    if q < 64:
        raise ValueError("need at least 64 quadrature points per side")
    t = np.arange(q) / q
    x, y = np.meshgrid(t, t, indexing="ij")
    return float(density(x, y).mean())


# --- JSON construction (see cli docs for the schema) ---------------------

def _train_from_json(doc, path):
    if not isinstance(doc, dict):
        raise ConfigError("%s: expected an object" % path)
    allowed = {"amplitude", "sharpness", "direction", "scale", "offsets"}
    for key in doc:
        if key not in allowed:
            raise ConfigError("%s.%s: unknown key" % (path, key))
    for key in ("amplitude", "sharpness", "direction", "scale"):
        if key not in doc:
            raise ConfigError("%s.%s: missing" % (path, key))
    try:
        return ShockTrain(
            amplitude=float(doc["amplitude"]),
            sharpness=float(doc["sharpness"]),
            direction=tuple(float(v) for v in doc["direction"]),
            scale=float(doc["scale"]),
            offsets=tuple(float(v) for v in doc.get("offsets", (0.0,))),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError("%s: %s" % (path, exc)) from exc


def density_from_json(doc, path="density"):
    """Build a Density from a JSON document; unknown keys are rejected."""
    if not isinstance(doc, dict):
        raise ConfigError("%s: expected an object" % path)
    variant = doc.get("variant")
    if variant == "uniform":
        extra = set(doc) - {"variant"}
    elif variant == "single_train":
        extra = set(doc) - {"variant", "train"}
    elif variant == "product_trains":
        extra = set(doc) - {"variant", "train1", "train2"}
    elif variant == "level_set":
        extra = set(doc) - {"variant", "amplitude", "sharpness",
                            "curve_amplitude", "curve_offset"}
    else:
        raise ConfigError("%s.variant: unknown variant %r" % (path, variant))
    if extra:
        raise ConfigError("%s.%s: unknown key" % (path, sorted(extra)[0]))
    try:
        if variant == "uniform":
            return Uniform()
        if variant == "single_train":
            return SingleTrain(_train_from_json(doc.get("train"), path + ".train"))
        if variant == "product_trains":
            return ProductTrains(
                _train_from_json(doc.get("train1"), path + ".train1"),
                _train_from_json(doc.get("train2"), path + ".train2"),
            )
        return LevelSet(
            amplitude=float(doc["amplitude"]),
            sharpness=float(doc["sharpness"]),
            curve_amplitude=float(doc["curve_amplitude"]),
            curve_offset=float(doc["curve_offset"]),
        )
    except KeyError as exc:
        raise ConfigError("%s.%s: missing" % (path, exc.args[0])) from exc
    except ValueError as exc:
        raise ConfigError("%s: %s" % (path, exc)) from exc
