"""Closed-form optimal-transport solution for separable densities.

For a density rho(x) = rho_1(x . e1) * rho_2(x . e2) with orthonormal
e1, e2, the transported coordinate along each axis is the inverse of
the cumulative profile R_a scaled by its mean theta_a.  Inverses are
tabulated over one period and extended by the integer-shift
equivariance R(x' + L) = R(x') + theta * L.
"""

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .density import ProductTrains, ShockTrain, SingleTrain, Uniform
from .errors import NonMonotoneTable

# A table of 1000 samples leaves interpolation errors around 1e-6 in
# x'; 20000 brings the analytic round trip under 1e-8.
DEFAULT_TABLE_SAMPLES = 20000


@dataclass(frozen=True)
class CumulativeTable:
    """Samples of R(x') over one period [0, L], strictly increasing."""

    xs: np.ndarray       # x'_i, equispaced on [0, L]
    rs: np.ndarray       # R(x'_i)
    period: float        # L
    theta: float         # mean slope: (R(L) - R(0)) / L


def build_R(train, period=None, n_samples=DEFAULT_TABLE_SAMPLES):
    """Tabulate the tanh antiderivative of a shock train over one period."""
    if n_samples < 1000:
        raise ValueError("need at least 1000 table samples")
    L = train.period if period is None else float(period)
    xs = L * np.arange(n_samples + 1) / n_samples
    rs = train.antiderivative(xs)
    if not np.all(np.diff(rs) > 0):
        raise NonMonotoneTable("cumulative profile is not strictly increasing")
    return CumulativeTable(xs=xs, rs=rs, period=L, theta=float((rs[-1] - rs[0]) / L))


class MonotoneInverse:
    """Monotone cubic interpolant for R^{-1}, periodically extended."""

    def __init__(self, table):
        if not np.all(np.diff(table.rs) > 0):
            raise NonMonotoneTable("cannot invert a non-monotone table")
        self.table = table
        self._pchip = PchipInterpolator(table.rs, table.xs, extrapolate=False)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        span = self.table.theta * self.table.period
        k = np.floor(t / span)
        r = np.clip(t - k * span, self.table.rs[0], self.table.rs[-1])
        return self._pchip(r) + k * self.table.period


def invert_R(table):
    return MonotoneInverse(table)


def _perp(e):
    return np.array([e[1], -e[0]])


@dataclass(frozen=True)
class SeparableSolution:
    """Exact mesh map for a separable density on orthogonal feature axes."""

    train1: ShockTrain
    train2: ShockTrain
    theta1: float
    theta2: float
    inv1: MonotoneInverse
    inv2: MonotoneInverse

    @property
    def e1(self):
        return self.train1.e

    @property
    def e2(self):
        return self.train2.e

    @property
    def theta(self):
        return self.theta1 * self.theta2


def solve_separable(density, n_samples=DEFAULT_TABLE_SAMPLES):
    """Build the exact solution for a Uniform, SingleTrain or orthogonal
    ProductTrains density."""
    if isinstance(density, Uniform):
        t1 = ShockTrain(0.0, 1.0, (1.0, 0.0), 1.0)
        t2 = ShockTrain(0.0, 1.0, (0.0, 1.0), 1.0)
    elif isinstance(density, SingleTrain):
        t1 = density.train
        e2 = _perp(t1.e)
        t2 = ShockTrain(0.0, t1.sharpness, (e2[0], e2[1]), t1.scale)
    elif isinstance(density, ProductTrains):
        if not density.orthogonal:
            raise ValueError("separable solution requires orthogonal feature axes")
        t1, t2 = density.train1, density.train2
    else:
        raise ValueError("no separable solution for %s" % type(density).__name__)
    tab1 = build_R(t1, n_samples=n_samples)
    tab2 = build_R(t2, n_samples=n_samples)
    return SeparableSolution(
        train1=t1, train2=t2,
        theta1=tab1.theta, theta2=tab2.theta,
        inv1=invert_R(tab1), inv2=invert_R(tab2),
    )


def exact_map(sol, xi, eta, reduce=True):
    """Physical image (x, y) of computational points.

    With reduce=False the continuous lift is returned, which satisfies
    exact_map(xi + 1, eta) = exact_map(xi, eta) + e1_x + e2_x etc.;
    with reduce=True coordinates are folded into [0, 1).
    """
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    xip = xi * sol.e1[0] + eta * sol.e1[1]
    etap = xi * sol.e2[0] + eta * sol.e2[1]
    xp = sol.inv1(sol.theta1 * xip)
    yp = sol.inv2(sol.theta2 * etap)
    x = sol.e1[0] * xp + sol.e2[0] * yp
    y = sol.e1[1] * xp + sol.e2[1] * yp
    if reduce:
        x, y = x % 1.0, y % 1.0
    return x, y


def exact_jacobian(sol, xi, eta):
    """Packed symmetric Jacobian (J11, J12, J22) at computational points.

    Eigenvalues are theta_a / rho_a evaluated at the image, on the
    fixed axes e1, e2.
    """
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    xip = xi * sol.e1[0] + eta * sol.e1[1]
    etap = xi * sol.e2[0] + eta * sol.e2[1]
    xp = sol.inv1(sol.theta1 * xip)
    yp = sol.inv2(sol.theta2 * etap)
    lam1 = sol.theta1 / sol.train1.profile(xp)
    lam2 = sol.theta2 / sol.train2.profile(yp)
    e1, e2 = sol.e1, sol.e2
    j11 = lam1 * e1[0] ** 2 + lam2 * e2[0] ** 2
    j12 = lam1 * e1[0] * e1[1] + lam2 * e2[0] * e2[1]
    j22 = lam1 * e1[1] ** 2 + lam2 * e2[1] ** 2
    return np.stack([j11, j12, j22], axis=-1)
