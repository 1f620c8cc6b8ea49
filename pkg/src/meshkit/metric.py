"""Jacobian eigenstructure, metric tensors and anisotropy measures.

Symmetric 2x2 matrices are packed as (a11, a12, a22); functions accept
a single triple or an array whose last axis has length 3 and vectorize
over the leading axes.  Full 2x2 input is validated for symmetry and
rejected beyond a 1e-8 tolerance: asymmetry signals an upstream bug.
"""

from dataclasses import dataclass

import numpy as np

from .errors import AsymmetricJacobian, NonPositiveMetric, SingularJacobian, \
    ZeroGradient

SINGULAR_DET = 1e-14


def as_symmat(m):
    """Normalize input to packed (..., 3) form."""
    m = np.asarray(m, dtype=float)
    if m.shape[-1] == 3:
        return m
    if m.shape[-2:] == (2, 2):
        if np.any(np.abs(m[..., 0, 1] - m[..., 1, 0]) > 1e-8):
            raise AsymmetricJacobian("matrix is not symmetric within 1e-8")
        return np.stack([m[..., 0, 0],
                         0.5 * (m[..., 0, 1] + m[..., 1, 0]),
                         m[..., 1, 1]], axis=-1)
    raise ValueError("expected (a11, a12, a22) or a 2x2 matrix")


def sym_det(m):
    m = as_symmat(m)
    return m[..., 0] * m[..., 2] - m[..., 1] ** 2


def sym_trace(m):
    m = as_symmat(m)
    return m[..., 0] + m[..., 2]


def eig_sym2_field(m):
    """Vectorized closed-form eigensystem of packed symmetric matrices.

    Returns (lam1, lam2, v1, v2) with lam1 <= lam2; eigenvectors are
    unit, mutually orthogonal, deterministic: the first component of v1
    is nonnegative (second nonnegative on ties), and the degenerate
    case lam1 == lam2 yields the coordinate basis.
    """
    m = as_symmat(m)
    a, b, c = m[..., 0], m[..., 1], m[..., 2]
    mid = 0.5 * (a + c)
    rad = np.hypot(0.5 * (a - c), b)
    lam1, lam2 = mid - rad, mid + rad
    # eigenvector of lam1: (b, lam1 - a), or the axis basis when degenerate
    degenerate = rad <= 1e-15 * np.maximum(1.0, np.abs(mid))
    vx = np.where(degenerate, 1.0, b)
    vy = np.where(degenerate, 0.0, lam1 - a)
    # b == 0 but non-degenerate: diagonal matrix, pick the axis of min
    diag = (~degenerate) & (np.abs(b) <= 1e-300)
    vx = np.where(diag, np.where(a <= c, 1.0, 0.0), vx)
    vy = np.where(diag, np.where(a <= c, 0.0, 1.0), vy)
    norm = np.hypot(vx, vy)
    vx, vy = vx / norm, vy / norm
    flip = (vx < 0) | ((vx == 0) & (vy < 0))
    sign = np.where(flip, -1.0, 1.0)
    vx, vy = sign * vx, sign * vy
    wx, wy = -vy, vx
    flip = (wx < 0) | ((wx == 0) & (wy < 0))
    sign = np.where(flip, -1.0, 1.0)
    wx, wy = sign * wx, sign * wy
    v1 = np.stack([vx, vy], axis=-1)
    v2 = np.stack([wx, wy], axis=-1)
    return lam1, lam2, v1, v2


@dataclass(frozen=True)
class EigenPair:
    lam1: float
    lam2: float
    e1: np.ndarray
    e2: np.ndarray


def eig_sym2(m):
    """Eigensystem of a single symmetric 2x2 matrix."""
    lam1, lam2, v1, v2 = eig_sym2_field(m)
    return EigenPair(float(lam1), float(lam2), v1, v2)


def metric_from_jacobian(jac, theta):
    """M = theta * J^{-T} J^{-1} for symmetric J; same eigenvectors,
    eigenvalues theta / lambda_i^2."""
    jac = as_symmat(jac)
    det = sym_det(jac)
    if np.any(det <= SINGULAR_DET):
        raise SingularJacobian("Jacobian determinant <= %g" % SINGULAR_DET)
    # J^{-1} = adj(J)/det is symmetric; M = theta * (J^{-1})^2
    ia = jac[..., 2] / det
    ib = -jac[..., 1] / det
    ic = jac[..., 0] / det
    return theta * np.stack([ia * ia + ib * ib,
                             ib * (ia + ic),
                             ib * ib + ic * ic], axis=-1)


def qs(jac):
    """Anisotropy measure tr(J^T J) / (2 sqrt(det(J^T J))) >= 1."""
    jac = as_symmat(jac)
    det = sym_det(jac)
    if np.any(np.abs(det) <= SINGULAR_DET):
        raise SingularJacobian("Jacobian determinant ~ 0")
    a, b, c = jac[..., 0], jac[..., 1], jac[..., 2]
    tr_jtj = a * a + 2 * b * b + c * c
    return tr_jtj / (2.0 * np.abs(det))


def qa(jac, metric):
    """Alignment measure tr(J^T M J) / (2 sqrt(det(J^T M J))) >= 1;
    equals 1 exactly when J^T M J is scalar."""
    jac = as_symmat(jac)
    metric = as_symmat(metric)
    if np.any(sym_det(metric) <= 0) or np.any(sym_trace(metric) <= 0):
        raise NonPositiveMetric("metric is not positive definite")
    det_j = sym_det(jac)
    if np.any(np.abs(det_j) <= SINGULAR_DET):
        raise SingularJacobian("Jacobian determinant ~ 0")
    ja, jb, jc = jac[..., 0], jac[..., 1], jac[..., 2]
    ma, mb, mc = metric[..., 0], metric[..., 1], metric[..., 2]
    # A = J^T M J (symmetric since J is)
    a11 = ja * (ma * ja + mb * jb) + jb * (mb * ja + mc * jb)
    a12 = ja * (ma * jb + mb * jc) + jb * (mb * jb + mc * jc)
    a22 = jb * (ma * jb + mb * jc) + jc * (mb * jb + mc * jc)
    det_a = a11 * a22 - a12 ** 2
    return (a11 + a22) / (2.0 * np.sqrt(det_a))


def _rank_one_metric(mu1, mu2, e1):
    """mu1 on axis e1, mu2 on its orthogonal complement, packed."""
    ex, ey = e1[..., 0], e1[..., 1]
    return np.stack([mu2 + (mu1 - mu2) * ex * ex,
                     (mu1 - mu2) * ex * ey,
                     mu2 + (mu1 - mu2) * ey * ey], axis=-1)


def predicted_metric_single(rho, theta, e1):
    """Metric a transported mesh aligns to at a single linear feature:
    eigenvalues rho^2/theta and theta on axes e1, e1-perp."""
    rho = np.asarray(rho, dtype=float)
    e1 = np.asarray(e1, dtype=float)
    return _rank_one_metric(rho ** 2 / theta, theta * np.ones_like(rho), e1)


def predicted_metric_product(rho1, rho2, theta1, theta2, e1):
    """Metric for two orthogonal feature families: eigenvalues
    theta2*rho1^2/theta1 and theta1*rho2^2/theta2 on axes e1, e1-perp."""
    rho1 = np.asarray(rho1, dtype=float)
    rho2 = np.asarray(rho2, dtype=float)
    e1 = np.asarray(e1, dtype=float)
    return _rank_one_metric(theta2 * rho1 ** 2 / theta1,
                            theta1 * rho2 ** 2 / theta2, e1)


def predicted_metric_levelset(rho, theta, grad_psi):
    """Single-feature metric with the feature normal taken from a
    level-set gradient."""
    grad_psi = np.asarray(grad_psi, dtype=float)
    norm = np.hypot(grad_psi[..., 0], grad_psi[..., 1])
    if np.any(norm <= 1e-12):
        raise ZeroGradient("level-set gradient too small for a feature normal")
    return predicted_metric_single(rho, theta, grad_psi / norm[..., None])


@dataclass(frozen=True)
class EllipseRecord:
    center: np.ndarray
    semi_axes: tuple    # (a, b), a >= b > 0
    angle: float        # radians in (-pi/2, pi/2], major axis vs x-axis


def ellipse_from_jacobian(jac, center, scale):
    """Ellipse with semi-axes scale*|lambda_i| along the eigenvectors of J."""
    jac = as_symmat(jac)
    if np.any(sym_det(jac) <= SINGULAR_DET):
        raise SingularJacobian("Jacobian determinant <= %g" % SINGULAR_DET)
    pair = eig_sym2(jac)
    s1, s2 = abs(pair.lam1), abs(pair.lam2)
    if s1 >= s2:
        major, minor, axis = s1, s2, pair.e1
    else:
        major, minor, axis = s2, s1, pair.e2
    angle = float(np.arctan2(axis[1], axis[0]))
    if angle <= -np.pi / 2:
        angle += np.pi
    elif angle > np.pi / 2:
        angle -= np.pi
    return EllipseRecord(center=np.asarray(center, dtype=float),
                         semi_axes=(scale * major, scale * minor),
                         angle=angle)
