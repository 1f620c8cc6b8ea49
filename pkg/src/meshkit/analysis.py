"""Per-mesh anisotropy reporting and alignment diagnostics.

Takes a node Jacobian field (symmetric packed triples from the solvers,
or full 2x2 matrices recovered from a tabulated mesh) together with the
density, and produces the summary report: theta, Q_s probe values,
Q_a range against the feature-predicted metric, and residual statistics.
"""

import numpy as np

from .density import LevelSet, ProductTrains, SingleTrain, Uniform, theta_2d, \
    theta_separable
from .errors import NonPositiveMetric, SingularJacobian
from .metric import as_symmat, eig_sym2_field, predicted_metric_levelset, \
    predicted_metric_product, predicted_metric_single, qa, qs, sym_det

PROBE_RHO_CUT = 1.5


def to_full(jac):
    """Packed symmetric (..., 3) -> full (..., 2, 2)."""
    jac = as_symmat(jac)
    a, b, c = jac[..., 0], jac[..., 1], jac[..., 2]
    return np.stack([np.stack([a, b], axis=-1),
                     np.stack([b, c], axis=-1)], axis=-2)


def qs_general(jac):
    """Anisotropy measure for a full, possibly asymmetric Jacobian field."""
    jac = np.asarray(jac, dtype=float)
    det = jac[..., 0, 0] * jac[..., 1, 1] - jac[..., 0, 1] * jac[..., 1, 0]
    if np.any(np.abs(det) <= 1e-14):
        raise SingularJacobian("Jacobian determinant ~ 0")
    tr_jtj = np.sum(jac ** 2, axis=(-2, -1))
    return tr_jtj / (2.0 * np.abs(det))


def qa_general(jac, metric):
    """Alignment measure for a full Jacobian against a packed metric."""
    jac = np.asarray(jac, dtype=float)
    metric = as_symmat(metric)
    if np.any(sym_det(metric) <= 0):
        raise NonPositiveMetric("metric is not positive definite")
    ma, mb, mc = metric[..., 0], metric[..., 1], metric[..., 2]
    m = np.stack([np.stack([ma, mb], axis=-1),
                  np.stack([mb, mc], axis=-1)], axis=-2)
    a = np.swapaxes(jac, -2, -1) @ m @ jac
    det = a[..., 0, 0] * a[..., 1, 1] - a[..., 0, 1] * a[..., 1, 0]
    return (a[..., 0, 0] + a[..., 1, 1]) / (2.0 * np.sqrt(det))


def jacobian_fd_from_mesh(mesh):
    """Recover full 2x2 node Jacobians from a tabulated mesh by central
    differences of the periodic displacement x - xi (mesh is the lift,
    shape (n, n, 2), seam not stored)."""
    mesh = np.asarray(mesh, dtype=float)
    n = mesh.shape[0]
    h = 1.0 / n
    ii, jj = np.meshgrid(np.arange(n) * h, np.arange(n) * h, indexing="ij")
    u = mesh - np.stack([ii, jj], axis=-1)
    du_dxi = (np.roll(u, -1, axis=0) - np.roll(u, 1, axis=0)) / (2 * h)
    du_deta = (np.roll(u, -1, axis=1) - np.roll(u, 1, axis=1)) / (2 * h)
    jac = np.stack([du_dxi, du_deta], axis=-1)
    jac[..., 0, 0] += 1.0
    jac[..., 1, 1] += 1.0
    return jac


def probe_feature_background(rho):
    """Node indices of max and min density."""
    hi = np.unravel_index(int(np.argmax(rho)), rho.shape)
    lo = np.unravel_index(int(np.argmin(rho)), rho.shape)
    return hi, lo


def probes_product(rho1, rho2):
    """Four probe classes for a two-train density: both features,
    first feature only, second feature only, neither.

    Many nodes tie at the crest of a feature, so near-ties of the
    primary factor are broken by minimizing the other factor (cleanest
    representative of the class).
    """
    prod = rho1 * rho2

    def best(primary, other, mask):
        masked = np.where(mask, primary, -np.inf)
        top = masked.max()
        tied = masked >= top - 1e-9 * max(1.0, abs(top))
        cand = np.where(tied, other, np.inf)
        return np.unravel_index(int(np.argmin(cand)), primary.shape)

    ones = np.ones_like(prod, dtype=bool)
    return [
        best(prod, rho1 + rho2, ones),
        best(rho1, rho2, rho2 < PROBE_RHO_CUT),
        best(rho2, rho1, rho1 < PROBE_RHO_CUT),
        best(-prod, rho1 + rho2, ones),
    ]


def predicted_metric_field(density, x, y, theta):
    """Feature-model metric at the physical points (x, y), packed.

    Single trains and level sets use the single-feature model; an
    orthogonal product uses the two-family model; a non-orthogonal
    product falls back to the single-feature model along whichever
    train dominates locally (only its Q_a range is reported, no
    acceptance bound applies).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if isinstance(density, Uniform):
        one = np.ones_like(x)
        return np.stack([theta * one, 0.0 * one, theta * one], axis=-1)
    if isinstance(density, SingleTrain):
        rho = density(x, y)
        return predicted_metric_single(rho, theta, density.train.e)
    if isinstance(density, ProductTrains):
        rho1, rho2 = density.factors(x, y)
        if density.orthogonal:
            th1 = theta_separable(density.train1)
            th2 = theta_separable(density.train2)
            return predicted_metric_product(rho1, rho2, th1, th2,
                                            density.train1.e)
        m1 = predicted_metric_single(rho1 * rho2, theta, density.train1.e)
        m2 = predicted_metric_single(rho1 * rho2, theta, density.train2.e)
        pick = (rho1 >= rho2)[..., None]
        return np.where(pick, m1, m2)
    if isinstance(density, LevelSet):
        rho = density(x, y)
        return predicted_metric_levelset(rho, theta, density.grad_psi(x, y))
    raise TypeError("no feature model for %s" % type(density).__name__)


def build_report(density, mesh, jac, mode, residual=None, steps=0,
                 converged=True, theta=None):
    """Assemble the anisotropy report dictionary.

    mesh: (n, n, 2) lift of node positions; jac: packed (n, n, 3) or
    full (n, n, 2, 2); residual: optional {"max", "cv"} summary.
    """
    mesh = np.asarray(mesh, dtype=float)
    n = mesh.shape[0]
    if theta is None:
        theta = theta_2d(density)
    x, y = mesh[..., 0], mesh[..., 1]

    jac = np.asarray(jac, dtype=float)
    full = jac.ndim >= 2 and jac.shape[-2:] == (2, 2)
    qs_field = qs_general(jac) if full else qs(jac)

    if isinstance(density, ProductTrains):
        rho1, rho2 = density.factors(x, y)
        probes = [float(qs_field[idx]) for idx in probes_product(rho1, rho2)]
        feature, background = max(probes), min(probes)
    else:
        rho = density(x, y)
        hi, lo = probe_feature_background(rho)
        feature, background = float(qs_field[hi]), float(qs_field[lo])
        probes = []

    pred = predicted_metric_field(density, x, y, theta)
    qa_field = qa_general(jac, pred) if full else qa(jac, pred)

    report = {
        "theta": float(theta),
        "n": int(n),
        "mode": mode,
        "qs": {"feature": feature, "background": background,
               "probes": probes},
        "qa": {"min": float(qa_field.min()), "max": float(qa_field.max())},
        "residual": {"max": float(residual["max"]) if residual else 0.0,
                     "cv": float(residual["cv"]) if residual else 0.0},
        "steps": int(steps),
        "converged": bool(converged),
    }
    return report


def _angle_deg(v, w):
    """Unsigned angle between two directions (orientation ignored)."""
    dot = abs(float(np.dot(v, w))) / (np.linalg.norm(v) * np.linalg.norm(w))
    return float(np.degrees(np.arccos(min(dot, 1.0))))


def feature_alignment_angles(density, mesh, jac):
    """Angle (degrees) between the computed minor eigenvector and each
    train's feature normal, at the single-feature probe of that train."""
    if not isinstance(density, ProductTrains):
        raise TypeError("feature_alignment_angles expects a two-train density")
    mesh = np.asarray(mesh, dtype=float)
    x, y = mesh[..., 0], mesh[..., 1]
    rho1, rho2 = density.factors(x, y)
    _, _, v1, _ = eig_sym2_field(as_symmat(jac))
    probes = probes_product(rho1, rho2)
    return [_angle_deg(v1[probes[1]], density.train1.e),
            _angle_deg(v1[probes[2]], density.train2.e)]


def curve_alignment_angles(density, mesh, jac, samples=20):
    """Angles along the level-set curve Psi = 0.

    At `samples` equispaced curve points, find the nearest mesh node in
    the torus metric and compare its minor eigenvector with the
    predicted feature normal grad(Psi)/|grad(Psi)| at that node.
    """
    if not isinstance(density, LevelSet):
        raise TypeError("curve_alignment_angles expects a level-set density")
    mesh = np.asarray(mesh, dtype=float)
    pos = mesh - np.floor(mesh)
    _, _, v1, _ = eig_sym2_field(as_symmat(jac))
    xs = np.arange(samples) / samples
    ys = density.curve_amplitude * np.sin(2 * np.pi * xs) \
        + density.curve_offset
    angles = []
    for xc, yc in zip(xs, ys):
        dx = pos[..., 0] - xc
        dy = pos[..., 1] - yc
        dx -= np.round(dx)
        dy -= np.round(dy)
        idx = np.unravel_index(int(np.argmin(dx ** 2 + dy ** 2)), dx.shape)
        normal = density.grad_psi(pos[idx][0], pos[idx][1])
        angles.append(_angle_deg(v1[idx], normal))
    return np.array(angles)


def mesh_distance(mesh_a, mesh_b):
    """Max torus distance between corresponding nodes of two meshes."""
    d = np.asarray(mesh_a, dtype=float) - np.asarray(mesh_b, dtype=float)
    d -= np.round(d)
    return float(np.sqrt((d ** 2).sum(axis=-1)).max())
