"""Command-line driver: meshkit <exact|pma|analyze> [options].

Runs one of the bundled density presets (or an inline density from a
JSON config), produces the redistributed mesh by the exact separable
construction or by parabolic relaxation, and exports mesh/ellipse CSV,
an anisotropy report, and an SVG rendering.
"""

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import analysis, io
from .density import ProductTrains, SingleTrain, Uniform, density_from_json, \
    theta_2d
from .errors import ConfigError, MeshkitError
from .exact import exact_jacobian, exact_map, solve_separable
from .metric import ellipse_from_jacobian
from .pma import PmaParams, equidist_residual, mesh_from_potential, pma_solve
from .presets import PRESETS, get_preset

EMIT_CHOICES = ("mesh", "ellipses", "residual", "report", "svg")

_CONFIG_KEYS = {"mode", "preset", "density", "n", "gamma", "dt", "tol",
                "max_steps", "emit", "out", "seed", "ellipse_scale"}


@dataclass
class RunConfig:
    mode: str = "pma"
    preset: str = None
    density_doc: dict = None
    n: int = 60
    gamma: float = 0.1
    dt: float = 1e-3
    tol: float = 1e-2
    max_steps: int = 200000
    emit: tuple = EMIT_CHOICES
    out: str = "."
    seed: int = 0
    ellipse_scale: float = None   # None -> h/2
    mesh_path: str = None         # analyze mode input


def _parse_emit(text):
    parts = tuple(p.strip() for p in text.split(",") if p.strip())
    for p in parts:
        if p not in EMIT_CHOICES:
            raise ConfigError("emit: unknown artifact %r (choose from %s)"
                              % (p, ", ".join(EMIT_CHOICES)))
    return parts


def load_config(args):
    """Merge defaults, an optional JSON config file, and CLI flags
    (flags win)."""
    cfg = RunConfig(mode=args.mode)
    if args.config:
        try:
            with open(args.config) as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise ConfigError("config: %s" % exc)
        except ValueError as exc:
            raise ConfigError("config: invalid JSON: %s" % exc)
        if not isinstance(doc, dict):
            raise ConfigError("config: top level must be an object")
        for key in doc:
            if key not in _CONFIG_KEYS:
                raise ConfigError("config: unknown key %r" % key)
        if "mode" in doc and doc["mode"] != args.mode:
            raise ConfigError("config: mode %r conflicts with subcommand %r"
                              % (doc["mode"], args.mode))
        cfg.preset = doc.get("preset")
        cfg.density_doc = doc.get("density")
        for key in ("n", "gamma", "dt", "tol", "max_steps", "seed",
                    "ellipse_scale", "out"):
            if key in doc:
                setattr(cfg, key, doc[key])
        if "emit" in doc:
            raw = doc["emit"]
            cfg.emit = _parse_emit(",".join(raw) if isinstance(raw, list)
                                   else raw)
    if args.preset is not None:
        cfg.preset = args.preset
    for key in ("n", "gamma", "dt", "tol", "seed", "ellipse_scale"):
        val = getattr(args, key)
        if val is not None:
            setattr(cfg, key, val)
    if args.max_steps is not None:
        cfg.max_steps = args.max_steps
    if args.emit is not None:
        cfg.emit = _parse_emit(args.emit)
    if args.out is not None:
        cfg.out = args.out
    elif cfg.out == "." and os.environ.get("MESHKIT_OUT"):
        cfg.out = os.environ["MESHKIT_OUT"]
    cfg.mesh_path = getattr(args, "mesh", None)

    if (cfg.preset is None) == (cfg.density_doc is None):
        raise ConfigError("config: exactly one of preset / density required")
    if cfg.preset is not None and cfg.preset not in PRESETS:
        raise ConfigError("preset: unknown name %r" % cfg.preset)
    if cfg.n < 8:
        raise ConfigError("n: must be >= 8")
    if cfg.mode == "analyze" and not cfg.mesh_path:
        raise ConfigError("analyze: --mesh FILE is required")
    return cfg


def _resolve_density(cfg):
    if cfg.preset is not None:
        return get_preset(cfg.preset)
    return density_from_json(cfg.density_doc)


def _check_separable(density):
    if isinstance(density, (Uniform, SingleTrain)):
        return
    if isinstance(density, ProductTrains) and density.orthogonal:
        return
    raise ConfigError(
        "mode=exact requires a separable density "
        "(single train or orthogonal product)")


def _ellipse_records(jac, mesh, scale):
    pos = mesh - np.floor(mesh)
    n = pos.shape[0]
    out = []
    for j in range(n):
        for i in range(n):
            out.append((i, j,
                        ellipse_from_jacobian(jac[i, j], pos[i, j], scale)))
    return out


def _write_artifacts(cfg, density, mesh, jac_packed, report, residual_field):
    os.makedirs(cfg.out, exist_ok=True)
    scale = cfg.ellipse_scale if cfg.ellipse_scale else 0.5 / cfg.n
    paths = {}
    if "mesh" in cfg.emit:
        paths["mesh"] = p = os.path.join(cfg.out, "mesh.csv")
        io.export_mesh(mesh, p)
    records = None
    if "ellipses" in cfg.emit and jac_packed is not None:
        records = _ellipse_records(jac_packed, mesh, scale)
        paths["ellipses"] = p = os.path.join(cfg.out, "ellipses.csv")
        io.export_ellipses(records, p)
    if "residual" in cfg.emit and residual_field is not None:
        paths["residual"] = p = os.path.join(cfg.out, "residual.csv")
        io.export_residual(residual_field, p)
    if "report" in cfg.emit:
        paths["report"] = p = os.path.join(cfg.out, "report.json")
        io.export_report(report, p)
    if "svg" in cfg.emit:
        paths["svg"] = p = os.path.join(cfg.out, "mesh.svg")
        io.render_svg(mesh, records or [], p)
    return paths


def run(cfg):
    """Execute one configured run; returns the process exit status."""
    density = _resolve_density(cfg)
    theta = theta_2d(density)

    if cfg.mode == "exact":
        _check_separable(density)
        sol = solve_separable(density)
        xi = np.arange(cfg.n) / cfg.n
        XI, ETA = np.meshgrid(xi, xi, indexing="ij")
        mx, my = exact_map(sol, XI, ETA, reduce=False)
        mesh = np.stack([mx, my], axis=-1)
        jac = exact_jacobian(sol, XI, ETA)
        det = jac[..., 0] * jac[..., 2] - jac[..., 1] ** 2
        res = density(mesh[..., 0], mesh[..., 1]) * det / theta - 1.0
        report = analysis.build_report(density, mesh, jac, "exact",
                                       residual={"max": np.abs(res).max(),
                                                 "cv": res.std()},
                                       steps=0, converged=True, theta=theta)
        _write_artifacts(cfg, density, mesh, jac, report, res)
        return 0

    if cfg.mode == "pma":
        params = PmaParams(n=cfg.n, gamma=cfg.gamma, dt=cfg.dt, tol=cfg.tol,
                           max_steps=cfg.max_steps)
        state, conv = pma_solve(density, params)
        mesh = mesh_from_potential(state)
        jac = state.jacobian()
        res, summary = equidist_residual(state, density, theta=theta)
        report = analysis.build_report(density, mesh, jac, "pma",
                                       residual=summary, steps=conv.steps,
                                       converged=conv.converged, theta=theta)
        _write_artifacts(cfg, density, mesh, jac, report, res.values)
        return 0 if conv.converged else 2

    # analyze: recover Jacobians from a tabulated mesh by differencing
    mesh = io.read_mesh(cfg.mesh_path)
    jac = analysis.jacobian_fd_from_mesh(mesh)
    det = jac[..., 0, 0] * jac[..., 1, 1] - jac[..., 0, 1] * jac[..., 1, 0]
    v = density(mesh[..., 0], mesh[..., 1]) * det
    res = v / theta - 1.0
    report = analysis.build_report(density, mesh, jac, "analyze",
                                   residual={"max": np.abs(res).max(),
                                             "cv": v.std() / v.mean()},
                                   steps=0, converged=True, theta=theta)
    cfg.n = mesh.shape[0]
    # ellipses need a symmetric Jacobian; use the symmetric part explicitly
    sym = np.stack([jac[..., 0, 0],
                    0.5 * (jac[..., 0, 1] + jac[..., 1, 0]),
                    jac[..., 1, 1]], axis=-1)
    _write_artifacts(cfg, density, mesh, sym, report, res)
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="meshkit",
        description="Doubly-periodic adaptive mesh redistribution by "
                    "Monge-Ampere equidistribution.")
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode, text in (("exact", "separable closed-form mesh"),
                       ("pma", "parabolic relaxation mesh"),
                       ("analyze", "re-analyze a tabulated mesh")):
        p = sub.add_parser(mode, help=text)
        p.add_argument("--preset", choices=sorted(PRESETS))
        p.add_argument("--config", metavar="FILE")
        p.add_argument("--n", type=int)
        p.add_argument("--gamma", type=float)
        p.add_argument("--dt", type=float)
        p.add_argument("--tol", type=float)
        p.add_argument("--max-steps", dest="max_steps", type=int)
        p.add_argument("--out", metavar="DIR")
        p.add_argument("--emit", metavar="LIST",
                       help="comma list of " + ",".join(EMIT_CHOICES))
        p.add_argument("--seed", type=int)
        p.add_argument("--ellipse-scale", dest="ellipse_scale", type=float)
        if mode == "analyze":
            p.add_argument("--mesh", metavar="FILE", required=True)
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        return run(load_config(args))
    except MeshkitError as exc:
        print("meshkit: %s" % exc, file=sys.stderr)
        return 1
    except (ValueError, KeyError) as exc:
        print("meshkit: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
