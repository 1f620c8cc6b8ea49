"""Artifact serialization: mesh/ellipse/residual CSV, report JSON, SVG.

All text artifacts use LF newlines and are deterministic for identical
inputs.  Floats are written with 17 significant digits so a round-trip
through the files is exact in double precision.
"""

import numpy as np

from .errors import MeshkitError


def _f(x):
    """Shortest-faithful decimal for a double."""
    return "%.17g" % float(x)


def _open_w(path):
    try:
        return open(path, "w", newline="\n")
    except OSError as exc:
        raise MeshkitError("cannot write %s: %s" % (path, exc))


# ---------------------------------------------------------------------------
# CSV

def export_mesh(mesh, path):
    """Write node positions as `i,j,xi,eta,x,y`, i fastest.

    mesh is the (n, n, 2) lift; the seam row/column is duplicated on
    output using the map's equivariance x(xi + e_k) = x(xi) + e_k, so
    the file holds (n+1)^2 data rows.
    """
    mesh = np.asarray(mesh, dtype=float)
    n = mesh.shape[0]
    ext = np.empty((n + 1, n + 1, 2))
    ext[:n, :n] = mesh
    ext[n, :n] = mesh[0] + (1.0, 0.0)
    ext[:n, n] = mesh[:, 0] + (0.0, 1.0)
    ext[n, n] = mesh[0, 0] + (1.0, 1.0)
    with _open_w(path) as fh:
        fh.write("i,j,xi,eta,x,y\n")
        for j in range(n + 1):
            for i in range(n + 1):
                fh.write("%d,%d,%s,%s,%s,%s\n"
                         % (i, j, _f(i / n), _f(j / n),
                            _f(ext[i, j, 0]), _f(ext[i, j, 1])))


def read_mesh(path):
    """Read a mesh CSV back into the (n, n, 2) lift (seam dropped)."""
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1)
    except OSError as exc:
        raise MeshkitError("cannot read %s: %s" % (path, exc))
    side = int(round(np.sqrt(data.shape[0])))
    if side * side != data.shape[0] or side < 2:
        raise MeshkitError("%s: expected (n+1)^2 rows, got %d"
                           % (path, data.shape[0]))
    n = side - 1
    mesh = np.empty((n, n, 2))
    ii = data[:, 0].astype(int)
    jj = data[:, 1].astype(int)
    keep = (ii < n) & (jj < n)
    mesh[ii[keep], jj[keep]] = data[keep][:, 4:6]
    return mesh


def export_ellipses(records, path):
    """Write per-node ellipses as `i,j,cx,cy,a,b,angle`."""
    with _open_w(path) as fh:
        fh.write("i,j,cx,cy,a,b,angle\n")
        for i, j, rec in records:
            fh.write("%d,%d,%s,%s,%s,%s,%s\n"
                     % (i, j, _f(rec.center[0]), _f(rec.center[1]),
                        _f(rec.semi_axes[0]), _f(rec.semi_axes[1]),
                        _f(rec.angle)))


def export_residual(residual, path):
    """Write the per-node equidistribution residual as `i,j,value`."""
    residual = np.asarray(residual, dtype=float)
    n = residual.shape[0]
    with _open_w(path) as fh:
        fh.write("i,j,value\n")
        for j in range(n):
            for i in range(n):
                fh.write("%d,%d,%s\n" % (i, j, _f(residual[i, j])))


# ---------------------------------------------------------------------------
# report JSON (hand-rolled so float formatting and key order are pinned)

def _json_value(v, indent):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return "%d" % v
    if isinstance(v, (float, np.floating)):
        return _f(v)
    if isinstance(v, str):
        return '"%s"' % v.replace("\\", "\\\\").replace('"', '\\"')
    if isinstance(v, dict):
        if not v:
            return "{}"
        pad = "  " * (indent + 1)
        items = ",\n".join('%s"%s": %s' % (pad, k, _json_value(u, indent + 1))
                           for k, u in v.items())
        return "{\n%s\n%s}" % (items, "  " * indent)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_json_value(u, indent) for u in v) + "]"
    raise TypeError("cannot serialize %r" % type(v))


def export_report(report, path):
    with _open_w(path) as fh:
        fh.write(_json_value(report, 0) + "\n")


# ---------------------------------------------------------------------------
# SVG

_SVG_HEAD = ('<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 1 1" '
             'width="720" height="720">\n'
             '<rect width="1" height="1" fill="white"/>\n'
             '<g transform="translate(0,1) scale(1,-1)">\n')


def _pt(x, y):
    return "%.6g,%.6g" % (x, y)


def render_svg(mesh, ellipses, path):
    """Render the mesh (two polyline families) plus optional ellipses.

    mesh is the (n, n, 2) lift; each polyline is closed across the seam
    by the translated first node.  ellipses is an iterable of
    (i, j, EllipseRecord), possibly empty.
    """
    mesh = np.asarray(mesh, dtype=float)
    n = mesh.shape[0]
    lines = [_SVG_HEAD]
    lines.append('<g fill="none" stroke="black" stroke-width="0.0015">\n')
    for i in range(n):
        pts = [_pt(*mesh[i, j]) for j in range(n)]
        pts.append(_pt(mesh[i, 0, 0], mesh[i, 0, 1] + 1.0))
        lines.append('<polyline points="%s"/>\n' % " ".join(pts))
    for j in range(n):
        pts = [_pt(*mesh[i, j]) for i in range(n)]
        pts.append(_pt(mesh[0, j, 0] + 1.0, mesh[0, j, 1]))
        lines.append('<polyline points="%s"/>\n' % " ".join(pts))
    lines.append("</g>\n")
    if ellipses:
        lines.append('<g fill="none" stroke="crimson" '
                     'stroke-width="0.001">\n')
        for _, _, rec in ellipses:
            lines.append(
                '<ellipse rx="%.6g" ry="%.6g" transform="translate(%.6g,%.6g)'
                ' rotate(%.6g)"/>\n'
                % (rec.semi_axes[0], rec.semi_axes[1],
                   rec.center[0], rec.center[1], np.degrees(rec.angle)))
        lines.append("</g>\n")
    lines.append("</g>\n</svg>\n")
    with _open_w(path) as fh:
        fh.write("".join(lines))
