"""Grid export and import: CSV (+ JSON sidecar), JSON, PPM and SVG heatmaps.

Every writer goes through :func:`atomic_write`, so a reader never sees a
half-written file.
"""

import json
import os
import tempfile

import numpy as np

from .errors import DomainError
from .wigner import PhaseSpaceGrid

__all__ = [
    "atomic_write",
    "write_csv",
    "read_csv",
    "write_json",
    "read_json",
    "write_ppm",
    "write_svg",
    "colormap",
    "write_grid",
    "FORMATS",
]

CSV_MAGIC = "# morsewig grid v1"
FORMATS = ("csv", "json", "ppm", "svg")


def _umask():
    mask = os.umask(0)
    os.umask(mask)
    return mask


def atomic_write(path, data):
    """Write ``data`` (str or bytes) to a temp file beside ``path``, then rename."""
    path = os.fspath(path)
    folder = os.path.dirname(os.path.abspath(path))
    binary = isinstance(data, (bytes, bytearray))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=folder)
    try:
        with os.fdopen(fd, "wb" if binary else "w", **({} if binary else {"encoding": "utf-8", "newline": "\n"})) as fh:
            fh.write(data)
        os.chmod(tmp, 0o666 & ~_umask())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _clean(text):
    return str(text).replace("\n", " ").replace("\r", " ")


def _geometry(grid):
    return {
        "x_min": grid.x_min, "x_max": grid.x_max, "nx": grid.nx,
        "p_min": grid.p_min, "p_max": grid.p_max, "np": grid.np,
    }


def _meta_doc(grid):
    doc = _geometry(grid)
    doc["meta"] = grid.meta
    return doc


def write_csv(grid, path, sidecar=True):
    """CSV with one ``x,p,w`` row per cell, x-major, 17 significant digits.

    The JSON sidecar ``<path>.meta.json`` carries geometry and metadata.
    """
    if grid.values is None:
        raise DomainError("cannot export a grid without values")
    meta = grid.meta
    header = (
        f"{CSV_MAGIC}; N={meta.get('N', '')}; method={meta.get('method', '')}; "
        f"label={_clean(meta.get('label', ''))}"
    )
    xx, pp = np.meshgrid(grid.xs, grid.ps, indexing="ij")
    rows = np.column_stack([xx.ravel(), pp.ravel(), grid.values.ravel()])
    lines = [header, "x,p,w"]
    lines.extend("%.17g,%.17g,%.17g" % tuple(r) for r in rows)
    atomic_write(path, "\n".join(lines) + "\n")
    if sidecar:
        atomic_write(os.fspath(path) + ".meta.json", json.dumps(_meta_doc(grid), indent=1, default=str) + "\n")


def _parse_header(line):
    if not line.startswith(CSV_MAGIC):
        raise DomainError(f"not a morsewig grid file (header {line[:40]!r})")
    meta = {}
    rest = line[len(CSV_MAGIC):]
    label_at = rest.find("; label=")
    if label_at >= 0:
        meta["label"] = rest[label_at + len("; label="):]
        rest = rest[:label_at]
    for part in rest.split(";"):
        if "=" in part:
            key, value = part.strip().split("=", 1)
            meta[key] = value
    if meta.get("N", "").isdigit():
        meta["N"] = int(meta["N"])
    return meta


def read_csv(path):
    """Parse a grid written by :func:`write_csv`; values round-trip bit for bit."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    meta = _parse_header(lines[0])
    body = [ln for ln in lines[1:] if ln and not ln.startswith("x,")]
    data = np.array([[float(v) for v in ln.split(",")] for ln in body])
    x_vals = np.unique(data[:, 0])
    nx = x_vals.size
    n_p = data.shape[0] // nx
    if nx * n_p != data.shape[0]:
        raise DomainError("CSV rows do not form a rectangular grid")
    values = data[:, 2].reshape(nx, n_p)
    side = os.fspath(path) + ".meta.json"
    if os.path.exists(side):
        with open(side, encoding="utf-8") as fh:
            meta.update(json.load(fh).get("meta", {}))
    return PhaseSpaceGrid(
        float(data[0, 0]), float(data[-1, 0]), nx, float(data[0, 1]), float(data[n_p - 1, 1]), n_p, values, meta
    )


def write_json(grid, path):
    doc = _meta_doc(grid)
    doc["values"] = grid.values.tolist()
    atomic_write(path, json.dumps(doc, default=str) + "\n")


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return PhaseSpaceGrid(
        doc["x_min"], doc["x_max"], doc["nx"], doc["p_min"], doc["p_max"], doc["np"],
        np.array(doc["values"], dtype=float), doc.get("meta", {}),
    )


def colormap(values):
    """Two-slope diverging map to ``uint8`` RGB, scaled to ``max|W|``.

    Zero is white; positive values fade to red, negative to blue.
    """
    v = np.asarray(values, dtype=float)
    peak = np.max(np.abs(v))
    t = v / peak if peak > 0 else np.zeros_like(v)
    fade = 1.0 - np.abs(t)
    rgb = np.empty(v.shape + (3,))
    pos = t >= 0
    rgb[..., 0] = np.where(pos, 1.0, fade)
    rgb[..., 1] = fade
    rgb[..., 2] = np.where(pos, fade, 1.0)
    return np.rint(255.0 * rgb).astype(np.uint8)


def _image(grid):
    # Rows of the picture run over p, top row = largest p; columns over x.
    return colormap(grid.values.T[::-1])


def write_ppm(grid, path, scale=1):
    """Binary P6 image, one ``scale x scale`` block per cell."""
    img = _image(grid)
    if scale > 1:
        img = np.repeat(np.repeat(img, scale, axis=0), scale, axis=1)
    h, w, _ = img.shape
    atomic_write(path, b"P6\n%d %d\n255\n" % (w, h) + img.tobytes())


def write_svg(grid, path, cell=4):
    img = _image(grid)
    h, w, _ = img.shape
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w * cell}" height="{h * cell}" '
        f'viewBox="0 0 {w * cell} {h * cell}" shape-rendering="crispEdges">',
        f"<title>{_clean(grid.meta.get('label', 'Wigner function'))}</title>",
    ]
    for r in range(h):
        for c in range(w):
            red, green, blue = img[r, c]
            parts.append(
                f'<rect x="{c * cell}" y="{r * cell}" width="{cell}" height="{cell}" '
                f'fill="#{red:02x}{green:02x}{blue:02x}"/>'
            )
    parts.append("</svg>")
    atomic_write(path, "\n".join(parts) + "\n")


def write_grid(grid, path):
    """Dispatch on the file extension."""
    ext = os.path.splitext(os.fspath(path))[1].lower().lstrip(".")
    writers = {"csv": write_csv, "json": write_json, "ppm": write_ppm, "svg": write_svg}
    if ext not in writers:
        raise DomainError(f"unknown output format {ext!r}; expected one of {FORMATS}")
    writers[ext](grid, path)
