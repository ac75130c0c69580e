"""Map files, point-cloud CSV and PPM rasters."""
from __future__ import annotations

import csv
import json
from fractions import Fraction

import numpy as np

from .errors import MapFormatError
from .poly import Poly
from .ratmap import RatMap, parse_map
from .scalars import QI


def _coeff(x, exact: bool):
    # a coefficient is a number, a string like "1/2", or a pair [re, im] of those
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise MapFormatError(f"complex coefficient must be [re, im], got {x!r}")
        re, im = (_real(v, exact) for v in x)
    elif isinstance(x, dict):
        re, im = _real(x.get("re", 0), exact), _real(x.get("im", 0), exact)
    else:
        re, im = _real(x, exact), (Fraction(0) if exact else 0.0)
    return QI(re, im) if exact else complex(re, im)


def _real(v, exact: bool):
    if isinstance(v, bool):
        raise MapFormatError("booleans are not coefficients")
    try:
        if exact:
            # decimal strings and floats are read at face value, e.g. 0.1 -> 1/10
            return Fraction(str(v)) if isinstance(v, float) else Fraction(v)
        return float(Fraction(v)) if isinstance(v, str) else float(v)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise MapFormatError(f"bad coefficient {v!r}: {exc}") from None


def map_from_json(obj) -> RatMap:
    """Build a map from ``{"num": [...], "den": [...], "mode": "exact"|"float"}`` or ``{"expr": "..."}``.

    Coefficient lists run from the constant term upwards; ``den`` defaults to 1.
    """
    if isinstance(obj, str):
        return parse_map(obj)
    if not isinstance(obj, dict):
        raise MapFormatError("map must be a JSON object or an expression string")
    mode = obj.get("mode", "exact")
    if mode not in ("exact", "float"):
        raise MapFormatError(f"unknown mode {mode!r}")
    exact = mode == "exact"
    if "expr" in obj:
        return parse_map(str(obj["expr"]), exact=exact)
    if "num" not in obj:
        raise MapFormatError("map needs 'num' coefficients or an 'expr'")
    num = obj["num"]
    den = obj.get("den", [1])
    if not isinstance(num, list) or not isinstance(den, list):
        raise MapFormatError("'num' and 'den' must be lists")
    try:
        return RatMap(Poly([_coeff(c, exact) for c in num], exact),
                      Poly([_coeff(c, exact) for c in den], exact))
    except ZeroDivisionError:
        raise MapFormatError("denominator is the zero polynomial") from None


def load_map(path: str) -> RatMap:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise MapFormatError(f"cannot read map file {path}: {exc.strerror}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError:
        # a bare expression such as "z^2 + 1" is accepted too
        return parse_map(text.strip())
    return map_from_json(obj)


def _coeff_json(c, exact):
    if exact:
        return [str(c.re), str(c.im)]
    c = complex(c)
    return [c.real, c.imag]


def map_to_json(f: RatMap) -> dict:
    return {"mode": f.mode,
            "num": [_coeff_json(c, f.exact) for c in f.num.coeffs] or [_coeff_json(0, f.exact)],
            "den": [_coeff_json(c, f.exact) for c in f.den.coeffs]}


def write_cloud_csv(cloud, path: str) -> None:
    z = cloud.affine()
    inf = ~np.isfinite(z)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["re", "im", "is_infinite"])
        for v, flag in zip(z, inf):
            if flag:
                w.writerow([0, 0, 1])
            else:
                w.writerow([repr(float(v.real)), repr(float(v.imag)), 0])


def read_cloud_csv(path: str):
    from .julia import PointCloud

    vals = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            if int(row["is_infinite"]):
                vals.append(complex(np.inf, 0))
            else:
                vals.append(complex(float(row["re"]), float(row["im"])))
    return PointCloud.from_affine(np.array(vals, dtype=complex))


def write_ppm(cloud, path: str, width: int = 512, margin: float = 0.05) -> None:
    """Binary P6 raster of the finite cloud points: black on white, aspect preserved."""
    if width < 2:
        raise ValueError("width must be at least 2")
    z = cloud.affine()
    z = z[np.isfinite(z)]
    lo_x, hi_x = z.real.min(), z.real.max()
    lo_y, hi_y = z.imag.min(), z.imag.max()
    span = max(hi_x - lo_x, hi_y - lo_y, 1e-12) * (1 + 2 * margin)
    cx, cy = (lo_x + hi_x) / 2, (lo_y + hi_y) / 2
    height = max(2, int(round(width * max(hi_y - lo_y, 1e-12 * span) / max(hi_x - lo_x, 1e-12 * span))))
    height = min(height, 4 * width)
    scale = (width - 1) / span
    img = np.full((height, width, 3), 255, dtype=np.uint8)
    col = np.round((z.real - cx) * scale + (width - 1) / 2).astype(int)
    row = np.round((cy - z.imag) * scale + (height - 1) / 2).astype(int)
    ok = (col >= 0) & (col < width) & (row >= 0) & (row < height)
    img[row[ok], col[ok]] = 0
    with open(path, "wb") as fh:
        fh.write(f"P6\n{width} {height}\n255\n".encode())
        fh.write(img.tobytes())
