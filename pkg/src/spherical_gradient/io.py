"""CSV and JSON readers/writers used by the command line."""

import csv
import io
import json

import numpy as np

from .errors import EmptyData
from .potential import spec_from_dict
from .sphere import lonlat_to_xyz, xyz_to_lonlat


class InputError(ValueError):
    """Malformed input file; message carries the file and line number."""


XYZ_HEADER = ["x", "y", "z"]
LONLAT_HEADER = ["lon_deg", "lat_deg"]


def read_points(path):
    """Read a unit-vector (x,y,z) or geographic (lon_deg,lat_deg) CSV.

    Returns (points, format).  Rows are renormalized; blank lines and lines
    starting with '#' are skipped.
    """
    with open(path, newline="") as f:
        text = f.read()
    rows = []
    header = None
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        cells = [c.strip() for c in next(csv.reader([line]))]
        if header is None:
            header = [c.lower() for c in cells]
            if header[:3] == XYZ_HEADER:
                fmt = "xyz"
            elif header[:2] == LONLAT_HEADER:
                fmt = "lonlat"
            else:
                raise InputError(f"{path}:{lineno}: expected header 'x,y,z' or 'lon_deg,lat_deg', got {line!r}")
            continue
        width = 3 if fmt == "xyz" else 2
        try:
            vals = [float(c) for c in cells[:width]]
        except ValueError:
            raise InputError(f"{path}:{lineno}: non-numeric value in {line!r}") from None
        if len(vals) < width or not np.all(np.isfinite(vals)):
            raise InputError(f"{path}:{lineno}: expected {width} finite numbers, got {line!r}")
        if fmt == "xyz":
            if np.linalg.norm(vals) == 0:
                raise InputError(f"{path}:{lineno}: zero vector")
        else:
            lon, lat = vals
            if not (-180.0 <= lon <= 180.0) or not (-90.0 <= lat <= 90.0):
                raise InputError(f"{path}:{lineno}: lon/lat out of range in {line!r}")
        rows.append((lineno, vals))
    if header is None or not rows:
        raise EmptyData(f"{path}: no data rows")
    arr = np.array([v for _, v in rows], dtype=float)
    if fmt == "xyz":
        pts = arr / np.linalg.norm(arr, axis=1, keepdims=True)
    else:
        pts = lonlat_to_xyz(arr[:, 0], arr[:, 1])
    return pts, fmt


def write_points(points, path_or_file, fmt="xyz"):
    points = np.asarray(points, dtype=float).reshape(-1, 3) if len(points) else np.zeros((0, 3))

    def _write(f):
        w = csv.writer(f, lineterminator="\n")
        if fmt == "xyz":
            w.writerow(XYZ_HEADER)
            for p in points:
                w.writerow([f"{v:.17g}" for v in p])
        elif fmt == "lonlat":
            w.writerow(LONLAT_HEADER)
            lon, lat = xyz_to_lonlat(points)
            for a, b in zip(np.atleast_1d(lon), np.atleast_1d(lat)):
                w.writerow([f"{a:.17g}", f"{b:.17g}"])
        else:
            raise ValueError(f"unknown format {fmt!r}")

    if hasattr(path_or_file, "write"):
        _write(path_or_file)
    else:
        with open(path_or_file, "w", newline="") as f:
            _write(f)


def read_json(path):
    try:
        with open(path) as f:
            return json.load(f)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from None


def read_model(path):
    d = read_json(path)
    if not isinstance(d, dict):
        raise InputError(f"{path}:1: model spec must be a JSON object")
    try:
        return spec_from_dict(d)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: invalid model spec ({exc})") from None


def write_json(obj, path_or_file):
    if hasattr(path_or_file, "write"):
        json.dump(obj, path_or_file, indent=2)
        path_or_file.write("\n")
    else:
        with open(path_or_file, "w") as f:
            json.dump(obj, f, indent=2)
            f.write("\n")
