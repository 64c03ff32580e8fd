"""Null vs quadratic model selection on bright-star positions.

The catalog is not bundled.  Supply a CSV with columns lon_deg,lat_deg
(right ascension and declination in degrees; RA above 180 is wrapped) and
optionally vmag; rows with vmag > --max-mag are dropped, which for the
Yale Bright Star Catalog at 3.0 should leave 188 stars.
"""

import argparse
import csv
import json
from pathlib import Path

import numpy as np

from spherical_gradient.inference import ModelSpec, compare_models, mle_fit
from spherical_gradient.sphere import lonlat_to_xyz


def load_stars(path, max_mag):
    lon, lat = [], []
    with open(path, newline="") as f:
        for row in csv.DictReader(line for line in f if not line.startswith("#")):
            if "vmag" in row and row["vmag"] not in ("", None) and float(row["vmag"]) > max_mag:
                continue
            a = float(row["lon_deg"])
            lon.append(a - 360.0 if a >= 180.0 else a)
            lat.append(float(row["lat_deg"]))
    return lonlat_to_xyz(np.array(lon), np.array(lat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("catalog", type=Path)
    ap.add_argument("--max-mag", type=float, default=3.0)
    ap.add_argument("--out", type=Path, default=Path("results/stars"))
    args = ap.parse_args(argv)

    X = load_stars(args.catalog, args.max_mag)
    print(f"{len(X)} stars with vmag <= {args.max_mag}")
    fits = []
    for label, model in [("null", ModelSpec.null()), ("quadratic", ModelSpec.quadratic())]:
        fit = mle_fit(model, X)
        fit.label = label
        fits.append(fit)
    args.out.mkdir(parents=True, exist_ok=True)
    for rank, fit in enumerate(compare_models(fits), start=1):
        print(f"{rank}. {fit.label:10s} loglik {fit.loglik:8.3f}  dim {fit.dim}  aic {fit.aic:8.3f}"
              f"  converged {fit.converged}")
        with open(args.out / f"{fit.label}.json", "w") as f:
            json.dump(fit.report(), f, indent=2)
    quad = next(f for f in fits if f.label == "quadratic")
    mu, A = quad.model.unpack(quad.theta_hat)
    lam, U = np.linalg.eigh(A - np.trace(A) / 3 * np.eye(3))
    print("mu_hat", np.round(mu, 3))
    print("A_hat eigenvalues (trace removed)", np.round(lam, 3))


if __name__ == "__main__":
    main()
