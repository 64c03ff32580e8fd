"""Density grids behind the quadratic and high-frequency figure panels.

One CSV per panel (lon_deg, lat_deg, density), ready for an external
plotting tool.  Also prints the cos-lat grid mean, which should be 1.
"""

import argparse
from pathlib import Path

import numpy as np

from spherical_gradient.density import density_grid
from spherical_gradient.potential import PotentialSpec, QuadraticSpec, quadratic_to_components

e1, e2, e3 = np.eye(3)
Z = np.zeros((3, 3))

QUADRATIC = {
    "quadratic_a_concentration": (e1, Z),
    "quadratic_b_negative_dipole": (0 * e1, np.outer(e1, e1)),
    "quadratic_c_positive_dipole": (0 * e1, -np.outer(e1, e1)),
    "quadratic_d_complementary": (0 * e1, -0.5 * np.outer(e1, e1) + 0.5 * np.outer(e2, e2)),
    "quadratic_e_unbalanced": (0.5 * e1, -0.5 * np.outer(e1, e1)),
    "quadratic_f_general": (e1 / 3, (-np.outer(e2, e2) + np.outer(e3, e3)) / 3),
}

HIGH_FREQUENCY = {
    "highfreq_a": PotentialSpec([e1], [3], [1.0]),
    "highfreq_b": PotentialSpec([e1, e2], [3, 3], [0.5, 0.5]),
    "highfreq_c": PotentialSpec([e1, e2], [9, 9], [0.5, 0.5]),
    "highfreq_d": PotentialSpec([e1, (e1 + e2) / np.sqrt(2)], [30, 4], [0.5, 0.5]),
}


def panels():
    for name, (mu, A) in QUADRATIC.items():
        yield name, quadratic_to_components(QuadraticSpec(mu, A))
    yield from HIGH_FREQUENCY.items()


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--resolution", type=int, default=180)
    ap.add_argument("--out", type=Path, default=Path("results/grids"))
    args = ap.parse_args(argv)
    args.out.mkdir(parents=True, exist_ok=True)
    for name, spec in panels():
        grid = density_grid(spec, args.resolution)
        grid.to_csv(args.out / f"{name}.csv")
        lon, lat = grid.argmax()
        print(f"{name:30s} mean {grid.weighted_mean():.4f}  max {grid.values.max():8.3f} at ({lon:7.1f}, {lat:6.1f})")


if __name__ == "__main__":
    main()
