"""Gauss-Bonnet and holonomy controls.

Euler numbers of the square, disk, annulus and sphere; the spectrum
search on a synthetic U(1) connection whose holonomy is quantized only
when a single-valued trivializing gauge is demanded.

    python3 demos/topology_controls.py
"""

import math

import numpy as np

from ghmtq import jets, quantization as qz
from ghmtq.geometry import MetricField2

TWO_PI = 2 * math.pi


def main():
    flat = MetricField2(lambda x, y: (1.0 + 0 * x, 0 * x, 1.0 + 0 * x))
    polar = MetricField2(lambda r, th: (1.0 + 0 * r, 0 * r, r * r))
    sphere = MetricField2(lambda th, ph: (1.0 + 0 * th, 0 * th, jets.sin(th) ** 2))
    cases = [
        ("unit square", flat, ((0, 1), (0, 1)), ("boundary",) * 4),
        ("disk", polar, ((0, 1), (0, TWO_PI)), ("periodic", "boundary", "periodic", "pole")),
        ("annulus", polar, ((1, 2), (0, TWO_PI)), ("periodic", "boundary", "periodic", "boundary")),
        ("sphere", sphere, ((0, math.pi), (0, TWO_PI)), ("periodic", "pole", "periodic", "pole")),
    ]
    for name, metric, bounds, edges in cases:
        res = qz.euler_number(metric, qz.EulerDomain(bounds, edges))
        print(f"{name:12s} chi = {res.chi: .10f}  error {res.error:.1e}")

    loop = qz.circle_loop(0, 1.0, (0.0, TWO_PI))
    for single in (False, True):
        rep = qz.spectrum_search(qz.synthetic_monopole, "c", np.linspace(0, 2, 9), [loop],
                                 require_single_valued=single)
        found = [(c.kind, c.locations) for c in rep.constraints]
        print(f"require_single_valued={single}: constraints {found}")


if __name__ == "__main__":
    main()
