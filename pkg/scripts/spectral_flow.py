"""Lowest eigenvalues of the discretized H_s as s runs over [0, 1].

Writes CSV (s, n, numeric, analytic, rel_error) for external plotting.

    python scripts/spectral_flow.py spt --params g=2 -k 5 --steps 21
"""
import argparse

import numpy as np

from _common import parse_params, writer
from susy_interp import continuum_families as cf
from susy_interp import continuum_interp as ci
from susy_interp.spectral import Grid1D, discretize, eigen_lowest


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("family")
    ap.add_argument("--params", required=True)
    ap.add_argument("-k", type=int, default=5)
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--steps", type=int, default=21)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    fam = cf.get_family(args.family)
    lam = fam.coerce(parse_params(args.params))
    a, b = fam.eigen_window or fam.window
    grid = Grid1D(a, b, args.n)
    fh, w = writer(args.out)
    w.writerow(["s", "n", "numeric", "analytic", "rel_error"])
    for s in np.linspace(0.0, 1.0, args.steps):
        res = cf.coupling_map(fam, lam, s)
        k = int(min(args.k, cf.bound_state_count(fam, res.lambda_prime)))
        numeric = eigen_lowest(discretize(lambda x: ci.interp_potential_U_s(fam, lam, s, x), grid), k)
        for n in range(k):
            exact = cf.spectrum(fam, res.lambda_prime, n) + res.delta_E
            w.writerow([f"{s:.4f}", n, f"{numeric[n]:.10g}", f"{exact:.10g}",
                        f"{abs(numeric[n] - exact) / max(1.0, abs(exact)):.3e}"])
    if args.out:
        fh.close()


if __name__ == "__main__":
    main()
