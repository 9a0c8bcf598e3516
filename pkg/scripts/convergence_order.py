"""Observed order of the finite-difference eigenvalues under grid refinement.

    python scripts/convergence_order.py ho --params omega=1 --cells 100 --levels 3
"""
import argparse
import math

from _common import parse_params, writer
from susy_interp import continuum_families as cf
from susy_interp import continuum_interp as ci
from susy_interp.spectral import Grid1D, discretize, eigen_lowest


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("family", nargs="?", default="harmonic-oscillator")
    ap.add_argument("--params", default="omega=1")
    ap.add_argument("--s", type=float, default=0.0)
    ap.add_argument("--cells", type=int, default=100, help="coarsest number of cells")
    ap.add_argument("--refinements", type=int, default=5)
    ap.add_argument("--levels", type=int, default=3)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    fam = cf.get_family(args.family)
    lam = fam.coerce(parse_params(args.params))
    res = cf.coupling_map(fam, lam, args.s)
    exact = [cf.spectrum(fam, res.lambda_prime, n) + res.delta_E for n in range(args.levels)]
    a, b = fam.eigen_window or fam.window
    fh, w = writer(args.out)
    w.writerow(["h", "level", "error", "ratio", "order"])
    prev = None
    for r in range(args.refinements):
        cells = args.cells * 2**r
        grid = Grid1D(a, b, cells - 1)
        numeric = eigen_lowest(discretize(lambda x: ci.interp_potential_U_s(fam, lam, args.s, x), grid),
                               args.levels)
        errs = [abs(numeric[n] - exact[n]) for n in range(args.levels)]
        for n, e in enumerate(errs):
            ratio = prev[n] / e if prev and e > 0 else float("nan")
            w.writerow([f"{grid.h:.6g}", n, f"{e:.4e}", f"{ratio:.4f}", f"{math.log2(ratio):.3f}"])
        prev = errs
    if args.out:
        fh.close()


if __name__ == "__main__":
    main()
