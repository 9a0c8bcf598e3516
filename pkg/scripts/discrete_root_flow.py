"""Trajectories of the shifted parameters lam'(s) for a discrete family.

    python scripts/discrete_root_flow.py wilson --params a=0.3,b=1.1,c=2,d=0.7
    python scripts/discrete_root_flow.py askey-wilson --params a=0.3,b=-0.2,c=0.6,d=0.1 --q 0.5
"""
import argparse

import numpy as np

from _common import parse_params, writer
from susy_interp import discrete_families as df


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("family")
    ap.add_argument("--params", required=True)
    ap.add_argument("--q", type=float, default=None)
    ap.add_argument("--steps", type=int, default=21)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    fam = df.get_family(args.family, q=args.q)
    lam = fam.coerce(parse_params(args.params))
    fh, w = writer(args.out)
    w.writerow(["s", "root", "re", "im", "alpha", "delta_E", "defect", "identity_residual"])
    for s in np.linspace(0.0, 1.0, args.steps):
        res = df.solve_shifted_parameters(fam, lam, s)
        check = df.verify_potential_identity(fam, lam, s, solved=res)
        for j, v in enumerate(res.lambda_prime.values):
            v = complex(v)
            w.writerow([f"{s:.4f}", j, f"{v.real:.12g}", f"{v.imag:.12g}", f"{res.alpha:.12g}",
                        f"{res.delta_E_tilde:.12g}", f"{res.max_defect:.2e}", f"{check.max_rel_residual:.2e}"])
    if args.out:
        fh.close()


if __name__ == "__main__":
    main()
