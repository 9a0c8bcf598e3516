"""Acceptance criteria, each at its stated tolerance.

Every test prints one ``PASS``/``FAIL`` line (also collected into the
pytest terminal summary).  Run directly with ``python tests/test_acceptance.py``
for the lines alone.
"""
import math
import time

import numpy as np

from conftest import ACCEPTANCE_LINES, CONTINUUM_IDS, DISCRETE_IDS
from susy_interp import continuum_families as cf
from susy_interp import continuum_interp as ci
from susy_interp import discrete_families as df
from susy_interp.spectral import Grid1D, discretize, eigen_lowest

S_GRID = (0.0, 0.25, 0.5, 0.75, 1.0)
DRAWS = 20
SEED = 20240611


def report(number, title, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  [{number}] {title}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    return ok


def continuum_draws(fam):
    rng = np.random.default_rng([SEED, CONTINUUM_IDS.index(fam.id)])
    return [cf.sample_parameters(fam, rng) for _ in range(DRAWS)]


def discrete_draws(fam):
    rng = np.random.default_rng([SEED, 100 + DISCRETE_IDS.index(fam.id)])
    return [df.sample_parameters(fam, rng) for _ in range(DRAWS)]


def rel_err(num, ana):
    # E_0 = 0, so errors are relative to max(1, |E|)
    return abs(num - ana) / max(1.0, abs(ana))


def test_1_operator_interpolation():
    t0 = time.perf_counter()
    worst = 0.0
    for fid in CONTINUUM_IDS:
        fam = cf.get_family(fid)
        for lam in continuum_draws(fam):
            for s in S_GRID:
                r = ci.verify_operator_interpolation(fam, lam, s, 1000)
                worst = max(worst, r.max_rel_residual)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and elapsed < 5.0
    assert report(1, "operator interpolation identity", ok,
                  f"9 families x {DRAWS} x 5 s, worst rel residual {worst:.2e} (<= 1e-9), {elapsed:.2f}s (< 5s)")


def test_2_shape_invariance():
    worst = 0.0
    for fid in CONTINUUM_IDS:
        fam = cf.get_family(fid)
        for lam in continuum_draws(fam):
            worst = max(worst, ci.verify_shape_invariance(fam, lam, 1000).max_rel_residual)
    assert report(2, "shape invariance", worst <= 1e-9,
                  f"9 families x {DRAWS}, worst residual {worst:.2e} (<= 1e-9)")


def test_3_prepotential_interpolation():
    worst = 0.0
    for fid in CONTINUUM_IDS:
        fam = cf.get_family(fid)
        for lam in continuum_draws(fam):
            for s in S_GRID:
                worst = max(worst, ci.verify_prepotential_interpolation(fam, lam, s, 1000).max_abs_residual)
    assert report(3, "prepotential interpolation identity", worst <= 1e-11,
                  f"9 families x {DRAWS} x 5 s, worst abs residual {worst:.2e} (<= 1e-11)")


def test_4_numerical_isospectrality():
    t0 = time.perf_counter()
    g = 2.0
    fam = cf.get_family("symmetric-poschl-teller")
    grid = Grid1D(0.0, math.pi, 2000)
    gp = (1 + math.sqrt(17)) / 2
    cases = {
        0.0: [0, 5, 12, 21, 32],
        1.0: [5, 12, 21, 32, 45],
        0.5: [n * (n + 2 * gp) + gp**2 - g**2 for n in range(5)],
    }
    worst = 0.0
    for s, analytic in cases.items():
        op = discretize(lambda x: ci.interp_potential_U_s(fam, {"g": g}, s, x), grid)
        numeric = eigen_lowest(op, 5)
        worst = max(worst, max(rel_err(a, b) for a, b in zip(numeric, analytic)))
    elapsed = time.perf_counter() - t0
    ok = worst <= 2e-3 and elapsed < 10.0
    assert report(4, "numerical isospectrality (SPT g=2, n=2000)", ok,
                  f"s in {{0, 0.5, 1}}, worst rel error {worst:.2e} (<= 2e-3), {elapsed:.2f}s (< 10s)")


def test_5_discrete_potential_identity():
    worst = 0.0
    s_grid = np.linspace(0.0, 1.0, 21)
    for fid in DISCRETE_IDS:
        fam = df.get_family(fid, q=0.5)
        for lam in discrete_draws(fam):
            for s in s_grid:
                r = df.verify_potential_identity(fam, lam, s)
                assert r.n_points == 50
                worst = max(worst, r.max_rel_residual)
    assert report(5, "discrete potential identity", worst <= 1e-9,
                  f"5 families x {DRAWS} x 21 s, 50 points, q=0.5, worst residual {worst:.2e} (<= 1e-9)")


def test_6_boundary_exactness():
    worst = 0.0
    alpha_err = 0.0
    for fid in DISCRETE_IDS:
        fam = df.get_family(fid, q=0.5)
        for lam in discrete_draws(fam):
            r0 = df.solve_shifted_parameters(fam, lam, 0.0)
            r1 = df.solve_shifted_parameters(fam, lam, 1.0)
            worst = max(worst, df.multiset_distance(r0.lambda_prime.values, lam.values),
                        df.multiset_distance(r1.lambda_prime.values, fam.shifted(lam).values))
            if fam.variable == "z":
                alpha_err = max(alpha_err, abs(r1.alpha - 1 / fam.q), abs(r0.alpha - 1.0))
    ok = worst <= 1e-10 and alpha_err <= 1e-12
    assert report(6, "shift-solver boundary exactness", ok,
                  f"5 families x {DRAWS}, worst multiset distance {worst:.2e} (<= 1e-10), "
                  f"AW alpha error {alpha_err:.1e}")


def test_7_operator_matrix_spectra():
    worst_tri = worst_diag = 0.0
    for fid in DISCRETE_IDS:
        fam = df.get_family(fid, q=0.5)
        for lam in discrete_draws(fam):
            for s in S_GRID:
                rep = df.verify_interpolated_spectrum(fam, lam, s, 10)
                worst_tri = max(worst_tri, rep.triangular_defect)
                worst_diag = max(worst_diag, rep.max_rel_residual)
    ok = worst_tri <= 1e-8 and worst_diag <= 1e-8
    assert report(7, "operator-matrix spectra (N=10)", ok,
                  f"5 families x {DRAWS} x 5 s, below-diagonal {worst_tri:.2e}, "
                  f"diagonal rel error {worst_diag:.2e} (both <= 1e-8)")


def test_8_convergence_order():
    fam = cf.get_family("harmonic-oscillator")
    lam = {"omega": 1.0}
    a, b = fam.eigen_window or fam.window
    levels = 3
    errors = []
    for cells in (200, 400, 800):
        op = discretize(lambda x: cf.potential_U(fam, lam, x), Grid1D(a, b, cells - 1))
        numeric = eigen_lowest(op, levels)
        errors.append([abs(numeric[n] - cf.spectrum(fam, lam, n)) for n in range(levels)])
    errors = np.array(errors)
    ratios = errors[:-1] / errors[1:]
    ok = bool(np.all((ratios >= 3.5) & (ratios <= 4.5)))
    assert report(8, "eigensolver convergence order", ok,
                  f"harmonic oscillator levels 0-2, h halved twice, ratios "
                  f"{np.array2string(ratios.ravel(), precision=3)} (in [3.5, 4.5])")


if __name__ == "__main__":
    import sys
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
