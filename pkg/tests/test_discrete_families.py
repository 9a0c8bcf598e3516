import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import DISCRETE_IDS, discrete_case, s_values
from susy_interp import discrete_families as df
from susy_interp.errors import ParameterError, PoleError

Q = 0.5


# --- independent oracles --------------------------------------------------------------

def mixed_numerator(fid, lam, s, q=Q):
    """Numerator of V_s after clearing the shared denominator, as mpmath
    coefficients (descending) in t = ix, or in z for Askey-Wilson."""
    lam = [mpmath.mpf(v) for v in lam]
    s = mpmath.mpf(s)

    def prod(factors):
        out = [mpmath.mpf(1)]
        for f in factors:  # f = (c1, c0) meaning c1*t + c0
            nxt = [mpmath.mpf(0)] * (len(out) + 1)
            for i, c in enumerate(out):
                nxt[i] += c * f[0]
                nxt[i + 1] += c * f[1]
            out = nxt
        return out

    if fid == "askey-wilson":
        q = mpmath.mpf(q)
        p0 = prod([(-a, 1) for a in lam])
        p1 = prod([(-a * mpmath.sqrt(q), 1) for a in lam])
        return [(1 - s) * x + s / q * y for x, y in zip(p0, p1)]
    half = mpmath.mpf(1) / 2
    if fid == "meixner-pollaczek":
        p0, p1 = prod([(1, lam[0])]), prod([(1, lam[0] + half)])
    else:
        p0 = prod([(1, a) for a in lam])
        p1 = prod([(1, a + half) for a in lam])
    return [(1 - s) * x + s * y for x, y in zip(p0, p1)]


def oracle_shift(fid, lam, s, q=Q):
    """lam' and alpha from an mpmath root solve of the mixed numerator."""
    with mpmath.workdps(40):
        c = mixed_numerator(fid, lam, s, q)
        roots = mpmath.polyroots(c, maxsteps=200, extraprec=200)
        if fid == "askey-wilson":
            # alpha * prod(1 - a' z): roots z_j = 1/a'_j, alpha = constant term
            return [complex(1 / r) for r in roots], float(c[-1])
        # monic in t: roots t_j = -a'_j
        return [complex(-r) for r in roots], 1.0


def v_oracle(fid, lam, x, q=Q):
    """V by hand from the family formulas."""
    ix = 1j * x
    if fid == "meixner-pollaczek":
        return lam[0] + ix
    if fid == "continuous-hahn":
        return (lam[0] + ix) * (lam[1] + ix)
    if fid in ("continuous-dual-hahn", "wilson"):
        return np.prod([a + ix for a in lam], axis=0) / (2 * ix * (2 * ix + 1))
    z = x
    return np.prod([1 - a * z for a in lam], axis=0) / ((1 - z**2) * (1 - q * z**2))


def energy(fid, lam, n, q=Q):
    if fid == "meixner-pollaczek":
        return 2.0 * n
    if fid == "continuous-hahn":
        return n * (n + 2 * sum(lam) - 1)
    if fid == "continuous-dual-hahn":
        return float(n)
    if fid == "wilson":
        return n * (n + sum(lam) - 1)
    return (q**-n - 1) * (1 - np.prod(lam) * q ** (n - 1))


def first_energy(fid, lam, q=Q):
    return energy(fid, lam, 1, q)


# --- catalog --------------------------------------------------------------------------

def test_catalog():
    assert len(df.DISCRETE_FAMILIES) == 5
    assert df.get_family("wilson").delta == (0.5, 0.5, 0.5, 0.5)
    assert df.get_family("aw").q == df.DEFAULT_Q == 0.5
    assert df.get_family("aw", q=0.9).q == 0.9
    assert df.askey_wilson(0.3).q == 0.3


@pytest.mark.parametrize("fid,bad", [
    ("meixner-pollaczek", (0.0,)), ("continuous-hahn", (1.0, -1.0)), ("continuous-dual-hahn", (1, 1, 0)),
    ("wilson", (1, 1, 1, -0.1)), ("askey-wilson", (0.5, 0.5, 1.0, 0.1)), ("askey-wilson", (0.9, 0.9, 0.9, 0.9)),
])
def test_range_violations(fid, bad):
    with pytest.raises(ParameterError):
        df.get_family(fid).coerce(bad)


def test_q_range():
    with pytest.raises(ParameterError):
        df.get_family("aw", q=1.0)


def test_aw_constraint_depends_on_q():
    lam = (0.8, 0.8, 0.8, 0.8)  # abcd = 0.4096
    with pytest.raises(ParameterError):
        df.get_family("aw", q=0.4).coerce(lam)
    assert df.get_family("aw", q=0.5).coerce(lam).values == lam


# --- potentials -------------------------------------------------------------------------

def test_potential_examples():
    assert df.potential_value("mp", (1.0,), 0.0) == 1 + 0j
    assert df.potential_value("chahn", (1.0, 2.0), 1.0) == pytest.approx(1 + 3j)
    z = np.exp(0.7j)
    assert df.potential_value("aw", (0, 0, 0, 0), z) == pytest.approx(1 / ((1 - z**2) * (1 - 0.5 * z**2)))


@settings(max_examples=60, deadline=None)
@given(case=discrete_case())
def test_potential_matches_formula(case):
    fam, lam = case
    pts = df.default_sample_points(fam)
    ref = v_oracle(fam.id, lam.values, pts, fam.q)
    assert np.allclose(df.potential_value(fam, lam, pts), ref, rtol=1e-13, atol=1e-13)


@settings(max_examples=40, deadline=None)
@given(case=discrete_case())
def test_conjugate_on_physical_line(case):
    fam, lam = case
    if fam.variable == "z":
        pts = np.exp(1j * np.linspace(0.1, 3.0, 17))
    else:
        pts = np.linspace(0.2, 7.0, 17)
    v = df.potential_value(fam, lam, pts)
    vc = df.potential_conj_value(fam, lam, pts)
    assert np.allclose(vc, np.conj(v), rtol=1e-13, atol=1e-13)


def test_pole_rejected():
    with pytest.raises(PoleError):
        df.potential_value("wilson", (1, 1, 1, 1), 0.0)
    with pytest.raises(PoleError):
        df.potential_value("aw", (0.1, 0.2, 0.3, 0.4), 1.0)


def test_interp_potential_examples():
    assert df.interp_potential_value("mp", (1.0,), 0.5, 2.0) == pytest.approx(1.25 + 2j)
    z = np.exp(0.4j)
    lam = (0.3, 0.2, 0.1, 0.1)
    assert df.interp_potential_value("aw", lam, 0.0, z) == df.potential_value("aw", lam, z)
    expect = df.potential_value("aw", tuple(math.sqrt(0.5) * a for a in lam), z) / 0.5
    assert df.interp_potential_value("aw", lam, 1.0, z) == pytest.approx(expect, rel=1e-14)


@settings(max_examples=40, deadline=None)
@given(case=discrete_case())
def test_interp_potential_affine(case):
    fam, lam = case
    pts = df.default_sample_points(fam)[:10]
    v0 = df.interp_potential_value(fam, lam, 0.0, pts)
    v1 = df.interp_potential_value(fam, lam, 1.0, pts)
    vh = df.interp_potential_value(fam, lam, 0.5, pts)
    assert np.allclose(vh, (v0 + v1) / 2, rtol=1e-13, atol=1e-14)


def test_sample_points_clear_of_poles():
    for fid in DISCRETE_IDS:
        fam = df.get_family(fid)
        pts = df.default_sample_points(fam)
        assert pts.size == 50
        if fam.variable == "z":
            assert np.allclose(np.abs(pts), 1.0)
            theta = np.angle(pts)
            assert theta.min() >= 0.05 - 1e-12 and theta.max() <= math.pi - 0.05 + 1e-12
        else:
            # poles of the cdHahn/Wilson denominator sit at x = 0 and x = i/2
            assert np.min(np.abs(pts)) >= 0.1 and np.min(np.abs(pts - 0.5j)) >= 0.1


# --- spectra ----------------------------------------------------------------------------

def test_energy_examples():
    assert df.spectrum("cdhahn", (0.3, 1.0, 2.0), 7) == 7
    for fid in DISCRETE_IDS:
        fam = df.get_family(fid)
        assert df.spectrum(fam, df.sample_parameters(fam, np.random.default_rng(1)), 0) == 0
    # abcd = 0.01, q = 0.5
    assert df.spectrum("aw", (0.5, 0.5, 0.2, 0.2), 1) == pytest.approx(0.99)


def test_energy_formulas():
    assert df.spectrum("wilson", (1, 1, 1, 1), 3) == 18
    assert df.spectrum("chahn", (1, 2), 2) == 2 * (2 + 6 - 1)
    assert df.spectrum("mp", (0.7,), 4) == 8


# --- shift solver --------------------------------------------------------------------------

def test_chahn_midpoint():
    res = df.solve_shifted_parameters("chahn", (1.0, 1.0), 0.5)
    disc = complex(2.5**2 - 4 * 1.625) ** 0.5
    oracle = [(2.5 + disc) / 2, (2.5 - disc) / 2]
    assert df.multiset_distance(res.lambda_prime.values, oracle) <= 1e-14
    assert res.delta_E_tilde == pytest.approx(2 * (1 + 1) * 0.5)
    assert res.boundary_matched is None


def test_wilson_boundary():
    lam = (0.3, 1.1, 2.0, 0.7)
    res = df.solve_shifted_parameters("wilson", lam, 1.0)
    assert df.multiset_distance(res.lambda_prime.values, [a + 0.5 for a in lam]) <= 1e-12
    assert res.boundary_matched is True


def test_aw_boundary():
    lam = (0.3, -0.2, 0.6, 0.1)
    res = df.solve_shifted_parameters("aw", lam, 1.0, q=0.5)
    assert res.alpha == pytest.approx(2.0)
    assert df.multiset_distance(res.lambda_prime.values, [a * math.sqrt(0.5) for a in lam]) <= 1e-12
    assert res.boundary_matched is True


def test_canonical_order():
    assert df.canonical_order([1 - 1j, 2, 1 + 1j]) == [2, 1 + 1j, 1 - 1j]


@settings(max_examples=60, deadline=None)
@given(case=discrete_case(), s=s_values)
def test_shift_matches_mpmath_oracle(case, s):
    fam, lam = case
    res = df.solve_shifted_parameters(fam, lam, s)
    roots, alpha = oracle_shift(fam.id, lam.values, s, fam.q)
    scale = max(1.0, max(abs(r) for r in roots))
    assert df.multiset_distance(res.lambda_prime.values, roots) <= 1e-9 * scale
    assert res.alpha == pytest.approx(alpha, rel=1e-14)
    assert res.delta_E_tilde == pytest.approx(s * first_energy(fam.id, lam.values, fam.q), rel=1e-12, abs=1e-14)
    assert res.max_defect <= df.DEFECT_TOL


@settings(max_examples=60, deadline=None)
@given(case=discrete_case())
def test_boundary_multisets(case):
    fam, lam = case
    r0 = df.solve_shifted_parameters(fam, lam, 0.0)
    r1 = df.solve_shifted_parameters(fam, lam, 1.0)
    assert df.multiset_distance(r0.lambda_prime.values, lam.values) <= 1e-10
    assert df.multiset_distance(r1.lambda_prime.values, fam.shifted(lam).values) <= 1e-10
    assert r0.boundary_matched and r1.boundary_matched
    if fam.variable == "z":
        assert r1.alpha == pytest.approx(1 / fam.q)


@settings(max_examples=60, deadline=None)
@given(case=discrete_case(), s=s_values)
def test_roots_closed_under_conjugation(case, s):
    fam, lam = case
    vals = df.solve_shifted_parameters(fam, lam, s).lambda_prime.values
    assert df.multiset_distance(vals, [complex(v).conjugate() for v in vals]) <= 1e-12


@pytest.mark.parametrize("fid", DISCRETE_IDS)
def test_defect_on_s_grid(fid):
    fam = df.get_family(fid)
    rng = np.random.default_rng(8)
    for _ in range(5):
        lam = df.sample_parameters(fam, rng)
        for s in np.linspace(0, 1, 21):
            assert df.solve_shifted_parameters(fam, lam, s).max_defect <= 1e-9


# --- potential identity -----------------------------------------------------------------------

def test_mp_identity():
    assert df.verify_potential_identity("mp", (2.0,), 0.3).max_abs_residual <= 1e-12


def test_cdhahn_identity():
    pts = np.linspace(0.1, 10, 50)
    assert df.verify_potential_identity("cdhahn", (1, 1, 1), 0.5, pts).max_rel_residual <= 1e-10
    # numerator check: the mixture is (t + a')(t + b')(t + c') with t = ix
    roots, _ = oracle_shift("continuous-dual-hahn", (1, 1, 1), 0.5)
    t = 1j * pts
    mix = np.polyval([complex(c) for c in mixed_numerator("continuous-dual-hahn", (1, 1, 1), 0.5)], t)
    assert np.allclose(mix, np.prod([t + r for r in roots], axis=0), rtol=1e-12)


def test_aw_identity():
    lam = (0.3, 0.2, 0.1, 0.1)
    assert df.verify_potential_identity("aw", lam, 0.5, q=0.5).max_rel_residual <= 1e-9


@settings(max_examples=60, deadline=None)
@given(case=discrete_case(), s=s_values)
def test_potential_identity_property(case, s):
    fam, lam = case
    assert df.verify_potential_identity(fam, lam, s).max_rel_residual <= 1e-9


@settings(max_examples=20, deadline=None)
@given(case=discrete_case(ids=["askey-wilson"], q=0.9), s=s_values)
def test_potential_identity_other_q(case, s):
    fam, lam = case
    assert df.verify_potential_identity(fam, lam, s).max_rel_residual <= 1e-9


# --- polynomial-basis matrices ------------------------------------------------------------------

def test_mp_matrix_degree_one():
    mat = df.build_htilde_matrix("mp", (1.0,), 0.0, 1)
    assert np.allclose(mat[:, 1], [0, 2], atol=1e-13)
    assert np.allclose(mat[:, 0], 0, atol=1e-13)


@pytest.mark.parametrize("fid", DISCRETE_IDS)
def test_constants_annihilated(fid):
    fam = df.get_family(fid)
    mat = df.build_htilde_matrix(fam, df.sample_parameters(fam, np.random.default_rng(3)), 0.0, 4)
    assert np.allclose(mat[:, 0], 0, atol=1e-12)


def test_wilson_diagonal():
    mat = df.build_htilde_matrix("wilson", (1, 1, 1, 1), 0.0, 3)
    assert np.allclose(np.diag(mat), [0, 4, 10, 18], atol=1e-10)


def test_mp_interpolated_diagonal():
    rep = df.verify_interpolated_spectrum("mp", (1.0,), 0.5, 5)
    assert np.allclose(np.real(rep.diagonal), [1, 3, 5, 7, 9, 11], atol=1e-10)


def test_cdhahn_interpolated_diagonal():
    rep = df.verify_interpolated_spectrum("cdhahn", (1, 1, 1), 1.0, 4)
    assert np.allclose(np.real(rep.diagonal), [1, 2, 3, 4, 5], atol=1e-10)


def apply_oracle(fid, lam, s, k, x, q=Q):
    """(H~_s eta^k)(x) from hand-written V, V* and shifts."""
    fam = df.get_family(fid, q)
    if fam.variable == "z":
        eta = lambda z: (z + 1 / z) / 2
        partner = [math.sqrt(q) * a for a in lam]
        vs = lambda z: (1 - s) * v_oracle(fid, lam, z, q) + s / q * v_oracle(fid, partner, z, q)
        vs_c = lambda z: np.conj(vs(1 / np.conj(z)))
        fwd, back = q * x, x / q
    else:
        eta = (lambda t: t * t) if fid in ("continuous-dual-hahn", "wilson") else (lambda t: t)
        partner = [a + 0.5 for a in lam]
        vs = lambda t: (1 - s) * v_oracle(fid, lam, t) + s * v_oracle(fid, partner, t)
        vs_c = lambda t: np.conj(vs(np.conj(t)))
        fwd, back = x - 1j, x + 1j
    e1 = first_energy(fid, lam, q)
    return (vs(x) * (eta(fwd) ** k - eta(x) ** k) + vs_c(x) * (eta(back) ** k - eta(x) ** k)
            + s * e1 * eta(x) ** k), eta(x)


@pytest.mark.parametrize("fid", DISCRETE_IDS)
def test_matrix_reproduces_operator_off_nodes(fid):
    fam = df.get_family(fid)
    lam = df.sample_parameters(fam, np.random.default_rng(4))
    s, N = 0.35, 6
    mat = df.build_htilde_matrix(fam, lam, s, N)
    x = np.exp(1j * np.linspace(0.3, 2.8, 7)) if fam.variable == "z" else np.linspace(0.6, 2.4, 7)
    for k in range(N + 1):
        direct, eta = apply_oracle(fid, lam.values, s, k, x)
        via_matrix = np.polyval(mat[::-1, k], eta)
        assert np.allclose(via_matrix, direct, rtol=1e-9, atol=1e-9 * max(1.0, np.abs(direct).max()))


@pytest.mark.parametrize("fid", DISCRETE_IDS)
def test_interpolated_spectrum_each_family(fid):
    fam = df.get_family(fid)
    rng = np.random.default_rng(6)
    for _ in range(5):
        lam = df.sample_parameters(fam, rng)
        for s in (0.0, 0.3, 0.5, 1.0):
            rep = df.verify_interpolated_spectrum(fam, lam, s, 10)
            assert rep.triangular_defect <= 1e-8
            assert rep.max_rel_residual <= 1e-8
            roots, alpha = oracle_shift(fid, lam.values, s, fam.q)
            oracle = np.array([alpha * energy(fid, roots, n, fam.q) + s * first_energy(fid, lam.values, fam.q)
                               for n in range(11)])
            assert np.max(np.abs(np.diag(df.build_htilde_matrix(fam, lam, s, 10)) - oracle)) \
                <= 1e-8 * (1 + abs(oracle[-1]))


@settings(max_examples=20, deadline=None)
@given(case=discrete_case(), s=s_values, N=st.integers(1, 10))
def test_triangularity_property(case, s, N):
    fam, lam = case
    mat = df.build_htilde_matrix(fam, lam, s, N)
    assert df.triangular_defect(mat) <= 1e-8


def test_triangular_defect_helper():
    assert df.triangular_defect(np.array([[1.0, 2.0], [0.0, 4.0]])) == 0.0
    assert df.triangular_defect(np.array([[1.0, 2.0], [1.0, 4.0]])) == 0.25
