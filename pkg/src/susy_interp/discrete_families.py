"""Shape-invariant discrete quantum mechanics (Askey-scheme families).

The Hamiltonian is fixed by a complex potential function ``V``.  In the
similarity-transformed picture it acts on polynomials in ``eta`` as

    (H~ f)(x) = V(x) f(x - i) + V*(x) f(x + i) - (V + V*) f(x)

(for Askey-Wilson the shifts are ``z -> q z`` and ``z -> z / q``).
Interpolating between ``H~`` and the partner ``H~_r`` replaces ``V`` by
the affine mixture ``V_s``; the shifted parameters ``lam'`` with
``V_s = alpha V(lam')`` are the roots of a polynomial whose elementary
symmetric functions are affine in ``s``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable, Mapping, Optional, Sequence, Union

import mpmath
import numpy as np

from .continuum_interp import ResidualReport
from .errors import DefectError, ParameterError, PoleError
from .params import ParameterVector
from .spectral import ComplexPolynomial, fit_polynomial, polynomial_roots, refine_roots

POLE_MARGIN = 1e-8
DEFECT_TOL = 1e-9
BOUNDARY_TOL = 1e-10
TRIANGULAR_TOL = 1e-8
DEFAULT_Q = 0.5
N_SAMPLES = 50
SOLVE_DPS = 40


@dataclass(frozen=True)
class ComplexRationalFunction:
    numerator: ComplexPolynomial
    denominator: ComplexPolynomial

    def __post_init__(self):
        if not np.any(self.denominator.coefficients != 0):
            raise ValueError("denominator is identically zero")

    @cached_property
    def poles(self) -> np.ndarray:
        den = self.denominator.trim(0.0)
        if den.degree == 0:
            return np.zeros(0, dtype=complex)
        return polynomial_roots(den)

    def __call__(self, pt):
        pt = np.asarray(pt, dtype=complex)
        if self.poles.size:
            dist = np.abs(pt[..., None] - self.poles)
            if np.any(dist <= POLE_MARGIN):
                raise PoleError(f"evaluation point within {POLE_MARGIN} of a pole")
        return self.numerator(pt) / self.denominator(pt)

    def conjugate(self) -> "ComplexRationalFunction":
        """Coefficient conjugate: equals ``conj(f(x))`` for real ``x``."""
        return ComplexRationalFunction(self.numerator.conjugate(), self.denominator.conjugate())

    def reciprocal_conjugate(self) -> "ComplexRationalFunction":
        """``conj(f(1/conj z))``: equals ``conj(f(z))`` on the unit circle."""
        m = max(self.numerator.degree, self.denominator.degree)
        num = np.zeros(m + 1, dtype=complex)
        den = np.zeros(m + 1, dtype=complex)
        num[: self.numerator.degree + 1] = self.numerator.coefficients
        den[: self.denominator.degree + 1] = self.denominator.coefficients
        return ComplexRationalFunction(ComplexPolynomial(np.conj(num[::-1])),
                                       ComplexPolynomial(np.conj(den[::-1])))


@dataclass(frozen=True)
class ShiftSolveResult:
    lambda_prime: ParameterVector
    alpha: float
    delta_E_tilde: float
    boundary_matched: Optional[bool]
    max_defect: float


def _poly_from_factors(factors) -> ComplexPolynomial:
    out = ComplexPolynomial([1.0])
    for f in factors:
        out = out * ComplexPolynomial(f)
    return out


_CDH_DEN = ComplexPolynomial([0.0, 2j, -4.0])  # 2ix(2ix+1)


def _v_mp(lam, q):
    (lam1,) = lam
    return ComplexRationalFunction(ComplexPolynomial([lam1, 1j]), ComplexPolynomial([1.0]))


def _v_ix_product(lam, q):
    return ComplexRationalFunction(_poly_from_factors([a, 1j] for a in lam), ComplexPolynomial([1.0]))


def _v_ix_over_cdh(lam, q):
    return ComplexRationalFunction(_poly_from_factors([a, 1j] for a in lam), _CDH_DEN)


def _v_aw(lam, q):
    num = _poly_from_factors([1.0, -a] for a in lam)
    den = ComplexPolynomial([1.0, 0.0, -(1.0 + q), 0.0, q])
    return ComplexRationalFunction(num, den)


def _esf(values) -> np.ndarray:
    """Elementary symmetric functions ``e_1..e_m``."""
    return np.array([(-1) ** k * c for k, c in enumerate(np.poly(np.asarray(values, dtype=complex)))][1:])


def _esf_mp(values) -> list:
    """``e_1..e_m`` in the current mpmath precision."""
    coeffs = [mpmath.mpf(1)]
    for v in values:
        v = mpmath.mpmathify(v)
        coeffs = [a - v * b for a, b in zip(coeffs + [0], [0] + coeffs)]
    return [(-1) ** k * c for k, c in enumerate(coeffs)][1:]


# affine-in-s targets for the symmetric functions of lam'

def _targets_mp(e, s, q):
    return [e[0] + s / 2]


def _targets_chahn(e, s, q):
    return [e[0] + s, e[1] + e[0] * s / 2 + s / 4]


def _targets_cdhahn(e, s, q):
    e1, e2, e3 = e
    return [e1 + 3 * s / 2,
            e2 + e1 * s + 3 * s / 4,
            e3 + e2 * s / 2 + e1 * s / 4 + s / 8]


def _targets_wilson(e, s, q):
    e1, e2, e3, e4 = e
    return [e1 + 2 * s,
            e2 + 3 * e1 * s / 2 + 3 * s / 2,
            e3 + e2 * s + 3 * e1 * s / 4 + s / 2,
            e4 + e3 * s / 2 + e2 * s / 4 + e1 * s / 8 + s / 16]


def aw_alpha(s: float, q: float) -> float:
    return 1.0 + (1.0 / q - 1.0) * s


def _targets_aw(e, s, q):
    e1, e2, e3, e4 = e
    alpha = aw_alpha(s, q)
    return [(1 + (q**-0.5 - 1) * s) / alpha * e1,
            e2 / alpha,
            (1 - (1 - q**0.5) * s) / alpha * e3,
            (1 - (1 - q) * s) / alpha * e4]


def _energy_mp(n, lam, q):
    return 2.0 * n


def _energy_chahn(n, lam, q):
    a, b = lam
    return n * (n + 2 * a + 2 * b - 1)


def _energy_cdhahn(n, lam, q):
    return float(n)


def _energy_wilson(n, lam, q):
    return n * (n + sum(lam) - 1)


def _energy_aw(n, lam, q):
    return (q**-n - 1) * (1 - np.prod(lam) * q ** (n - 1))


@dataclass(frozen=True)
class DiscreteFamily:
    id: str
    name: str
    parameter_names: tuple[str, ...]
    shift_kind: str  # "additive" or "multiplicative"
    variable: str  # "x" or "z"
    constraints: tuple[tuple[str, Callable], ...] = field(repr=False)
    potential: Callable = field(repr=False)
    targets: Callable = field(repr=False)
    energy: Callable = field(repr=False)
    eta: Callable = field(repr=False)
    delta: Optional[tuple[float, ...]] = None
    q: Optional[float] = None

    @property
    def parameter_count(self) -> int:
        return len(self.parameter_names)

    def with_q(self, q: Optional[float]) -> "DiscreteFamily":
        if q is None or self.shift_kind != "multiplicative":
            return self
        if not 0.0 < q < 1.0:
            raise ParameterError(f"q must lie in (0, 1), got {q}")
        return replace(self, q=float(q))

    def coerce(self, lam, validate: bool = True) -> ParameterVector:
        if isinstance(lam, ParameterVector):
            pv = ParameterVector(self.parameter_names, lam.values) if lam.names == self.parameter_names else None
            if pv is None:
                raise ParameterError(f"{self.id} expects {self.parameter_names}, got {lam.names}")
        elif isinstance(lam, Mapping):
            extra = set(lam) - set(self.parameter_names)
            if extra:
                raise ParameterError(f"{self.id}: unknown parameters {sorted(extra)}")
            try:
                pv = ParameterVector.from_mapping(self.parameter_names, lam)
            except KeyError as exc:
                raise ParameterError(f"{self.id}: {exc}") from None
        else:
            vals = tuple(lam) if np.iterable(lam) else (lam,)
            if len(vals) != self.parameter_count:
                raise ParameterError(f"{self.id} expects {self.parameter_count} parameters, got {len(vals)}")
            pv = ParameterVector(self.parameter_names, vals)
        if validate:
            pv = ParameterVector(pv.names, tuple(float(v) for v in pv.values))
            bad = self.violations(pv)
            if bad:
                raise ParameterError(f"{self.id}{pv}: violates {', '.join(bad)}")
        return pv

    def violations(self, lam: ParameterVector) -> list[str]:
        vals = list(lam.values)
        if not all(math.isfinite(v) for v in vals):
            return ["non-finite parameter"]
        return [text for text, check in self.constraints if not check(vals, self.q)]

    def shifted(self, lam: ParameterVector) -> ParameterVector:
        """Partner parameters: ``lam + delta`` or ``q^(1/2) lam``."""
        if self.shift_kind == "multiplicative":
            return lam.scaled(math.sqrt(self.q))
        return lam.shifted(self.delta)

    def ranges(self) -> str:
        return "; ".join(text for text, _ in self.constraints)

    def delta_text(self) -> str:
        if self.shift_kind == "multiplicative":
            return "x q^(1/2)"
        return "(" + ",".join("1/2" for _ in self.delta) + ")"


def _all_pos(vals, q):
    return all(v > 0 for v in vals)


MEIXNER_POLLACZEK = DiscreteFamily(
    id="meixner-pollaczek", name="MeixnerPollaczek", parameter_names=("lambda",),
    shift_kind="additive", variable="x", delta=(0.5,),
    constraints=(("lambda > 0", _all_pos),),
    potential=_v_mp, targets=_targets_mp, energy=_energy_mp, eta=lambda x: x,
)

CONTINUOUS_HAHN = DiscreteFamily(
    id="continuous-hahn", name="ContinuousHahn", parameter_names=("a", "b"),
    shift_kind="additive", variable="x", delta=(0.5, 0.5),
    constraints=(("a, b > 0", _all_pos),),
    potential=_v_ix_product, targets=_targets_chahn, energy=_energy_chahn, eta=lambda x: x,
)

CONTINUOUS_DUAL_HAHN = DiscreteFamily(
    id="continuous-dual-hahn", name="ContinuousDualHahn", parameter_names=("a", "b", "c"),
    shift_kind="additive", variable="x", delta=(0.5, 0.5, 0.5),
    constraints=(("a, b, c > 0", _all_pos),),
    potential=_v_ix_over_cdh, targets=_targets_cdhahn, energy=_energy_cdhahn, eta=lambda x: x * x,
)

WILSON = DiscreteFamily(
    id="wilson", name="Wilson", parameter_names=("a", "b", "c", "d"),
    shift_kind="additive", variable="x", delta=(0.5, 0.5, 0.5, 0.5),
    constraints=(("a, b, c, d > 0", _all_pos),),
    potential=_v_ix_over_cdh, targets=_targets_wilson, energy=_energy_wilson, eta=lambda x: x * x,
)

ASKEY_WILSON = DiscreteFamily(
    id="askey-wilson", name="AskeyWilson", parameter_names=("a", "b", "c", "d"),
    shift_kind="multiplicative", variable="z", q=DEFAULT_Q,
    constraints=(("-1 < a, b, c, d < 1", lambda v, q: all(-1 < t < 1 for t in v)),
                 ("abcd < q", lambda v, q: float(np.prod(v)) < q)),
    potential=_v_aw, targets=_targets_aw, energy=_energy_aw, eta=lambda z: (z + 1 / z) / 2,
)

DISCRETE_FAMILIES: dict[str, DiscreteFamily] = {
    f.id: f for f in (MEIXNER_POLLACZEK, CONTINUOUS_HAHN, CONTINUOUS_DUAL_HAHN, WILSON, ASKEY_WILSON)
}

ALIASES = {"mp": "meixner-pollaczek", "chahn": "continuous-hahn", "cdhahn": "continuous-dual-hahn",
           "aw": "askey-wilson"}


def get_family(key: Union[str, DiscreteFamily], q: Optional[float] = None) -> DiscreteFamily:
    if isinstance(key, DiscreteFamily):
        return key.with_q(q)
    slug = ALIASES.get(key, key)
    for f in DISCRETE_FAMILIES.values():
        if slug in (f.id, f.name):
            return f.with_q(q)
    raise KeyError(f"unknown discrete family {key!r}")


def askey_wilson(q: float = DEFAULT_Q) -> DiscreteFamily:
    return ASKEY_WILSON.with_q(q)


def _check_s(s: float) -> float:
    s = float(s)
    if not 0.0 <= s <= 1.0:
        raise ParameterError(f"s must lie in [0, 1], got {s}")
    return s


# --- potential functions ------------------------------------------------------

def potential_function(family, lam, q=None, validate: bool = True) -> ComplexRationalFunction:
    """``V(. ; lam)`` as a rational function; ``lam`` may be complex when ``validate`` is off."""
    family = get_family(family, q)
    pv = family.coerce(lam, validate=validate)
    return family.potential(pv.values, family.q)


def conjugate_function(family, rf: ComplexRationalFunction) -> ComplexRationalFunction:
    """``V*``: the analytic continuation of ``conj(V)`` off the physical line."""
    family = get_family(family)
    return rf.reciprocal_conjugate() if family.variable == "z" else rf.conjugate()


def potential_value(family, lam, point, q=None):
    return potential_function(family, lam, q)(point)


def potential_conj_value(family, lam, point, q=None):
    family = get_family(family, q)
    return conjugate_function(family, potential_function(family, lam))(point)


def _partner_weight(family: DiscreteFamily) -> float:
    return 1.0 / family.q if family.shift_kind == "multiplicative" else 1.0


def interp_potential_value(family, lam, s: float, point, q=None):
    """``(1-s) V(lam) + s w V(partner lam)``, ``w = 1/q`` for Askey-Wilson else 1."""
    family = get_family(family, q)
    pv = family.coerce(lam)
    s = _check_s(s)
    v0 = potential_function(family, pv)(point)
    v1 = potential_function(family, family.shifted(pv), validate=False)(point)
    return (1.0 - s) * v0 + s * _partner_weight(family) * v1


def _interp_pair(family: DiscreteFamily, pv: ParameterVector, s: float):
    """Callables for ``V_s`` and ``V_s*``."""
    f0 = potential_function(family, pv)
    f1 = potential_function(family, family.shifted(pv), validate=False)
    c0, c1 = conjugate_function(family, f0), conjugate_function(family, f1)
    w = _partner_weight(family)
    return (lambda t: (1 - s) * f0(t) + s * w * f1(t),
            lambda t: (1 - s) * c0(t) + s * w * c1(t))


# --- spectrum -------------------------------------------------------------------

def _real_if_close(v):
    v = complex(v)
    return v.real if abs(v.imag) <= 1e-12 * max(1.0, abs(v)) else v


def spectrum(family, lam, n: int, q=None, validate: bool = True):
    family = get_family(family, q)
    if n < 0:
        raise IndexError("level index must be non-negative")
    pv = family.coerce(lam, validate=validate)
    return _real_if_close(family.energy(n, np.asarray(pv.values), family.q))


def first_excitation(family, lam, q=None) -> float:
    return float(spectrum(family, lam, 1, q))


# --- shifted-parameter solve -------------------------------------------------------

def canonical_order(values) -> list[complex]:
    """Descending real part, then descending imaginary part."""
    return sorted((complex(v) for v in values), key=lambda v: (-v.real, -v.imag))


def multiset_distance(a, b) -> float:
    a = [complex(v) for v in a]
    b = [complex(v) for v in b]
    if len(a) != len(b):
        return math.inf
    return min(max(abs(x - y) for x, y in zip(a, perm)) for perm in itertools.permutations(b))


def solve_shifted_parameters(family, lam, s: float, q=None) -> ShiftSolveResult:
    """Roots ``lam'`` with ``V_s(.; lam) = alpha V(.; lam')``."""
    family = get_family(family, q)
    pv = family.coerce(lam)
    s = _check_s(s)
    with mpmath.workdps(SOLVE_DPS):
        e_hp = _esf_mp(pv.values)
        q_hp = None if family.q is None else mpmath.mpf(family.q)
        target_hp = family.targets(e_hp, mpmath.mpf(s), q_hp)
        m = len(target_hp)
        asc_hp = [(-1) ** k * target_hp[k - 1] for k in range(m, 0, -1)] + [mpmath.mpf(1)]
        target = np.array([complex(t) for t in target_hp])
    roots = polynomial_roots(ComplexPolynomial([complex(c) for c in asc_hp]))
    roots = canonical_order(refine_roots(asc_hp, roots, dps=SOLVE_DPS))
    defect = float(np.max(np.abs(_esf(roots) - target) / np.maximum(1.0, np.abs(target))))
    if defect > DEFECT_TOL:
        raise DefectError(f"{family.id}: Vieta defect {defect:.3g} exceeds {DEFECT_TOL}")

    vals = tuple(r.real if r.imag == 0 else r for r in roots)
    lp = ParameterVector(family.parameter_names, vals)
    alpha = aw_alpha(s, family.q) if family.shift_kind == "multiplicative" else 1.0
    matched = None
    if s in (0.0, 1.0):
        expected = pv if s == 0.0 else family.shifted(pv)
        matched = multiset_distance(lp.values, expected.values) <= BOUNDARY_TOL * max(
            1.0, max(abs(v) for v in expected.values))
    return ShiftSolveResult(lp, alpha, s * first_excitation(family, pv), matched, defect)


# --- identity checks --------------------------------------------------------------

def default_sample_points(family, n: int = N_SAMPLES) -> np.ndarray:
    """Generic complex points clear of every pole by at least 0.1.

    Continuous-variable families use a fixed pseudo-random scatter in the
    rectangle ``Re x in (0.1, 10)``, ``|Im x| < 0.4``; Askey-Wilson uses
    ``z = exp(i theta)`` with ``theta`` evenly spread over ``(0.05, pi - 0.05)``.
    """
    family = get_family(family)
    if family.variable == "z":
        return np.exp(1j * np.linspace(0.05, math.pi - 0.05, n))
    rng = np.random.default_rng(20240611)
    return rng.uniform(0.1, 10.0, n) + 1j * rng.uniform(-0.4, 0.4, n)


def verify_potential_identity(family, lam, s: float, sample_points=None, q=None,
                              solved: Optional[ShiftSolveResult] = None) -> ResidualReport:
    """Max ``|V_s(pt; lam) - alpha V(pt; lam')|`` over the sample points.

    The reported ``scale`` is ``max |V_s|`` so that ``max_rel_residual``
    is relative whenever the potential exceeds one in magnitude.
    """
    family = get_family(family, q)
    pv = family.coerce(lam)
    pts = default_sample_points(family) if sample_points is None else np.asarray(sample_points, dtype=complex)
    res = solved or solve_shifted_parameters(family, pv, s)
    lhs = interp_potential_value(family, pv, s, pts)
    rhs = res.alpha * potential_function(family, res.lambda_prime, validate=False)(pts)
    err = np.abs(lhs - rhs)
    i = int(np.argmax(err))
    return ResidualReport(family.id, float(s), (complex(pts[0]), complex(pts[-1])), pts.size,
                          float(err[i]), complex(pts[i]), float(np.max(np.abs(lhs))))


# --- polynomial-basis matrices ------------------------------------------------------

def eta_radius(family) -> float:
    """Radius of the circle of eta nodes.

    Askey-Wilson ``V`` and ``V*`` have poles at ``eta = +-1`` and
    ``eta = +-(q^(1/2) + q^(-1/2))/2``; the circle runs at twice the
    outer one.  The other families sit at ``eta`` radius 4.
    """
    family = get_family(family)
    if family.variable == "z":
        return math.sqrt(family.q) + 1 / math.sqrt(family.q)
    return 4.0


def eta_nodes(family, n: int) -> np.ndarray:
    """``n`` equally spaced nodes on a circle about ``eta = 0``.

    On such nodes the column-normalised Vandermonde matrix has
    orthogonal columns, so the fit is as well conditioned as a DFT.
    """
    k = np.arange(n)
    return eta_radius(family) * np.exp(2j * math.pi * (k + 0.5) / n)


def _points_from_eta(family: DiscreteFamily, eta: np.ndarray) -> np.ndarray:
    if family.variable == "z":
        return eta + np.sqrt(eta * eta - 1)
    if family.id in ("continuous-dual-hahn", "wilson"):
        return np.sqrt(eta)
    return eta


def build_htilde_matrix(family, lam, s: float, max_degree: int, q=None,
                        oversample: int = 2) -> np.ndarray:
    """Matrix of the interpolated ``H~_s`` on the basis ``1, eta, ..., eta^N``.

    Column ``k`` holds the eta-coefficients of ``H~_s eta^k`` fitted from
    ``oversample * (N + 1)`` samples.  Entry ``[j, k]`` is the coefficient
    of ``eta^j``; an exact result is upper triangular.
    """
    family = get_family(family, q)
    pv = family.coerce(lam)
    s = _check_s(s)
    N = int(max_degree)
    if N < 1:
        raise ValueError("max_degree must be >= 1")
    eta = eta_nodes(family, oversample * (N + 1))
    pts = _points_from_eta(family, eta)
    vs, vs_conj = _interp_pair(family, pv, s)
    a, b = vs(pts), vs_conj(pts)
    if family.variable == "z":
        fwd, back = family.eta(family.q * pts), family.eta(pts / family.q)
    else:
        fwd, back = family.eta(pts - 1j), family.eta(pts + 1j)
    here = family.eta(pts)
    const = s * first_excitation(family, pv)
    mat = np.zeros((N + 1, N + 1), dtype=complex)
    for k in range(N + 1):
        vals = a * (fwd**k - here**k) + b * (back**k - here**k) + const * here**k
        mat[:, k] = fit_polynomial(here, vals, N).coefficients
    return mat


@dataclass(frozen=True)
class SpectrumReport(ResidualReport):
    triangular_defect: float = 0.0
    diagonal: tuple = ()
    expected: tuple = ()

    def as_dict(self) -> dict:
        d = super().as_dict()
        d["triangular_defect"] = self.triangular_defect
        d["diagonal"] = [float(np.real(v)) for v in self.diagonal]
        d["expected"] = [float(np.real(v)) for v in self.expected]
        return d


def triangular_defect(mat: np.ndarray) -> float:
    """Largest below-diagonal entry relative to the largest entry."""
    scale = float(np.max(np.abs(mat)))
    below = np.tril(mat, -1)
    return float(np.max(np.abs(below))) / scale if scale > 0 else 0.0


def verify_interpolated_spectrum(family, lam, s: float, max_degree: int, q=None,
                                 raise_on_failure: bool = False) -> SpectrumReport:
    """Diagonal of ``H~_s`` against ``alpha E_n(lam') + s E_1(lam)``.

    ``max_abs_residual`` is the largest diagonal mismatch, ``scale`` is
    ``1 + |E_N|`` and ``argmax_x`` is the offending degree.
    """
    family = get_family(family, q)
    pv = family.coerce(lam)
    solved = solve_shifted_parameters(family, pv, s)
    mat = build_htilde_matrix(family, pv, s, max_degree)
    N = int(max_degree)
    expected = np.array([solved.alpha * spectrum(family, solved.lambda_prime, n, validate=False)
                         + solved.delta_E_tilde for n in range(N + 1)], dtype=complex)
    diag = np.diag(mat)
    err = np.abs(diag - expected)
    i = int(np.argmax(err))
    scale = 1.0 + abs(expected[-1])
    tri = triangular_defect(mat)
    report = SpectrumReport(family.id, float(s), (0, N), N + 1, float(err[i]), complex(i), scale,
                            tri, tuple(diag), tuple(expected))
    if raise_on_failure and (err[i] > TRIANGULAR_TOL * scale or tri > TRIANGULAR_TOL):
        raise DefectError(f"{family.id} s={s}: diagonal mismatch {err[i]:.3g}, "
                          f"below-diagonal {tri:.3g}")
    return report


def sample_parameters(family, rng: np.random.Generator, q=None) -> ParameterVector:
    family = get_family(family, q)
    m = family.parameter_count
    if family.shift_kind == "multiplicative":
        while True:
            vals = rng.uniform(-0.9, 0.9, m)
            if np.prod(vals) < family.q:
                return family.coerce(tuple(vals))
    return family.coerce(tuple(rng.uniform(0.1, 3.0, m)))
