"""Shape-invariant potentials of ordinary (continuum) quantum mechanics.

Each family is described by its prepotential ``W(x; lam)``; the
Hamiltonian is ``-d^2/dx^2 + W'^2 + W''`` with ground-state energy zero.
Derivatives are hand-coded closed forms.

Two interpolations of the SUSY pair ``(A^dag A, A A^dag)`` are provided:

* :func:`coupling_map` -- the operator-level mixture
  ``(1-s) A^dag A + s A A^dag = H(lam') + dE``.
* :func:`prepotential_coupling_map` -- the prepotential mixture
  ``(1-s) W(lam) + s W(lam+delta) = W(lam')`` with ``dE = s E_1(lam)``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence, Union

import numpy as np

from .errors import BranchError, DomainError, ParameterError
from .params import ParameterVector
from .spectral import newton_2d

ArrayLike = Union[float, np.ndarray]
ParamsLike = Union[ParameterVector, Mapping[str, float], Sequence[float]]

HST_NEWTON_TOL = 1e-12
HST_NEWTON_MAXITER = 100


class ParameterWarning(UserWarning):
    """Shifted parameters left the normalisability range at intermediate s."""


@dataclass(frozen=True)
class Constraint:
    text: str
    check: Callable[[dict], bool]


@dataclass(frozen=True)
class InterpolationResult:
    lambda_prime: ParameterVector
    delta_E: float
    alpha: float = 1.0
    residual: float = 0.0
    branch_note: str = ""


@dataclass(frozen=True)
class ContinuumFamily:
    id: str
    name: str
    parameter_names: tuple[str, ...]
    delta: tuple[float, ...]
    domain: tuple[float, float]
    constraints: tuple[Constraint, ...]
    w: Callable = field(repr=False)
    dw: Callable = field(repr=False)
    d2w: Callable = field(repr=False)
    energy: Callable = field(repr=False)
    max_level: Callable = field(repr=False)
    operator_map: Callable = field(repr=False)
    prepotential_map: Callable = field(repr=False)
    window: tuple[float, float] = (-10.0, 10.0)
    eigen_window: Optional[tuple[float, float]] = None

    @property
    def finite_spectrum(self) -> bool:
        return self.id in _FINITE

    def coerce(self, lam: ParamsLike, validate: bool = True) -> ParameterVector:
        """Turn a mapping/sequence/ParameterVector into a checked vector."""
        if isinstance(lam, ParameterVector):
            if lam.names != self.parameter_names:
                raise ParameterError(
                    f"{self.id} expects parameters {self.parameter_names}, got {lam.names}")
            pv = lam
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
            if len(vals) != len(self.parameter_names):
                raise ParameterError(
                    f"{self.id} expects {len(self.parameter_names)} parameters, got {len(vals)}")
            pv = ParameterVector(self.parameter_names, vals)
        pv = ParameterVector(pv.names, tuple(float(v) for v in pv.values))
        if validate:
            self.validate(pv)
        return pv

    def violations(self, lam: ParameterVector) -> list[str]:
        d = lam.as_dict()
        if not all(math.isfinite(v) for v in d.values()):
            return ["non-finite parameter"]
        return [c.text for c in self.constraints if not c.check(d)]

    def validate(self, lam: ParameterVector) -> None:
        bad = self.violations(lam)
        if bad:
            raise ParameterError(f"{self.id}{lam}: violates {', '.join(bad)}")

    def is_valid(self, lam: ParameterVector) -> bool:
        return not self.violations(lam)

    def shifted(self, lam: ParameterVector) -> ParameterVector:
        return lam.shifted(self.delta)

    def ranges(self) -> str:
        return "; ".join(c.text for c in self.constraints)


def _check_x(family: ContinuumFamily, x: ArrayLike) -> np.ndarray:
    xa = np.asarray(x, dtype=float)
    lo, hi = family.domain
    if not np.all((xa > lo) & (xa < hi)):
        raise DomainError(f"{family.id}: x must lie in the open interval ({lo}, {hi})")
    return xa


def _scalar(out: np.ndarray, x: ArrayLike):
    return float(out) if np.ndim(x) == 0 else out


# --- coupling constant maps -------------------------------------------------

def g_prime(g: float, s: float) -> float:
    """Root of g'(g'-1) = g(g+2s-1) continuous in s with g'(0) = g."""
    # 1 + 4g(g+2s-1) written without cancellation near g = 1/2, s = 0
    disc = (2.0 * g - 1.0) ** 2 + 8.0 * g * s
    if disc < 0:
        raise BranchError(f"negative discriminant {disc:.6g} for g={g}, s={s}")
    return 0.5 * (1.0 + math.sqrt(disc))


def g_double_prime(g: float, s: float) -> float:
    """Root of g''(g''+1) = g(g+1-2s) continuous in s with g''(0) = g."""
    # the endpoint g = 2s-1 is kept: it gives g'' = 0 continuously
    if not g >= 2.0 * s - 1.0:
        raise BranchError(f"requires g >= 2s-1 (g={g}, s={s})")
    disc = (2.0 * g + 1.0) ** 2 - 8.0 * g * s
    return 0.5 * (-1.0 + math.sqrt(disc))


def _closure_gp(g, s, gp):
    target = g * (g + 2 * s - 1)
    return abs(gp * (gp - 1) - target) / max(1.0, abs(target))


def _closure_gpp(g, s, gpp):
    target = g * (g + 1 - 2 * s)
    return abs(gpp * (gpp + 1) - target) / max(1.0, abs(target))


def _ho_map(p, s):
    return dict(p), 2 * s * p["omega"], 0.0, "identity"


def _radial_map(p, s):
    g, om = p["g"], p["omega"]
    gp = g_prime(g, s)
    return {"omega": om, "g": gp}, 2 * om * (s + gp - g), _closure_gp(g, s, gp), "+ branch"


def _spt_map(p, s):
    g = p["g"]
    gp = g_prime(g, s)
    return {"g": gp}, gp**2 - g**2, _closure_gp(g, s, gp), "+ branch"


def _soliton_map(p, s):
    g = p["g"]
    gpp = g_double_prime(g, s)
    return {"g": gpp}, g**2 - gpp**2, _closure_gpp(g, s, gpp), "+ branch"


def _morse_map(p, s):
    g, mu = p["g"], p["mu"]
    if not g > s:
        raise BranchError(f"morse requires g > s (g={g}, s={s})")
    return {"g": g - s, "mu": mu}, g**2 - (g - s) ** 2, 0.0, "linear"


def _hst_equations(g, mu, s):
    c1 = mu**2 - g * (g - 2 * s + 1)
    c2 = mu * (2 * g - 2 * s + 1)

    def F(gp, mup):
        return (mup**2 - gp * (gp + 1) - c1, mup * (2 * gp + 1) - c2)

    def J(gp, mup):
        return ((-(2 * gp + 1), 2 * mup), (2 * mup, 2 * gp + 1))

    return F, J


def _hst_map(p, s):
    g, mu = p["g"], p["mu"]
    F, J = _hst_equations(g, mu, s)
    gp, mup = newton_2d(F, J, (g - s, mu), tol=HST_NEWTON_TOL, maxiter=HST_NEWTON_MAXITER)
    res = max(abs(v) for v in F(gp, mup))
    return {"g": gp, "mu": mup}, g**2 - gp**2, res, "newton from (g-s, mu)"


def _pt_map(p, s):
    g, h = p["g"], p["h"]
    gp, hp = g_prime(g, s), g_prime(h, s)
    res = max(_closure_gp(g, s, gp), _closure_gp(h, s, hp))
    return {"g": gp, "h": hp}, (gp + hp) ** 2 - (g + h) ** 2, res, "+ branch"


def _rm_map(p, s):
    g, mu = p["g"], p["mu"]
    gpp = g_double_prime(g, s)
    dE = mu**2 / g**2 + g**2 - (mu**2 / gpp**2 + gpp**2)
    return {"g": gpp, "mu": mu}, dE, _closure_gpp(g, s, gpp), "+ branch"


def _coulomb_map(p, s):
    g, mu = p["g"], p["mu"]
    gp = g_prime(g, s)
    return {"g": gp, "mu": mu}, mu**2 / g**2 - mu**2 / gp**2, _closure_gp(g, s, gp), "+ branch"


# --- prepotential-mixture maps ----------------------------------------------

def _pp_rm(p, s):
    g, mu = p["g"], p["mu"]
    return {"g": g - s, "mu": mu * (g - s) * (g - 1 + s) / (g * (g - 1))}


def _pp_coulomb(p, s):
    g, mu = p["g"], p["mu"]
    return {"g": g + s, "mu": mu * (g + s) * (g + 1 - s) / (g * (g + 1))}


# --- the catalog ------------------------------------------------------------

def _c(text, check):
    return Constraint(text, check)


_omega_pos = _c("omega > 0", lambda p: p["omega"] > 0)
_g_half = _c("g >= 1/2", lambda p: p["g"] >= 0.5)
_g_pos = _c("g > 0", lambda p: p["g"] > 0)
_mu_pos = _c("mu > 0", lambda p: p["mu"] > 0)


def _levels_below(g):
    # greatest integer strictly below g
    return math.ceil(g) - 1


HARMONIC_OSCILLATOR = ContinuumFamily(
    id="harmonic-oscillator",
    name="HarmonicOscillator",
    parameter_names=("omega",),
    delta=(0.0,),
    domain=(-math.inf, math.inf),
    constraints=(_omega_pos,),
    w=lambda x, p: -p["omega"] * x**2 / 2,
    dw=lambda x, p: -p["omega"] * x,
    d2w=lambda x, p: -p["omega"] * np.ones_like(x),
    energy=lambda n, p: 2.0 * n * p["omega"],
    max_level=lambda p: None,
    operator_map=_ho_map,
    prepotential_map=lambda p, s: dict(p),
)

RADIAL_OSCILLATOR = ContinuumFamily(
    id="radial-oscillator",
    name="RadialOscillator",
    parameter_names=("omega", "g"),
    delta=(0.0, 1.0),
    domain=(0.0, math.inf),
    constraints=(_omega_pos, _g_half),
    w=lambda x, p: -p["omega"] * x**2 / 2 + p["g"] * np.log(x),
    dw=lambda x, p: -p["omega"] * x + p["g"] / x,
    d2w=lambda x, p: -p["omega"] - p["g"] / x**2,
    energy=lambda n, p: 4.0 * n * p["omega"],
    max_level=lambda p: None,
    operator_map=_radial_map,
    prepotential_map=lambda p, s: {"omega": p["omega"], "g": p["g"] + s},
    window=(0.05, 15.0),
    eigen_window=(0.0, 12.0),
)

SYMMETRIC_POSCHL_TELLER = ContinuumFamily(
    id="symmetric-poschl-teller",
    name="SymmetricPoschlTeller",
    parameter_names=("g",),
    delta=(1.0,),
    domain=(0.0, math.pi),
    constraints=(_g_half,),
    w=lambda x, p: p["g"] * np.log(np.sin(x)),
    dw=lambda x, p: p["g"] / np.tan(x),
    d2w=lambda x, p: -p["g"] / np.sin(x) ** 2,
    energy=lambda n, p: n * (n + 2.0 * p["g"]),
    max_level=lambda p: None,
    operator_map=_spt_map,
    prepotential_map=lambda p, s: {"g": p["g"] + s},
    window=(0.01 * math.pi, 0.99 * math.pi),
    eigen_window=(0.0, math.pi),
)

SOLITON = ContinuumFamily(
    id="soliton",
    name="Soliton",
    parameter_names=("g",),
    delta=(-1.0,),
    domain=(-math.inf, math.inf),
    constraints=(_g_pos,),
    w=lambda x, p: -p["g"] * np.log(np.cosh(x)),
    dw=lambda x, p: -p["g"] * np.tanh(x),
    d2w=lambda x, p: -p["g"] / np.cosh(x) ** 2,
    energy=lambda n, p: n * (2.0 * p["g"] - n),
    max_level=lambda p: _levels_below(p["g"]),
    operator_map=_soliton_map,
    prepotential_map=lambda p, s: {"g": p["g"] - s},
    eigen_window=(-20.0, 20.0),
)

MORSE = ContinuumFamily(
    id="morse",
    name="Morse",
    parameter_names=("g", "mu"),
    delta=(-1.0, 0.0),
    domain=(-math.inf, math.inf),
    constraints=(_g_pos, _mu_pos),
    w=lambda x, p: p["g"] * x - p["mu"] * np.exp(x),
    dw=lambda x, p: p["g"] - p["mu"] * np.exp(x),
    d2w=lambda x, p: -p["mu"] * np.exp(x),
    energy=lambda n, p: n * (2.0 * p["g"] - n),
    max_level=lambda p: _levels_below(p["g"]),
    operator_map=_morse_map,
    prepotential_map=lambda p, s: {"g": p["g"] - s, "mu": p["mu"]},
    window=(-10.0, 3.0),
    eigen_window=(-30.0, 6.0),
)

HYPERBOLIC_SYMMETRIC_TOP = ContinuumFamily(
    id="hyperbolic-symmetric-top",
    name="HyperbolicSymmetricTop",
    parameter_names=("g", "mu"),
    delta=(-1.0, 0.0),
    domain=(-math.inf, math.inf),
    constraints=(_g_pos, _mu_pos),
    w=lambda x, p: -p["g"] * np.log(np.cosh(x)) - p["mu"] * np.arctan(np.sinh(x)),
    dw=lambda x, p: -p["g"] * np.tanh(x) - p["mu"] / np.cosh(x),
    d2w=lambda x, p: (-p["g"] + p["mu"] * np.sinh(x)) / np.cosh(x) ** 2,
    energy=lambda n, p: n * (2.0 * p["g"] - n),
    max_level=lambda p: _levels_below(p["g"]),
    operator_map=_hst_map,
    prepotential_map=lambda p, s: {"g": p["g"] - s, "mu": p["mu"]},
    eigen_window=(-25.0, 25.0),
)

POSCHL_TELLER = ContinuumFamily(
    id="poschl-teller",
    name="PoschlTeller",
    parameter_names=("g", "h"),
    delta=(1.0, 1.0),
    domain=(0.0, math.pi / 2),
    constraints=(_g_half, _c("h >= 1/2", lambda p: p["h"] >= 0.5)),
    w=lambda x, p: p["g"] * np.log(np.sin(x)) + p["h"] * np.log(np.cos(x)),
    dw=lambda x, p: p["g"] / np.tan(x) - p["h"] * np.tan(x),
    d2w=lambda x, p: -p["g"] / np.sin(x) ** 2 - p["h"] / np.cos(x) ** 2,
    energy=lambda n, p: 4.0 * n * (n + p["g"] + p["h"]),
    max_level=lambda p: None,
    operator_map=_pt_map,
    prepotential_map=lambda p, s: {"g": p["g"] + s, "h": p["h"] + s},
    window=(0.01 * math.pi / 2, 0.99 * math.pi / 2),
    eigen_window=(0.0, math.pi / 2),
)


def _rm_energy(n, p):
    g, mu = p["g"], p["mu"]
    return mu**2 / g**2 + g**2 - (mu**2 / (g - n) ** 2 + (g - n) ** 2)


ROSEN_MORSE = ContinuumFamily(
    id="rosen-morse",
    name="RosenMorse",
    parameter_names=("g", "mu"),
    delta=(-1.0, 0.0),
    domain=(-math.inf, math.inf),
    constraints=(_g_pos, _c("-g^2 < mu < g^2", lambda p: -p["g"] ** 2 < p["mu"] < p["g"] ** 2)),
    w=lambda x, p: -p["mu"] / p["g"] * x - p["g"] * np.log(np.cosh(x)),
    dw=lambda x, p: -p["mu"] / p["g"] - p["g"] * np.tanh(x),
    d2w=lambda x, p: -p["g"] / np.cosh(x) ** 2,
    energy=_rm_energy,
    max_level=lambda p: _levels_below(p["g"] - math.sqrt(abs(p["mu"]))),
    operator_map=_rm_map,
    prepotential_map=_pp_rm,
    eigen_window=(-25.0, 25.0),
)

COULOMB = ContinuumFamily(
    id="coulomb",
    name="Coulomb",
    parameter_names=("g", "mu"),
    delta=(1.0, 0.0),
    domain=(0.0, math.inf),
    constraints=(_g_half, _mu_pos),
    w=lambda x, p: -p["mu"] / p["g"] * x + p["g"] * np.log(x),
    dw=lambda x, p: -p["mu"] / p["g"] + p["g"] / x,
    d2w=lambda x, p: -p["g"] / x**2,
    energy=lambda n, p: p["mu"] ** 2 / p["g"] ** 2 - p["mu"] ** 2 / (p["g"] + n) ** 2,
    max_level=lambda p: None,
    operator_map=_coulomb_map,
    prepotential_map=_pp_coulomb,
    window=(0.05, 15.0),
    eigen_window=(0.0, 120.0),
)

_FINITE = {"soliton", "morse", "hyperbolic-symmetric-top", "rosen-morse"}

CONTINUUM_FAMILIES: dict[str, ContinuumFamily] = {
    f.id: f
    for f in (
        HARMONIC_OSCILLATOR,
        RADIAL_OSCILLATOR,
        SYMMETRIC_POSCHL_TELLER,
        SOLITON,
        MORSE,
        HYPERBOLIC_SYMMETRIC_TOP,
        POSCHL_TELLER,
        ROSEN_MORSE,
        COULOMB,
    )
}

ALIASES = {
    "ho": "harmonic-oscillator",
    "spt": "symmetric-poschl-teller",
    "hst": "hyperbolic-symmetric-top",
    "pt": "poschl-teller",
    "rm": "rosen-morse",
}


def get_family(key: Union[str, ContinuumFamily]) -> ContinuumFamily:
    if isinstance(key, ContinuumFamily):
        return key
    slug = ALIASES.get(key, key)
    for f in CONTINUUM_FAMILIES.values():
        if slug in (f.id, f.name):
            return f
    raise KeyError(f"unknown continuum family {key!r}")


# --- operations ---------------------------------------------------------------

def prepotential(family, lam: ParamsLike, x: ArrayLike) -> ArrayLike:
    family = get_family(family)
    p = family.coerce(lam).as_dict()
    xa = _check_x(family, x)
    return _scalar(family.w(xa, p), x)


def prepotential_derivatives(family, lam: ParamsLike, x: ArrayLike):
    """Analytic ``(W'(x), W''(x))``."""
    family = get_family(family)
    p = family.coerce(lam).as_dict()
    xa = _check_x(family, x)
    return _scalar(family.dw(xa, p), x), _scalar(family.d2w(xa, p), x)


def potential_U(family, lam: ParamsLike, x: ArrayLike) -> ArrayLike:
    """``U = W'^2 + W''`` so that ``H = -d^2/dx^2 + U`` has E_0 = 0."""
    w1, w2 = prepotential_derivatives(family, lam, x)
    return w1 * w1 + w2


def bound_state_count(family, lam: ParamsLike) -> float:
    """Number of bound states; ``math.inf`` for the infinite spectra."""
    family = get_family(family)
    top = family.max_level(family.coerce(lam).as_dict())
    return math.inf if top is None else top + 1


def spectrum(family, lam: ParamsLike, n: int, bound_only: bool = True) -> float:
    """E_n(lam). With ``bound_only=False`` the closed form is evaluated past
    the last bound level of the finite families."""
    family = get_family(family)
    pv = family.coerce(lam)
    if n < 0:
        raise IndexError("level index must be non-negative")
    if bound_only and n >= bound_state_count(family, pv):
        raise IndexError(f"{family.id}{pv} has only {bound_state_count(family, pv)} bound states")
    return float(family.energy(n, pv.as_dict()))


def first_excitation(family, lam: ParamsLike) -> float:
    """E_1(lam), the ground-state energy gained by the partner Hamiltonian.

    Evaluated from the closed form even when lam supports a single bound
    state; it is the constant of the shape-invariance relation either way.
    """
    family = get_family(family)
    return float(family.energy(1, family.coerce(lam).as_dict()))


def _check_s(s: float) -> float:
    s = float(s)
    if not 0.0 <= s <= 1.0:
        raise ParameterError(f"s must lie in [0, 1], got {s}")
    return s


def coupling_map(family, lam: ParamsLike, s: float) -> InterpolationResult:
    """Shifted couplings for ``(1-s) A^dag A + s A A^dag = H(lam') + dE``."""
    family = get_family(family)
    pv = family.coerce(lam)
    s = _check_s(s)
    new, dE, residual, note = family.operator_map(pv.as_dict(), s)
    lp = ParameterVector.from_mapping(family.parameter_names, new)
    bad = family.violations(lp)
    if bad:
        note = f"{note}; lambda' outside range ({', '.join(bad)})"
        warnings.warn(f"{family.id}: lambda'={lp} at s={s} violates {bad}", ParameterWarning,
                      stacklevel=2)
    return InterpolationResult(lp, float(dE), 1.0, float(residual), note)


def prepotential_coupling_map(family, lam: ParamsLike, s: float) -> InterpolationResult:
    """Shifted couplings for ``(1-s) W(lam) + s W(lam+delta) = W(lam')``."""
    family = get_family(family)
    pv = family.coerce(lam)
    s = _check_s(s)
    shifted = family.shifted(pv)
    bad = family.violations(shifted)
    if bad:
        raise ParameterError(f"{family.id}: lam+delta={shifted} violates {', '.join(bad)}")
    lp = ParameterVector.from_mapping(family.parameter_names, family.prepotential_map(pv.as_dict(), s))
    bad = family.violations(lp)
    if bad:
        raise ParameterError(f"{family.id}: lambda'={lp} at s={s} violates {', '.join(bad)}")
    dE = s * first_excitation(family, pv)
    return InterpolationResult(lp, float(dE), 1.0, 0.0, "closed form")


def sample_parameters(family, rng: np.random.Generator) -> ParameterVector:
    """Draw couplings valid for every s in [0, 1] and for lam + delta.

    Ranges keep the partner family normalisable and satisfy the
    existence conditions of :func:`coupling_map` on the whole s-interval.
    """
    family = get_family(family)
    u = rng.uniform
    fid = family.id
    if fid == "harmonic-oscillator":
        d = {"omega": u(0.3, 3.0)}
    elif fid == "radial-oscillator":
        d = {"omega": u(0.3, 3.0), "g": u(0.5, 4.0)}
    elif fid == "symmetric-poschl-teller":
        d = {"g": u(0.5, 4.0)}
    elif fid == "soliton":
        d = {"g": u(1.1, 5.0)}
    elif fid in ("morse", "hyperbolic-symmetric-top"):
        d = {"g": u(1.1, 5.0), "mu": u(0.2, 3.0)}
    elif fid == "poschl-teller":
        d = {"g": u(0.5, 4.0), "h": u(0.5, 4.0)}
    elif fid == "rosen-morse":
        g = u(1.5, 5.0)
        lim = 0.9 * (g - 1.0) ** 2
        d = {"g": g, "mu": u(-lim, lim)}
    elif fid == "coulomb":
        d = {"g": u(0.5, 4.0), "mu": u(0.2, 3.0)}
    else:  # pragma: no cover
        raise KeyError(fid)
    return family.coerce(d)
