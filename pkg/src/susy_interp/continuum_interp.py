"""Pointwise checks of the interpolated continuum Hamiltonians."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from . import continuum_families as cf

DEFAULT_POINTS = 1000
FINITE_MARGIN = 1e-2


@dataclass(frozen=True)
class ResidualReport:
    family: str
    s: Optional[float]
    interval: tuple
    n_points: int
    max_abs_residual: float
    argmax_x: complex
    scale: float = 1.0

    @property
    def max_rel_residual(self) -> float:
        """Residual divided by ``max(1, scale)``."""
        return self.max_abs_residual / max(1.0, self.scale)

    def as_dict(self) -> dict:
        x = self.argmax_x
        return {
            "family": self.family,
            "s": self.s,
            "interval": [_jsonable(v) for v in self.interval],
            "n_points": self.n_points,
            "max_abs_residual": self.max_abs_residual,
            "max_rel_residual": self.max_rel_residual,
            "argmax_x": _jsonable(x),
            "scale": self.scale,
        }


def _jsonable(v):
    if isinstance(v, (complex, np.complexfloating)):
        return float(v.real) if v.imag == 0 else [float(v.real), float(v.imag)]
    return float(v)


GridLike = Union[None, int, Sequence[float], np.ndarray]


def default_grid(family, n: int = DEFAULT_POINTS) -> np.ndarray:
    """Verification grid inside the family window.

    Finite windows are trimmed by ``FINITE_MARGIN`` of their length at
    each end so singular walls are never sampled.
    """
    family = cf.get_family(family)
    a, b = family.window
    lo, hi = family.domain
    if np.isfinite(lo) and np.isfinite(hi):
        m = FINITE_MARGIN * (hi - lo)
        a, b = max(a, lo + m), min(b, hi - m)
    return np.linspace(a, b, n)


def _grid(family, grid: GridLike) -> np.ndarray:
    if grid is None:
        return default_grid(family)
    if isinstance(grid, (int, np.integer)):
        return default_grid(family, int(grid))
    return np.asarray(grid, dtype=float)


def _report(family, s, x, residual, scale) -> ResidualReport:
    i = int(np.argmax(residual))
    return ResidualReport(family.id, s, (float(x[0]), float(x[-1])), x.size,
                          float(residual[i]), float(x[i]), float(scale))


def interp_potential_U_s(family, lam, s: float, x):
    """``W'^2 + (1-2s) W''``: potential of ``(1-s) A^dag A + s A A^dag``."""
    w1, w2 = cf.prepotential_derivatives(family, lam, x)
    return w1 * w1 + (1.0 - 2.0 * s) * w2


def verify_operator_interpolation(family, lam, s: float, grid: GridLike = None) -> ResidualReport:
    family = cf.get_family(family)
    x = _grid(family, grid)
    res = cf.coupling_map(family, lam, s)
    lhs = interp_potential_U_s(family, lam, s, x)
    rhs = cf.potential_U(family, res.lambda_prime, x) + res.delta_E
    return _report(family, float(s), x, np.abs(lhs - rhs), np.max(np.abs(lhs)))


def interp_prepotential(family, lam, s: float, x):
    """``(1-s) W(x; lam) + s W(x; lam + delta)``."""
    family = cf.get_family(family)
    pv = family.coerce(lam)
    return (1.0 - s) * cf.prepotential(family, pv, x) + s * cf.prepotential(family, family.shifted(pv), x)


def verify_prepotential_interpolation(family, lam, s: float, grid: GridLike = None) -> ResidualReport:
    family = cf.get_family(family)
    x = _grid(family, grid)
    res = cf.prepotential_coupling_map(family, lam, s)
    lhs = interp_prepotential(family, lam, s, x)
    rhs = cf.prepotential(family, res.lambda_prime, x)
    return _report(family, float(s), x, np.abs(lhs - rhs), np.max(np.abs(lhs)))


def verify_shape_invariance(family, lam, grid: GridLike = None) -> ResidualReport:
    """Pointwise ``W'^2 - W''`` (lam) against ``U(lam + delta) + E_1(lam)``."""
    family = cf.get_family(family)
    pv = family.coerce(lam)
    x = _grid(family, grid)
    w1, w2 = cf.prepotential_derivatives(family, pv, x)
    partner = w1 * w1 - w2
    rhs = cf.potential_U(family, family.shifted(pv), x) + cf.first_excitation(family, pv)
    return _report(family, None, x, np.abs(partner - rhs), np.max(np.abs(partner)))
