"""Numerical kernels: finite differences, Sturm bisection, polynomials, Newton."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import mpmath
import numpy as np

from .errors import ConvergenceError, EvaluationError, IllConditionedError, SingularJacobianError

EIG_RTOL = 1e-10
ROOT_CHECK = 1e-10
MERGE_DEFECT = 1e-11


@dataclass(frozen=True)
class Grid1D:
    """``n`` interior points of ``[a, b]``; the endpoints carry Dirichlet walls."""

    a: float
    b: float
    n: int

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"need a < b, got [{self.a}, {self.b}]")
        if self.n < 3:
            raise ValueError("need at least 3 interior points")

    @property
    def h(self) -> float:
        return (self.b - self.a) / (self.n + 1)

    @property
    def points(self) -> np.ndarray:
        return self.a + self.h * np.arange(1, self.n + 1)


@dataclass(frozen=True)
class TridiagonalOperator:
    diagonal: np.ndarray
    off_diagonal: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diagonal, dtype=float)
        e = np.asarray(self.off_diagonal, dtype=float)
        if e.shape != (max(d.size - 1, 0),):
            raise ValueError("off-diagonal must have n-1 entries")
        object.__setattr__(self, "diagonal", d)
        object.__setattr__(self, "off_diagonal", e)

    @property
    def n(self) -> int:
        return self.diagonal.size

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diagonal) + np.diag(self.off_diagonal, 1) + np.diag(self.off_diagonal, -1)

    def gershgorin(self) -> tuple[float, float]:
        r = np.zeros_like(self.diagonal)
        r[:-1] += np.abs(self.off_diagonal)
        r[1:] += np.abs(self.off_diagonal)
        return float(np.min(self.diagonal - r)), float(np.max(self.diagonal + r))


def discretize(potential: Callable[[np.ndarray], np.ndarray], grid: Grid1D) -> TridiagonalOperator:
    """Three-point stencil for ``-d^2/dx^2 + U(x)`` with Dirichlet ends."""
    x = grid.points
    u = np.asarray(potential(x), dtype=float)
    if u.shape == ():
        u = np.full_like(x, float(u))
    bad = ~np.isfinite(u)
    if bad.any():
        raise EvaluationError(f"potential not finite at x={x[bad][0]!r}")
    h2 = grid.h**2
    return TridiagonalOperator(2.0 / h2 + u, np.full(grid.n - 1, -1.0 / h2))


def sturm_count(op: TridiagonalOperator, sigma) -> np.ndarray:
    """Number of eigenvalues strictly below each shift in ``sigma``."""
    sig = np.atleast_1d(np.asarray(sigma, dtype=float))
    d, e2 = op.diagonal, op.off_diagonal**2
    tiny = np.finfo(float).tiny * 1e3
    count = np.zeros(sig.shape, dtype=np.int64)
    q = d[0] - sig
    q = np.where(q == 0.0, -tiny, q)
    count += q < 0
    for i in range(1, d.size):
        q = (d[i] - sig) - e2[i - 1] / q
        q = np.where(q == 0.0, -tiny, q)
        count += q < 0
    return count


def eigen_lowest(op: TridiagonalOperator, k: int, rtol: float = EIG_RTOL,
                 maxiter: int = 200, sections: int = 31) -> np.ndarray:
    """The ``k`` smallest eigenvalues by multisection on Sturm counts.

    Each pass splits every bracket into ``sections + 1`` pieces and
    keeps the piece holding the target eigenvalue.
    """
    if not 1 <= k <= op.n:
        raise ValueError(f"k must lie in [1, {op.n}], got {k}")
    lo_all, hi_all = op.gershgorin()
    span = max(hi_all - lo_all, abs(lo_all), abs(hi_all), 1.0)
    atol = 8 * np.finfo(float).eps * span
    lo_all -= atol
    hi_all += atol
    idx = np.arange(k)
    lo = np.full(k, lo_all)
    hi = np.full(k, hi_all)
    frac = np.arange(1, sections + 1) / (sections + 1)
    for _ in range(maxiter):
        width = hi - lo
        done = width <= np.maximum(rtol * np.maximum(np.abs(lo), np.abs(hi)), atol)
        if done.all():
            return 0.5 * (lo + hi)
        pts = lo[:, None] + width[:, None] * frac[None, :]
        cnt = sturm_count(op, pts.ravel()).reshape(pts.shape)
        below = cnt <= idx[:, None]
        # last point still below target and first point past it
        n_below = below.sum(axis=1)
        new_lo = np.where(n_below > 0, pts[idx, np.maximum(n_below - 1, 0)], lo)
        new_hi = np.where(n_below < sections, pts[idx, np.minimum(n_below, sections - 1)], hi)
        lo = np.where(done, lo, new_lo)
        hi = np.where(done, hi, new_hi)
    raise ConvergenceError(f"Sturm bisection did not reach rtol={rtol} in {maxiter} passes")


@dataclass(frozen=True)
class ComplexPolynomial:
    """Polynomial with complex coefficients in ascending degree."""

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coefficients, dtype=complex))
        if c.size == 0:
            raise ValueError("empty coefficient list")
        object.__setattr__(self, "coefficients", c)

    @classmethod
    def from_roots(cls, roots: Sequence[complex], lead: complex = 1.0) -> "ComplexPolynomial":
        return cls(lead * np.poly(np.asarray(roots, dtype=complex))[::-1])

    @property
    def degree(self) -> int:
        return self.coefficients.size - 1

    @property
    def lead(self) -> complex:
        return self.coefficients[-1]

    def __call__(self, t):
        t = np.asarray(t, dtype=complex)
        out = np.zeros_like(t) + self.coefficients[-1]
        for c in self.coefficients[-2::-1]:
            out = out * t + c
        return out

    def derivative(self) -> "ComplexPolynomial":
        if self.degree == 0:
            return ComplexPolynomial([0.0])
        return ComplexPolynomial(self.coefficients[1:] * np.arange(1, self.degree + 1))

    def trim(self, rtol: float = 1e-12) -> "ComplexPolynomial":
        """Drop leading coefficients below ``rtol * max|c|``."""
        c = self.coefficients
        cut = rtol * np.max(np.abs(c))
        m = c.size
        while m > 1 and abs(c[m - 1]) <= cut:
            m -= 1
        return ComplexPolynomial(c[:m])

    def conjugate(self) -> "ComplexPolynomial":
        return ComplexPolynomial(np.conj(self.coefficients))

    def __mul__(self, other: "ComplexPolynomial") -> "ComplexPolynomial":
        return ComplexPolynomial(np.convolve(self.coefficients, other.coefficients))

    def residual(self, t, values) -> float:
        """Max abs misfit against samples ``values`` at nodes ``t``."""
        return float(np.max(np.abs(self(t) - np.asarray(values, dtype=complex))))


def _vieta_defect(roots: np.ndarray, monic: np.ndarray) -> float:
    # monic: descending coefficients, leading 1
    rebuilt = np.poly(roots)
    return float(np.max(np.abs(rebuilt - monic) / np.maximum(1.0, np.abs(monic))))


def _merge_clusters(roots: np.ndarray, radius: float, poly: "ComplexPolynomial") -> np.ndarray:
    """Replace each group of roots closer than ``radius`` by one point.

    The centroid of a k-fold cluster is polished by Newton on the
    (k-1)-th derivative, where a true k-fold root is simple.
    """
    out = roots.copy()
    used = np.zeros(roots.size, dtype=bool)
    for i in range(roots.size):
        if used[i]:
            continue
        group = [j for j in range(i, roots.size)
                 if not used[j] and abs(roots[j] - roots[i]) < radius * max(1.0, abs(roots[i]))]
        used[group] = True
        center = roots[group].mean()
        if len(group) > 1:
            if not np.any(poly.coefficients.imag) and abs(center.imag) <= 1e-12 * max(1.0, abs(center)):
                # conjugate-symmetric cluster of a real polynomial sits on the axis
                center = complex(center.real, 0.0)
            d = poly
            for _ in range(len(group) - 1):
                d = d.derivative()
            dd = d.derivative()
            for _ in range(5):
                f, fp = d(center), dd(center)
                if fp == 0:
                    break
                nxt = center - f / fp
                if not np.isfinite(nxt) or abs(d(nxt)) >= abs(f):
                    break
                center = nxt
        out[group] = center
    return out


def polynomial_roots(p: ComplexPolynomial) -> np.ndarray:
    """All roots (with multiplicity) from companion-matrix eigenvalues.

    Near-coincident roots (a split multiple root) are replaced by their
    centroid when the Vieta defect stays at rounding level; the remaining
    simple roots get one safeguarded Newton step.
    """
    c = p.coefficients
    if p.degree < 1:
        raise ValueError("polynomial_roots needs degree >= 1")
    if c[-1] == 0:
        raise ValueError("leading coefficient is zero")
    monic = c / c[-1]
    m = p.degree
    # a real companion matrix keeps real roots real and pairs exact conjugates
    real = not np.any(monic.imag)
    comp = np.zeros((m, m), dtype=float if real else complex)
    comp[1:, :-1] = np.eye(m - 1)
    comp[:, -1] = -(monic.real if real else monic)[:-1]
    roots = np.linalg.eigvals(comp).astype(complex)
    if not np.all(np.isfinite(roots)):
        raise ConvergenceError("companion eigenvalues are not finite")

    # merging two truly distinct roots a distance r apart costs ~r^2 in
    # the coefficients, so a merge that keeps the defect at rounding level
    # only ever joins a split multiple root
    desc = monic[::-1]
    allowed = max(4.0 * _vieta_defect(roots, desc), MERGE_DEFECT)
    simple = np.ones(m, dtype=bool)
    for radius in (1e-3, 1e-4, 1e-5, 1e-7):
        merged = _merge_clusters(roots, radius, ComplexPolynomial(monic))
        if _vieta_defect(merged, desc) <= allowed:
            simple = np.array([np.sum(merged == r) == 1 for r in merged])
            roots = merged
            break

    mp = ComplexPolynomial(monic)
    pr = mp(roots)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        stepped = roots - pr / mp.derivative()(roots)
        ok = simple & np.isfinite(stepped) & (np.abs(mp(stepped)) < np.abs(pr))
    candidate = np.where(ok, stepped, roots)
    if _vieta_defect(candidate, desc) <= _vieta_defect(roots, desc):
        roots = candidate

    scale = np.abs(monic)[None, :] * np.maximum(1.0, np.abs(roots))[:, None] ** np.arange(m + 1)[None, :]
    if np.any(np.abs(mp(roots)) > ROOT_CHECK * scale.sum(axis=1)):
        raise ConvergenceError("root residual exceeds tolerance")
    return roots


def refine_roots(coefficients: Sequence, roots: Sequence[complex], dps: int = 40,
                 maxiter: int = 200) -> np.ndarray:
    """Newton-polish ``roots`` against ascending ``coefficients`` at ``dps`` digits.

    ``coefficients`` may be mpmath numbers carrying more precision than
    a double; the polished roots are then accurate to double precision
    even where the double-precision coefficients are ill-conditioned.
    """
    out = []
    with mpmath.workdps(dps):
        desc = [mpmath.mpmathify(c) for c in reversed(list(coefficients))]
        eps = mpmath.mpf(10) ** (-dps + 5)
        for r0 in roots:
            r0 = complex(r0)
            r = mpmath.mpf(r0.real) if r0.imag == 0 else mpmath.mpc(r0.real, r0.imag)
            for _ in range(maxiter):
                val, der = mpmath.polyval(desc, r, derivative=True)
                if der == 0:
                    break
                step = val / der
                r -= step
                if abs(step) <= eps * max(1, abs(r)):
                    break
            out.append(complex(r))
    return np.array(out, dtype=complex)


def newton_2d(F: Callable, jacobian: Callable, seed: Sequence[float],
              tol: float = 1e-12, maxiter: int = 100) -> tuple[float, float]:
    """Solve ``F(x, y) = 0`` by Newton's method from ``seed``."""
    x, y = (float(v) for v in seed)
    for _ in range(maxiter + 1):
        f1, f2 = F(x, y)
        if max(abs(f1), abs(f2)) <= tol:
            return x, y
        (a, b), (c, d) = jacobian(x, y)
        det = a * d - b * c
        if not math.isfinite(det) or abs(det) <= 1e-14 * max(abs(a * d), abs(b * c), 1e-300):
            raise SingularJacobianError(f"singular Jacobian at ({x}, {y})")
        x -= (d * f1 - b * f2) / det
        y -= (a * f2 - c * f1) / det
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ConvergenceError("Newton iterate diverged")
    raise ConvergenceError(f"Newton did not reach |F| <= {tol} in {maxiter} iterations")


def fit_polynomial(t, values, degree: int, cond_limit: float = 1e13) -> ComplexPolynomial:
    """Least-squares (interpolating when square) fit of degree ``<= degree``.

    Columns of the Vandermonde matrix are normalised before solving; the
    condition number of the normalised matrix is checked against
    ``cond_limit``.
    """
    t = np.asarray(t, dtype=complex).ravel()
    v = np.asarray(values, dtype=complex).ravel()
    if t.size != v.size:
        raise ValueError("nodes and values differ in length")
    if t.size < degree + 1:
        raise ValueError(f"need at least {degree + 1} samples, got {t.size}")
    gaps = np.abs(t[:, None] - t[None, :]) + np.eye(t.size)
    if np.min(gaps) <= 1e-12 * max(1.0, float(np.max(np.abs(t)))):
        raise IllConditionedError("sample nodes are not pairwise distinct")
    vand = t[:, None] ** np.arange(degree + 1)[None, :]
    norms = np.linalg.norm(vand, axis=0)
    scaled = vand / norms
    cond = np.linalg.cond(scaled)
    if not cond < cond_limit:
        raise IllConditionedError(f"Vandermonde condition number {cond:.3g} exceeds {cond_limit:.3g}")
    coef, *_ = np.linalg.lstsq(scaled, v, rcond=None)
    return ComplexPolynomial(coef / norms)
