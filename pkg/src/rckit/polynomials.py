"""Real-coefficient polynomial and rational-function algebra in the z domain.

Polynomials are stored as ascending coefficient arrays in positive powers of
z (one canonical representation; anything written in powers of z^{-1} is
converted at module boundaries by explicit delay bookkeeping). Root finding
is a vectorized Aberth-Ehrlich iteration with closed forms for degrees one
and two; stability predicates and the unit-circle winding counter are built
on top of it.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Polynomial",
    "RationalFunction",
    "ZeroSplit",
    "RootFindingError",
    "poly_roots",
    "poly_from_roots",
    "split_zeros",
    "freq_response",
    "is_schur_stable",
    "count_roots_in_disk",
    "SPLIT_THRESHOLD",
    "SCHUR_MARGIN",
]

# Roots with modulus below this are treated as cancelable plant zeros; the
# slack keeps the inverse filter away from ill-conditioned near-circle zeros.
SPLIT_THRESHOLD = 1.0 - 1e-6

# Strictness of the Schur predicate: moduli in [1 - SCHUR_MARGIN, 1] count as
# unstable, which is the conservative reading a small-gain certificate needs.
SCHUR_MARGIN = 1e-9

_ROOT_TOL = 1e-12
_ROOT_MAX_ITER = 500
_CANCEL_TOL = 1e-9


class RootFindingError(RuntimeError):
    """Aberth iteration failed to converge; carries the worst residual."""


class Polynomial:
    """Real polynomial with ascending coefficients; immutable by convention."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = np.atleast_1d(np.asarray(coeffs, dtype=float))
        if c.ndim != 1:
            raise ValueError("coefficients must be one-dimensional")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        # trim exact trailing zeros so the degree is well defined
        nz = np.nonzero(c)[0]
        self.coeffs = c[: nz[-1] + 1].copy() if nz.size else np.zeros(1)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return self.degree == 0 and self.coeffs[0] == 0.0

    @property
    def leading(self) -> float:
        return float(self.coeffs[-1])

    def __call__(self, x):
        """Horner evaluation; works on scalars and numpy arrays, real or complex."""
        result = np.zeros_like(np.asarray(x)) + self.coeffs[-1]
        for c in self.coeffs[-2::-1]:
            result = result * x + c
        return result

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        c = np.zeros(n)
        c[: len(self.coeffs)] += self.coeffs
        c[: len(other.coeffs)] += other.coeffs
        return Polynomial(c)

    def __sub__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        c = np.zeros(n)
        c[: len(self.coeffs)] += self.coeffs
        c[: len(other.coeffs)] -= other.coeffs
        return Polynomial(c)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Polynomial(self.coeffs * float(other))
        other = _as_poly(other)
        if self.is_zero or other.is_zero:
            return Polynomial([0.0])
        return Polynomial(np.convolve(self.coeffs, other.coeffs))

    __rmul__ = __mul__
    __radd__ = __add__

    def shifted(self, k: int) -> "Polynomial":
        """Multiply by z^k (append k zero coefficients below)."""
        if k < 0:
            raise ValueError("shift must be nonnegative")
        if self.is_zero:
            return Polynomial([0.0])
        return Polynomial(np.concatenate([np.zeros(k), self.coeffs]))

    def reversed(self) -> "Polynomial":
        """Coefficient reversal: z^deg * p(1/z)."""
        return Polynomial(self.coeffs[::-1])

    def derivative(self) -> "Polynomial":
        if self.degree == 0:
            return Polynomial([0.0])
        return Polynomial(self.coeffs[1:] * np.arange(1, len(self.coeffs)))

    def monic(self) -> "Polynomial":
        if self.is_zero:
            raise ValueError("cannot normalize the zero polynomial")
        return Polynomial(self.coeffs / self.leading)

    def __eq__(self, other):
        return isinstance(other, Polynomial) and np.array_equal(self.coeffs, other.coeffs)

    def __repr__(self):
        return f"Polynomial({self.coeffs.tolist()})"


def _as_poly(x) -> Polynomial:
    if isinstance(x, Polynomial):
        return x
    if isinstance(x, (int, float)):
        return Polynomial([float(x)])
    raise TypeError(f"cannot interpret {type(x).__name__} as a polynomial")


def _quadratic_roots(c0: float, c1: float, c2: float) -> list[complex]:
    # numerically stable quadratic formula
    disc = c1 * c1 - 4.0 * c2 * c0
    sq = cmath.sqrt(disc)
    if c1 >= 0:
        q = -0.5 * (c1 + sq)
    else:
        q = -0.5 * (c1 - sq)
    r1 = q / c2
    r2 = (c0 / q) if q != 0 else 0.0 + 0.0j
    return [complex(r1), complex(r2)]


def _aberth(coeffs: np.ndarray, tol: float, max_iter: int) -> np.ndarray:
    """Simultaneous root iteration; coeffs ascending, leading nonzero, deg >= 3."""
    n = len(coeffs) - 1
    deriv = coeffs[1:] * np.arange(1, n + 1)
    # Cauchy-style radius plus deterministic asymmetric phases
    radius = 1.0 + np.max(np.abs(coeffs[:-1]) / abs(coeffs[-1]))
    angles = 2.0 * np.pi * np.arange(n) / n + 0.7 / n + 0.4
    x = radius * np.exp(1j * angles)
    amag = np.abs(coeffs)

    def horner(c, pts):
        out = np.zeros_like(pts) + c[-1]
        for ck in c[-2::-1]:
            out = out * pts + ck
        return out

    converged = False
    for _ in range(max_iter):
        pv = horner(coeffs, x)
        # backward-error style residual: |p(x)| relative to sum |a_j| |x|^j
        scale = horner(amag, np.abs(x).astype(complex)).real
        resid = np.abs(pv) / np.maximum(scale, 1e-300)
        dv = horner(deriv, x)
        diff = x[:, None] - x[None, :]
        np.fill_diagonal(diff, 1.0)
        srec = np.sum(1.0 / diff, axis=1) - 1.0  # remove the diagonal 1/1 term
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = np.where(dv != 0, pv / np.where(dv != 0, dv, 1.0), 0.0)
        denom = 1.0 - newton * srec
        step = np.where(np.abs(denom) > 1e-300, newton / denom, newton)
        x = x - step
        # the residual test is the convergence criterion; afterwards keep
        # polishing until the iteration stagnates, which pulls clustered
        # roots (backward-converged but still ill-conditioned) tight
        if np.all(resid <= tol):
            converged = True
            if np.all(np.abs(step) <= 1e-14 * (1.0 + np.abs(x))):
                return x
    if converged:
        return x
    pv = horner(coeffs, x)
    scale = horner(amag, np.abs(x).astype(complex)).real
    resid = np.abs(pv) / np.maximum(scale, 1e-300)
    if np.all(resid <= tol * 10):
        return x
    raise RootFindingError(
        f"root iteration did not converge in {max_iter} iterations; "
        f"worst relative residual {np.max(resid):.3e}"
    )


def _symmetrize(roots: np.ndarray) -> np.ndarray:
    """Snap near-real roots to the axis and average conjugate pairs."""
    roots = np.array(roots, dtype=complex)
    real_mask = np.abs(roots.imag) <= 1e-9 * (1.0 + np.abs(roots.real))
    roots[real_mask] = roots[real_mask].real
    cplx = np.where(~real_mask)[0]
    used = set()
    for i in cplx:
        if i in used or roots[i].imag < 0:
            continue
        partner = None
        best = np.inf
        for j in cplx:
            if j in used or j == i or roots[j].imag > 0:
                continue
            d = abs(roots[j] - roots[i].conjugate())
            if d < best:
                best, partner = d, j
        if partner is not None and best <= 1e-6 * (1.0 + abs(roots[i])):
            mean = 0.5 * (roots[i] + roots[partner].conjugate())
            roots[i] = mean
            roots[partner] = mean.conjugate()
            used.update((i, partner))
    return roots


def poly_roots(p: Polynomial, tol: float = _ROOT_TOL, max_iter: int = _ROOT_MAX_ITER) -> np.ndarray:
    """All complex roots, conjugate pairs kept symmetric, multiplicity by repetition.

    Degrees one and two use closed forms; above that an Aberth-Ehrlich
    iteration runs until every root's relative residual drops below `tol`.
    Raises RootFindingError on non-convergence and ValueError for inputs
    without roots (constants, the zero polynomial).
    """
    if p.is_zero:
        raise ValueError("the zero polynomial has no well-defined roots")
    if p.degree < 1:
        raise ValueError("need degree >= 1 to have roots")
    c = p.coeffs
    # factor out roots at the origin (zero trailing coefficients)
    lead_zero = 0
    while c[lead_zero] == 0.0:
        lead_zero += 1
    zeros_at_origin = [0.0 + 0.0j] * lead_zero
    c = c[lead_zero:]
    deg = len(c) - 1
    if deg == 0:
        roots = np.array(zeros_at_origin, dtype=complex)
    elif deg == 1:
        roots = np.array(zeros_at_origin + [complex(-c[0] / c[1])], dtype=complex)
    elif deg == 2:
        roots = np.array(zeros_at_origin + _quadratic_roots(c[0], c[1], c[2]), dtype=complex)
    else:
        found = _aberth(c, tol, max_iter)
        roots = np.concatenate([np.array(zeros_at_origin, dtype=complex), found])
    return _symmetrize(roots)


def poly_from_roots(roots, gain: float = 1.0) -> Polynomial:
    """Real polynomial gain * prod (z - r_i); conjugate pairs are expanded as
    real quadratics so no imaginary residue leaks into the coefficients."""
    roots = np.atleast_1d(np.asarray(roots, dtype=complex))
    real = sorted(r.real for r in roots if abs(r.imag) <= 1e-10 * (1.0 + abs(r)))
    cplx = [r for r in roots if abs(r.imag) > 1e-10 * (1.0 + abs(r))]
    upper = sorted((r for r in cplx if r.imag > 0), key=lambda r: (r.real, r.imag))
    lower = sorted((r for r in cplx if r.imag < 0), key=lambda r: (r.real, -r.imag))
    if len(upper) != len(lower):
        raise ValueError("complex roots must come in conjugate pairs")
    coeffs = np.array([float(gain)])
    for r in real:
        coeffs = np.convolve(coeffs, [-r, 1.0])
    for ru, rl in zip(upper, lower):
        pair = 0.5 * (ru + rl.conjugate())
        coeffs = np.convolve(coeffs, [abs(pair) ** 2, -2.0 * pair.real, 1.0])
    return Polynomial(coeffs)


@dataclass(frozen=True)
class ZeroSplit:
    """Factorization of a polynomial into cancelable and uncancelable parts.

    stable_factor and unstable_factor are monic; gain carries the leading
    coefficient, so gain * stable * unstable reconstructs the input.
    advance_deficit is the relative degree of the enclosing transfer function
    when the split is produced by the inverse-filter synthesis (zero for a
    bare polynomial split).
    """

    stable_factor: Polynomial
    unstable_factor: Polynomial
    gain: float
    advance_deficit: int = 0


def split_zeros(p: Polynomial, threshold: float = SPLIT_THRESHOLD) -> ZeroSplit:
    """Partition the roots of p by modulus: < threshold goes to the stable
    (cancelable) factor, >= threshold to the unstable factor."""
    if p.is_zero:
        raise ValueError("cannot split the zero polynomial")
    if p.degree == 0:
        return ZeroSplit(Polynomial([1.0]), Polynomial([1.0]), p.leading)
    roots = poly_roots(p)
    stable = roots[np.abs(roots) < threshold]
    unstable = roots[np.abs(roots) >= threshold]
    return ZeroSplit(
        stable_factor=poly_from_roots(stable),
        unstable_factor=poly_from_roots(unstable),
        gain=p.leading,
    )


class RationalFunction:
    """Ratio of real polynomials in positive powers of z, denominator monic."""

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial):
        num = _as_poly(num)
        den = _as_poly(den)
        if den.is_zero:
            raise ZeroDivisionError("denominator must not be the zero polynomial")
        lead = den.leading
        self.num = Polynomial(num.coeffs / lead)
        self.den = Polynomial(den.coeffs / lead)

    @property
    def relative_degree(self) -> int:
        return self.den.degree - self.num.degree

    def __call__(self, z):
        return self.num(z) / self.den(z)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return RationalFunction(self.num * float(other), self.den)
        return RationalFunction(self.num * other.num, self.den * other.den).cancelled()

    __rmul__ = __mul__

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = RationalFunction(Polynomial([float(other)]), Polynomial([1.0]))
        num = self.num * other.den + other.num * self.den
        return RationalFunction(num, self.den * other.den).cancelled()

    __radd__ = __add__

    def feedback(self) -> "RationalFunction":
        """Unity negative feedback P/(1+P) = num/(den + num)."""
        den = self.den + self.num
        if den.is_zero:
            raise ZeroDivisionError("feedback denominator vanished (P = -1)")
        return RationalFunction(self.num, den).cancelled()

    def cancelled(self, tol: float = _CANCEL_TOL) -> "RationalFunction":
        """Remove numerator/denominator root pairs that coincide within tol.

        Cancellation is root-based and only fires on actual coincidence, so
        generic arithmetic results pass through untouched.
        """
        if self.num.is_zero or self.num.degree == 0 or self.den.degree == 0:
            return self
        nroots = list(poly_roots(self.num))
        droots = list(poly_roots(self.den))
        kept_n = []
        for r in nroots:
            hit = None
            best = tol
            for i, s in enumerate(droots):
                d = abs(r - s)
                if d <= best:
                    best, hit = d, i
            if hit is None:
                kept_n.append(r)
            else:
                droots.pop(hit)
        if len(kept_n) == len(nroots):
            return self
        num = poly_from_roots(kept_n, gain=self.num.leading)
        den = poly_from_roots(droots, gain=self.den.leading)
        return RationalFunction(num, den)

    def __repr__(self):
        return f"RationalFunction({self.num!r}, {self.den!r})"


def freq_response(r: RationalFunction, omegas, Ts: float) -> np.ndarray:
    """Evaluate r(e^{i omega Ts}) by Horner in complex arithmetic.

    Points that land exactly on a denominator root come back non-finite
    (inf/nan) rather than raising, so callers can report them per point.
    """
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    z = np.exp(1j * omegas * Ts)
    num = r.num(z)
    den = r.den(z)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(den != 0, num / np.where(den != 0, den, 1.0), np.inf + 0j)


def is_schur_stable(p: Polynomial) -> bool:
    """True iff every root has modulus < 1 - SCHUR_MARGIN (boundary counts unstable)."""
    if p.is_zero:
        raise ValueError("the zero polynomial has no stability classification")
    if p.degree == 0:
        return True
    roots = poly_roots(p)
    return bool(np.all(np.abs(roots) < 1.0 - SCHUR_MARGIN))


def count_roots_in_disk(p: Polynomial, radius: float = 1.0,
                        grid: int = 1 << 16, max_grid: int = 1 << 22) -> int:
    """Number of roots with modulus < radius, by winding number on |z| = radius.

    The winding of p(radius * e^{i theta}) around the origin equals the root
    count inside the circle. The phase is accumulated on a uniform grid that
    is doubled until every step is well below pi, which keeps the count exact
    even with roots close to (but not on) the contour. Used as an eigensolver-
    free stability counter for high-degree characteristic polynomials.
    """
    if p.is_zero:
        raise ValueError("the zero polynomial has no roots to count")
    if p.degree == 0:
        return 0
    n = grid
    while True:
        theta = 2.0 * np.pi * np.arange(n + 1) / n
        vals = p(radius * np.exp(1j * theta))
        if np.any(vals == 0):
            raise RootFindingError("a root lies on the counting contour")
        phase = np.angle(vals)
        steps = np.diff(phase)
        steps = np.mod(steps + np.pi, 2.0 * np.pi) - np.pi
        if np.max(np.abs(steps)) < 0.5 * np.pi or n >= max_grid:
            if np.max(np.abs(steps)) >= 0.5 * np.pi:
                raise RootFindingError(
                    "winding grid exhausted; a root is too close to the contour"
                )
            total = float(np.sum(steps))
            return int(round(total / (2.0 * np.pi)))
        n *= 2
