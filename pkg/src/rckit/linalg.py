"""Dense real-matrix kernels: matrix exponential, exact ZOH discretization,
and state-space to transfer-function conversion.

Everything here is sized for small SISO realizations (n <= 10), so the
implementations favor clarity and determinism over large-scale performance:
the matrix exponential is scaling-and-squaring with diagonal Pade
approximants, and the transfer function comes from the Leverrier-Faddeev
recursion instead of an eigensolver.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .polynomials import Polynomial, RationalFunction

__all__ = [
    "ContinuousStateSpace",
    "DiscreteStateSpace",
    "mat_exp",
    "zoh_discretize",
    "ss_to_tf",
]


@dataclass(frozen=True)
class ContinuousStateSpace:
    """SISO continuous-time realization dx/dt = A x + b u, y = c^T x."""

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.asarray(self.b, dtype=float).ravel()
        c = np.asarray(self.c, dtype=float).ravel()
        if A.shape[0] != A.shape[1]:
            raise ValueError(f"A must be square, got shape {A.shape}")
        n = A.shape[0]
        if n < 1:
            raise ValueError("state dimension must be >= 1")
        if b.shape != (n,) or c.shape != (n,):
            raise ValueError(f"b and c must be length-{n} vectors")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b)) and np.all(np.isfinite(c))):
            raise ValueError("state-space data must be finite")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def order(self) -> int:
        return self.A.shape[0]


@dataclass(frozen=True)
class DiscreteStateSpace:
    """SISO one-step realization x[k+1] = F x[k] + g u[k], y = c^T x, sampled at Ts."""

    F: np.ndarray
    g: np.ndarray
    c: np.ndarray
    Ts: float

    def __post_init__(self):
        F = np.atleast_2d(np.asarray(self.F, dtype=float))
        g = np.asarray(self.g, dtype=float).ravel()
        c = np.asarray(self.c, dtype=float).ravel()
        if F.shape[0] != F.shape[1]:
            raise ValueError(f"F must be square, got shape {F.shape}")
        n = F.shape[0]
        if g.shape != (n,) or c.shape != (n,):
            raise ValueError(f"g and c must be length-{n} vectors")
        if not self.Ts > 0:
            raise ValueError(f"Ts must be positive, got {self.Ts}")
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "c", c)

    @property
    def order(self) -> int:
        return self.F.shape[0]


# Pade orders and the 1-norm thresholds below which each is accurate to
# double precision (Higham 2005).
_PADE_THETA = (
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
    (13, 5.371920351148152e0),
)

_PADE_B = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0),
    13: (64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
         1187353796428800.0, 129060195264000.0, 10559470521600.0,
         670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
         960960.0, 16380.0, 182.0, 1.0),
}


def _pade_pq(M: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Numerator/denominator of the diagonal Pade approximant to exp(M)."""
    bcoef = _PADE_B[order]
    n = M.shape[0]
    eye = np.eye(n)
    M2 = M @ M
    if order < 13:
        # U = M * (odd coefficients in M^2), V = even coefficients in M^2
        U = bcoef[1] * eye
        V = bcoef[0] * eye
        Mpow = eye
        for k in range(1, order // 2 + 1):
            Mpow = Mpow @ M2
            U = U + bcoef[2 * k + 1] * Mpow
            V = V + bcoef[2 * k] * Mpow
        U = M @ U
    else:
        M4 = M2 @ M2
        M6 = M4 @ M2
        U = M @ (M6 @ (bcoef[13] * M6 + bcoef[11] * M4 + bcoef[9] * M2)
                 + bcoef[7] * M6 + bcoef[5] * M4 + bcoef[3] * M2 + bcoef[1] * eye)
        V = (M6 @ (bcoef[12] * M6 + bcoef[10] * M4 + bcoef[8] * M2)
             + bcoef[6] * M6 + bcoef[4] * M4 + bcoef[2] * M2 + bcoef[0] * eye)
    return U, V


def mat_exp(M: np.ndarray) -> np.ndarray:
    """Matrix exponential e^M by scaling-and-squaring with diagonal Pade.

    The Pade order is picked from the scaled 1-norm; the result is exact to
    roughly unit roundoff for the moderate norms this toolkit works with.
    Raises on non-square or non-finite input.
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"mat_exp needs a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("mat_exp needs finite entries")
    norm = np.linalg.norm(M, 1)
    if norm == 0.0:
        return np.eye(M.shape[0])
    squarings = 0
    for order, theta in _PADE_THETA:
        if norm <= theta:
            U, V = _pade_pq(M, order)
            break
    else:
        # scale down into the order-13 regime, square back up afterwards
        squarings = max(0, int(np.ceil(np.log2(norm / _PADE_THETA[-1][1]))))
        U, V = _pade_pq(M / (2.0 ** squarings), 13)
    R = np.linalg.solve(V - U, V + U)
    for _ in range(squarings):
        R = R @ R
    return R


def zoh_discretize(sys: ContinuousStateSpace, Ts: float) -> DiscreteStateSpace:
    """Exact zero-order-hold discretization.

    F = e^{A Ts} and g = (integral_0^Ts e^{A s} ds) b are read off jointly
    from the exponential of the augmented matrix [[A, b], [0, 0]] * Ts, which
    keeps both blocks consistent to machine precision.
    """
    if not Ts > 0:
        raise ValueError(f"Ts must be positive, got {Ts}")
    n = sys.order
    aug = np.zeros((n + 1, n + 1))
    aug[:n, :n] = sys.A * Ts
    aug[:n, n] = sys.b * Ts
    E = mat_exp(aug)
    return DiscreteStateSpace(F=E[:n, :n], g=E[:n, n], c=sys.c.copy(), Ts=Ts)


def ss_to_tf(sys: DiscreteStateSpace) -> RationalFunction:
    """Transfer function c^T (zI - F)^{-1} g via the Leverrier-Faddeev recursion.

    The denominator is the monic characteristic polynomial of F; the numerator
    coefficients fall out of the same recursion, so no eigensolver is needed.
    """
    F, g, c = sys.F, sys.g, sys.c
    n = sys.order
    eye = np.eye(n)
    Bk = eye.copy()
    den = np.zeros(n + 1)  # ascending powers of z
    den[n] = 1.0
    num = np.zeros(n)      # coefficient of z^{n-1-k} at step k
    for k in range(1, n + 1):
        num[n - k] = c @ Bk @ g
        Mk = F @ Bk
        ak = -np.trace(Mk) / k
        den[n - k] = ak
        Bk = Mk + ak * eye
    return RationalFunction(Polynomial(num), Polynomial(den))
