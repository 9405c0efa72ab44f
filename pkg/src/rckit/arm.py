"""Single-link elastic-joint robot arm: dynamics, periodic signals, the
output-injection normalized form, the backstepping stabilizer, and the
secondary-state observer.

States are (link angle, link rate, rotor angle, rotor rate). The raw drift
matrix is unstable; an output-injection vector p moves the linear part to
A = A0 + p c^T (Hurwitz, checked at construction) while the measured
nonlinearity absorbs the compensating -p y term. All model constants live in
PlantParams so the toolkit carries no hidden globals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import ContinuousStateSpace, mat_exp, ss_to_tf, zoh_discretize
from .polynomials import Polynomial, is_schur_stable

__all__ = ["PlantParams", "SignalSpec", "plant_deriv", "backstepping_control", "observer_step"]


def _charpoly(M: np.ndarray) -> Polynomial:
    """Monic characteristic polynomial by the Leverrier-Faddeev recursion."""
    n = M.shape[0]
    eye = np.eye(n)
    Bk = eye.copy()
    coeffs = np.zeros(n + 1)
    coeffs[n] = 1.0
    for k in range(1, n + 1):
        Mk = M @ Bk
        ak = -np.trace(Mk) / k
        coeffs[n - k] = ak
        Bk = Mk + ak * eye
    return Polynomial(coeffs)


def _is_hurwitz(M: np.ndarray) -> bool:
    # A is Hurwitz iff e^{A tau} is Schur for tau > 0; reuse the discrete test
    tau = 1.0 / (1.0 + np.linalg.norm(M, 1))
    return is_schur_stable(_charpoly(mat_exp(M * tau)))


@dataclass(frozen=True)
class PlantParams:
    """Physical constants, output injection, and initial state of the arm."""

    J_l: float = 2.0        # link inertia [kg m^2]
    J_m: float = 0.5        # rotor inertia [kg m^2]
    K: float = 0.05         # joint elastic constant [kg m^2 / s^2]
    M: float = 0.5          # link mass [kg]
    g: float = 9.8          # gravity [m / s^2]
    l: float = 0.5          # center of mass [m]
    F_l: float = 0.2        # link viscous friction [kg m^2 / s]
    F_m: float = 0.2        # rotor viscous friction [kg m^2 / s]
    p: tuple = (-2.10, -1.295, -9.36, 3.044)
    x0: tuple = (0.05, 0.0, 0.05, 0.0)

    def __post_init__(self):
        if min(self.J_l, self.J_m) <= 0:
            raise ValueError("inertias must be positive")
        p = np.asarray(self.p, dtype=float)
        x0 = np.asarray(self.x0, dtype=float)
        if p.shape != (4,) or x0.shape != (4,):
            raise ValueError("p and x0 must be 4-vectors")
        object.__setattr__(self, "p", tuple(p))
        object.__setattr__(self, "x0", tuple(x0))
        if not _is_hurwitz(self.A):
            raise ValueError("A0 + p c^T must be Hurwitz; adjust the injection vector p")

    @property
    def gravity_gain(self) -> float:
        """M g l / J_l, the gain of the sin-of-output term."""
        return self.M * self.g * self.l / self.J_l

    @property
    def A0(self) -> np.ndarray:
        K, Jl, Jm, Fl, Fm = self.K, self.J_l, self.J_m, self.F_l, self.F_m
        return np.array([
            [0.0, 1.0, 0.0, 0.0],
            [-K / Jl, -Fl / Jl, K / Jl, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [K / Jm, 0.0, -K / Jm, -Fm / Jm],
        ])

    @property
    def b(self) -> np.ndarray:
        return np.array([0.0, 0.0, 0.0, 1.0])

    @property
    def c(self) -> np.ndarray:
        return np.array([1.0, 0.0, 0.0, 0.0])

    @property
    def A(self) -> np.ndarray:
        """Output-injection stabilized drift A0 + p c^T."""
        return self.A0 + np.outer(np.asarray(self.p), self.c)

    def phi0(self, y: float) -> np.ndarray:
        """Measured nonlinearity of the raw model: gravity torque on the link."""
        return np.array([0.0, -self.gravity_gain * math.sin(y), 0.0, 0.0])

    def phi(self, y: float) -> np.ndarray:
        """Nonlinearity of the normalized form: phi0(y) - p y."""
        return self.phi0(y) - np.asarray(self.p) * y

    def continuous(self) -> ContinuousStateSpace:
        """Linear part of the normalized form (the loop the controller sees)."""
        return ContinuousStateSpace(self.A, self.b, self.c)

    def discretized_tf(self, Ts: float):
        """Exact ZOH pulse transfer function of the linear part."""
        return ss_to_tf(zoh_discretize(self.continuous(), Ts))


@dataclass(frozen=True)
class SignalSpec:
    """Closed forms of the reference and disturbances.

    All signals share the true period T_nominal * (1 + alpha); only the
    controller's internal-model length stays at the nominal value, which is
    exactly the mismatch the sweep studies.
    """

    r_amp: float = 0.05
    r_offset: float = 0.1
    d1_amp: float = 0.04
    d2_amp: float = 0.02
    T_nominal: float = 20.0 * math.pi / 3.0
    alpha: float = 0.0

    def __post_init__(self):
        if self.T_nominal <= 0:
            raise ValueError("nominal period must be positive")
        if 1.0 + self.alpha <= 0:
            raise ValueError("period perturbation must keep the period positive")

    @property
    def T_true(self) -> float:
        return self.T_nominal * (1.0 + self.alpha)

    @property
    def omega(self) -> float:
        return 2.0 * math.pi / self.T_true

    def reference(self, t: float) -> float:
        return self.r_amp * math.sin(self.omega * t) + self.r_offset

    def reference_dot(self, t: float) -> float:
        return self.r_amp * self.omega * math.cos(self.omega * t)

    def reference_ddot(self, t: float) -> float:
        return -self.r_amp * self.omega ** 2 * math.sin(self.omega * t)

    def d1(self, t: float) -> float:
        return self.d1_amp * math.sin(self.omega * t)

    def d2(self, t: float) -> float:
        w = self.omega
        return self.d2_amp * math.cos(w * t) * math.sin(w * t)

    def disturbance(self, t: float) -> np.ndarray:
        return np.array([0.0, self.d1(t), 0.0, self.d2(t)])


def plant_deriv(x, u: float, t: float, plant: PlantParams, signals: SignalSpec) -> np.ndarray:
    """Raw-model state derivative A0 x + b u + phi0(y) + d(t)."""
    x = np.asarray(x, dtype=float)
    return plant.A0 @ x + plant.b * u + plant.phi0(x[0]) + signals.disturbance(t)


def backstepping_control(x_s, r: float, r_dot: float, r_ddot: float,
                         plant: PlantParams) -> float:
    """Static state feedback stabilizing the secondary (deviation) system.

    Closed-form backstepping law; the origin is an equilibrium for every
    reference triple, so zero deviation always maps to zero torque.
    """
    xs1, xs2, xs3, xs4 = (float(v) for v in x_s)
    Jl, Jm, K, Fl, Fm = plant.J_l, plant.J_m, plant.K, plant.F_l, plant.F_m
    grav = plant.gravity_gain
    sin, cos = math.sin, math.cos
    eta3 = (-Fl / Jl * xs2 - K / Jl * (xs1 - xs3)
            - grav * (sin(xs1 + r) - sin(r)))
    eta4 = (-Fl / Jl * eta3 - K / Jl * (xs2 - xs4)
            - grav * ((xs2 + r_dot) * cos(xs1 + r) - r_dot * cos(r)))
    v = -7.5 * xs1 - 19.0 * xs2 - 17.0 * eta3 - 7.0 * eta4
    mu1 = -eta3 + K / Jm * xs1 - K / Jm * xs3 - Fm / Jm * xs4
    mu2 = (Fl / Jl * eta4 + grav * (eta3 + r_ddot) * cos(xs1 + r)
           - grav * ((xs2 + r_dot) ** 2 * sin(xs1 + r)
                     + r_ddot * cos(r) - r_dot ** 2 * sin(r)))
    return mu1 + Jl / K * (v + mu2)


def secondary_deriv(x_s, u_s: float, y: float, r: float,
                    plant: PlantParams) -> np.ndarray:
    """Derivative of the deviation system A x_s + b u_s + phi(y) - phi(r).

    The injection terms are folded in as p (x_s1 - y + r), which is the same
    expression with fewer cancellations.
    """
    x_s = np.asarray(x_s, dtype=float)
    p = np.asarray(plant.p)
    drive = np.zeros(4)
    drive[1] = -plant.gravity_gain * (math.sin(y) - math.sin(r))
    mismatch = x_s[0] - y + r
    return plant.A0 @ x_s + plant.b * u_s + drive + p * mismatch


def observer_step(xs_hat, y_of_t, r_of_t, u_s: float, plant: PlantParams,
                  t0: float, window: float, h_int: float) -> np.ndarray:
    """Advance the secondary-state observer over one sensor window.

    Integrates d xhat_s/dt = A xhat_s + b u_s + phi(y(t)) - phi(r(t)) with
    classical RK4 substeps of h_int, holding u_s constant. y_of_t and r_of_t
    are callables evaluated at the stage times, which is the continuous-
    measurement emulation of the observer.
    """
    n = int(round(window / h_int))
    if n < 1 or abs(n * h_int - window) > 1e-9 * max(1.0, window):
        raise ValueError("window must be an integer number of h_int substeps")
    x = np.asarray(xs_hat, dtype=float).copy()
    for i in range(n):
        t = t0 + i * h_int
        h = h_int
        k1 = secondary_deriv(x, u_s, y_of_t(t), r_of_t(t), plant)
        ym, rm = y_of_t(t + 0.5 * h), r_of_t(t + 0.5 * h)
        k2 = secondary_deriv(x + 0.5 * h * k1, u_s, ym, rm, plant)
        k3 = secondary_deriv(x + 0.5 * h * k2, u_s, ym, rm, plant)
        k4 = secondary_deriv(x + h * k3, u_s, y_of_t(t + h), r_of_t(t + h), plant)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(x)):
            raise FloatingPointError(f"observer state became non-finite at t={t + h}")
    return x
