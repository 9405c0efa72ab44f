"""Hybrid sampled-data closed-loop simulator for the elastic-joint arm.

The continuous plant and the secondary-state observer advance together with
fixed-step classical RK4 at h_int (the observer sees the plant's stage
output, which is the continuous-measurement emulation); the control is held
constant over each Ts interval. On every Ts tick the repetitive controller
and the backstepping stabilizer produce the next held control sample.

The exactness checks re-integrate the original, primary, and secondary
systems at step 2 h_int against the recorded tick inputs and fine-grid
output, so the additive-decomposition identity and the observer agreement
carry a measurable fourth-order error instead of cancelling to roundoff.

The inner integration loops are deliberately scalar and unrolled: a sweep
touches several million RK4 steps and dict/array overhead would dominate.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .arm import PlantParams, SignalSpec, backstepping_control
from .design import RcDesign
from .runtime import RepetitiveController, UncertifiedDesignError

__all__ = [
    "SimConfig",
    "SimResult",
    "SweepResult",
    "ExactnessReport",
    "SimulationDiverged",
    "simulate",
    "decomposition_check",
    "run_exactness",
    "rk4_order_ratio",
    "sweep_alpha",
    "iss_sup_norm",
]

BLOWUP_LIMIT = 1.0e6


class SimulationDiverged(RuntimeError):
    """State norm crossed the blow-up guard; carries the time of failure."""


@dataclass(frozen=True)
class SimConfig:
    """Everything one closed-loop run needs, with the step-size contracts."""

    plant: PlantParams
    signals: SignalSpec
    design: RcDesign
    Ts: float = 0.1
    h_int: float = 1e-3
    T_ss: float = 0.01
    horizon_periods: int = 30
    bound_window_periods: int = 5
    require_certified: bool = False

    def __post_init__(self):
        if not (0 < self.h_int <= self.T_ss <= self.Ts):
            raise ValueError("need 0 < h_int <= T_ss <= Ts")
        for name, num, den in (("Ts/h_int", self.Ts, self.h_int),
                               ("T_ss/h_int", self.T_ss, self.h_int)):
            ratio = num / den
            if abs(ratio - round(ratio)) > 1e-9:
                raise ValueError(f"{name} must be an integer, got {ratio}")
        if self.horizon_periods < 1 or self.bound_window_periods < 1:
            raise ValueError("horizon and bound window must be at least one period")
        if self.bound_window_periods > self.horizon_periods:
            raise ValueError("bound window cannot exceed the horizon")

    @property
    def substeps_per_tick(self) -> int:
        return int(round(self.Ts / self.h_int))


@dataclass(frozen=True)
class SimResult:
    """Per-tick series of one run plus the trailing-window error bound."""

    t: np.ndarray
    x: np.ndarray            # (n, 4)
    y: np.ndarray
    r: np.ndarray
    e: np.ndarray            # y - r
    u: np.ndarray
    up: np.ndarray
    us: np.ndarray
    yp_hat: np.ndarray
    xs_hat: np.ndarray       # (n, 4)
    ultimate_bound: float

    def to_csv(self, path) -> None:
        header = "t,x1,x2,x3,x4,y,r,e,u,up,us,yp_hat,xs_hat1,xs_hat2,xs_hat3,xs_hat4"
        cols = np.column_stack([
            self.t, self.x, self.y, self.r, self.e, self.u, self.up,
            self.us, self.yp_hat, self.xs_hat,
        ])
        lines = [header]
        for row in cols:
            lines.append(",".join(f"{v:.17g}" for v in row))
        with open(path, "w", newline="") as fh:
            fh.write("\n".join(lines) + "\n")


@dataclass(frozen=True)
class SweepResult:
    """Ultimate bounds per (alpha, weight variant); NaN marks a failed cell."""

    alphas: np.ndarray
    bounds: np.ndarray       # (n_alphas, n_variants)
    variant_labels: tuple
    failures: tuple = ()

    def to_csv(self, path) -> None:
        if self.bounds.shape[1] != 2:
            raise ValueError("the sweep CSV format carries exactly two variants")
        lines = ["alpha,bound_w1,bound_w2"]
        for a, row in zip(self.alphas, self.bounds):
            lines.append(f"{a:.17g}," + ",".join(f"{v:.17g}" for v in row))
        with open(path, "w", newline="") as fh:
            fh.write("\n".join(lines) + "\n")


@dataclass(frozen=True)
class ExactnessReport:
    """Measured identities of one run: decomposition and observer errors."""

    decomposition_error: float
    observer_error: float


def _consts(plant: PlantParams, signals: SignalSpec) -> tuple:
    p1, p2, p3, p4 = plant.p
    return (plant.K / plant.J_l, plant.F_l / plant.J_l,
            plant.K / plant.J_m, plant.F_m / plant.J_m,
            plant.gravity_gain, p1, p2, p3, p4,
            signals.omega, signals.r_amp, signals.r_offset,
            signals.d1_amp, signals.d2_amp)


def _advance_joint(state, t0, h, n, u, us, c, y_out=None, s_out=None, base=0):
    """RK4 the coupled (plant, observer) 8-state system over n substeps.

    The observer stages read the plant's stage output, so the pair is one
    classical RK4 on the joint vector field. Optionally records the plant
    output and observer state at every node.
    """
    (kjl, fjl, kjm, fmjm, grav, p1, p2, p3, p4,
     om, ra, roff, da1, da2) = c
    x1, x2, x3, x4, s1, s2, s3, s4 = state
    sin = math.sin
    cos = math.cos
    h2 = 0.5 * h
    h6 = h / 6.0
    for i in range(n):
        t = t0 + i * h
        st = sin(om * t); ct = cos(om * t)
        r = ra * st + roff; d1 = da1 * st; d2 = da2 * ct * st
        sr = sin(r)
        k1x1 = x2
        k1x2 = -kjl * x1 - fjl * x2 + kjl * x3 - grav * sin(x1) + d1
        k1x3 = x4
        k1x4 = kjm * x1 - kjm * x3 - fmjm * x4 + u + d2
        mis = s1 - x1 + r
        k1s1 = s2 + p1 * mis
        k1s2 = -kjl * s1 - fjl * s2 + kjl * s3 - grav * (sin(x1) - sr) + p2 * mis
        k1s3 = s4 + p3 * mis
        k1s4 = kjm * s1 - kjm * s3 - fmjm * s4 + us + p4 * mis

        tm = t + h2
        st = sin(om * tm); ct = cos(om * tm)
        r = ra * st + roff; d1 = da1 * st; d2 = da2 * ct * st
        sr = sin(r)
        a1 = x1 + h2 * k1x1; a2 = x2 + h2 * k1x2; a3 = x3 + h2 * k1x3; a4 = x4 + h2 * k1x4
        b1 = s1 + h2 * k1s1; b2 = s2 + h2 * k1s2; b3 = s3 + h2 * k1s3; b4 = s4 + h2 * k1s4
        k2x1 = a2
        k2x2 = -kjl * a1 - fjl * a2 + kjl * a3 - grav * sin(a1) + d1
        k2x3 = a4
        k2x4 = kjm * a1 - kjm * a3 - fmjm * a4 + u + d2
        mis = b1 - a1 + r
        k2s1 = b2 + p1 * mis
        k2s2 = -kjl * b1 - fjl * b2 + kjl * b3 - grav * (sin(a1) - sr) + p2 * mis
        k2s3 = b4 + p3 * mis
        k2s4 = kjm * b1 - kjm * b3 - fmjm * b4 + us + p4 * mis

        a1 = x1 + h2 * k2x1; a2 = x2 + h2 * k2x2; a3 = x3 + h2 * k2x3; a4 = x4 + h2 * k2x4
        b1 = s1 + h2 * k2s1; b2 = s2 + h2 * k2s2; b3 = s3 + h2 * k2s3; b4 = s4 + h2 * k2s4
        k3x1 = a2
        k3x2 = -kjl * a1 - fjl * a2 + kjl * a3 - grav * sin(a1) + d1
        k3x3 = a4
        k3x4 = kjm * a1 - kjm * a3 - fmjm * a4 + u + d2
        mis = b1 - a1 + r
        k3s1 = b2 + p1 * mis
        k3s2 = -kjl * b1 - fjl * b2 + kjl * b3 - grav * (sin(a1) - sr) + p2 * mis
        k3s3 = b4 + p3 * mis
        k3s4 = kjm * b1 - kjm * b3 - fmjm * b4 + us + p4 * mis

        te = t + h
        st = sin(om * te); ct = cos(om * te)
        r = ra * st + roff; d1 = da1 * st; d2 = da2 * ct * st
        sr = sin(r)
        a1 = x1 + h * k3x1; a2 = x2 + h * k3x2; a3 = x3 + h * k3x3; a4 = x4 + h * k3x4
        b1 = s1 + h * k3s1; b2 = s2 + h * k3s2; b3 = s3 + h * k3s3; b4 = s4 + h * k3s4
        k4x1 = a2
        k4x2 = -kjl * a1 - fjl * a2 + kjl * a3 - grav * sin(a1) + d1
        k4x3 = a4
        k4x4 = kjm * a1 - kjm * a3 - fmjm * a4 + u + d2
        mis = b1 - a1 + r
        k4s1 = b2 + p1 * mis
        k4s2 = -kjl * b1 - fjl * b2 + kjl * b3 - grav * (sin(a1) - sr) + p2 * mis
        k4s3 = b4 + p3 * mis
        k4s4 = kjm * b1 - kjm * b3 - fmjm * b4 + us + p4 * mis

        x1 += h6 * (k1x1 + 2.0 * (k2x1 + k3x1) + k4x1)
        x2 += h6 * (k1x2 + 2.0 * (k2x2 + k3x2) + k4x2)
        x3 += h6 * (k1x3 + 2.0 * (k2x3 + k3x3) + k4x3)
        x4 += h6 * (k1x4 + 2.0 * (k2x4 + k3x4) + k4x4)
        s1 += h6 * (k1s1 + 2.0 * (k2s1 + k3s1) + k4s1)
        s2 += h6 * (k1s2 + 2.0 * (k2s2 + k3s2) + k4s2)
        s3 += h6 * (k1s3 + 2.0 * (k2s3 + k3s3) + k4s3)
        s4 += h6 * (k1s4 + 2.0 * (k2s4 + k3s4) + k4s4)
        if y_out is not None:
            y_out[base + i + 1] = x1
            s_out[base + i + 1, 0] = s1
            s_out[base + i + 1, 1] = s2
            s_out[base + i + 1, 2] = s3
            s_out[base + i + 1, 3] = s4
    return x1, x2, x3, x4, s1, s2, s3, s4


def _simulate_core(config: SimConfig, record_fine: bool):
    design = config.design
    if config.require_certified and not design.certified:
        raise UncertifiedDesignError(
            f"design margin {design.margin:.6g} >= 1 and the configuration "
            f"requires a certified design"
        )
    controller = RepetitiveController(design, require_certified=config.require_certified)
    plant, signals = config.plant, config.signals
    c = _consts(plant, signals)
    n_sub = config.substeps_per_tick
    n_ticks = int(round(config.horizon_periods * signals.T_true / config.Ts))
    h = config.h_int

    t_arr = np.empty(n_ticks)
    x_arr = np.empty((n_ticks, 4))
    y_arr = np.empty(n_ticks)
    r_arr = np.empty(n_ticks)
    u_arr = np.empty(n_ticks)
    up_arr = np.empty(n_ticks)
    us_arr = np.empty(n_ticks)
    yp_arr = np.empty(n_ticks)
    xs_arr = np.empty((n_ticks, 4))
    y_fine = s_fine = None
    if record_fine:
        y_fine = np.empty(n_ticks * n_sub + 1)
        s_fine = np.empty((n_ticks * n_sub + 1, 4))
        y_fine[0] = plant.x0[0]
        s_fine[0] = 0.0

    state = (*plant.x0, 0.0, 0.0, 0.0, 0.0)
    for k in range(n_ticks):
        tk = k * config.Ts
        x1, x2, x3, x4, s1, s2, s3, s4 = state
        y = x1
        yp_hat = y - s1
        r = signals.reference(tk)
        e_p = r - yp_hat
        u_p = controller.step(e_p)
        u_s = backstepping_control(
            (s1, s2, s3, s4), r,
            signals.reference_dot(tk), signals.reference_ddot(tk), plant)
        u = u_p + u_s
        t_arr[k] = tk
        x_arr[k] = (x1, x2, x3, x4)
        y_arr[k] = y
        r_arr[k] = r
        u_arr[k] = u
        up_arr[k] = u_p
        us_arr[k] = u_s
        yp_arr[k] = yp_hat
        xs_arr[k] = (s1, s2, s3, s4)
        state = _advance_joint(state, tk, h, n_sub, u, u_s, c,
                               y_out=y_fine, s_out=s_fine, base=k * n_sub)
        if max(abs(v) for v in state[:4]) > BLOWUP_LIMIT:
            raise SimulationDiverged(
                f"state norm exceeded {BLOWUP_LIMIT:g} at t={tk + config.Ts:.3f}s"
            )

    window = int(round(config.bound_window_periods * signals.T_true / config.Ts))
    window = min(window, n_ticks)
    e_arr = y_arr - r_arr
    result = SimResult(
        t=t_arr, x=x_arr, y=y_arr, r=r_arr, e=e_arr, u=u_arr, up=up_arr,
        us=us_arr, yp_hat=yp_arr, xs_hat=xs_arr,
        ultimate_bound=float(np.max(np.abs(e_arr[-window:]))),
    )
    return result, y_fine, s_fine, up_arr, us_arr


def simulate(config: SimConfig) -> SimResult:
    """Run the integrated closed loop and return the per-tick series."""
    result, _, _, _, _ = _simulate_core(config, record_fine=False)
    return result


def _advance_original(state, t0, h, n, u, c):
    """Plant alone in raw coordinates with its own output (re-run leg)."""
    kjl, fjl, kjm, fmjm, grav, _, _, _, _, om, ra, roff, da1, da2 = c
    x1, x2, x3, x4 = state
    sin, cos = math.sin, math.cos
    h2, h6 = 0.5 * h, h / 6.0
    for i in range(n):
        t = t0 + i * h
        st = sin(om * t); ct = cos(om * t)
        d1 = da1 * st; d2 = da2 * ct * st
        k1x1 = x2
        k1x2 = -kjl * x1 - fjl * x2 + kjl * x3 - grav * sin(x1) + d1
        k1x3 = x4
        k1x4 = kjm * x1 - kjm * x3 - fmjm * x4 + u + d2
        tm = t + h2
        st = sin(om * tm); ct = cos(om * tm)
        d1 = da1 * st; d2 = da2 * ct * st
        a1 = x1 + h2 * k1x1; a2 = x2 + h2 * k1x2; a3 = x3 + h2 * k1x3; a4 = x4 + h2 * k1x4
        k2x1 = a2
        k2x2 = -kjl * a1 - fjl * a2 + kjl * a3 - grav * sin(a1) + d1
        k2x3 = a4
        k2x4 = kjm * a1 - kjm * a3 - fmjm * a4 + u + d2
        a1 = x1 + h2 * k2x1; a2 = x2 + h2 * k2x2; a3 = x3 + h2 * k2x3; a4 = x4 + h2 * k2x4
        k3x1 = a2
        k3x2 = -kjl * a1 - fjl * a2 + kjl * a3 - grav * sin(a1) + d1
        k3x3 = a4
        k3x4 = kjm * a1 - kjm * a3 - fmjm * a4 + u + d2
        te = t + h
        st = sin(om * te); ct = cos(om * te)
        d1 = da1 * st; d2 = da2 * ct * st
        a1 = x1 + h * k3x1; a2 = x2 + h * k3x2; a3 = x3 + h * k3x3; a4 = x4 + h * k3x4
        k4x1 = a2
        k4x2 = -kjl * a1 - fjl * a2 + kjl * a3 - grav * sin(a1) + d1
        k4x3 = a4
        k4x4 = kjm * a1 - kjm * a3 - fmjm * a4 + u + d2
        x1 += h6 * (k1x1 + 2.0 * (k2x1 + k3x1) + k4x1)
        x2 += h6 * (k1x2 + 2.0 * (k2x2 + k3x2) + k4x2)
        x3 += h6 * (k1x3 + 2.0 * (k2x3 + k3x3) + k4x3)
        x4 += h6 * (k1x4 + 2.0 * (k2x4 + k3x4) + k4x4)
    return x1, x2, x3, x4


def _advance_primary(state, t0, h, n, up, c):
    """Tracking subsystem: injected drift, reference nonlinearity, disturbance."""
    kjl, fjl, kjm, fmjm, grav, p1, p2, p3, p4, om, ra, roff, da1, da2 = c
    x1, x2, x3, x4 = state
    sin, cos = math.sin, math.cos
    h2, h6 = 0.5 * h, h / 6.0

    def deriv(y1, y2, y3, y4, t):
        st = sin(om * t); ct = cos(om * t)
        r = ra * st + roff
        d1 = da1 * st; d2 = da2 * ct * st
        mis = y1 - r
        return (y2 + p1 * mis,
                -kjl * y1 - fjl * y2 + kjl * y3 - grav * sin(r) + p2 * mis + d1,
                y4 + p3 * mis,
                kjm * y1 - kjm * y3 - fmjm * y4 + up + p4 * mis + d2)

    for i in range(n):
        t = t0 + i * h
        k1 = deriv(x1, x2, x3, x4, t)
        k2 = deriv(x1 + h2 * k1[0], x2 + h2 * k1[1], x3 + h2 * k1[2], x4 + h2 * k1[3], t + h2)
        k3 = deriv(x1 + h2 * k2[0], x2 + h2 * k2[1], x3 + h2 * k2[2], x4 + h2 * k2[3], t + h2)
        k4 = deriv(x1 + h * k3[0], x2 + h * k3[1], x3 + h * k3[2], x4 + h * k3[3], t + h)
        x1 += h6 * (k1[0] + 2.0 * (k2[0] + k3[0]) + k4[0])
        x2 += h6 * (k1[1] + 2.0 * (k2[1] + k3[1]) + k4[1])
        x3 += h6 * (k1[2] + 2.0 * (k2[2] + k3[2]) + k4[2])
        x4 += h6 * (k1[3] + 2.0 * (k2[3] + k3[3]) + k4[3])
    return x1, x2, x3, x4


def _advance_secondary_grid(state, t0, h, n, us, c, y_grid, base):
    """Deviation subsystem driven by the recorded output trajectory.

    Step h equals twice the recording step, so the RK4 stage times t, t+h/2,
    t+h land exactly on recorded nodes base+2i, base+2i+1, base+2i+2.
    """
    kjl, fjl, kjm, fmjm, grav, p1, p2, p3, p4, om, ra, roff, _, _ = c
    x1, x2, x3, x4 = state
    sin, cos = math.sin, math.cos
    h2, h6 = 0.5 * h, h / 6.0

    def deriv(y1, y2, y3, y4, t, ymeas):
        st = sin(om * t)
        r = ra * st + roff
        mis = y1 - ymeas + r
        return (y2 + p1 * mis,
                -kjl * y1 - fjl * y2 + kjl * y3 - grav * (sin(ymeas) - sin(r)) + p2 * mis,
                y4 + p3 * mis,
                kjm * y1 - kjm * y3 - fmjm * y4 + us + p4 * mis)

    for i in range(n):
        t = t0 + i * h
        y0 = y_grid[base + 2 * i]
        ym = y_grid[base + 2 * i + 1]
        y1m = y_grid[base + 2 * i + 2]
        k1 = deriv(x1, x2, x3, x4, t, y0)
        k2 = deriv(x1 + h2 * k1[0], x2 + h2 * k1[1], x3 + h2 * k1[2], x4 + h2 * k1[3], t + h2, ym)
        k3 = deriv(x1 + h2 * k2[0], x2 + h2 * k2[1], x3 + h2 * k2[2], x4 + h2 * k2[3], t + h2, ym)
        k4 = deriv(x1 + h * k3[0], x2 + h * k3[1], x3 + h * k3[2], x4 + h * k3[3], t + h, y1m)
        x1 += h6 * (k1[0] + 2.0 * (k2[0] + k3[0]) + k4[0])
        x2 += h6 * (k1[1] + 2.0 * (k2[1] + k3[1]) + k4[1])
        x3 += h6 * (k1[2] + 2.0 * (k2[2] + k3[2]) + k4[2])
        x4 += h6 * (k1[3] + 2.0 * (k2[3] + k3[3]) + k4[3])
    return x1, x2, x3, x4


def run_exactness(config: SimConfig) -> ExactnessReport:
    """Measure the decomposition identity and the observer agreement.

    Runs the closed loop once at h_int recording the tick inputs and the
    fine-grid output, then independently re-integrates the original system
    (own output), the primary system (closed-form drive), and the secondary
    system (recorded output) at step 2 h_int with the identical inputs.
    Returns max-over-time errors of x - (x_p + x_s) and xhat_s - x_s.
    """
    if config.substeps_per_tick % 2 != 0:
        raise ValueError("exactness checks need Ts/h_int to be even")
    result, y_fine, s_fine, up_arr, us_arr = _simulate_core(config, record_fine=True)
    plant, signals = config.plant, config.signals
    c = _consts(plant, signals)
    n_ticks = len(up_arr)
    n_sub = config.substeps_per_tick
    n2 = n_sub // 2
    h2 = 2.0 * config.h_int

    xo = plant.x0
    xp = plant.x0
    xs = (0.0, 0.0, 0.0, 0.0)
    max_dec = 0.0
    max_obs = 0.0
    for k in range(n_ticks):
        tk = k * config.Ts
        u = up_arr[k] + us_arr[k]
        xo = _advance_original(xo, tk, h2, n2, u, c)
        xp = _advance_primary(xp, tk, h2, n2, up_arr[k], c)
        xs = _advance_secondary_grid(xs, tk, h2, n2, us_arr[k], c, y_fine, k * n_sub)
        dec = max(abs(xo[i] - xp[i] - xs[i]) for i in range(4))
        node = (k + 1) * n_sub
        obs = max(abs(s_fine[node, i] - xs[i]) for i in range(4))
        max_dec = max(max_dec, dec)
        max_obs = max(max_obs, obs)
    return ExactnessReport(decomposition_error=max_dec, observer_error=max_obs)


def decomposition_check(config: SimConfig) -> float:
    """Max over time of the additive-decomposition residual |x - (x_p + x_s)|."""
    return run_exactness(config).decomposition_error


def rk4_order_ratio(config: SimConfig, h_coarse: float = 0.01,
                    horizon_periods: int = 3) -> float:
    """Decomposition error ratio under step halving (about 16 for order 4).

    Uses a coarse step pair so truncation dominates roundoff; the default
    h_int is so fine that its residual sits near the floating-point floor.
    """
    base = replace(config, horizon_periods=horizon_periods,
                   bound_window_periods=min(config.bound_window_periods, horizon_periods))
    coarse = replace(base, h_int=h_coarse, T_ss=max(config.T_ss, h_coarse))
    fine = replace(base, h_int=h_coarse / 2.0, T_ss=max(config.T_ss, h_coarse / 2.0))
    e_coarse = decomposition_check(coarse)
    e_fine = decomposition_check(fine)
    if e_fine == 0.0:
        raise ZeroDivisionError("refined run produced zero error; cannot form a ratio")
    return e_coarse / e_fine


def _sweep_cell(payload):
    """One (alpha, variant) simulation; top level so process pools can run it."""
    i, j, config = payload
    try:
        bound = simulate(config).ultimate_bound
        return i, j, bound, None
    except Exception as exc:  # recorded per cell, the sweep must not abort
        return i, j, float("nan"), f"{type(exc).__name__}: {exc}"


def sweep_alpha(config: SimConfig, alphas, designs, workers: int = 1) -> SweepResult:
    """Ultimate bound per (alpha, design variant); rows ordered by alpha.

    Cells are independent closed-loop runs and may execute in a process
    pool; results merge deterministically, so worker count never changes
    the output.
    """
    alphas = sorted(float(a) for a in alphas)
    labels = tuple(
        "w" + "_".join(f"{w:g}" for w in d.w_weights) for d in designs
    )
    cells = []
    for i, a in enumerate(alphas):
        for j, d in enumerate(designs):
            cfg = replace(config, signals=replace(config.signals, alpha=a), design=d)
            cells.append((i, j, cfg))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_sweep_cell, cells))
    else:
        outcomes = [_sweep_cell(c) for c in cells]
    bounds = np.full((len(alphas), len(designs)), np.nan)
    failures = []
    for i, j, bound, err in outcomes:
        bounds[i, j] = bound
        if err is not None:
            failures.append((alphas[i], labels[j], err))
    return SweepResult(alphas=np.asarray(alphas), bounds=bounds,
                       variant_labels=labels, failures=tuple(failures))


def iss_sup_norm(config: SimConfig, e_p: float, horizon_periods: int = 10) -> float:
    """Sup of |x_s| for the sampled-data deviation loop under a constant
    injected tracking error; empirical input-to-state boundedness probe."""
    plant, signals = config.plant, config.signals
    c = _consts(plant, signals)
    kjl, fjl, kjm, fmjm, grav, p1, p2, p3, p4, om, ra, roff, _, _ = c
    sin, cos = math.sin, math.cos
    n_sub = config.substeps_per_tick
    h = config.h_int
    h2, h6 = 0.5 * h, h / 6.0
    n_ticks = int(round(horizon_periods * signals.T_true / config.Ts))
    xs = (0.0, 0.0, 0.0, 0.0)
    sup = 0.0

    def deriv(y1, y2, y3, y4, t, us):
        st = sin(om * t)
        r = ra * st + roff
        y = r + y1 + e_p
        return (y2 - p1 * e_p,
                -kjl * y1 - fjl * y2 + kjl * y3 - grav * (sin(y) - sin(r)) - p2 * e_p,
                y4 - p3 * e_p,
                kjm * y1 - kjm * y3 - fmjm * y4 + us - p4 * e_p)

    for k in range(n_ticks):
        tk = k * config.Ts
        us = backstepping_control(
            xs, signals.reference(tk), signals.reference_dot(tk),
            signals.reference_ddot(tk), plant)
        x1, x2, x3, x4 = xs
        for i in range(n_sub):
            t = tk + i * h
            k1 = deriv(x1, x2, x3, x4, t, us)
            k2 = deriv(x1 + h2 * k1[0], x2 + h2 * k1[1], x3 + h2 * k1[2], x4 + h2 * k1[3], t + h2, us)
            k3 = deriv(x1 + h2 * k2[0], x2 + h2 * k2[1], x3 + h2 * k2[2], x4 + h2 * k2[3], t + h2, us)
            k4 = deriv(x1 + h * k3[0], x2 + h * k3[1], x3 + h * k3[2], x4 + h * k3[3], t + h, us)
            x1 += h6 * (k1[0] + 2.0 * (k2[0] + k3[0]) + k4[0])
            x2 += h6 * (k1[1] + 2.0 * (k2[1] + k3[1]) + k4[1])
            x3 += h6 * (k1[2] + 2.0 * (k2[2] + k3[2]) + k4[2])
            x4 += h6 * (k1[3] + 2.0 * (k2[3] + k3[3]) + k4[3])
        xs = (x1, x2, x3, x4)
        norm = math.sqrt(x1 * x1 + x2 * x2 + x3 * x3 + x4 * x4)
        sup = max(sup, norm)
        if norm > BLOWUP_LIMIT:
            raise SimulationDiverged(f"deviation loop diverged at t={tk:.3f}s")
    return sup
