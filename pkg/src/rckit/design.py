"""Repetitive-controller synthesis and frequency-domain analysis.

The synthesis chain is: closed-loop map T = P/(1+P), approximate stable
inverse L of T by zero-phase-error tracking control (stable zeros and the
poles are cancelled, uncancelable zeros are reflected), an FIR robustness
filter Q, and a weight function W made of chained period delays. The
small-gain certificate is the supremum of |Q W z^{-N} (1 - T L)| on the unit
circle, evaluated on a uniform grid; an exact winding-number check of the
closed-loop characteristic polynomial backs it up when the certificate
fails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .polynomials import (
    Polynomial,
    RationalFunction,
    ZeroSplit,
    SPLIT_THRESHOLD,
    count_roots_in_disk,
    is_schur_stable,
    poly_from_roots,
    split_zeros,
)

__all__ = [
    "DesignError",
    "WeightFunction",
    "RcDesign",
    "SensitivityCurve",
    "samples_per_period",
    "zpetc",
    "make_weight",
    "stability_margin",
    "condition_profile",
    "closed_loop_unstable_count",
    "sensitivity_curve",
    "synthesize",
]

WEIGHT_SUM_TOL = 1e-12
DEFAULT_GRID = 8192


class DesignError(ValueError):
    """Synthesis preconditions violated (instability, bad weights, ...)."""


def samples_per_period(period: float, Ts: float) -> int:
    """Number of delay taps N = period/Ts rounded half away from zero."""
    if period <= 0 or Ts <= 0:
        raise ValueError("period and Ts must be positive")
    ratio = period / Ts
    n = int(math.floor(abs(ratio) + 0.5))
    if n < 1:
        raise DesignError(f"period {period} is below one sample at Ts={Ts}")
    return n


class WeightFunction:
    """W(z) = sum_i w_i z^{-(i-1) N}: chained period delays with unit weight sum.

    Stored as (weights, block delay N) and expanded only on demand; the unit
    sum is what pins infinite internal-model gain onto the harmonics, so it
    is enforced at construction.
    """

    __slots__ = ("weights", "block_delay")

    def __init__(self, weights, block_delay: int):
        w = np.atleast_1d(np.asarray(weights, dtype=float))
        if w.size < 1:
            raise DesignError("need at least one weight")
        if abs(float(np.sum(w)) - 1.0) > WEIGHT_SUM_TOL:
            raise DesignError(
                f"weights must sum to 1 within {WEIGHT_SUM_TOL}, got sum {np.sum(w)!r}"
            )
        if block_delay < 1:
            raise DesignError("block delay must be >= 1")
        self.weights = w
        self.block_delay = int(block_delay)

    @property
    def order(self) -> int:
        return len(self.weights)

    def __call__(self, z):
        """Evaluate W at points z (scalar or array, complex)."""
        z = np.asarray(z, dtype=complex)
        zinv_block = z ** (-self.block_delay)
        out = np.zeros_like(z)
        for w in self.weights[::-1]:
            out = out * zinv_block + w
        return out

    def delay_taps(self) -> np.ndarray:
        """Expanded z^{-1} coefficients (ascending delay, length (order-1)*N + 1)."""
        taps = np.zeros((self.order - 1) * self.block_delay + 1)
        for i, w in enumerate(self.weights):
            taps[i * self.block_delay] = w
        return taps


def make_weight(weights, period_samples: int) -> WeightFunction:
    return WeightFunction(weights, period_samples)


def zpetc(T: RationalFunction,
          split_threshold: float = SPLIT_THRESHOLD) -> tuple[RationalFunction, int]:
    """Zero-phase approximate inverse of a stable proper T.

    Returns (L_causal, a) with the full filter L(z) = z^a L_causal(z). The
    construction cancels T's poles and stable zeros and reflects the
    uncancelable zeros, so T(e^{iw}) L(e^{iw}) has zero phase up to the pure
    delay z^{-relative degree}, and T(1) L(1) = 1 exactly up to roundoff.
    """
    num, den = T.num, T.den
    if num.is_zero:
        raise DesignError("cannot invert a zero transfer function")
    n_T = T.relative_degree
    if n_T < 0:
        raise DesignError("T must be proper (relative degree >= 0)")
    if not is_schur_stable(den):
        raise DesignError("T has unstable poles; inverse-filter design needs a stable T")
    split = split_zeros(num, split_threshold)
    b_plus, b_minus, gain = split.stable_factor, split.unstable_factor, split.gain
    m_minus = b_minus.degree
    reflected = b_minus.reversed()          # z^{m-} B-(1/z), constant term 1
    s_one = float(reflected(1.0))
    if s_one == 0.0:
        raise DesignError("uncancelable factor vanishes at z = 1; cannot normalize")
    l_num = den * reflected
    l_den = (gain * s_one ** 2) * b_plus.shifted(n_T + 2 * m_minus)
    return RationalFunction(l_num, l_den), m_minus


@dataclass(frozen=True)
class RcDesign:
    """Synthesized repetitive controller data.

    learning_filter is the causal part of the inverse filter; the full filter
    is z^advance * learning_filter, with the advance absorbed by the period
    delay at realization time (advance <= period_samples is enforced here).
    margin is the small-gain certificate value; the design is certified
    stable when margin < 1.
    """

    period_samples: int
    q_taps: np.ndarray
    w_weights: np.ndarray
    learning_filter: RationalFunction
    advance: int
    comp_sensitivity: RationalFunction
    margin: float
    unstable_pole_count: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "q_taps", np.atleast_1d(np.asarray(self.q_taps, dtype=float)))
        object.__setattr__(self, "w_weights", np.atleast_1d(np.asarray(self.w_weights, dtype=float)))
        if self.period_samples < 1:
            raise DesignError("period_samples must be >= 1")
        if abs(float(np.sum(self.w_weights)) - 1.0) > WEIGHT_SUM_TOL:
            raise DesignError("W weights must sum to 1")
        if self.learning_filter.relative_degree < 0:
            raise DesignError("learning filter must be proper")
        if not 0 <= self.advance <= self.period_samples:
            raise DesignError(
                f"advance {self.advance} must lie in [0, N={self.period_samples}]"
            )

    @property
    def certified(self) -> bool:
        """True when the small-gain certificate holds."""
        return self.margin < 1.0

    @property
    def weight(self) -> WeightFunction:
        return WeightFunction(self.w_weights, self.period_samples)

    def q_response(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for q in self.q_taps[::-1]:
            out = out * z ** -1 + q
        return out

    def full_filter_response(self, z):
        """L(z) = z^advance * L_causal(z) on given points."""
        z = np.asarray(z, dtype=complex)
        return z ** self.advance * self.learning_filter(z)


@dataclass(frozen=True)
class SensitivityCurve:
    """Magnitude of the error transfer function on a frequency grid."""

    omegas: np.ndarray
    magnitudes: np.ndarray

    def __post_init__(self):
        om = np.atleast_1d(np.asarray(self.omegas, dtype=float))
        mag = np.atleast_1d(np.asarray(self.magnitudes, dtype=float))
        if om.shape != mag.shape:
            raise ValueError("omegas and magnitudes must have the same length")
        object.__setattr__(self, "omegas", om)
        object.__setattr__(self, "magnitudes", mag)

    def to_csv(self, path) -> None:
        """17-significant-digit CSV with header omega_rad_s,magnitude."""
        lines = ["omega_rad_s,magnitude"]
        for om, mag in zip(self.omegas, self.magnitudes):
            mtxt = f"{mag:.17g}" if np.isfinite(mag) else ""
            lines.append(f"{om:.17g},{mtxt}")
        with open(path, "w", newline="") as fh:
            fh.write("\n".join(lines) + "\n")


def _check_condition_i(P: RationalFunction, design: RcDesign) -> None:
    """Stability preconditions: 1/(1+P), P, L, Q must all be stable."""
    failures = []
    if not is_schur_stable(P.den + P.num):
        failures.append("1/(1+P)")
    if not is_schur_stable(P.den):
        failures.append("P")
    if not is_schur_stable(design.learning_filter.den):
        failures.append("L")
    # FIR Q is always stable; listed for completeness of the reported factors
    if failures:
        raise DesignError("unstable loop factors: " + ", ".join(failures))


def condition_profile(P: RationalFunction, design: RcDesign,
                      grid_size: int = DEFAULT_GRID) -> tuple[np.ndarray, np.ndarray]:
    """|Q W z^{-N} (1 - T L)| on a uniform unit-circle grid.

    Returns (theta, values); theta in [0, 2 pi). The integrand is a smooth
    rational function, so the grid maximum tracks the true supremum to
    far below the certification slack.
    """
    theta = 2.0 * np.pi * np.arange(grid_size) / grid_size
    z = np.exp(1j * theta)
    N = design.period_samples
    W = design.weight
    vals = np.abs(
        design.q_response(z) * W(z) * z ** (-N)
        * (1.0 - design.comp_sensitivity(z) * design.full_filter_response(z))
    )
    return theta, vals


def stability_margin(P: RationalFunction, design: RcDesign,
                     grid_size: int = DEFAULT_GRID) -> float:
    """Small-gain certificate: max over the grid of |Q W z^{-N} (1 - T L)|.

    The design is certified when the returned value is < 1. Raises
    DesignError naming the offending factor when the structural stability
    preconditions fail.
    """
    _check_condition_i(P, design)
    _, vals = condition_profile(P, design, grid_size)
    return float(np.max(vals))


def _char_poly_in_w(design: RcDesign) -> Polynomial:
    """Closed-loop characteristic polynomial of 1 - Q W z^{-N} (1 - T L),
    written in w = z^{-1} so the delays become ordinary polynomial factors.

    Common stable factors of T L survive uncancelled; their w-roots lie
    outside the unit disk and so never affect the inside-disk root count.
    """
    T, Lc, a = design.comp_sensitivity, design.learning_filter, design.advance
    tl_num = T.num * Lc.num          # ascending z
    tl_den = T.den * Lc.den
    dn = tl_num.degree + a           # z^a from the filter advance
    dd = tl_den.degree
    if dn > dd:
        raise DesignError("T L must be proper for the characteristic polynomial")
    num_w = Polynomial(tl_num.coeffs[::-1]).shifted(dd - dn)
    den_w = Polynomial(tl_den.coeffs[::-1])
    N = design.period_samples
    q_w = Polynomial(design.q_taps)          # taps ascending in w
    w_w = Polynomial(design.weight.delay_taps())
    g_w = (q_w * w_w).shifted(N)
    return den_w - g_w * (den_w - num_w)


def closed_loop_unstable_count(design: RcDesign) -> int:
    """Exact count of closed-loop poles with modulus >= 1 - 1e-9.

    Poles are w-roots of the characteristic polynomial inside (or on) the
    unit w-disk; they are counted by winding number, so no high-degree root
    extraction is needed. A certified design always returns zero; the
    interesting case is margin >= 1, where the small-gain test is silent and
    this check settles stability exactly.
    """
    char_w = _char_poly_in_w(design)
    radius = 1.0 / (1.0 - 1e-9)
    return count_roots_in_disk(char_w, radius=radius)


def sensitivity_curve(P: RationalFunction, design: RcDesign,
                      omegas, Ts: float) -> SensitivityCurve:
    """Magnitude of [1/(1+P)] (1 - Q W z^{-N}) / (1 - Q W z^{-N}(1 - T L)).

    This is the transfer function from the periodic drive to the tracking
    error of the linear loop. Points landing on an exact pole come back
    non-finite so callers can report them per point.
    """
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    z = np.exp(1j * omegas * Ts)
    N = design.period_samples
    W = design.weight
    g = design.q_response(z) * W(z) * z ** (-N)
    one_plus_p = P.num(z) + P.den(z)
    denom = (1.0 - g * (1.0 - design.comp_sensitivity(z) * design.full_filter_response(z)))
    denom = denom * one_plus_p / P.den(z)
    with np.errstate(divide="ignore", invalid="ignore"):
        mags = np.abs(np.where(denom != 0, (1.0 - g) / np.where(denom != 0, denom, 1.0), np.inf))
    return SensitivityCurve(omegas, mags)


def synthesize(P: RationalFunction, Ts: float, period: float, q_taps, w_weights,
               grid_size: int = DEFAULT_GRID,
               split_threshold: float = SPLIT_THRESHOLD,
               exact_check: bool = False) -> RcDesign:
    """Full synthesis for plant P: N, T = P/(1+P), inverse filter, margin.

    With exact_check=True the closed-loop characteristic polynomial is also
    winding-counted, which settles stability even when the small-gain
    certificate fails.
    """
    N = samples_per_period(period, Ts)
    T = P.feedback()
    learning, advance = zpetc(T, split_threshold)
    if advance > N:
        raise DesignError(f"filter advance {advance} exceeds the period delay {N}")
    design = RcDesign(
        period_samples=N,
        q_taps=q_taps,
        w_weights=w_weights,
        learning_filter=learning,
        advance=advance,
        comp_sensitivity=T,
        margin=float("nan"),
    )
    margin = stability_margin(P, design, grid_size)
    count = closed_loop_unstable_count(design) if exact_check else None
    return RcDesign(
        period_samples=N,
        q_taps=design.q_taps,
        w_weights=design.w_weights,
        learning_filter=learning,
        advance=advance,
        comp_sensitivity=T,
        margin=margin,
        unstable_pole_count=count,
    )
