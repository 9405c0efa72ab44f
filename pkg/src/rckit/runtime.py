"""Causal streaming realization of the repetitive controller.

The controller transfer function u/e = 1 + L Q W z^{-N} / (1 - Q W z^{-N})
is realized as the internal-model recursion

    m(k) = sum_i sum_j w_i q_j s(k - iN - j),     s(k) = e(k) + m(k),
    u(k) = e(k) + (L_causal applied to m shifted left by the advance a),

with s kept in a ring buffer and L_causal in direct-form-II-transposed
registers. Reading the delay line a samples early is legal because every
tap sits at delay >= N >= a, and it reproduces the non-causal advance of
the inverse filter exactly. The realization matches the expanded transfer
function bit-for-bit in exact arithmetic and to roundoff in floats.
"""

from __future__ import annotations

import math

import numpy as np

from .design import RcDesign

__all__ = [
    "RepetitiveController",
    "UncertifiedDesignError",
    "expanded_taps",
    "apply_difference_equation",
]


class UncertifiedDesignError(ValueError):
    """Raised when a controller is built from a design whose small-gain
    certificate failed and the caller did not opt in to running it anyway."""


class RepetitiveController:
    """Single-owner mutable streaming controller; one step call at a time."""

    def __init__(self, design: RcDesign, require_certified: bool = True):
        if require_certified and not design.certified:
            raise UncertifiedDesignError(
                f"design margin {design.margin:.6g} >= 1: the small-gain "
                f"certificate failed (pass require_certified=False to run anyway)"
            )
        self.design = design
        lf = design.learning_filter
        self._order = lf.den.degree
        num = np.zeros(self._order + 1)
        num[: len(lf.num.coeffs)] = lf.num.coeffs
        # ascending-delay taps are the descending-z coefficients
        self._b = num[::-1].copy()
        self._a = lf.den.coeffs[::-1].copy()     # a[0] == 1 (monic denominator)
        n = design.period_samples
        self._taps = [
            (i * n + j, float(w * q))
            for i, w in enumerate(design.w_weights, start=1)
            for j, q in enumerate(design.q_taps)
            if w * q != 0.0
        ]
        self.capacity = (len(design.w_weights) * n + design.advance
                         + self._order + len(design.q_taps))
        self._sbuf = np.zeros(self.capacity)
        self._lreg = np.zeros(self._order)
        self.sample_index = 0

    def reset(self) -> None:
        """Zero every register; idempotent."""
        self._sbuf[:] = 0.0
        self._lreg[:] = 0.0
        self.sample_index = 0

    def step(self, error: float) -> float:
        """Process one tracking-error sample, return the control sample."""
        if not math.isfinite(error):
            raise ValueError(f"non-finite controller input {error!r}")
        k = self.sample_index
        cap = self.capacity
        buf = self._sbuf
        m_now = 0.0
        for delay, coef in self._taps:
            if delay <= k:
                m_now += coef * buf[(k - delay) % cap]
        buf[k % cap] = error + m_now
        adv = self.design.advance
        m_adv = 0.0
        for delay, coef in self._taps:
            d = delay - adv
            if d <= k:
                m_adv += coef * buf[(k - d) % cap]
        # direct form II transposed for the causal inverse filter
        b, a, reg = self._b, self._a, self._lreg
        if self._order == 0:
            filtered = b[0] * m_adv
        else:
            filtered = b[0] * m_adv + reg[0]
            for i in range(self._order - 1):
                reg[i] = b[i + 1] * m_adv + reg[i + 1] - a[i + 1] * filtered
            reg[self._order - 1] = b[self._order] * m_adv - a[self._order] * filtered
        self.sample_index = k + 1
        return error + filtered

    def run(self, errors) -> np.ndarray:
        """Vector convenience wrapper around step()."""
        out = np.empty(len(errors))
        for i, e in enumerate(np.asarray(errors, dtype=float)):
            out[i] = self.step(float(e))
        return out


def expanded_taps(design: RcDesign) -> tuple[np.ndarray, np.ndarray]:
    """Delay-tap (z^{-1}) coefficients of the full controller transfer
    function, expanded into one numerator/denominator pair.

    This is the reference route against which the streaming realization is
    checked: with g the internal-model FIR (Q times W times the period
    delay) and L_causal = B/A in delay taps,

        u/e = [A (1 - g) + B g_advanced] / [A (1 - g)],

    where g_advanced shifts every tap of g forward by the filter advance
    (all taps sit at delay >= N >= advance, so the result stays causal).
    """
    lf = design.learning_filter
    order = lf.den.degree
    num = np.zeros(order + 1)
    num[: len(lf.num.coeffs)] = lf.num.coeffs
    b_taps = num[::-1]
    a_taps = lf.den.coeffs[::-1]
    n = design.period_samples
    n_q = len(design.q_taps) - 1
    depth = len(design.w_weights) * n + n_q + 1
    g = np.zeros(depth)
    for i, w in enumerate(design.w_weights, start=1):
        g[i * n: i * n + n_q + 1] += w * design.q_taps
    one_minus_g = -g.copy()
    one_minus_g[0] += 1.0
    g_adv = g[design.advance:]
    den = np.convolve(a_taps, one_minus_g)
    num_full = den.copy()
    shifted = np.convolve(b_taps, g_adv)
    num_full[: len(shifted)] += shifted
    return num_full, den


def apply_difference_equation(b: np.ndarray, a: np.ndarray, x) -> np.ndarray:
    """Run the high-order difference equation y = (b/a) x from zero state.

    Plain normalized recursion
        y[k] = sum_j b[j] x[k-j] - sum_{j>=1} a[j] y[k-j]
    evaluated with vector dots over the available history.
    """
    x = np.asarray(x, dtype=float)
    b = np.asarray(b, dtype=float) / a[0]
    a = np.asarray(a, dtype=float) / a[0]
    y = np.zeros(len(x))
    nb, na = len(b), len(a)
    for k in range(len(x)):
        lo = max(0, k - nb + 1)
        acc = float(np.dot(b[: k - lo + 1], x[k: lo - 1 if lo else None: -1]))
        lo_a = max(0, k - na + 1)
        if k > 0:
            acc -= float(np.dot(a[1: k - lo_a + 1], y[k - 1: lo_a - 1 if lo_a else None: -1]))
        y[k] = acc
    return y
