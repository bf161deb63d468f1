"""Pressure of the two-parameter potential on the first-return blocks.

    P(t, q) = log sum_{j >= 1} 2 ** (-t*j - q*(2**j - 1)),   q > 0.

All sums are carried in the log2 domain (shift by the largest exponent), so
the series stays finite for any ``q`` down to the smallest normal double and
any ``t``.  The zero ``t(q)`` of ``P(., q)`` and its slope ``t'(q)`` feed the
spectrum and the Gibbs sampler.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import PreconditionError

LN2 = math.log(2.0)
DEFAULT_TOL = 2.0 ** -60
ROOT_WIDTH = 1e-14
COARSE_WIDTH = 1e-3
MAX_POLISH = 5


@dataclass(frozen=True)
class PressureEvaluation:
    t: float
    q: float
    value: float
    dP_dt: float
    dP_dq: float
    terms_used: int
    tail_bound: float
    # log of (-dP_dq / -dP_dt - 1), computed without cancellation
    log_slope_excess: float
    log_base: float = math.e


def _log2sumexp2(a: np.ndarray) -> float:
    m = float(np.max(a))
    if m == -math.inf:
        return -math.inf
    return m + math.log2(float(np.sum(np.exp2(a - m))))


def initial_terms(q: float) -> int:
    """Starting truncation: the double-exponential factor engages near 2**j ~ 1/q."""
    return max(64, math.ceil(math.log2(1.0 / q)) + 64)


def log2_weights(t: float, q: float, J: int) -> tuple[np.ndarray, np.ndarray]:
    """``j = 1..J`` and the log2 weights ``-t j - q (2**j - 1)``."""
    j = np.arange(1, J + 1, dtype=np.float64)
    ji = np.arange(1, J + 1)
    with np.errstate(over="ignore"):
        # 2**j - 1 is exact in a double up to j = 53; beyond it ldexp keeps
        # q * 2**j exact and the -q is below one ulp
        big = np.where(ji <= 53, q * (np.exp2(np.minimum(j, 53.0)) - 1.0),
                       np.ldexp(q, np.minimum(ji, 2000)))
    return j, -t * j - big


def _check_args(q: float, tol: float) -> None:
    if not q > 0 or not math.isfinite(q):
        raise PreconditionError(f"q must be a positive finite number, got {q!r}")
    if not tol > 0:
        raise PreconditionError(f"tol must be positive, got {tol!r}")


def eval_pressure(t: float, q: float, tol: float = DEFAULT_TOL,
                  log_base: float = math.e) -> PressureEvaluation:
    """P(t, q) with its partial derivatives, truncated with a certified tail.

    The truncation index grows in steps of 64 until the next term is below
    ``tol`` times the partial sum and the term ratio has dropped below 1/2,
    at which point the omitted tail is at most twice the next term.
    """
    _check_args(q, tol)
    J = initial_terms(q)
    while True:
        j, e = log2_weights(t, q, J + 2)
        head = e[:J]
        m = float(np.max(head))
        nxt = e[J] - m
        total2 = _log2sumexp2(head - m)
        if nxt == -math.inf:
            break
        decaying = e[J + 1] == -math.inf or e[J + 1] - e[J] <= -1.0
        if nxt - total2 < math.log2(tol) and decaying:
            break
        J += 64
    j = j[:J]
    rel = np.exp2(head - m)
    i = int(np.argmax(head))
    rest = float(np.sum(rel[:i]) + np.sum(rel[i + 1:]))
    ln_value = m * LN2 + math.log1p(rest)

    log2_total = m + total2
    log2_first_moment = _log2sumexp2(head + np.log2(j))
    # log2(2**j - 1) = j + log2(1 - 2**-j)
    log2_mersenne = j + np.log1p(-np.exp2(-j)) / LN2
    log2_second = _log2sumexp2(head + log2_mersenne)
    mean_j = 2.0 ** (log2_first_moment - log2_total)
    mean_phi = 2.0 ** (log2_second - log2_total)
    # 2**j - 1 - j vanishes at j = 1; the rest is positive
    small = np.minimum(j, 60.0)
    with np.errstate(divide="ignore"):
        log2_excess_w = np.where(
            j > 60, j + np.log1p(-(1.0 + j) * np.exp2(-j)) / LN2,
            np.log2(np.exp2(small) - 1.0 - small))
    log2_num = _log2sumexp2(head[1:] + log2_excess_w[1:])
    log_slope_excess = (log2_num - log2_first_moment) * LN2

    tail = 2.0 * 2.0 ** (nxt - total2)
    scale = 1.0 if log_base == math.e else 1.0 / math.log(log_base)
    return PressureEvaluation(
        t=t, q=q,
        value=ln_value * scale,
        dP_dt=-LN2 * mean_j * scale,
        dP_dq=-LN2 * mean_phi * scale,
        terms_used=J,
        tail_bound=tail,
        log_slope_excess=log_slope_excess,
        log_base=log_base,
    )


class _LeanSeries:
    """Value and t-derivative of the pressure at fixed q and truncation J."""

    def __init__(self, q: float, J: int, log_base: float = math.e):
        self.j, self.e0 = log2_weights(0.0, q, J)
        self.scale = 1.0 if log_base == math.e else 1.0 / math.log(log_base)

    def __call__(self, t: float) -> tuple[float, float]:
        e = self.e0 - t * self.j
        m = float(e.max())
        rel = np.exp2(e - m)
        total = float(rel.sum())
        # the largest term is exactly 1 after the shift
        value = m * LN2 + math.log1p(total - 1.0)
        return value * self.scale, -LN2 * self.scale * float(rel @ self.j) / total


@dataclass(frozen=True)
class PressureSolution:
    q: float
    t_of_q: float
    t_prime: float
    residual: float
    bracket: tuple[float, float]
    # -t'(q) - 1 > 0, kept separately because it underflows against 1 for large q
    slope_excess: float
    log_slope_excess: float

    @property
    def alpha(self) -> float:
        """The Birkhoff average selected by this q, i.e. -t'(q)."""
        return -self.t_prime


@lru_cache(maxsize=65536)
def solve_t(q: float, tol: float = DEFAULT_TOL, log_base: float = math.e) -> PressureSolution:
    """The unique zero of ``t -> P(t, q)``.

    P(-q, q) >= 0 because the first term equals 1, and P(1, q) < 0 because
    every term is below 2**-j; so [-q, 1] always brackets the root.  The
    bracket is bisected to a coarse width, then Newton steps are taken
    inside the bracket (falling back to bisection whenever a step would leave
    it) until the step is below ``ROOT_WIDTH``.
    """
    _check_args(q, tol)

    def P(t):
        return eval_pressure(t, q, tol, log_base)

    lo, hi = -q, 1.0
    ev_lo, ev_hi = P(lo), P(hi)
    if ev_lo.value < 0 or ev_hi.value > 0:
        raise AssertionError(f"pressure bracket failed at q={q}")
    # the truncation certified at t = -q is valid on the whole bracket, since
    # the term ratio 2**(-t - q 2**j) only shrinks as t grows
    lean = _LeanSeries(q, ev_lo.terms_used, log_base)
    # an endpoint can be a root to double precision: t(q) = -q + O(2**-q) for
    # large q and t(q) = 1 - O(q) for tiny q
    if ev_lo.value == 0.0:
        t = lo
    elif ev_hi.value == 0.0:
        t = hi
    else:
        while hi - lo > COARSE_WIDTH * max(1.0, abs(lo)):
            mid = 0.5 * (lo + hi)
            if lean(mid)[0] > 0:
                lo = mid
            else:
                hi = mid
        t = 0.5 * (lo + hi)
        val, slope = lean(t)
        for _ in range(200):
            if val == 0.0:
                break
            if val > 0:
                lo = t
            else:
                hi = t
            cand = t - val / slope
            if not lo < cand < hi:
                cand = 0.5 * (lo + hi)
            if cand == t:
                break
            converged = abs(cand - t) <= ROOT_WIDTH * max(1.0, abs(cand))
            t = cand
            val, slope = lean(t)
            if converged:
                break
        for _ in range(MAX_POLISH):
            cand = t - val / slope
            cval, cslope = lean(cand)
            if abs(cval) < abs(val):
                t, val, slope = cand, cval, cslope
            else:
                break
    best = P(t)

    excess_log = best.log_slope_excess
    return PressureSolution(
        q=q,
        t_of_q=best.t,
        t_prime=-best.dP_dq / best.dP_dt,
        residual=abs(best.value),
        bracket=(-q, 1.0),
        slope_excess=math.exp(excess_log),
        log_slope_excess=excess_log,
    )


def t_of_q(q: float) -> float:
    return solve_t(q).t_of_q


def alpha_of_q(q: float) -> float:
    """-t'(q), the Birkhoff average typical for the Gibbs measure at q."""
    return -solve_t(q).t_prime
