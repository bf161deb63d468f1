"""Birkhoff spectrum of phi as the Legendre transform of t(q).

    dim E(alpha) = inf_{q > 0} t(q) + q alpha,

attained at the q0 with t'(q0) = -alpha.  Since -t'(q) - 1 runs from +inf
down to 0 as q grows, q0 is found by a root search on the logarithm of that
excess over u = log2 q, which stays well conditioned at both ends.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .errors import PreconditionError
from .pressure import solve_t

# search window in log2 q; the low end is the smallest normal double
U_START = (-20.0, 20.0)
U_MIN, U_MAX = -1022.0, 60.0
DEFAULT_TOL = 1e-13


@dataclass(frozen=True)
class SpectrumSample:
    alpha: float
    # math.inf marks alpha = 1; 0.0 marks a q0 below the smallest double
    q0: float
    t_q0: float
    dimension: float


def _excess_gap(u: float, log_target: float) -> float:
    return solve_t(2.0 ** u).log_slope_excess - log_target


def dim_at_alpha(alpha: float, tol: float = DEFAULT_TOL) -> SpectrumSample:
    """Dimension of the level set of Birkhoff average ``alpha``."""
    if not alpha >= 1.0:
        raise PreconditionError(f"alpha must be >= 1, got {alpha!r}")
    if alpha == 1.0:
        return SpectrumSample(1.0, math.inf, -math.inf, 0.0)
    if math.isinf(alpha):
        return SpectrumSample(alpha, 0.0, 1.0, 1.0)
    log_target = math.log(alpha - 1.0)

    lo, hi = U_START
    while _excess_gap(lo, log_target) < 0:
        if lo == U_MIN:
            # alpha exceeds alpha(q) at the smallest normal q; there
            # 1 - dim is far below one ulp, so the dimension rounds to 1
            return SpectrumSample(alpha, 0.0, 1.0, 1.0)
        lo, hi = max(2 * lo, U_MIN), lo
    while _excess_gap(hi, log_target) > 0:
        if hi == U_MAX:
            raise PreconditionError(f"alpha={alpha!r} needs q0 beyond 2**{U_MAX:g}")
        lo, hi = hi, min(2 * hi, U_MAX)

    u = brentq(_excess_gap, lo, hi, args=(log_target,), xtol=tol, rtol=4 * 2.0 ** -52)
    q0 = 2.0 ** u
    t = solve_t(q0).t_of_q
    # once 1 - dim drops below an ulp, t + q0 alpha can round to 1 + ulp
    return SpectrumSample(alpha, q0, t, min(1.0, t + q0 * alpha))


def spectrum_curve(alpha_min: float, alpha_max: float, steps: int,
                   tol: float = DEFAULT_TOL) -> list[SpectrumSample]:
    """``dim_at_alpha`` on an evenly spaced grid, endpoints included."""
    if not 1.0 <= alpha_min < alpha_max or steps < 2:
        raise PreconditionError("need 1 <= alpha_min < alpha_max and steps >= 2")
    h = (alpha_max - alpha_min) / (steps - 1)
    alphas = [alpha_min + i * h for i in range(steps - 1)] + [alpha_max]
    return [dim_at_alpha(a, tol) for a in alphas]
