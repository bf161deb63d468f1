"""Explicit points with prescribed fast-growing Birkhoff sums.

Building blocks:

* :func:`aligned_value` rounds W up to a multiple of 2**(t-n), leaving at
  most n + 2 binary digits 1;
* :func:`approx_word` turns V = 2**t_1 + ... + 2**t_p into the word
  ``1 0**(t_1-1) 1, ..., 1 0**(t_p-1) 1`` whose phi-sum is exactly V;
* :func:`build_cantor` strings such words between free filler words to track
  beta * Psi(N_k) at a schedule of checkpoints N_k;
* :func:`infinity_stream` forces long zero blocks at positions 2**k, which
  pushes S_n past any 2**(n**gamma) with gamma < 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .dyadic import RationalInterval, birkhoff_g_interval_trace, birkhoff_phi_sum
from .errors import PreconditionError, RegimeMismatch, ScheduleInfeasible
from .growth import GrowthFunction, beta_class_of, classify
from .streams import CHUNK_BITS, DigitStream, as_digits, make_rng, random_bits

# substitute growth for beta = inf below the gamma = 1/2 threshold
ETA_INFINITY = 0.45


@dataclass(frozen=True)
class AlignedValue:
    W: int
    n: int
    V: int
    ones: int
    trailing_zeros: int

    @property
    def t(self) -> int:
        return self.W.bit_length() - 1


def aligned_value(W: int, n: int) -> AlignedValue:
    """Least multiple of 2**(t-n) that is >= W, where 2**t <= W < 2**(t+1)."""
    if W < 1:
        raise PreconditionError("W must be a positive integer")
    t = W.bit_length() - 1
    if not 0 <= n <= t:
        raise PreconditionError(f"n={n} must lie in [0, {t}] for W={W}")
    step = t - n
    V = -(-W >> step) << step
    trailing = (V & -V).bit_length() - 1
    return AlignedValue(W, n, V, bin(V).count("1"), trailing)


@dataclass(frozen=True)
class SumWord:
    word: str
    target: int
    blocks: tuple[int, ...]  # exponents t_1 > ... > t_p
    s: int = 0

    def __len__(self):
        return len(self.word)


def _exponents(V: int) -> tuple[int, ...]:
    return tuple(i for i in range(V.bit_length() - 1, -1, -1) if V >> i & 1)


def _render(exps, tail: str) -> str:
    # block for 2**t is 1 0^(t-1) <tail>; for t = 0 only the tail
    return "".join(("1" + "0" * (t - 1) if t else "") + tail for t in exps)


def approx_word(W: int, n: int) -> SumWord:
    """Word whose phi-sum over its own length is V with W <= V <= W (1 + 2**-n)."""
    av = aligned_value(W, n)
    exps = _exponents(av.V)
    sw = SumWord(_render(exps, "1"), av.V, exps)
    # the last digit is 1, so the sum is determined by the word alone
    if birkhoff_phi_sum(sw.word, len(sw.word)) != av.V:
        raise AssertionError("approx_word sum mismatch")
    return sw


def approx_word_g(W: int, n: int, s: int) -> SumWord:
    """Variant for g = 1/x: every block ends in ``1**(s+1)``.

    The phi-sum is V + s p; the run of ones after each zero run keeps g
    within a factor 1 + 2**-s of phi there.
    """
    if s < 0:
        raise PreconditionError("s must be >= 0")
    av = aligned_value(W, n)
    exps = _exponents(av.V)
    return SumWord(_render(exps, "1" * (s + 1)), av.V, exps, s)


def g_word_bounds(W: int, n: int, s: int) -> tuple[int, RationalInterval]:
    """Length bound and certified window for the g-sum of ``approx_word_g``."""
    length = (n + 2) * (math.log2(W) + s + 2)
    hi = Fraction(W) * (1 + Fraction(1, 2 ** n)) * (1 + Fraction(1, 2 ** s)) + 2 * s * (n + 2)
    return length, RationalInterval(Fraction(W), hi)


def g_word_sum(sw: SumWord) -> RationalInterval:
    """Enclosure of the g-sum over the word, for any continuation starting with 1."""
    return birkhoff_g_interval_trace(sw.word + "1", len(sw.word))[-1]


# -- schedules ---------------------------------------------------------------

def schedule_exponent(psi: GrowthFunction) -> float:
    """N_k = floor(k ** e): e = 2 for n log n and n**a, else 1/(1-gamma) + delta."""
    if psi.kind != "double-exp":
        return 2.0
    gamma = psi.param
    if not gamma < 0.5:
        raise RegimeMismatch("Cantor schedules need gamma < 1/2")
    return 1.0 / (1.0 - gamma) + schedule_delta(gamma)


def schedule_delta(gamma: float) -> float:
    """Half the largest delta allowed by gamma/(1-gamma) + delta gamma < 1 (capped at 1)."""
    return 0.5 * min(1.0, (1.0 - gamma / (1.0 - gamma)) / (2.0 * gamma))


def checkpoint(psi: GrowthFunction, k: int) -> int:
    if k == 0:
        return 0
    e = schedule_exponent(psi)
    if e == 2.0:
        return k * k
    return int(mpmath.floor(mpmath.power(k, mpmath.mpf(e))))


@dataclass(frozen=True)
class Level:
    k: int
    N_prev: int
    N: int
    W: int
    n: int
    s: int
    t: int      # number of filler words
    ell: int    # run of ones before the word
    word: SumWord

    @property
    def a(self) -> int:
        return len(self.word)

    @property
    def word_start(self) -> int:
        """0-based index of the first digit of w_k."""
        return self.N - self.a


@dataclass
class CantorSchedule:
    psi: GrowthFunction
    beta: float
    m: int
    potential: str = "phi"
    k0: int = 0
    levels: list[Level] = field(default_factory=list)

    def _target(self, N: int) -> int:
        v = self.psi.value_mp(N, self.beta)
        with mpmath.workprec(int(mpmath.log(v + 2, 2)) + 64 if v else 64):
            return int(mpmath.nint(self.psi.value_mp(N, self.beta)))

    def make_level(self, k: int) -> Level | None:
        """Level k, or None when it cannot fit m + |w_k| digits (or n_k = 0)."""
        N_prev, N = checkpoint(self.psi, k - 1), checkpoint(self.psi, k)
        gap = N - N_prev
        W = max(1, self._target(N) - self._target(N_prev))
        lw = math.log2(W)
        n = int(math.floor(min(lw, math.sqrt(gap / (2.0 + lw)))))
        if n < 1:
            return None
        if self.potential == "phi":
            word = approx_word(W, n)
            s = 0
        else:
            s = n
            word = approx_word_g(W, n, s)
        free = gap - len(word)
        if free < self.m:
            return None
        t, ell = divmod(free, self.m)
        return Level(k, N_prev, N, W, n, s, t, ell, word)

    def first_feasible(self, limit: int = 100000) -> int:
        """Least k such that levels k .. 2k + 8 all fit.

        Feasibility can flicker at small k as n_k steps up, so a single
        feasible level is not taken as the start.
        """
        k = 1
        while k < limit:
            bad = next((j for j in range(k, 2 * k + 9) if self.make_level(j) is None), None)
            if bad is None:
                return k
            k = bad + 1
        raise ScheduleInfeasible("no feasible level found")

    def level(self, k: int) -> Level:
        """Level k >= k0, built on demand."""
        if not self.k0:
            self.k0 = self.first_feasible()
        while len(self.levels) <= k - self.k0:
            j = self.k0 + len(self.levels)
            lv = self.make_level(j)
            if lv is None:
                raise ScheduleInfeasible(f"level {j} does not fit its word and a filler")
            self.levels.append(lv)
        return self.levels[k - self.k0]

    def levels_through(self, N: int) -> list[Level]:
        """All levels whose checkpoint N_k is at most N."""
        out = []
        k = self.k0 or self.first_feasible()
        while checkpoint(self.psi, k) <= N:
            out.append(self.level(k))
            k += 1
        return out

    def parameters(self) -> dict:
        return {"psi": self.psi.spec, "beta": self.beta, "m": self.m,
                "potential": self.potential, "k0": self.k0 or self.first_feasible(),
                "schedule_exponent": schedule_exponent(self.psi),
                "N_k0_minus_1": checkpoint(self.psi, (self.k0 or self.first_feasible()) - 1)}


@dataclass
class CantorConstruction:
    schedule: CantorSchedule
    stream: DigitStream


def build_cantor(psi: GrowthFunction, beta: float, m: int, filler: str = "seeded",
                 seed: int = 0, potential: str = "phi") -> CantorConstruction:
    """A point of E_Psi(beta) (or F_Psi(beta) for ``potential='g'``).

    Level k lays out ``t_k`` filler words of length m ending in 1, then
    ``1**ell_k``, then the word w_k whose sum is about W_k =
    beta Psi(N_k) - beta Psi(N_{k-1}) (both rounded).  Levels before the
    first one that fits are replaced by a run of ones.  For beta = inf the
    target is 2**(n**eta) with eta < 1/2, which grows faster than any slower
    Psi in the family.
    """
    if m < 2:
        raise PreconditionError("block period m must be >= 2")
    if filler not in ("seeded", "deterministic"):
        raise PreconditionError(f"unknown filler policy {filler!r}")
    if not beta > 0:
        raise PreconditionError("beta must be positive")
    verdict = classify(psi, beta_class_of(beta), potential)
    if verdict.verdict != "full-dimension":
        raise RegimeMismatch(f"E_Psi(beta) is empty here: {verdict.citation}")
    if math.isinf(beta):
        if psi.kind == "double-exp" and psi.param >= 0.5:
            raise RegimeMismatch("beta = inf with gamma >= 1/2 is realised by infinity_stream")
        eta = ETA_INFINITY
        if psi.kind == "double-exp" and psi.param >= ETA_INFINITY:
            eta = (psi.param + 0.5) / 2
        psi, beta = GrowthFunction("double-exp", eta), 1.0
    sched = CantorSchedule(psi, beta, m, potential)
    sched.k0 = sched.first_feasible()
    rng = make_rng(seed)

    def filler_words(t: int) -> np.ndarray:
        if filler == "seeded":
            d = random_bits(rng, t * m)
        else:
            d = np.zeros(t * m, dtype=np.uint8)
        d[m - 1::m] = 1
        return d

    def chunks():
        head = checkpoint(sched.psi, sched.k0 - 1)
        if head:
            yield np.ones(head, dtype=np.uint8)
        k = sched.k0
        while True:
            lv = sched.level(k)
            yield np.concatenate([filler_words(lv.t), np.ones(lv.ell, dtype=np.uint8),
                                  as_digits(lv.word.word)])
            k += 1

    stream = DigitStream(chunks(), "cantor-constructed",
                         label=f"cantor psi={psi.spec} beta={beta} m={m} {filler} seed={seed}")
    return CantorConstruction(sched, stream)


def cantor_stream(psi: GrowthFunction, beta: float, m: int, filler: str = "seeded",
                  seed: int = 0, potential: str = "phi") -> DigitStream:
    return build_cantor(psi, beta, m, filler, seed, potential).stream


# -- beta = infinity above the threshold ------------------------------------

def infinity_delta(gamma: float) -> float:
    if not 0.5 <= gamma < 1:
        raise PreconditionError(f"gamma must lie in [1/2, 1), got {gamma!r}")
    return (gamma + 1) / 2


def zero_block(k: int, delta: float) -> tuple[int, int]:
    """1-based inclusive range 2**k + 1 .. 2**k + floor(2**(k delta)) of forced zeros."""
    return (1 << k) + 1, (1 << k) + math.floor(2.0 ** (k * delta))


def infinity_K(delta: float) -> int:
    """Least K >= 1 with 2**(K delta) > 1 whose zero blocks stay inside (2**k, 2**(k+1))."""
    # 2**(k delta) < 2**k for delta < 1 and k >= 1, so every k >= 1 fits
    return 1


def constrained_count(gamma: float, N: int) -> int:
    """Number of forced positions in [1, N]."""
    delta = infinity_delta(gamma)
    total, k = 0, infinity_K(delta)
    while (1 << k) + 1 <= N:
        lo, hi = zero_block(k, delta)
        total += min(hi, N) - lo + 1
        k += 1
    return total


def infinity_stream(gamma: float) -> DigitStream:
    """Ones everywhere except zero blocks after each 2**k, k >= K."""
    delta = infinity_delta(gamma)
    K = infinity_K(delta)

    def chunks():
        # digits 1 .. 2**K, then one segment (2**k, 2**(k+1)] per k
        yield np.ones(1 << K, dtype=np.uint8)
        k = K
        while True:
            seg = np.ones(1 << k, dtype=np.uint8)
            lo, hi = zero_block(k, delta)
            seg[lo - (1 << k) - 1: hi - (1 << k)] = 0
            yield seg
            k += 1

    return DigitStream(chunks(), "cantor-constructed", label=f"infinity gamma={gamma}")


def f_m_stream(m: int, seed: int) -> DigitStream:
    """Fair-coin digits with every m-th digit forced to 1."""
    if m < 2:
        raise PreconditionError("m must be >= 2")
    rng = make_rng(seed)
    size = max(m, CHUNK_BITS // m * m)

    def chunks():
        while True:
            d = random_bits(rng, size)
            d[m - 1::m] = 1
            yield d

    return DigitStream(chunks(), "cantor-constructed", label=f"F_m m={m} seed={seed}")
