"""Growth functions Psi, the regime classifier and ratio diagnostics.

The family is Psi(n) = n ln n, n**a (a > 1) and 2**(n**gamma) (gamma > 0).
Comparisons against Birkhoff sums are made in the log2 domain: log2 S is
read from the exact integer, and log2 Psi is evaluated in closed form.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .dyadic import BlockDecomposition, accelerated_sums, birkhoff_phi_trace
from .errors import PreconditionError
from .streams import DigitStream

KINDS = ("n-log-n", "power", "double-exp")
BETA_CLASSES = ("zero", "finite-positive", "infinity")
BETA_ALIASES = {"zero": "zero", "0": "zero",
                "finite": "finite-positive", "finite-positive": "finite-positive",
                "infinity": "infinity", "inf": "infinity"}
POTENTIALS = ("phi", "g")

_NUM = r"[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?"


@dataclass(frozen=True)
class GrowthFunction:
    kind: str
    param: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PreconditionError(f"unknown growth kind {self.kind!r}")
        if self.kind == "n-log-n":
            if self.param is not None:
                raise PreconditionError("n log n takes no parameter")
        elif self.param is None or not math.isfinite(self.param):
            raise PreconditionError(f"{self.kind} needs a finite parameter")
        elif self.kind == "power" and not self.param > 1:
            raise PreconditionError("power growth needs a > 1")
        elif self.kind == "double-exp" and not self.param > 0:
            raise PreconditionError("double-exponential growth needs gamma > 0")

    @property
    def spec(self) -> str:
        if self.kind == "n-log-n":
            return "nlogn"
        if self.kind == "power":
            return f"n^{self.param:g}"
        return f"2^n^{self.param:g}"

    def log2(self, n: int) -> float:
        return psi_log2(self, n)

    def value_mp(self, n: int, beta=1) -> mpmath.mpf:
        """beta * Psi(n) at the current mpmath precision (Psi(0) = 0)."""
        if n == 0:
            return mpmath.mpf(0)
        n = mpmath.mpf(n)
        if self.kind == "n-log-n":
            v = n * mpmath.log(n)
        elif self.kind == "power":
            v = n ** mpmath.mpf(self.param)
        else:
            v = mpmath.power(2, n ** mpmath.mpf(self.param))
        return mpmath.mpf(beta) * v


def psi_log2(psi: GrowthFunction, n: int) -> float:
    if n < 2:
        raise PreconditionError("log2 Psi(n) is evaluated for n >= 2")
    if psi.kind == "n-log-n":
        return math.log2(n) + math.log2(math.log(n))
    if psi.kind == "power":
        return psi.param * math.log2(n)
    return float(n) ** psi.param


def parse_psi(spec: str) -> GrowthFunction:
    """``nlogn`` | ``n^A`` | ``2^n^G`` with decimal or scientific parameters."""
    s = spec.strip()
    if s == "nlogn":
        return GrowthFunction("n-log-n")
    m = re.fullmatch(rf"2\^n\^({_NUM})", s)
    if m:
        return GrowthFunction("double-exp", float(m.group(1)))
    m = re.fullmatch(rf"n\^({_NUM})", s)
    if m:
        return GrowthFunction("power", float(m.group(1)))
    raise PreconditionError(f"cannot parse growth function {spec!r}")


def beta_class_of(beta: float) -> str:
    if beta == 0:
        return "zero"
    if math.isinf(beta):
        return "infinity"
    if beta > 0:
        return "finite-positive"
    raise PreconditionError("beta must be non-negative")


def normalize_beta_class(name: str) -> str:
    try:
        return BETA_ALIASES[name]
    except KeyError:
        raise PreconditionError(f"unknown beta class {name!r}") from None


@dataclass(frozen=True)
class RegimeVerdict:
    potential: str
    beta_class: str
    verdict: str
    citation: str


def classify(psi: GrowthFunction, beta_class: str, potential: str = "phi") -> RegimeVerdict:
    """Full dimension or empty, for E_Psi(beta) (phi) or F_Psi(beta) (g)."""
    bc = normalize_beta_class(beta_class)
    if potential not in POTENTIALS:
        raise PreconditionError(f"unknown potential {potential!r}")
    gamma = psi.param if psi.kind == "double-exp" else None
    if bc == "zero":
        verdict, why = "full-dimension", "beta=0: contains points of finite Birkhoff average"
    elif gamma is None or gamma < 0.5:
        verdict = "full-dimension"
        why = ("slow growth, beta=inf: embeds E(1) for 2^n^eta with eta<1/2"
               if bc == "infinity" else
               "slow growth: Cantor set of aligned words with exact sums")
    elif gamma < 1:
        if bc == "finite-positive":
            verdict = "empty"
            why = "1/2<=gamma<1: consecutive block ratio forces n_j = o(N^(1-gamma))"
        else:
            verdict = "full-dimension"
            why = "1/2<=gamma<1, beta=inf: zero blocks of length 2^(k delta) at 2^k"
    else:
        verdict = "empty"
        why = ("gamma>=1: Psi(n)/Psi(n-1)>=2 while S_n/S_(n-1)->1"
               if bc == "finite-positive" else
               "gamma>=1, beta=inf: liminf S_n/2^n <= 1")
    if potential == "g":
        why += "; transferred to 1/x by phi <= g <= 2 phi"
    return RegimeVerdict(potential, bc, verdict, why)


def log2_int(v: int) -> float:
    """log2 of a positive integer of any size."""
    if v <= 0:
        raise PreconditionError("log2 of a non-positive integer")
    return math.log2(v)


@dataclass(frozen=True)
class RatioTrace:
    n: np.ndarray
    log2_S: np.ndarray
    log2_psi: np.ndarray

    @property
    def log_ratio(self) -> np.ndarray:
        return self.log2_S - self.log2_psi

    def rows(self):
        for row in zip(self.n.tolist(), self.log2_S.tolist(), self.log2_psi.tolist(),
                       self.log_ratio.tolist()):
            yield row


def ratio_trace(stream: DigitStream, psi: GrowthFunction, N: int) -> RatioTrace:
    """log2 S_n against log2 Psi(n) at each 1-position n <= N and at n + 1.

    These are the two convergents compared in the emptiness arguments.
    """
    trace = birkhoff_phi_trace(stream, N)
    digits = stream.take(N)
    ones = np.flatnonzero(digits) + 1
    pts = np.union1d(ones, ones + 1)
    pts = pts[(pts >= 2) & (pts <= N)]
    vals = trace.values
    log2_S = np.array([log2_int(int(vals[p - 1])) for p in pts.tolist()])
    log2_psi = np.array([psi_log2(psi, int(p)) for p in pts.tolist()])
    return RatioTrace(pts.astype(np.int64), log2_S, log2_psi)


@dataclass(frozen=True)
class ObstructionWitness:
    boundaries: np.ndarray   # B_j = n_1 + ... + n_j, j >= 2
    log2_sum_ratio: np.ndarray  # log2(S_{B_j} / S_{B_{j-1}})
    log2_psi_step: np.ndarray   # log2 Psi(B_j) - log2 Psi(B_j - 1)
    slack: np.ndarray | None    # n_j / B_{j-1}^(1 - gamma), for gamma < 1
    step_at_least_one: bool | None  # certified for gamma >= 1


def _power_step(B: int, gamma: float) -> float:
    """B**gamma - (B - 1)**gamma without cancellation."""
    if B == 1 or gamma == 1:
        return 1.0
    return (B - 1) ** gamma * math.expm1(gamma * math.log1p(1.0 / (B - 1)))


def obstruction_witness(blocks: BlockDecomposition, psi: GrowthFunction) -> ObstructionWitness:
    if psi.kind != "double-exp":
        raise PreconditionError("obstruction diagnostics apply to Psi = 2^n^gamma")
    b = blocks.blocks
    if len(b) < 2:
        raise PreconditionError("need at least two complete blocks")
    gamma = psi.param
    _, induced = accelerated_sums(b)
    S = [int(v) for v in induced]
    B = np.cumsum(np.asarray(b, dtype=np.int64))
    ratio = [math.log2(Fraction(S[j], S[j - 1])) if S[j - 1] else math.inf
             for j in range(1, len(b))]
    steps = [_power_step(int(x), gamma) for x in B[1:]]
    slack = None
    certified = None
    if gamma < 1:
        slack = np.array([b[j] / float(B[j - 1]) ** (1 - gamma) for j in range(1, len(b))])
    else:
        # (B-1)**(gamma-1) >= 1, and B - (B-1) = 1 exactly for gamma = 1
        certified = all(s >= 1.0 for s in steps)
    return ObstructionWitness(B[1:], np.array(ratio), np.array(steps), slack, certified)
