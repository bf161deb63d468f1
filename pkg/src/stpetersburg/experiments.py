"""Monte Carlo checks: weak law, dichotomy series, entropy and frequency.

Every randomised routine takes an explicit integer seed.  Per-sample seeds
come from :func:`streams.derive_seed`, so results are identical whatever the
thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import mpmath
import numpy as np

from .dyadic import birkhoff_phi_sum, return_blocks, accelerated_sums
from .errors import PreconditionError
from .gibbs import build_distribution, draw_blocks, gibbs_stream
from .growth import GrowthFunction
from .spectrum import dim_at_alpha
from .streams import derive_seed, make_rng, ones_stream, uniform_stream

QUANTILE_LEVELS = (0.1, 0.25, 0.5, 0.75, 0.9)
WEAK_LAW_TARGET = 1.0 / math.log(2.0)


@dataclass(frozen=True)
class QuantileReport:
    n: int
    samples: int
    seed: int
    quantiles: dict
    target: float
    flags: dict = field(default_factory=dict)

    def report(self) -> dict:
        d = asdict(self)
        d["quantiles"] = {f"{k:g}": v for k, v in self.quantiles.items()}
        return d


def _map(fn, items, threads: int):
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


def weak_law_statistic(digits, n: int, boundary: bool = False) -> float:
    """S_n / (n ln n), or the same with S taken at the last block boundary <= n."""
    if boundary:
        blocks = return_blocks(digits[:n]).blocks
        if not blocks:
            return 0.0
        S = int(accelerated_sums(blocks)[1][-1])
    else:
        S = birkhoff_phi_sum(digits, n)
    return S / (n * math.log(n))


def weak_law_values(n: int, samples: int, seed: int, boundary: bool = False,
                    threads: int = 1) -> np.ndarray:
    def one(i):
        d = uniform_stream(derive_seed(seed, i)).through_one_at_or_after(n)
        return weak_law_statistic(d, n, boundary)
    return np.array(_map(one, range(samples), threads))


def weak_law(n: int, samples: int, seed: int, boundary: bool = False,
             threads: int = 1) -> QuantileReport:
    """Quantiles of S_n / (n ln n) over uniform points; the target is 1/ln 2."""
    if n < 16 or samples < 100:
        raise PreconditionError("weak_law needs n >= 16 and samples >= 100")
    vals = weak_law_values(n, samples, seed, boundary, threads)
    qs = np.quantile(vals, QUANTILE_LEVELS)
    return QuantileReport(n, samples, seed, dict(zip(QUANTILE_LEVELS, qs.tolist())),
                          WEAK_LAW_TARGET, {"boundary": boundary})


# -- dichotomy series --------------------------------------------------------

def _ceil_log2(x: float, exact) -> int:
    """ceil(log2 x) from a float, re-evaluated by ``exact`` near ties."""
    c = math.ceil(x)
    if abs(x - round(x)) < 1e-9:
        return exact()
    return c


def ceil_log2_psi(psi: GrowthFunction | float, n: int) -> int:
    """ceil(log2 Psi(n)), with Psi(n) <= 1 mapped to 0."""
    if not isinstance(psi, GrowthFunction):
        y = float(psi)
        return max(0, math.ceil(math.log2(y))) if y > 1 else 0
    if psi.kind == "power" and float(psi.param).is_integer():
        y = n ** int(psi.param)
        return (y - 1).bit_length()
    if n == 1 and psi.kind == "n-log-n":
        return 0
    if psi.kind == "double-exp":
        x = float(n) ** psi.param

        def exact():
            with mpmath.workprec(200):
                return int(mpmath.ceil(mpmath.mpf(n) ** mpmath.mpf(psi.param)))
        return max(0, _ceil_log2(x, exact))
    x = psi_log2_float(psi, n)

    def exact():
        with mpmath.workprec(200):
            return int(mpmath.ceil(mpmath.log(psi.value_mp(n), 2)))
    return max(0, _ceil_log2(x, exact))


def psi_log2_float(psi: GrowthFunction, n: int) -> float:
    if psi.kind == "n-log-n":
        return math.log2(n) + math.log2(math.log(n))
    return psi.param * math.log2(n)


def dichotomy_series(psi: GrowthFunction | float, N: int) -> np.ndarray:
    """Partial sums of lambda(phi >= Psi(n)) = 2**-ceil(log2 Psi(n)), n = 1..N.

    ``psi`` may also be a constant.  Entry n - 1 is the n-th partial sum.
    """
    if N < 1:
        raise PreconditionError("N must be >= 1")
    if not isinstance(psi, GrowthFunction):
        e = np.full(N, ceil_log2_psi(psi, 1), dtype=np.int64)
    elif psi.kind == "power" and float(psi.param).is_integer():
        n = np.arange(1, N + 1, dtype=object)
        e = np.array([(int(v) ** int(psi.param) - 1).bit_length() for v in n], dtype=np.int64)
    else:
        e = np.array([ceil_log2_psi(psi, n) for n in range(1, N + 1)], dtype=np.int64)
    # terms are dyadic; summing from small to large exponents would not change
    # the float result materially at these sizes
    terms = np.ldexp(1.0, -e)
    return np.cumsum(terms)


# -- entropy proxy -----------------------------------------------------------

def parse_source(spec: str) -> tuple[str, float | None]:
    if spec == "uniform":
        return "uniform", None
    for name in ("fm", "gibbs"):
        if spec.startswith(name + ":"):
            try:
                v = float(spec[len(name) + 1:])
            except ValueError:
                break
            if name == "fm" and (not v.is_integer() or v < 2):
                raise PreconditionError("fm:M needs an integer M >= 2")
            if name == "gibbs" and not v > 0:
                raise PreconditionError("gibbs:Q needs Q > 0")
            return name, v
    raise PreconditionError(f"unknown source {spec!r} (uniform | fm:M | gibbs:Q)")


def prefix_codes(source: str, depth: int, samples: int, seed: int) -> np.ndarray:
    """Depth-``depth`` prefixes of independent sampled points, as integers.

    Digit 1 is the most significant bit.  All prefixes are drawn from one
    generator seeded with ``seed``.
    """
    kind, v = parse_source(source)
    rng = make_rng(seed)
    if kind in ("uniform", "fm"):
        codes = rng.integers(0, 1 << depth, size=samples, dtype=np.int64)
        if kind == "fm":
            m = int(v)
            forced = sum(1 << (depth - p) for p in range(m, depth + 1, m))
            codes |= forced
        return codes
    dist = build_distribution(v)
    # depth blocks always cover depth digits since every block is >= 1
    blocks = draw_blocks(dist, rng, samples * depth).reshape(samples, depth)
    pos = np.cumsum(blocks, axis=1)  # 1-based positions of the block-closing 1s
    weights = np.where(pos <= depth, np.left_shift(np.int64(1), np.maximum(depth - pos, 0)), 0)
    return weights.sum(axis=1)


def entropy_dim_estimate(source: str, depth: int, samples: int, seed: int) -> float:
    """Plug-in Shannon entropy of depth-prefixes, in bits per digit."""
    if depth < 4:
        raise PreconditionError("depth must be >= 4")
    if depth > 40:
        raise PreconditionError("depth above 40 is not supported")
    if samples < 10 * (1 << depth):
        raise PreconditionError(f"undersampled: need samples >= 10 * 2**{depth}")
    codes = prefix_codes(source, depth, samples, seed)
    _, counts = np.unique(codes, return_counts=True)
    p = counts / samples
    return float(-(p * np.log2(p)).sum()) / depth


def entropy_target(source: str) -> float:
    kind, v = parse_source(source)
    if kind == "uniform":
        return 1.0
    if kind == "fm":
        return (v - 1) / v
    return build_distribution(v).entropy_rate


# -- digit frequency on E(alpha) ---------------------------------------------

def e_alpha_frequency_check(alpha: float, prefix_length: int, seed: int) -> dict:
    """Frequency of the digit 1 along a point typical for the level alpha."""
    if not alpha >= 1:
        raise PreconditionError("alpha must be >= 1")
    if prefix_length < 1:
        raise PreconditionError("prefix_length must be >= 1")
    if alpha == 1:
        d = ones_stream().take(prefix_length)
        return {"alpha": 1.0, "q0": math.inf, "prefix_length": prefix_length, "seed": seed,
                "frequency": float(d.sum()) / prefix_length, "target": 1.0, "stderr": 0.0}
    q0 = dim_at_alpha(alpha).q0
    if q0 == 0.0:
        raise PreconditionError(f"q0 for alpha={alpha} underflows double precision")
    dist = build_distribution(q0)
    d = gibbs_stream(dist, seed).take(prefix_length)
    n = np.arange(1, dist.N_cut + 1)
    mu = dist.mean_block
    var = float((n - mu) ** 2 @ dist.probabilities)
    return {"alpha": alpha, "q0": q0, "prefix_length": prefix_length, "seed": seed,
            "frequency": float(d.sum()) / prefix_length, "target": 1.0 / mu,
            "stderr": math.sqrt(var / (mu ** 3 * prefix_length))}
