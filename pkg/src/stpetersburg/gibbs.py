"""Gibbs measures on the first-return blocks.

At the root t = t(q) the pressure vanishes, so the weights

    p_n = 2 ** (-t n - q (2**n - 1)),   n = 1, 2, ...

sum to one and the Gibbs measure is the i.i.d. product of p over blocks:
the mass of the block cylinder (n_1, ..., n_l) is p_{n_1} ... p_{n_l}.
Sampling this product is therefore exact up to the truncation of p.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
from scipy import stats

from .dyadic import BlockDecomposition, blocks_to_digits
from .errors import PreconditionError
from .pressure import log2_weights, solve_t
from .streams import DigitStream, derive_seed, make_rng

DEFAULT_TAIL = 1e-15
ALPHA_CHECK = 1e-9
BLOCK_CHUNK = 4096


@dataclass(frozen=True, eq=False)
class GibbsDistribution:
    q: float
    t: float
    probabilities: np.ndarray  # p_1 .. p_{N_cut}
    alpha: float
    N_cut: int
    tail_mass: float
    mean_block: float
    # block entropy per digit, sum p log2(1/p) / sum n p
    entropy_rate: float
    # |alpha - (-t'(q))|, the weighted average against the implicit derivative
    alpha_gap: float

    @property
    def cdf(self) -> np.ndarray:
        c = np.cumsum(self.probabilities)
        # the truncated tail is folded into the last atom
        c[-1] = 1.0
        return c


def build_distribution(q: float, tol: float = DEFAULT_TAIL) -> GibbsDistribution:
    if not q > 0 or not math.isfinite(q):
        raise PreconditionError(f"q must be a positive finite number, got {q!r}")
    sol = solve_t(q)
    t = sol.t_of_q
    J = 64
    while True:
        n, e = log2_weights(t, q, J)
        p = np.exp2(e)
        # tail[k] = sum of p beyond the first k + 1 atoms
        tail = np.concatenate([np.cumsum(p[::-1])[::-1][1:], [0.0]])
        if e[-1] < math.log2(tol) - 64 or p[-1] == 0.0:
            break
        J *= 2
    N_cut = int(np.argmax(tail < tol)) + 1
    probs = p[:N_cut].copy()
    n = n[:N_cut]
    first = float(n @ probs)
    mersenne = np.expm1(n * math.log(2.0))
    alpha = float(mersenne @ probs) / first
    with np.errstate(divide="ignore"):
        info = np.where(probs > 0, -np.log2(probs), 0.0)
    gap = abs(alpha - sol.alpha)
    if gap > ALPHA_CHECK * alpha:
        raise AssertionError(f"Gibbs alpha {alpha} disagrees with -t'(q) {sol.alpha}")
    return GibbsDistribution(
        q=q, t=t, probabilities=probs, alpha=alpha, N_cut=N_cut,
        tail_mass=float(tail[N_cut - 1]), mean_block=first,
        entropy_rate=float(info @ probs) / first, alpha_gap=gap,
    )


def draw_blocks(dist: GibbsDistribution, rng: np.random.Generator, size: int) -> np.ndarray:
    """Inverse-CDF draws of block lengths (int64, values in 1..N_cut)."""
    u = rng.random(size)
    return np.searchsorted(dist.cdf, u, side="right").astype(np.int64) + 1


def sample_blocks(dist: GibbsDistribution, ell: int, seed: int) -> BlockDecomposition:
    if ell < 1:
        raise PreconditionError("ell must be >= 1")
    return BlockDecomposition(tuple(draw_blocks(dist, make_rng(seed), ell).tolist()))


def gibbs_stream(dist: GibbsDistribution, seed: int) -> DigitStream:
    """Digits of a Gibbs-typical point; its blocks extend ``sample_blocks(dist, ell, seed)``."""
    rng = make_rng(seed)

    def chunks():
        while True:
            yield blocks_to_digits(draw_blocks(dist, rng, BLOCK_CHUNK))

    return DigitStream(chunks(), "gibbs-sampled", label=f"gibbs q={dist.q} seed={seed}")


@dataclass(frozen=True)
class GibbsStatistics:
    q: float
    t: float
    alpha: float
    ell: int
    reps: int
    seed: int
    samples: int
    mean_block: float
    alpha_hat: float
    alpha_stderr: float
    localdim_hat: float
    localdim_stderr: float
    localdim_target: float
    max_block_seen: int

    def report(self) -> dict:
        return asdict(self)


def _one_rep(dist: GibbsDistribution, ell: int, seed: int):
    b = draw_blocks(dist, make_rng(seed), ell)
    length = float(b.sum())
    phi_sum = float(np.expm1(b * math.log(2.0)).sum())
    a = phi_sum / length
    # log2 of the cylinder mass over log2 of its length, both negated
    localdim = (dist.t * length + dist.q * phi_sum) / length
    return a, localdim, length, int(b.max())


def gibbs_statistics(dist: GibbsDistribution, ell: int, reps: int, seed: int,
                     threads: int = 1) -> GibbsStatistics:
    """Birkhoff ratio and local dimension over ``reps`` independent samples.

    Replicate r uses the seed ``derive_seed(seed, r)``, so the result does
    not depend on ``threads``.
    """
    if ell < 1 or reps < 1:
        raise PreconditionError("ell and reps must be >= 1")
    seeds = [derive_seed(seed, r) for r in range(reps)]
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            rows = list(ex.map(lambda s: _one_rep(dist, ell, s), seeds))
    else:
        rows = [_one_rep(dist, ell, s) for s in seeds]
    arr = np.array([r[:3] for r in rows])
    a, ld, lengths = arr[:, 0], arr[:, 1], arr[:, 2]
    se = (lambda x: float(x.std(ddof=1) / math.sqrt(reps))) if reps > 1 else (lambda x: math.nan)
    return GibbsStatistics(
        q=dist.q, t=dist.t, alpha=dist.alpha, ell=ell, reps=reps, seed=seed,
        samples=ell * reps,
        mean_block=float(lengths.sum()) / (ell * reps),
        alpha_hat=float(a.mean()), alpha_stderr=se(a),
        localdim_hat=float(ld.mean()), localdim_stderr=se(ld),
        localdim_target=dist.t + dist.q * dist.alpha,
        max_block_seen=max(r[3] for r in rows),
    )


def chi_square_blocks(dist: GibbsDistribution, draws: int, seed: int, bins: int = 10):
    """Goodness of fit of sampled blocks against p_n.

    Block values 1..bins get their own cell, larger values share one; cells
    with expected count below 5 are merged into their left neighbour.
    Returns ``(statistic, p_value)``.
    """
    b = draw_blocks(dist, make_rng(seed), draws)
    counts = np.bincount(np.minimum(b, bins + 1), minlength=bins + 2)[1:].astype(float)
    p = np.zeros(bins + 1)
    k = min(bins, dist.N_cut)
    p[:k] = dist.probabilities[:k]
    p[bins] = max(0.0, 1.0 - p[:bins].sum())
    expected = p * draws
    obs, exp = [], []
    for o, e in zip(counts, expected):
        if exp and e < 5:
            obs[-1] += o
            exp[-1] += e
        else:
            obs.append(o)
            exp.append(e)
    exp = np.array(exp)
    exp *= draws / exp.sum()
    res = stats.chisquare(np.array(obs), exp)
    return float(res.statistic), float(res.pvalue)
