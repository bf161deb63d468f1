import math

import numpy as np
import pytest

from stpetersburg.dyadic import accelerated_sums, birkhoff_phi_trace, return_blocks
from stpetersburg.errors import PreconditionError
from stpetersburg.gibbs import (build_distribution, chi_square_blocks, draw_blocks,
                                gibbs_statistics, gibbs_stream, sample_blocks)
from stpetersburg.pressure import solve_t
from stpetersburg.streams import derive_seed, make_rng

QS = (0.05, 0.5, 1.0, 2.0, 10.0)


@pytest.fixture(scope="module")
def dist1():
    return build_distribution(1.0)


@pytest.mark.parametrize("q", QS)
def test_normalised(q):
    d = build_distribution(q)
    assert abs(d.probabilities.sum() + d.tail_mass - 1.0) < 1e-12
    assert d.tail_mass < 1e-15
    assert d.cdf[-1] == 1.0


def test_root_matches_oracle(dist1, golden_misc):
    assert dist1.t == pytest.approx(golden_misc["gibbs_pilot"]["t"], abs=1e-12)
    p1 = 2.0 ** (-dist1.t - 1.0)
    assert dist1.probabilities[0] == pytest.approx(p1, rel=1e-14)


@pytest.mark.parametrize("q", QS)
def test_alpha_agrees_with_slope(q):
    d = build_distribution(q)
    assert d.alpha == pytest.approx(solve_t(q).alpha, rel=1e-9)


def test_alpha_decreasing():
    a = [build_distribution(q).alpha for q in QS]
    assert all(x > y for x, y in zip(a, a[1:]))


def test_sampling_deterministic(dist1):
    assert sample_blocks(dist1, 500, 3).blocks == sample_blocks(dist1, 500, 3).blocks
    assert sample_blocks(dist1, 500, 3).blocks != sample_blocks(dist1, 500, 4).blocks


def test_stream_extends_sampled_blocks(dist1):
    bd = sample_blocks(dist1, 3000, 9)
    assert gibbs_stream(dist1, 9).prefix(bd.length) == bd.render()


def test_mean_block_within_three_sigma(dist1):
    draws = 100000
    b = np.array(sample_blocks(dist1, draws, 21).blocks)
    n = np.arange(1, dist1.N_cut + 1)
    var = float((n - dist1.mean_block) ** 2 @ dist1.probabilities)
    assert abs(b.mean() - dist1.mean_block) <= 3 * math.sqrt(var / draws)


def test_transference_on_gibbs_samples():
    d = build_distribution(0.5)
    for i in range(1000):
        bd = sample_blocks(d, 1 + i % 40, derive_seed(5, i))
        hat, induced = accelerated_sums(bd)
        S = birkhoff_phi_trace(bd.render(), bd.length).S(bd.length)
        assert S == 2 * int(hat[-1]) - len(bd) == int(induced[-1])


def test_chi_square(dist1):
    _, p = chi_square_blocks(dist1, 200000, 1)
    assert p > 1e-3


def test_single_block_statistics(dist1):
    st = gibbs_statistics(dist1, 1, 1, 17)
    b = sample_blocks(dist1, 1, derive_seed(17, 0)).blocks[0]
    assert st.alpha_hat == pytest.approx((2 ** b - 1) / b, rel=1e-14)
    assert st.localdim_hat == pytest.approx(dist1.t + dist1.q * (2 ** b - 1) / b, rel=1e-13)
    assert math.isnan(st.alpha_stderr)


def test_statistics_independent_of_threads(dist1):
    a = gibbs_statistics(dist1, 200, 12, 4)
    b = gibbs_statistics(dist1, 200, 12, 4, threads=4)
    assert a == b


def test_max_block_grows_logarithmically(dist1, golden_misc):
    C = golden_misc["gibbs_pilot"]["C"]
    for e in (3, 4, 5):
        ell = 10 ** e
        b = sample_blocks(dist1, ell, e)
        assert max(b.blocks) <= C * math.log2(ell)


def test_localdim_target_is_legendre_value(dist1):
    st = gibbs_statistics(dist1, 2000, 20, 8)
    assert st.localdim_target == pytest.approx(dist1.t + dist1.q * dist1.alpha)
    assert abs(st.localdim_hat - st.localdim_target) <= 4 * st.localdim_stderr + 1e-12


def test_entropy_rate_equals_localdim_target():
    # for an i.i.d. Gibbs measure with P = 0 the block entropy per digit is t + q alpha
    for q in (0.5, 1.0, 2.0):
        d = build_distribution(q)
        assert d.entropy_rate == pytest.approx(d.t + q * d.alpha, rel=1e-10)


def test_draws_cover_support(dist1):
    rng = make_rng(0)
    b = draw_blocks(dist1, rng, 10000)
    assert b.min() >= 1 and b.max() <= dist1.N_cut


@pytest.mark.parametrize("q", [0.0, -2.0, math.inf])
def test_bad_q(q):
    with pytest.raises(PreconditionError):
        build_distribution(q)


def test_bad_sizes(dist1):
    with pytest.raises(PreconditionError):
        sample_blocks(dist1, 0, 1)
    with pytest.raises(PreconditionError):
        gibbs_statistics(dist1, 10, 0, 1)


def test_blocks_read_back_from_stream(dist1):
    bd = sample_blocks(dist1, 100, 2)
    assert return_blocks(gibbs_stream(dist1, 2).take(bd.length)).blocks == bd.blocks
