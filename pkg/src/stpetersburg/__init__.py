"""Birkhoff sums of the Saint-Petersburg potential under the doubling map.

Points of (0,1] are handled only through their binary digits; sums of
phi(x) = 2**n (x beginning with 0**n 1) are exact integers.
"""

from .constructions import (aligned_value, approx_word, approx_word_g, build_cantor,
                            cantor_stream, f_m_stream, infinity_stream)
from .dyadic import (BigSumTrace, BlockDecomposition, DyadicInterval, RationalInterval,
                     accelerated_sums, birkhoff_g_interval_trace, birkhoff_phi_trace,
                     phi_prefix, return_blocks)
from .errors import InsufficientDigits, PreconditionError, RegimeMismatch, ScheduleInfeasible
from .experiments import dichotomy_series, e_alpha_frequency_check, entropy_dim_estimate, weak_law
from .gibbs import build_distribution, gibbs_statistics, gibbs_stream, sample_blocks
from .growth import GrowthFunction, classify, obstruction_witness, parse_psi, psi_log2, ratio_trace
from .pressure import PressureEvaluation, PressureSolution, eval_pressure, solve_t
from .spectrum import SpectrumSample, dim_at_alpha, spectrum_curve
from .streams import DigitStream, derive_seed, explicit_stream, periodic_stream, uniform_stream

__version__ = "0.1.0"
