"""Exact symbolic dynamics of the doubling map.

The doubling map shifts the binary expansion by one digit, so every
quantity here is read off digit patterns:

* ``phi(x) = 2**n`` when the expansion of x starts with ``0**n 1``;
* the return blocks ``n_1, n_2, ...`` are the lengths of the patterns
  ``0**(n_k - 1) 1`` read left to right;
* Birkhoff sums are kept as Python integers (no overflow regime), and sums of
  ``g(x) = 1/x`` are enclosed by exact rational intervals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import accumulate
from typing import Sequence

import numpy as np

from .errors import InsufficientDigits, PreconditionError
from .streams import DigitStream, as_digits, to_word

# int64 cumulative sums are used only when no partial sum can reach 2**62
_INT64_BITS = 62


def phi_prefix(prefix) -> int | None:
    """phi of any point whose expansion starts with ``prefix``.

    Returns ``2**n`` for a leading run of ``n`` zeros, or ``None`` when the
    prefix holds no 1 and phi is not yet determined.
    """
    n = hitting_time(prefix)
    return None if n is None else 1 << n


def hitting_time(prefix) -> int | None:
    """Steps until the orbit enters (1/2, 1], i.e. the leading zero-run length."""
    d = as_digits(prefix)
    hits = np.flatnonzero(d)
    return int(hits[0]) if hits.size else None


@dataclass(frozen=True)
class BlockDecomposition:
    """Return-time blocks ``(n_1, ..., n_l)`` of a prefix plus trailing zeros.

    Block k is the pattern ``0**(n_k - 1) 1``.
    """
    blocks: tuple[int, ...]
    remainder: str = ""

    def __post_init__(self):
        if any(n < 1 for n in self.blocks):
            raise PreconditionError("return blocks are positive integers")
        if self.remainder.strip("0"):
            raise PreconditionError("the remainder after the last block holds only zeros")

    def __len__(self):
        return len(self.blocks)

    @property
    def length(self) -> int:
        return sum(self.blocks) + len(self.remainder)

    def boundaries(self) -> np.ndarray:
        """Positions ``n_1 + ... + n_k`` of the block-closing 1s."""
        return np.cumsum(np.asarray(self.blocks, dtype=np.int64))

    def render(self) -> str:
        return render_blocks(self.blocks) + self.remainder


def render_blocks(blocks: Sequence[int]) -> str:
    return "".join("0" * (n - 1) + "1" for n in blocks)


def blocks_to_digits(blocks) -> np.ndarray:
    """Vectorised :func:`render_blocks` returning a uint8 array."""
    b = np.asarray(blocks, dtype=np.int64)
    out = np.zeros(int(b.sum()), dtype=np.uint8)
    out[np.cumsum(b) - 1] = 1
    return out


def return_blocks(prefix) -> BlockDecomposition:
    """Greedy parse of ``prefix`` into complete blocks and leftover zeros."""
    d = as_digits(prefix)
    ones = np.flatnonzero(d)
    if ones.size == 0:
        return BlockDecomposition((), "0" * d.size)
    blocks = np.diff(ones, prepend=-1)
    tail = d.size - 1 - int(ones[-1])
    return BlockDecomposition(tuple(blocks.tolist()), "0" * tail)


def zero_runs(digits: np.ndarray, n: int) -> np.ndarray:
    """Run of zeros starting at each index ``j < n`` (index ``j`` is position j+1).

    ``digits`` must contain a 1 at some index ``>= n - 1``.
    """
    ones = np.flatnonzero(digits)
    j = np.arange(n, dtype=np.int64)
    k = np.searchsorted(ones, j)
    if n and k[-1] >= ones.size:
        raise InsufficientDigits("phi(T^j x) undetermined: no closing digit 1")
    return ones[k] - j


def _cumsum_pow2(exponents: np.ndarray) -> np.ndarray:
    """Exact partial sums of ``2**e``: int64 when safe, Python ints otherwise."""
    n = exponents.size
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    top = int(exponents.max())
    if top + max(n, 1).bit_length() <= _INT64_BITS:
        return np.cumsum(np.left_shift(np.int64(1), exponents.astype(np.int64)))
    vals = list(accumulate(1 << int(e) for e in exponents))
    out = np.empty(n, dtype=object)
    out[:] = vals
    return out


@dataclass(frozen=True)
class BigSumTrace:
    """Birkhoff sums ``S_1, ..., S_N`` of phi; ``values[n - 1] == S_n``.

    The array is int64 when every value fits comfortably, object (Python
    int) otherwise.
    """
    values: np.ndarray

    def __len__(self):
        return int(self.values.size)

    def S(self, n: int) -> int:
        if not 1 <= n <= len(self):
            raise IndexError(n)
        return int(self.values[n - 1])

    def tolist(self) -> list[int]:
        return [int(v) for v in self.values]


def phi_terms(digits, n: int) -> list[int]:
    """phi(T^j x) for j < n, by direct scan (reference path for short words)."""
    d = as_digits(digits)
    out = []
    for j in range(n):
        r = 0
        while True:
            if j + r >= d.size:
                raise InsufficientDigits("phi(T^j x) undetermined: no closing digit 1")
            if d[j + r]:
                break
            r += 1
        out.append(1 << r)
    return out


def birkhoff_phi_trace(stream: DigitStream | str, N: int) -> BigSumTrace:
    """Exact ``S_1..S_N`` for the point given by ``stream``.

    A string is treated as an explicit finite prefix.  The stream has to
    supply digits up to the first 1 at or beyond position ``N``.
    """
    if N < 0:
        raise PreconditionError("N must be non-negative")
    if isinstance(stream, DigitStream):
        d = stream.through_one_at_or_after(N) if N else np.zeros(0, dtype=np.uint8)
    else:
        d = as_digits(stream)
    return BigSumTrace(_cumsum_pow2(zero_runs(d, N)))


def birkhoff_phi_sum(digits, N: int) -> int:
    """``S_N`` alone, exact, from an array already holding the closing 1."""
    r = zero_runs(as_digits(digits), N)
    if r.size == 0:
        return 0
    counts = np.bincount(r)
    return sum(int(c) << e for e, c in enumerate(counts.tolist()) if c)


def accelerated_sums(blocks: BlockDecomposition | Sequence[int]):
    """Sums along the first-return (accelerated) orbit.

    Returns ``(hat, induced)``: ``hat[l-1] = sum_k 2**(n_k - 1)`` and
    ``induced[l-1] = sum_k (2**n_k - 1)``, both exact.  At every block
    boundary ``S_{n_1+...+n_l} = 2 * hat_l - l = induced_l``.
    """
    b = blocks.blocks if isinstance(blocks, BlockDecomposition) else tuple(blocks)
    if len(b) == 0:
        raise PreconditionError("empty block decomposition")
    arr = np.asarray(b, dtype=np.int64)
    hat = _cumsum_pow2(arr - 1)
    full = _cumsum_pow2(arr)
    ell = np.arange(1, arr.size + 1, dtype=np.int64)
    if full.dtype == object:
        induced = np.empty(arr.size, dtype=object)
        induced[:] = [int(f) - int(k) for f, k in zip(full, ell)]
    else:
        induced = full - ell
    return hat, induced


@dataclass(frozen=True)
class DyadicInterval:
    """Half-open ``(num / 2**k, (num + 1) / 2**k]``: a cylinder of order k."""
    num: int
    k: int

    def __post_init__(self):
        if self.k < 0 or not 0 <= self.num < (1 << self.k):
            raise PreconditionError("cylinder numerator out of range")

    @property
    def lower(self) -> Fraction:
        return Fraction(self.num, 1 << self.k)

    @property
    def upper(self) -> Fraction:
        return Fraction(self.num + 1, 1 << self.k)

    @property
    def length(self) -> Fraction:
        return Fraction(1, 1 << self.k)


def cylinder(word) -> DyadicInterval:
    """Points of (0,1] whose expansion begins with ``word``."""
    d = as_digits(word)
    num = int(to_word(d), 2) if d.size else 0
    return DyadicInterval(num, int(d.size))


def block_cylinder(blocks: Sequence[int]) -> DyadicInterval:
    """Cylinder of points whose first return blocks are ``blocks``."""
    return cylinder(render_blocks(blocks))


@dataclass(frozen=True)
class RationalInterval:
    lower: Fraction
    upper: Fraction

    def __post_init__(self):
        if self.lower > self.upper:
            raise PreconditionError("interval with lower > upper")

    def __add__(self, other: "RationalInterval") -> "RationalInterval":
        return RationalInterval(self.lower + other.lower, self.upper + other.upper)

    def within(self, lo, hi) -> bool:
        return lo <= self.lower and self.upper <= hi

    def to_floats(self) -> tuple[float, float]:
        """Outward-rounded float enclosure."""
        lo, hi = float(self.lower), float(self.upper)
        if Fraction(lo) > self.lower:
            lo = math.nextafter(lo, -math.inf)
        if Fraction(hi) < self.upper:
            hi = math.nextafter(hi, math.inf)
        return lo, hi


def g_term_interval(suffix: str) -> RationalInterval:
    """Enclosure of ``1/x`` over the cylinder of ``suffix``."""
    L = len(suffix)
    v = int(suffix, 2) if L else 0
    if v == 0:
        raise InsufficientDigits("1/x is unbounded on a cylinder touching 0")
    return RationalInterval(Fraction(1 << L, v + 1), Fraction(1 << L, v))


def birkhoff_g_interval_trace(prefix, N: int) -> list[RationalInterval]:
    """Intervals enclosing ``S_n g`` (n = 1..N) over the cylinder of ``prefix``.

    Term j is bounded on the cylinder of the suffix starting at position
    j + 1, so every digit after j tightens the enclosure.
    """
    word = to_word(as_digits(prefix))
    if N > len(word):
        raise InsufficientDigits("prefix shorter than the requested trace")
    out = []
    acc = RationalInterval(Fraction(0), Fraction(0))
    for j in range(N):
        acc = acc + g_term_interval(word[j:])
        out.append(acc)
    return out
