"""Lazy binary digit sources.

A point x in (0,1] is only ever handled through its binary expansion
``x = [e_1 e_2 ...]``.  A :class:`DigitStream` produces those digits on
demand and caches what it has produced, so positions can be revisited.

Seeding
-------
Randomised streams draw from ``numpy.random.PCG64``.  Per-sample seeds are
derived from a base seed with :func:`derive_seed`, which applies the
SplitMix64 finaliser to ``base + (index + 1) * 0x9E3779B97F4A7C15`` modulo
2**64.  Two runs with the same base seed therefore see the same digits, and
per-sample streams do not depend on how work is split between threads.
"""

from __future__ import annotations

from typing import Callable, Iterable, Iterator

import numpy as np

from .errors import InsufficientDigits, PreconditionError

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15

CHUNK_BITS = 8192

KINDS = ("uniform-random", "gibbs-sampled", "cantor-constructed", "periodic",
         "explicit-prefix")


def splitmix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(base: int, index: int) -> int:
    """Seed for the ``index``-th sub-stream of ``base`` (a 64-bit integer)."""
    return splitmix64(base + (index + 1) * GOLDEN_GAMMA)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed & MASK64))


def random_bits(rng: np.random.Generator, n: int) -> np.ndarray:
    """``n`` fair-coin digits as uint8, drawn byte-wise from ``rng``."""
    nbytes = (n + 7) // 8
    raw = np.frombuffer(rng.bytes(nbytes), dtype=np.uint8)
    return np.unpackbits(raw)[:n]


def as_digits(word) -> np.ndarray:
    """Coerce a '0'/'1' string or an integer sequence into a uint8 array."""
    if isinstance(word, np.ndarray):
        arr = word.astype(np.uint8, copy=False)
    elif isinstance(word, str):
        arr = np.frombuffer(word.encode("ascii"), dtype=np.uint8) - ord("0")
    else:
        arr = np.asarray(list(word), dtype=np.uint8)
    if arr.size and arr.max() > 1:
        raise PreconditionError("binary words contain only 0 and 1")
    return arr


def to_word(digits) -> str:
    return (np.asarray(digits, dtype=np.uint8) + ord("0")).tobytes().decode("ascii")


class DigitStream:
    """Infinite (or explicitly finite) binary expansion produced in chunks.

    ``chunks`` yields uint8 arrays that are appended in order.  Positions
    are 1-based in :meth:`digit`, matching e_1, e_2, ...; array results from
    :meth:`take` are 0-based as usual.
    """

    def __init__(self, chunks: Iterable[np.ndarray], kind: str, *, finite: bool = False,
                 label: str = ""):
        if kind not in KINDS:
            raise PreconditionError(f"unknown stream kind {kind!r}")
        self.kind = kind
        self.finite = finite
        self.label = label
        self._chunks: Iterator[np.ndarray] = iter(chunks)
        self._buf = np.empty(0, dtype=np.uint8)
        self._len = 0
        self._exhausted = False

    def __repr__(self):
        return f"DigitStream(kind={self.kind!r}, label={self.label!r}, cached={self._len})"

    @property
    def cached(self) -> int:
        return self._len

    def _grow(self) -> bool:
        try:
            chunk = next(self._chunks)
        except StopIteration:
            self._exhausted = True
            return False
        chunk = np.asarray(chunk, dtype=np.uint8)
        need = self._len + chunk.size
        if need > self._buf.size:
            new = np.empty(max(need, 2 * self._buf.size, CHUNK_BITS), dtype=np.uint8)
            new[:self._len] = self._buf[:self._len]
            self._buf = new
        self._buf[self._len:need] = chunk
        self._len = need
        return True

    def _ensure(self, n: int) -> None:
        while self._len < n:
            if self._exhausted or not self._grow():
                raise InsufficientDigits(
                    f"stream ({self.kind}) has only {self._len} digits, {n} requested")

    def take(self, n: int) -> np.ndarray:
        """The first ``n`` digits as a read-only view."""
        self._ensure(n)
        out = self._buf[:n]
        out.flags.writeable = False
        return out

    def digit(self, i: int) -> int:
        if i < 1:
            raise PreconditionError("digit positions start at 1")
        self._ensure(i)
        return int(self._buf[i - 1])

    def prefix(self, n: int) -> str:
        return to_word(self.take(n))

    def through_one_at_or_after(self, n: int) -> np.ndarray:
        """Digits up to and including the first 1 at position >= ``n``.

        This is exactly what is needed to evaluate phi(T^j x) for all j < n.
        """
        start = max(n - 1, 0)
        self._ensure(max(n, 1))
        while True:
            hits = np.flatnonzero(self._buf[start:self._len])
            if hits.size:
                return self.take(start + int(hits[0]) + 1)
            start = self._len
            if self._exhausted or not self._grow():
                raise InsufficientDigits(
                    f"no digit 1 at or after position {n} in this {self.kind} stream")


def _repeat(fn: Callable[[], np.ndarray]) -> Iterator[np.ndarray]:
    while True:
        yield fn()


def uniform_stream(seed: int) -> DigitStream:
    """Lebesgue-typical point: i.i.d. fair-coin digits."""
    rng = make_rng(seed)
    return DigitStream(_repeat(lambda: random_bits(rng, CHUNK_BITS)), "uniform-random",
                       label=f"uniform seed={seed}")


def periodic_stream(word) -> DigitStream:
    """The point whose expansion repeats ``word`` forever."""
    base = as_digits(word)
    if base.size == 0 or not base.any():
        raise PreconditionError("a periodic expansion needs at least one digit 1")
    reps = max(1, CHUNK_BITS // base.size)
    block = np.tile(base, reps)
    return DigitStream(_repeat(lambda: block), "periodic", label=f"periodic {to_word(base)}")


def explicit_stream(word) -> DigitStream:
    """A finite prefix; asking for more digits raises :class:`InsufficientDigits`."""
    digits = as_digits(word)
    return DigitStream([digits], "explicit-prefix", finite=True, label="explicit")


def ones_stream() -> DigitStream:
    return periodic_stream("1")
