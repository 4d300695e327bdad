"""MWC multiplier enumeration and per-stream parameter derivation."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import List, Optional, Tuple

MASK32 = 0xFFFFFFFF
MASK64 = 0xFFFFFFFFFFFFFFFF

SUPPORTED_BASE_BITS = (8, 16)

# deterministic for n < 3.3e24 (Sorenson & Webster)
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for every n below 3.3e24."""
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def is_safeprime(p: int) -> bool:
    return p >= 5 and p % 2 == 1 and is_prime(p) and is_prime((p - 1) // 2)


def is_valid_multiplier(a: int, base_bits: int = 16) -> bool:
    return 2 <= a < (1 << base_bits) and is_safeprime(a * (1 << base_bits) - 1)


class UnsupportedBaseError(ValueError):
    pass


@dataclass(frozen=True)
class MultiplierTable:
    base_bits: int
    multipliers: Tuple[int, ...]

    def __len__(self) -> int:
        return len(self.multipliers)

    def __getitem__(self, i: int) -> int:
        return self.multipliers[i]

    def __contains__(self, a: object) -> bool:
        return a in self.multipliers

    @property
    def pair_count(self) -> int:
        return math.comb(len(self.multipliers), 2)

    def to_text(self) -> str:
        """One decimal multiplier per line, ascending, trailing newline."""
        return "".join(f"{a}\n" for a in self.multipliers)

    @classmethod
    def from_text(cls, text: str, base_bits: int = 16) -> "MultiplierTable":
        return cls(base_bits, tuple(int(line) for line in text.split()))


@functools.lru_cache(maxsize=None)
def enumerate_multipliers(base_bits: int = 16) -> MultiplierTable:
    """All a in [2, 2^base_bits) with a*2^base_bits - 1 a safeprime, ascending."""
    if base_bits not in SUPPORTED_BASE_BITS:
        raise UnsupportedBaseError(
            f"base_bits must be one of {SUPPORTED_BASE_BITS}, got {base_bits}"
        )
    b = 1 << base_bits
    return MultiplierTable(
        base_bits, tuple(a for a in range(2, b) if is_safeprime(a * b - 1))
    )


def load_fixture(base_bits: int = 16) -> MultiplierTable:
    """The pinned multiplier list shipped with the package."""
    text = resources.files("prngforge.data").joinpath(f"multipliers{base_bits}.txt").read_text()
    return MultiplierTable.from_text(text, base_bits)


@functools.lru_cache(maxsize=None)
def default_table() -> MultiplierTable:
    return load_fixture(16)


def pair_for_stream(table: MultiplierTable, stream_index: int) -> Tuple[int, int]:
    """Colexicographic unranking of 2-combinations of the table, smaller multiplier first."""
    total = table.pair_count
    if not 0 <= stream_index < total:
        raise IndexError(
            f"stream index {stream_index} out of range: at most {total} streams "
            f"(indices 0..{total - 1})"
        )
    # largest j with C(j, 2) <= index
    j = (1 + math.isqrt(1 + 8 * stream_index)) // 2
    while j * (j - 1) // 2 > stream_index:
        j -= 1
    while (j + 1) * j // 2 <= stream_index:
        j += 1
    i = stream_index - j * (j - 1) // 2
    return table[i], table[j]


def rank_pair(table: MultiplierTable, pair: Tuple[int, int]) -> int:
    i, j = sorted(table.multipliers.index(a) for a in pair)
    return j * (j - 1) // 2 + i


GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & MASK64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SeedSequence:
    """SplitMix64 stream yielding 32-bit words (the high half of each 64-bit draw).

    Stream ``i`` of master seed ``m`` starts from ``mix64(m + (i+1)*gamma)`` so that
    it is a pure function of ``(m, i)``.
    """

    def __init__(self, master_seed: int, stream_index: int = 0):
        self.state = mix64((master_seed + (stream_index + 1) * GOLDEN_GAMMA) & MASK64)

    def next64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return mix64(self.state)

    def next32(self) -> int:
        return self.next64() >> 32

    def draw(self, ok) -> int:
        while True:
            w = self.next32()
            if ok(w):
                return w


@dataclass(frozen=True)
class StreamParams:
    """Multipliers and seed material for one stream.

    ``seeds`` is ``(mwc_hi, mwc_lo, shr3, lcg)``; ``xorshift_seeds`` holds the eight
    words used when the stream runs the 256-bit XorShift generator.
    """

    stream_index: int
    mwc_multipliers: Optional[Tuple[int, int]]
    seeds: Tuple[int, int, int, int]
    xorshift_seeds: Tuple[int, ...] = field(default=())


def _mwc_word_ok(a: int):
    def ok(w: int) -> bool:
        t = a * (w & 0xFFFF) + (w >> 16)
        return t != 0 and t != (a << 16) - 1

    return ok


def stream_params(
    master_seed: int,
    stream_index: int,
    table: MultiplierTable | None = None,
    need_multipliers: bool = True,
) -> StreamParams:
    """Parameters for one stream, a pure function of ``(master_seed, stream_index)``.

    Without ``need_multipliers`` an index past the last multiplier pair is allowed;
    the pair is then ``None`` and the MWC words only avoid zero.
    """
    table = table or default_table()
    if need_multipliers or stream_index < table.pair_count:
        pair = pair_for_stream(table, stream_index)
        hi_ok, lo_ok = _mwc_word_ok(pair[0]), _mwc_word_ok(pair[1])
    else:
        pair = None
        hi_ok = lo_ok = lambda w: w != 0
    seq = SeedSequence(master_seed & MASK64, stream_index)
    seeds = (
        seq.draw(hi_ok),
        seq.draw(lo_ok),
        seq.draw(lambda w: w != 0),
        seq.draw(lambda w: True),
    )
    xs = [seq.next32() for _ in range(8)]
    while not any(xs):
        xs = [seq.next32() for _ in range(8)]
    return StreamParams(stream_index, pair, seeds, tuple(xs))


def seed_streams(master_seed: int, count: int, table: MultiplierTable | None = None) -> List[StreamParams]:
    table = table or default_table()
    if not 0 <= count <= table.pair_count:
        raise ValueError(f"stream count {count} out of range [0, {table.pair_count}]")
    return [stream_params(master_seed, i, table) for i in range(count)]
