"""Scalar, bit-exact step functions for the MWC, XorShift, SHR3, LCG and KISS generators.

States are immutable values. Every step function returns ``(new_state, value)`` and
never mutates its argument, so a state can be handed between threads freely.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Tuple

import numpy as np

MASK16 = 0xFFFF
MASK32 = 0xFFFFFFFF

LCG_MULTIPLIER = 69069
LCG_INCREMENT = 1234567

DEFAULT_MWC_MULTIPLIERS = (36969, 18000)


class GeneratorKind(str, enum.Enum):
    MWC = "mwc"
    XORSHIFT256 = "xorshift256"
    SHR3 = "shr3"
    LCG = "lcg"
    KISS = "kiss"


class InvalidStateError(ValueError):
    """A seed or state that the recurrence cannot use."""


class AbsorbingStateError(InvalidStateError):
    """MWC lane seeded at one of the recurrence's fixed points."""


class BlockAlignmentError(RuntimeError):
    """Block stepping requested while the XorShift cursor is mid-block."""


def _check_multiplier(a: int, base_bits: int) -> None:
    # imported lazily: params imports this module for the state types
    from prngforge.params import is_valid_multiplier

    if not is_valid_multiplier(a, base_bits):
        raise InvalidStateError(
            f"multiplier {a} is invalid: {a}*2^{base_bits}-1 is not a safeprime"
        )


@dataclass(frozen=True)
class MwcLaneState:
    """One multiply-with-carry lane, ``x' = (a*x + c) mod b``, ``c' = (a*x + c) div b``.

    ``base_bits`` is 16 for real generators; 4 and 8 exist for desk-scale checks.
    """

    x: int
    c: int
    a: int
    base_bits: int = 16

    def __post_init__(self) -> None:
        b = 1 << self.base_bits
        if not (0 <= self.x < b and 0 <= self.c < b):
            raise InvalidStateError(f"x={self.x}, c={self.c} must fit in {self.base_bits} bits")
        if not (2 <= self.a < b):
            raise InvalidStateError(f"multiplier {self.a} out of range [2, {b})")
        _check_multiplier(self.a, self.base_bits)
        # a*x + c in {0, a*b - 1}: a fixed point, or one step from (b-1, a-1)
        t = self.a * self.x + self.c
        if t == 0 or t == self.a * b - 1:
            raise AbsorbingStateError(
                f"(x, c) = ({self.x}, {self.c}) is or leads to an absorbing state for a={self.a}"
            )

    @classmethod
    def from_word(cls, word: int, a: int) -> "MwcLaneState":
        """Build a 16-bit lane from a packed seed word: carry in the high half, x in the low."""
        return cls(x=word & MASK16, c=(word >> 16) & MASK16, a=a)

    def to_word(self) -> int:
        return (self.c << self.base_bits) | self.x


@dataclass(frozen=True)
class CombinedMwcState:
    """Two 16-bit MWC lanes; ``hi`` supplies output bits 31..16."""

    hi: MwcLaneState
    lo: MwcLaneState

    def __post_init__(self) -> None:
        if self.hi.a == self.lo.a:
            raise InvalidStateError("combined MWC lanes need distinct multipliers")
        if self.hi.base_bits != 16 or self.lo.base_bits != 16:
            raise InvalidStateError("combined MWC lanes must use base 2^16")

    @classmethod
    def from_words(
        cls,
        hi_word: int,
        lo_word: int,
        multipliers: Tuple[int, int] = DEFAULT_MWC_MULTIPLIERS,
    ) -> "CombinedMwcState":
        return cls(
            hi=MwcLaneState.from_word(hi_word, multipliers[0]),
            lo=MwcLaneState.from_word(lo_word, multipliers[1]),
        )


@dataclass(frozen=True)
class XorShift256State:
    """Eight-word circular buffer. ``v[k]`` holds the oldest word, v_{n-8}."""

    v: Tuple[int, ...]
    k: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "v", tuple(int(w) for w in self.v))
        if len(self.v) != 8:
            raise InvalidStateError("XorShift256 state needs exactly 8 words")
        if any(not 0 <= w <= MASK32 for w in self.v):
            raise InvalidStateError("XorShift256 words must be 32-bit unsigned")
        if not any(self.v):
            raise InvalidStateError("all-zero XorShift256 state is a fixed point")
        if not 0 <= self.k < 8:
            raise InvalidStateError(f"cursor {self.k} outside [0, 8)")

    def ordered(self) -> Tuple[int, ...]:
        """Words oldest first: (v_{n-8}, ..., v_{n-1})."""
        return self.v[self.k :] + self.v[: self.k]

    @classmethod
    def from_ordered(cls, words, k: int = 0) -> "XorShift256State":
        """Inverse of :meth:`ordered`, placing the oldest word at cursor ``k``."""
        words = tuple(words)
        rot = (8 - k) % 8
        return cls(v=words[rot:] + words[:rot], k=k)


@dataclass(frozen=True)
class Shr3State:
    y: int

    def __post_init__(self) -> None:
        if not 0 < self.y <= MASK32:
            raise InvalidStateError("SHR3 state must be a non-zero 32-bit word")


@dataclass(frozen=True)
class LcgState:
    X: int
    a: int = LCG_MULTIPLIER
    c: int = LCG_INCREMENT

    def __post_init__(self) -> None:
        for name in ("X", "a", "c"):
            if not 0 <= getattr(self, name) <= MASK32:
                raise InvalidStateError(f"LCG {name} must be a 32-bit unsigned value")


@dataclass(frozen=True)
class KissState:
    mwc: CombinedMwcState
    shr3: Shr3State
    lcg: LcgState

    @classmethod
    def from_words(
        cls,
        seeds: Tuple[int, int, int, int],
        multipliers: Tuple[int, int] = DEFAULT_MWC_MULTIPLIERS,
    ) -> "KissState":
        """Seeds are ``(mwc_hi, mwc_lo, shr3, lcg)``."""
        hi, lo, y, x = seeds
        return cls(
            mwc=CombinedMwcState.from_words(hi, lo, multipliers),
            shr3=Shr3State(y),
            lcg=LcgState(x),
        )


def _lane(x: int, c: int, a: int, base_bits: int) -> MwcLaneState:
    # skips validation: a valid state maps to a valid state
    s = object.__new__(MwcLaneState)
    object.__setattr__(s, "x", x)
    object.__setattr__(s, "c", c)
    object.__setattr__(s, "a", a)
    object.__setattr__(s, "base_bits", base_bits)
    return s


def mwc_lane_step(s: MwcLaneState) -> Tuple[MwcLaneState, int]:
    t = s.a * s.x + s.c
    x = t & ((1 << s.base_bits) - 1)
    return _lane(x, t >> s.base_bits, s.a, s.base_bits), x


def cmwc32_next(s: CombinedMwcState) -> Tuple[CombinedMwcState, int]:
    hi, vh = mwc_lane_step(s.hi)
    lo, vl = mwc_lane_step(s.lo)
    out = object.__new__(CombinedMwcState)
    object.__setattr__(out, "hi", hi)
    object.__setattr__(out, "lo", lo)
    return out, (vh << 16) | vl


def _xs256(v8, v7, v5, v4, v1):
    """New word from v_{n-8}, v_{n-7}, v_{n-5}, v_{n-4}, v_{n-1}. 11 XORs, 7 shifts."""
    t = v1 ^ ((v1 << 13) & MASK32)
    t ^= (t << 9) & MASK32
    u = v8 ^ (v8 >> 7)
    u ^= (u << 24) & MASK32
    return t ^ (v4 ^ ((v4 << 7) & MASK32)) ^ (v5 ^ (v5 >> 3)) ^ (v7 ^ (v7 >> 10)) ^ u


def _xs_state(v, k) -> XorShift256State:
    s = object.__new__(XorShift256State)
    object.__setattr__(s, "v", v)
    object.__setattr__(s, "k", k)
    return s


def xorshift256_next(s: XorShift256State) -> Tuple[XorShift256State, int]:
    v, k = s.v, s.k
    w = _xs256(v[k], v[(k + 1) & 7], v[(k + 3) & 7], v[(k + 4) & 7], v[(k + 7) & 7])
    nv = v[:k] + (w,) + v[k + 1 :]
    return _xs_state(nv, (k + 1) & 7), w


def xorshift256_next_block(s: XorShift256State) -> Tuple[XorShift256State, Tuple[int, ...]]:
    """Eight outputs with the circular buffer unrolled into straight-line statements."""
    if s.k != 0:
        raise BlockAlignmentError(f"block stepping needs cursor 0, got {s.k}")
    v0, v1, v2, v3, v4, v5, v6, v7 = s.v
    v0 = _xs256(v0, v1, v3, v4, v7)
    v1 = _xs256(v1, v2, v4, v5, v0)
    v2 = _xs256(v2, v3, v5, v6, v1)
    v3 = _xs256(v3, v4, v6, v7, v2)
    v4 = _xs256(v4, v5, v7, v0, v3)
    v5 = _xs256(v5, v6, v0, v1, v4)
    v6 = _xs256(v6, v7, v1, v2, v5)
    v7 = _xs256(v7, v0, v2, v3, v6)
    out = (v0, v1, v2, v3, v4, v5, v6, v7)
    return _xs_state(out, 0), out


def shr3_next(s: Shr3State) -> Tuple[Shr3State, int]:
    y = s.y
    y ^= (y << 13) & MASK32
    y ^= y >> 17
    y ^= (y << 5) & MASK32
    out = object.__new__(Shr3State)
    object.__setattr__(out, "y", y)
    return out, y


def lcg_next(s: LcgState) -> Tuple[LcgState, int]:
    X = (s.a * s.X + s.c) & MASK32
    out = object.__new__(LcgState)
    object.__setattr__(out, "X", X)
    object.__setattr__(out, "a", s.a)
    object.__setattr__(out, "c", s.c)
    return out, X


def kiss_combine(mwc_value: int, lcg_value: int, shr3_value: int) -> int:
    return ((mwc_value ^ lcg_value) + shr3_value) & MASK32


def kiss_next(s: KissState) -> Tuple[KissState, int]:
    mwc, vm = cmwc32_next(s.mwc)
    shr3, vs = shr3_next(s.shr3)
    lcg, vl = lcg_next(s.lcg)
    out = object.__new__(KissState)
    object.__setattr__(out, "mwc", mwc)
    object.__setattr__(out, "shr3", shr3)
    object.__setattr__(out, "lcg", lcg)
    return out, kiss_combine(vm, vl, vs)


_UNIFORM_SCALE = np.float32(2.0**-24)


def to_uniform(v):
    """Map 32-bit words to single-precision values in [0, 1).

    Only the top 24 bits are kept, so every result is exact in float32 and
    ``0xFFFFFFFF`` maps to ``1 - 2**-24`` rather than rounding up to 1.0.
    Accepts a scalar (returns ``float``) or an array of words (returns float32).
    """
    if isinstance(v, (int, np.integer)):
        return float(np.float32(int(v) >> 8) * _UNIFORM_SCALE)
    arr = np.asarray(v, dtype=np.uint32)
    return (arr >> np.uint32(8)).astype(np.float32) * _UNIFORM_SCALE


def step(state):
    """Dispatch one step on any generator state."""
    return _STEPPERS[type(state)](state)


_STEPPERS = {
    MwcLaneState: mwc_lane_step,
    CombinedMwcState: cmwc32_next,
    XorShift256State: xorshift256_next,
    Shr3State: shr3_next,
    LcgState: lcg_next,
    KissState: kiss_next,
}


def kind_of(state) -> GeneratorKind:
    return {
        CombinedMwcState: GeneratorKind.MWC,
        XorShift256State: GeneratorKind.XORSHIFT256,
        Shr3State: GeneratorKind.SHR3,
        LcgState: GeneratorKind.LCG,
        KissState: GeneratorKind.KISS,
    }[type(state)]


def generate(state, n: int):
    """Step ``state`` ``n`` times in pure Python; returns ``(state, list_of_values)``."""
    f = _STEPPERS[type(state)]
    out = []
    for _ in range(n):
        state, v = f(state)
        out.append(v)
    return state, out
