"""Jump-ahead for the linear generators: closed-form LCG skips and GF(2) matrix powers.

XorShift256 states are flattened to 256-bit vectors oldest word first, bit ``32*i + j``
being bit ``j`` of word ``v_{n-8+i}``. Matrices are 256x256 uint8 arrays of 0/1.
"""

from __future__ import annotations

import functools
import threading
from typing import List

import numpy as np

from prngforge.core import MASK32, LcgState, XorShift256State, xorshift256_next

NBITS = 256


def lcg_jump(s: LcgState, k: int) -> LcgState:
    """State after ``k`` LCG steps in O(log k).

    Uses ``X_k = a^k X + c * (1 + a + ... + a^(k-1))``; the geometric sum is built by
    doubling so no division by ``a - 1`` is needed under the even modulus.
    """
    if k < 0:
        raise ValueError("jump distance must be non-negative")
    mult, inc = lcg_jump_coefficients(s.a, s.c, k)
    return LcgState((mult * s.X + inc) & MASK32, s.a, s.c)


def lcg_jump_coefficients(a: int, c: int, k: int):
    """``(A, C)`` with ``X_k = (A*X + C) mod 2^32``."""
    acc_mult, acc_inc = 1, 0
    cur_mult, cur_inc = a, c
    while k:
        if k & 1:
            acc_mult = (acc_mult * cur_mult) & MASK32
            acc_inc = (acc_inc * cur_mult + cur_inc) & MASK32
        cur_inc = (cur_inc * (cur_mult + 1)) & MASK32
        cur_mult = (cur_mult * cur_mult) & MASK32
        k >>= 1
    return acc_mult, acc_inc


def state_to_bits(s: XorShift256State) -> np.ndarray:
    words = np.array(s.ordered(), dtype=np.uint32)
    return ((words[:, None] >> np.arange(32, dtype=np.uint32)) & 1).astype(np.uint8).ravel()


def bits_to_words(bits: np.ndarray) -> List[int]:
    b = np.asarray(bits, dtype=np.uint64).reshape(8, 32)
    return [int(w) for w in (b << np.arange(32, dtype=np.uint64)).sum(axis=1)]


def gf2_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # exact: every dot product is at most 256
    return (a.astype(np.float32) @ b.astype(np.float32)).astype(np.int64).astype(np.uint8) & 1


def gf2_matvec(m: np.ndarray, v: np.ndarray) -> np.ndarray:
    return (m.astype(np.int32) @ v.astype(np.int32)).astype(np.uint8) & 1


@functools.lru_cache(maxsize=1)
def xorshift_step_matrix() -> np.ndarray:
    """One-step transition, assembled column by column from unit states."""
    m = np.zeros((NBITS, NBITS), dtype=np.uint8)
    for col in range(NBITS):
        words = [0] * 8
        words[col // 32] = 1 << (col % 32)
        nxt, _ = xorshift256_next(XorShift256State(tuple(words), 0))
        m[:, col] = state_to_bits(nxt)
    m.setflags(write=False)
    return m


_powers: List[np.ndarray] = []
_powers_lock = threading.Lock()


def _power_of_two(i: int) -> np.ndarray:
    """Step matrix raised to 2**i, cached."""
    with _powers_lock:
        if not _powers:
            _powers.append(xorshift_step_matrix())
        while len(_powers) <= i:
            p = gf2_matmul(_powers[-1], _powers[-1])
            p.setflags(write=False)
            _powers.append(p)
        return _powers[i]


class JumpMatrix:
    """The XorShift256 transition raised to a fixed power."""

    def __init__(self, matrix: np.ndarray, steps: int):
        self.matrix = matrix
        self.steps = steps
        # rows packed into 32-bit words for the compiled leapfrog kernel
        self.packed_rows = (
            (matrix.reshape(NBITS, 8, 32).astype(np.uint64) << np.arange(32, dtype=np.uint64))
            .sum(axis=2)
            .astype(np.uint32)
        )

    def apply(self, s: XorShift256State) -> XorShift256State:
        bits = gf2_matvec(self.matrix, state_to_bits(s))
        return XorShift256State.from_ordered(bits_to_words(bits), (s.k + self.steps) % 8)

    def __matmul__(self, other: "JumpMatrix") -> "JumpMatrix":
        return JumpMatrix(gf2_matmul(self.matrix, other.matrix), self.steps + other.steps)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, JumpMatrix) and np.array_equal(self.matrix, other.matrix)

    __hash__ = None


@functools.lru_cache(maxsize=64)
def build_xorshift_jump(steps: int) -> JumpMatrix:
    """Transition matrix for ``steps`` XorShift256 steps, by square-and-multiply."""
    if steps < 0:
        raise ValueError("jump distance must be non-negative")
    m = np.eye(NBITS, dtype=np.uint8)
    i = 0
    k = steps
    while k:
        if k & 1:
            m = gf2_matmul(_power_of_two(i), m)
        k >>= 1
        i += 1
    m.setflags(write=False)
    return JumpMatrix(m, steps)


def xorshift_jump(s: XorShift256State, k: int) -> XorShift256State:
    """State after ``k`` steps; matrix-vector products with cached powers of two."""
    if k < 0:
        raise ValueError("jump distance must be non-negative")
    bits = state_to_bits(s)
    i = 0
    rem = k
    while rem:
        if rem & 1:
            bits = gf2_matvec(_power_of_two(i), bits)
        rem >>= 1
        i += 1
    return XorShift256State.from_ordered(bits_to_words(bits), (s.k + k) % 8)
