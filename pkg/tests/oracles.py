"""Independent reference implementations used to check the package.

Nothing here imports prngforge. Word arithmetic is done with plain integer
multiplication, floor division and remainders; XOR is evaluated bit by bit as
addition mod 2, and shifts as multiplication or division by powers of two.
"""

from __future__ import annotations

from typing import List, Sequence

import numpy as np

W = 2**32


def xor(a: int, b: int) -> int:
    out, place = 0, 1
    for _ in range(32):
        out += ((a % 2 + b % 2) % 2) * place
        a //= 2
        b //= 2
        place *= 2
    return out


def shl(x: int, k: int) -> int:
    return (x * 2**k) % W


def shr(x: int, k: int) -> int:
    return x // 2**k


# --- generators -----------------------------------------------------------


def mwc_lane(x: int, c: int, a: int, b: int = 2**16):
    """One lane step; returns (x', c')."""
    t = a * x + c
    return t % b, t // b


def combined_mwc(hi, lo, n: int) -> List[int]:
    """``hi`` and ``lo`` are (x, c, a) triples; the hi lane fills the upper 16 bits."""
    (xh, ch, ah), (xl, cl, al) = hi, lo
    out = []
    for _ in range(n):
        xh, ch = mwc_lane(xh, ch, ah)
        xl, cl = mwc_lane(xl, cl, al)
        out.append(xh * 2**16 + xl)
    return out


def xorshift256(words: Sequence[int], n: int) -> List[int]:
    """Grow the sequence v_n from eight seed words v_0..v_7, oldest first."""
    v = list(words)
    for _ in range(n):
        v1, v4, v5, v7, v8 = v[-1], v[-4], v[-5], v[-7], v[-8]
        t = xor(v1, shl(v1, 13))
        t = xor(t, shl(t, 9))
        u = xor(v8, shr(v8, 7))
        u = xor(u, shl(u, 24))
        new = t
        new = xor(new, xor(v4, shl(v4, 7)))
        new = xor(new, xor(v5, shr(v5, 3)))
        new = xor(new, xor(v7, shr(v7, 10)))
        new = xor(new, u)
        v.append(new)
    return v[8:]


def shr3(y: int, n: int) -> List[int]:
    out = []
    for _ in range(n):
        y = xor(y, shl(y, 13))
        y = xor(y, shr(y, 17))
        y = xor(y, shl(y, 5))
        out.append(y)
    return out


def lcg(X: int, n: int, a: int = 69069, c: int = 1234567) -> List[int]:
    out = []
    for _ in range(n):
        X = (a * X + c) % W
        out.append(X)
    return out


def kiss(hi, lo, y: int, X: int, n: int) -> List[int]:
    m = combined_mwc(hi, lo, n)
    s = shr3(y, n)
    l = lcg(X, n)
    return [(xor(mi, li) + si) % W for mi, li, si in zip(m, l, s)]


def xor_fold64(values: Sequence[int]) -> int:
    """Fold consecutive output pairs into 64-bit words and XOR them together."""
    acc = 0
    vals = list(values) + ([0] if len(values) % 2 else [])
    for i in range(0, len(vals), 2):
        acc ^= vals[i] | (vals[i + 1] << 32)
    return acc


# --- GF(2) matrices -------------------------------------------------------


def _shift_left_matrix(k: int) -> np.ndarray:
    m = np.zeros((32, 32), dtype=np.int64)
    for j in range(32 - k):
        m[j + k, j] = 1
    return m


def _shift_right_matrix(k: int) -> np.ndarray:
    m = np.zeros((32, 32), dtype=np.int64)
    for j in range(k, 32):
        m[j - k, j] = 1
    return m


def xorshift_transition_matrix() -> np.ndarray:
    """256x256 matrix on the ordered bit vector (bit 32*i + j is bit j of the i-th oldest word)."""
    I = np.eye(32, dtype=np.int64)
    L, R = _shift_left_matrix, _shift_right_matrix
    blocks = {
        0: (I + L(24)) @ (I + R(7)) % 2,  # v_{n-8}
        1: (I + R(10)) % 2,  # v_{n-7}
        3: (I + R(3)) % 2,  # v_{n-5}
        4: (I + L(7)) % 2,  # v_{n-4}
        7: (I + L(9)) @ (I + L(13)) % 2,  # v_{n-1}
    }
    T = np.zeros((256, 256), dtype=np.int64)
    for i in range(7):
        T[32 * i : 32 * i + 32, 32 * (i + 1) : 32 * (i + 2)] = I
    for src, block in blocks.items():
        T[224:256, 32 * src : 32 * src + 32] = block
    return T


def words_to_bits(words: Sequence[int]) -> np.ndarray:
    return np.array([(w // 2**j) % 2 for w in words for j in range(32)], dtype=np.int64)


def bits_to_words(bits: np.ndarray) -> List[int]:
    return [sum(int(bits[32 * i + j]) * 2**j for j in range(32)) for i in range(len(bits) // 32)]


# --- number theory --------------------------------------------------------


def trial_division_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def safeprime_multipliers(base_bits: int) -> List[int]:
    b = 2**base_bits
    return [
        a
        for a in range(2, b)
        if trial_division_prime(a * b - 1) and trial_division_prime((a * b - 2) // 2)
    ]
