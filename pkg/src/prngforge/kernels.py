"""Compiled bulk generation over many streams.

Each stream's state is one row of a uint32 matrix:

==========  ===========================================
kind        row layout
==========  ===========================================
mwc         hi_word, lo_word, a_hi, a_lo
xorshift    v0..v7, k
shr3        y
lcg         X, a, c
kiss        hi_word, lo_word, a_hi, a_lo, y, X, a, c
counter     n
==========  ===========================================

An MWC lane word packs ``c << 16 | x``, so one lane step is ``a*(w & 0xFFFF) + (w >> 16)``.
Kernels release the GIL so callers can spread disjoint row ranges over threads.
"""

from __future__ import annotations

import numba as nb
import numpy as np

MWC, XORSHIFT, SHR3, LCG, KISS, COUNTER = range(6)

ROW_WIDTH = {MWC: 4, XORSHIFT: 9, SHR3: 1, LCG: 3, KISS: 8, COUNTER: 1}

_M16 = np.uint64(0xFFFF)
_M32 = np.uint64(0xFFFFFFFF)
_U16 = np.uint64(16)
_SCALE = np.float32(2.0**-24)


@nb.njit(inline="always")
def _lane(w, a):
    return (a * (w & _M16) + (w >> _U16)) & _M32


@nb.njit(inline="always")
def _mwc(st, o):
    hi = _lane(np.uint64(st[o]), np.uint64(st[o + 2]))
    lo = _lane(np.uint64(st[o + 1]), np.uint64(st[o + 3]))
    st[o] = np.uint32(hi)
    st[o + 1] = np.uint32(lo)
    return ((hi << _U16) | (lo & _M16)) & _M32


@nb.njit(inline="always")
def _shr3(st, o):
    y = np.uint64(st[o])
    y ^= (y << np.uint64(13)) & _M32
    y ^= y >> np.uint64(17)
    y ^= (y << np.uint64(5)) & _M32
    st[o] = np.uint32(y)
    return y


@nb.njit(inline="always")
def _lcg(st, o):
    x = (np.uint64(st[o + 1]) * np.uint64(st[o]) + np.uint64(st[o + 2])) & _M32
    st[o] = np.uint32(x)
    return x


@nb.njit(inline="always")
def _xorshift(st):
    k = np.int64(st[8])
    v1 = np.uint64(st[(k + 7) & 7])
    t = v1 ^ ((v1 << np.uint64(13)) & _M32)
    t ^= (t << np.uint64(9)) & _M32
    v4 = np.uint64(st[(k + 4) & 7])
    t ^= v4 ^ ((v4 << np.uint64(7)) & _M32)
    v5 = np.uint64(st[(k + 3) & 7])
    t ^= v5 ^ (v5 >> np.uint64(3))
    v7 = np.uint64(st[(k + 1) & 7])
    t ^= v7 ^ (v7 >> np.uint64(10))
    u = np.uint64(st[k])
    u ^= u >> np.uint64(7)
    t ^= u ^ ((u << np.uint64(24)) & _M32)
    st[k] = np.uint32(t)
    st[8] = np.uint32((k + 1) & 7)
    return t


@nb.njit(inline="always")
def _xs_word(v8, v7, v5, v4, v1):
    t = v1 ^ ((v1 << np.uint64(13)) & _M32)
    t ^= (t << np.uint64(9)) & _M32
    t ^= v4 ^ ((v4 << np.uint64(7)) & _M32)
    t ^= v5 ^ (v5 >> np.uint64(3))
    t ^= v7 ^ (v7 >> np.uint64(10))
    u = v8 ^ (v8 >> np.uint64(7))
    return t ^ u ^ ((u << np.uint64(24)) & _M32)


@nb.njit(inline="always")
def _xs_load(st):
    return (
        np.uint64(st[0]), np.uint64(st[1]), np.uint64(st[2]), np.uint64(st[3]),
        np.uint64(st[4]), np.uint64(st[5]), np.uint64(st[6]), np.uint64(st[7]),
    )


@nb.njit(inline="always")
def _xs_store(st, v0, v1, v2, v3, v4, v5, v6, v7):
    st[0] = np.uint32(v0)
    st[1] = np.uint32(v1)
    st[2] = np.uint32(v2)
    st[3] = np.uint32(v3)
    st[4] = np.uint32(v4)
    st[5] = np.uint32(v5)
    st[6] = np.uint32(v6)
    st[7] = np.uint32(v7)


@nb.njit(nogil=True)
def _xs_fill_blocks(st, row, nblocks):
    # explicit circular buffer: eight straight-line updates per pass, state in locals
    v0, v1, v2, v3, v4, v5, v6, v7 = _xs_load(st)
    for b in range(nblocks):
        j = 8 * b
        v0 = _xs_word(v0, v1, v3, v4, v7)
        row[j] = np.uint32(v0)
        v1 = _xs_word(v1, v2, v4, v5, v0)
        row[j + 1] = np.uint32(v1)
        v2 = _xs_word(v2, v3, v5, v6, v1)
        row[j + 2] = np.uint32(v2)
        v3 = _xs_word(v3, v4, v6, v7, v2)
        row[j + 3] = np.uint32(v3)
        v4 = _xs_word(v4, v5, v7, v0, v3)
        row[j + 4] = np.uint32(v4)
        v5 = _xs_word(v5, v6, v0, v1, v4)
        row[j + 5] = np.uint32(v5)
        v6 = _xs_word(v6, v7, v1, v2, v5)
        row[j + 6] = np.uint32(v6)
        v7 = _xs_word(v7, v0, v2, v3, v6)
        row[j + 7] = np.uint32(v7)
    _xs_store(st, v0, v1, v2, v3, v4, v5, v6, v7)


@nb.njit(nogil=True)
def _xs_advance_blocks(st, nblocks):
    v0, v1, v2, v3, v4, v5, v6, v7 = _xs_load(st)
    for b in range(nblocks):
        v0 = _xs_word(v0, v1, v3, v4, v7)
        v1 = _xs_word(v1, v2, v4, v5, v0)
        v2 = _xs_word(v2, v3, v5, v6, v1)
        v3 = _xs_word(v3, v4, v6, v7, v2)
        v4 = _xs_word(v4, v5, v7, v0, v3)
        v5 = _xs_word(v5, v6, v0, v1, v4)
        v6 = _xs_word(v6, v7, v1, v2, v5)
        v7 = _xs_word(v7, v0, v2, v3, v6)
    _xs_store(st, v0, v1, v2, v3, v4, v5, v6, v7)


@nb.njit(inline="always")
def _next(kind, st):
    if kind == MWC:
        return _mwc(st, 0)
    elif kind == XORSHIFT:
        return _xorshift(st)
    elif kind == SHR3:
        return _shr3(st, 0)
    elif kind == LCG:
        return _lcg(st, 0)
    elif kind == KISS:
        m = _mwc(st, 0)
        y = _shr3(st, 4)
        x = _lcg(st, 5)
        return ((m ^ x) + y) & _M32
    else:
        n = np.uint64(st[0])
        st[0] = np.uint32((n + np.uint64(1)) & _M32)
        return n


@nb.njit(nogil=True, cache=True)
def fill_u32(kind, states, out):
    """Write ``out.shape[1]`` words per stream into ``out`` and advance ``states``."""
    n = out.shape[1]
    for i in range(states.shape[0]):
        st = states[i]
        row = out[i]
        j0 = 0
        if kind == XORSHIFT and st[8] == 0:
            j0 = 8 * (n // 8)
            _xs_fill_blocks(st, row, n // 8)
        for j in range(j0, n):
            row[j] = np.uint32(_next(kind, st))


@nb.njit(nogil=True, cache=True)
def fill_f32(kind, states, out):
    n = out.shape[1]
    for i in range(states.shape[0]):
        st = states[i]
        row = out[i]
        for j in range(n):
            row[j] = np.float32(_next(kind, st) >> np.uint64(8)) * _SCALE


@nb.njit(nogil=True, cache=True)
def advance(kind, states, n):
    """No-writeback mode: step every stream ``n`` times, keeping only the final state."""
    for i in range(states.shape[0]):
        st = states[i]
        j0 = 0
        if kind == XORSHIFT and st[8] == 0:
            j0 = 8 * (n // 8)
            _xs_advance_blocks(st, n // 8)
        for j in range(j0, n):
            _next(kind, st)


@nb.njit(nogil=True, cache=True)
def fold_f32(kind, states, n, acc):
    """No-writeback uniform mode: the converted values are summed so the conversion runs."""
    for i in range(states.shape[0]):
        st = states[i]
        s = np.float32(0.0)
        for j in range(n):
            s += np.float32(_next(kind, st) >> np.uint64(8)) * _SCALE
        acc[i] = s


@nb.njit(nogil=True, cache=True)
def leapfrog_xorshift(words, packed_rows, n, out):
    """``n`` times: emit the newest word of an ordered 8-word state, then jump.

    ``words`` holds the state oldest word first and is left at the final state.
    ``packed_rows[r, w]`` is bits ``32*w .. 32*w+31`` of matrix row ``r``.
    """
    cur = words.copy()
    nxt = np.empty(8, dtype=np.uint32)
    for j in range(n):
        out[j] = cur[7]
        for w in range(8):
            acc = np.uint32(0)
            for b in range(32):
                r = packed_rows[32 * w + b]
                x = np.uint32(0)
                for q in range(8):
                    x ^= r[q] & cur[q]
                # parity of x
                x ^= x >> np.uint32(16)
                x ^= x >> np.uint32(8)
                x ^= x >> np.uint32(4)
                x ^= x >> np.uint32(2)
                x ^= x >> np.uint32(1)
                acc |= (x & np.uint32(1)) << np.uint32(b)
            nxt[w] = acc
        cur[:] = nxt
    words[:] = cur


@nb.njit(nogil=True, cache=True)
def bit_counts(words):
    """Return (ones, transitions) over the bit stream, each word read MSB first."""
    ones = np.int64(0)
    trans = np.int64(0)
    prev_last = np.uint32(0)
    for i in range(words.shape[0]):
        w = words[i]
        ones += _popcount(w)
        # adjacent pairs inside the word
        trans += _popcount((w ^ (w >> np.uint32(1))) & np.uint32(0x7FFFFFFF))
        if i > 0:
            trans += (prev_last ^ (w >> np.uint32(31))) & np.uint32(1)
        prev_last = w & np.uint32(1)
    return ones, trans


@nb.njit(inline="always")
def _popcount(x):
    x = np.uint32(x)
    x = x - ((x >> np.uint32(1)) & np.uint32(0x55555555))
    x = (x & np.uint32(0x33333333)) + ((x >> np.uint32(2)) & np.uint32(0x33333333))
    x = (x + (x >> np.uint32(4))) & np.uint32(0x0F0F0F0F)
    return np.int64(np.uint32(x * np.uint32(0x01010101)) >> np.uint32(24))
