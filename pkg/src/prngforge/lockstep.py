"""Benchmark kernels that advance all streams in lockstep, one step at a time.

State is structure-of-arrays, ``S[word, stream]``, and the inner loop runs over
streams so the compiler vectorizes it, the host counterpart of one thread per
stream. Output is step-major, ``out[step, stream]``, so consecutive streams write
consecutive words. The row layouts match :mod:`prngforge.kernels`, transposed.

Modes: 0 write words, 1 write uniforms, 2 advance only, 3 sum uniforms per stream.
"""

from __future__ import annotations

import numba as nb
import numpy as np

from prngforge import kernels

WRITE, WRITE_UNIFORM, ADVANCE, SUM_UNIFORM = range(4)

_M16 = np.uint32(0xFFFF)
_SCALE = np.float32(2.0**-24)


@nb.njit(inline="always")
def _u(x):
    return np.float32(np.uint32(x) >> np.uint32(8)) * _SCALE


@nb.njit(inline="always")
def _lane(w, a):
    return np.uint32(a * (w & _M16) + (w >> np.uint32(16)))


@nb.njit(inline="always")
def _shr3(y):
    y = np.uint32(y ^ (y << np.uint32(13)))
    y = np.uint32(y ^ (y >> np.uint32(17)))
    return np.uint32(y ^ (y << np.uint32(5)))


@nb.njit(inline="always")
def _xs(v8, v7, v5, v4, v1):
    t = v1 ^ (v1 << np.uint32(13))
    t ^= t << np.uint32(9)
    t ^= v4 ^ (v4 << np.uint32(7))
    t ^= v5 ^ (v5 >> np.uint32(3))
    t ^= v7 ^ (v7 >> np.uint32(10))
    u = v8 ^ (v8 >> np.uint32(7))
    return np.uint32(t ^ u ^ (u << np.uint32(24)))


@nb.njit(nogil=True)
def mwc(S, n, mode, out_u, out_f, acc):
    hw, lw, ah, al = S[0], S[1], S[2], S[3]
    N = S.shape[1]
    for j in range(n):
        if mode == WRITE:
            o = out_u[j]
            for i in range(N):
                h = _lane(hw[i], ah[i])
                lo = _lane(lw[i], al[i])
                hw[i] = h
                lw[i] = lo
                o[i] = np.uint32((h << np.uint32(16)) | (lo & _M16))
        elif mode == WRITE_UNIFORM:
            f = out_f[j]
            for i in range(N):
                h = _lane(hw[i], ah[i])
                lo = _lane(lw[i], al[i])
                hw[i] = h
                lw[i] = lo
                f[i] = _u((h << np.uint32(16)) | (lo & _M16))
        elif mode == ADVANCE:
            for i in range(N):
                hw[i] = _lane(hw[i], ah[i])
                lw[i] = _lane(lw[i], al[i])
        else:
            for i in range(N):
                h = _lane(hw[i], ah[i])
                lo = _lane(lw[i], al[i])
                hw[i] = h
                lw[i] = lo
                acc[i] += _u((h << np.uint32(16)) | (lo & _M16))


@nb.njit(nogil=True)
def kiss(S, n, mode, out_u, out_f, acc):
    hw, lw, ah, al, ys, xs, la, lc = S[0], S[1], S[2], S[3], S[4], S[5], S[6], S[7]
    N = S.shape[1]
    for j in range(n):
        if mode == ADVANCE:
            for i in range(N):
                hw[i] = _lane(hw[i], ah[i])
                lw[i] = _lane(lw[i], al[i])
                ys[i] = _shr3(ys[i])
                xs[i] = np.uint32(la[i] * xs[i] + lc[i])
            continue
        o = out_u[j] if mode == WRITE else out_u[0]
        f = out_f[j] if mode == WRITE_UNIFORM else out_f[0]
        for i in range(N):
            h = _lane(hw[i], ah[i])
            lo = _lane(lw[i], al[i])
            y = _shr3(ys[i])
            x = np.uint32(la[i] * xs[i] + lc[i])
            hw[i] = h
            lw[i] = lo
            ys[i] = y
            xs[i] = x
            m = np.uint32((h << np.uint32(16)) | (lo & _M16))
            v = np.uint32((m ^ x) + y)
            if mode == WRITE:
                o[i] = v
            elif mode == WRITE_UNIFORM:
                f[i] = _u(v)
            else:
                acc[i] += _u(v)


@nb.njit(nogil=True)
def shr3(S, n, mode, out_u, out_f, acc):
    ys = S[0]
    N = S.shape[1]
    for j in range(n):
        if mode == WRITE:
            o = out_u[j]
            for i in range(N):
                y = _shr3(ys[i])
                ys[i] = y
                o[i] = y
        elif mode == WRITE_UNIFORM:
            f = out_f[j]
            for i in range(N):
                y = _shr3(ys[i])
                ys[i] = y
                f[i] = _u(y)
        elif mode == ADVANCE:
            for i in range(N):
                ys[i] = _shr3(ys[i])
        else:
            for i in range(N):
                y = _shr3(ys[i])
                ys[i] = y
                acc[i] += _u(y)


@nb.njit(nogil=True)
def lcg(S, n, mode, out_u, out_f, acc):
    xs, la, lc = S[0], S[1], S[2]
    N = S.shape[1]
    for j in range(n):
        if mode == WRITE:
            o = out_u[j]
            for i in range(N):
                x = np.uint32(la[i] * xs[i] + lc[i])
                xs[i] = x
                o[i] = x
        elif mode == WRITE_UNIFORM:
            f = out_f[j]
            for i in range(N):
                x = np.uint32(la[i] * xs[i] + lc[i])
                xs[i] = x
                f[i] = _u(x)
        elif mode == ADVANCE:
            for i in range(N):
                xs[i] = np.uint32(la[i] * xs[i] + lc[i])
        else:
            for i in range(N):
                x = np.uint32(la[i] * xs[i] + lc[i])
                xs[i] = x
                acc[i] += _u(x)


@nb.njit(nogil=True)
def xorshift(S, n, mode, out_u, out_f, acc):
    """Requires every stream's cursor at 0 and ``n`` a multiple of 8 (checked by the caller)."""
    N = S.shape[1]
    for j in range(n):
        # explicit circular buffer: the word slot is fixed per statement, not per stream
        k = j & 7
        d = S[k]
        r7 = S[(k + 1) & 7]
        r5 = S[(k + 3) & 7]
        r4 = S[(k + 4) & 7]
        r1 = S[(k + 7) & 7]
        if mode == WRITE:
            o = out_u[j]
            for i in range(N):
                x = _xs(d[i], r7[i], r5[i], r4[i], r1[i])
                d[i] = x
                o[i] = x
        elif mode == WRITE_UNIFORM:
            f = out_f[j]
            for i in range(N):
                x = _xs(d[i], r7[i], r5[i], r4[i], r1[i])
                d[i] = x
                f[i] = _u(x)
        elif mode == ADVANCE:
            for i in range(N):
                d[i] = _xs(d[i], r7[i], r5[i], r4[i], r1[i])
        else:
            for i in range(N):
                x = _xs(d[i], r7[i], r5[i], r4[i], r1[i])
                d[i] = x
                acc[i] += _u(x)


KERNELS = {
    kernels.MWC: mwc,
    kernels.XORSHIFT: xorshift,
    kernels.SHR3: shr3,
    kernels.LCG: lcg,
    kernels.KISS: kiss,
}
