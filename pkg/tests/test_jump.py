import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from prngforge import core, jump
from prngforge.core import LcgState, XorShift256State
from prngforge.streams import generate_words

# prime factors of 2^256 - 1 = product of the Fermat numbers F0..F7
FACTORS_2_256_MINUS_1 = [
    3, 5, 17, 257, 65537, 641, 6700417, 274177, 67280421310721,
    59649589127497217, 5704689200685129054721,
]


def _mul(a, b):
    return (a.astype(np.float32) @ b.astype(np.float32)).astype(np.int64) % 2


def test_factorization_is_complete():
    prod = 1
    for p in FACTORS_2_256_MINUS_1:
        prod *= p
    assert prod == 2**256 - 1


def test_step_matrix_matches_oracle():
    assert (jump.xorshift_step_matrix() == oracles.xorshift_transition_matrix()).all()


def test_xorshift_has_full_period():
    T = oracles.xorshift_transition_matrix()
    squares = [T]
    for _ in range(255):
        squares.append(_mul(squares[-1], squares[-1]))
    I = np.eye(256, dtype=np.int64)

    def power(e):
        acc = I
        for i in range(256):
            if e >> i & 1:
                acc = _mul(acc, squares[i])
        return acc

    N = 2**256 - 1
    assert (_mul(squares[-1], squares[-1]) == T).all()  # T^(2^256) = T
    for p in FACTORS_2_256_MINUS_1:
        assert not (power(N // p) == I).all(), p


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 2**20))
def test_lcg_jump_equals_stepping(x, k):
    _, seq = generate_words(LcgState(x), k + 1) if k else (None, None)
    expected = LcgState(x) if k == 0 else LcgState(int(seq[k - 1]))
    assert jump.lcg_jump(LcgState(x), k) == expected


def test_lcg_jump_hundred_thousand():
    s = LcgState(1)
    for _ in range(10**5):
        s, _ = core.lcg_next(s)
    assert jump.lcg_jump(LcgState(1), 10**5) == s


def test_lcg_jump_rejects_negative():
    with pytest.raises(ValueError):
        jump.lcg_jump(LcgState(1), -1)


def test_xorshift_jump_12345():
    s = XorShift256State((11, 22, 33, 44, 55, 66, 77, 88), k=5)
    expected, _ = generate_words(s, 12345)
    assert jump.xorshift_jump(s, 12345) == expected
    assert jump.build_xorshift_jump(12345).apply(s) == expected


def test_jump_matrices_compose():
    a, b = jump.build_xorshift_jump(1000), jump.build_xorshift_jump(234)
    assert a @ b == jump.build_xorshift_jump(1234)


def test_bits_round_trip():
    s = XorShift256State((1, 2**31, 3, 4, 5, 6, 7, 0xFFFFFFFF), k=2)
    assert jump.bits_to_words(jump.state_to_bits(s)) == list(s.ordered())
    assert (jump.state_to_bits(s) == oracles.words_to_bits(s.ordered())).all()


def test_random_xorshift_jumps_small():
    rng = random.Random(5)
    for _ in range(10):
        words = tuple(rng.getrandbits(32) for _ in range(8))
        k = rng.randrange(1, 5000)
        s = XorShift256State(words, rng.randrange(8))
        assert jump.xorshift_jump(s, k) == generate_words(s, k)[0]
