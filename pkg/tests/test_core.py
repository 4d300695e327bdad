import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from prngforge import core
from prngforge.core import (
    AbsorbingStateError,
    BlockAlignmentError,
    CombinedMwcState,
    InvalidStateError,
    KissState,
    LcgState,
    MwcLaneState,
    Shr3State,
    XorShift256State,
)

u32 = st.integers(0, 2**32 - 1)
nonzero_u32 = st.integers(1, 2**32 - 1)


def test_lane_step_matches_big_integer_split():
    s, x = core.mwc_lane_step(MwcLaneState(54321, 12345, 18000))
    assert (s.x, s.c) == oracles.mwc_lane(54321, 12345, 18000) == (58761, 14919)
    assert x == 58761


@given(st.integers(0, 2**16 - 1), st.integers(0, 36968))
def test_carry_stays_below_multiplier(x, c):
    a = 36969
    if a * x + c in (0, a * 2**16 - 1):
        return
    s = MwcLaneState(x, c, a)
    for _ in range(8):
        s, _ = core.mwc_lane_step(s)
        assert 0 <= s.c < a


def test_absorbing_states_rejected():
    with pytest.raises(AbsorbingStateError):
        MwcLaneState(0, 0, 18000)
    with pytest.raises(AbsorbingStateError):
        MwcLaneState(2**16 - 1, 18000 - 1, 18000)


def test_non_safeprime_multiplier_rejected():
    with pytest.raises(InvalidStateError, match="safeprime"):
        MwcLaneState(1, 0, 18001)


def test_toy_lane_period_is_23():
    # b = 2^4, a = 3: a*b - 1 = 47 = 2*23 + 1
    for x in range(16):
        for c in range(3):
            if (x, c) in ((0, 0), (15, 2)):
                continue
            start = MwcLaneState(x, c, 3, base_bits=4)
            s, n = start, 0
            while True:
                s, _ = core.mwc_lane_step(s)
                n += 1
                if s == start:
                    break
                assert n <= 46
            assert n == 23


def test_combined_mwc_first_output_and_digest():
    s = CombinedMwcState(MwcLaneState(1, 0, 36969), MwcLaneState(1, 0, 18000))
    _, out = core.generate(s, 10**4)
    assert out[0] == 2422818384
    assert oracles.xor_fold64(out) == 0x7FCFAC49FF96EA47


def test_combined_mwc_needs_distinct_multipliers():
    with pytest.raises(InvalidStateError):
        CombinedMwcState(MwcLaneState(1, 0, 18000), MwcLaneState(2, 0, 18000))


def test_xorshift_single_bit_state_matches_bit_matrix():
    T = oracles.xorshift_transition_matrix()
    for bit in (0, 31, 7 * 32, 7 * 32 + 31, 3 * 32 + 5):
        e = np.zeros(256, dtype=np.int64)
        e[bit] = 1
        expected = oracles.bits_to_words(T @ e % 2)
        s = XorShift256State.from_ordered(oracles.bits_to_words(e), k=3)
        s, w = core.xorshift256_next(s)
        assert list(s.ordered()) == expected
        assert w == expected[-1]


def test_xorshift_zero_state_rejected():
    with pytest.raises(InvalidStateError):
        XorShift256State((0,) * 8)


@given(st.lists(u32, min_size=8, max_size=8).filter(any), st.integers(0, 7))
def test_ordered_round_trip(words, k):
    s = XorShift256State.from_ordered(words, k)
    assert s.k == k and list(s.ordered()) == words


def test_block_equals_sequential():
    s = XorShift256State(tuple(range(1, 9)))
    blocks = s
    _, expected = core.generate(s, 8 * 10**3)
    got = []
    for _ in range(10**3):
        blocks, out = core.xorshift256_next_block(blocks)
        got.extend(out)
    assert got == expected
    assert oracles.xor_fold64(got) == oracles.xor_fold64(expected)


def test_block_needs_aligned_cursor():
    s, _ = core.xorshift256_next(XorShift256State(tuple(range(1, 9))))
    with pytest.raises(BlockAlignmentError):
        core.xorshift256_next_block(s)


def test_shr3_matches_oracle():
    _, out = core.generate(Shr3State(2463534242), 10**4)
    assert out == oracles.shr3(2463534242, 10**4)
    assert oracles.xor_fold64(out) == 0xF547C81773A5D205


def test_shr3_zero_rejected():
    with pytest.raises(InvalidStateError):
        Shr3State(0)


def test_lcg_million_steps():
    s = LcgState(1)
    for _ in range(10**6):
        s, _ = core.lcg_next(s)
    assert s.X == 2259661377 == oracles.lcg(1, 10**6)[-1]


def test_lcg_first_value_from_zero():
    assert core.lcg_next(LcgState(0))[1] == 1234567


def test_kiss_first_outputs():
    s = KissState.from_words(((0 << 16) | 1, 1, 2463534242, 1))
    _, out = core.generate(s, 100)
    assert out == oracles.kiss((1, 0, 36969), (1, 0, 18000), 2463534242, 1, 100)
    assert out[:5] == [3147427687, 1389884485, 2576711673, 2093838314, 1592806391]


@settings(max_examples=200)
@given(nonzero_u32, u32, u32, nonzero_u32)
def test_kiss_is_composition_of_components(hi, lo, y, x):
    try:
        s = KissState.from_words((hi, lo, y, x))
    except InvalidStateError:
        return
    m, vm = core.cmwc32_next(s.mwc)
    r, vs = core.shr3_next(s.shr3)
    l, vl = core.lcg_next(s.lcg)
    s2, v = core.kiss_next(s)
    assert v == ((vm ^ vl) + vs) % 2**32
    assert (s2.mwc, s2.shr3, s2.lcg) == (m, r, l)


def test_step_does_not_mutate():
    s = LcgState(5)
    core.step(s)
    assert s.X == 5


def test_to_uniform_bounds():
    assert core.to_uniform(0) == 0.0
    assert core.to_uniform(0xFFFFFFFF) == 1 - 2**-24
    arr = core.to_uniform(np.array([0, 0xFFFFFFFF, 2**31], dtype=np.uint32))
    assert arr.dtype == np.float32
    assert arr.tolist() == [0.0, 1 - 2**-24, 0.5]


@given(u32)
def test_to_uniform_scalar_in_unit_interval(v):
    assert 0.0 <= core.to_uniform(v) < 1.0


def test_kind_of():
    assert core.kind_of(LcgState(1)) is core.GeneratorKind.LCG


def test_shr3_from_one():
    assert core.shr3_next(Shr3State(1))[1] == 0x00042021
