"""Stream ensembles: parameterization, sequence splitting and leapfrogging."""

from __future__ import annotations

import enum
import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np

from prngforge import kernels
from prngforge.core import (
    CombinedMwcState,
    GeneratorKind,
    KissState,
    LcgState,
    MwcLaneState,
    Shr3State,
    XorShift256State,
    kind_of,
)
from prngforge.jump import build_xorshift_jump, lcg_jump, lcg_jump_coefficients, xorshift_jump
from prngforge.params import MultiplierTable, SeedSequence, StreamParams, default_table, stream_params

JUMPABLE = (GeneratorKind.LCG, GeneratorKind.XORSHIFT256)


class Scheme(str, enum.Enum):
    PARAMETERIZE = "parameterize"
    SPLIT = "split"
    LEAPFROG = "leapfrog"


class SchemeError(ValueError):
    """Scheme not available for the requested generator kind."""


class StreamExhaustedError(RuntimeError):
    """A split stream was asked for values beyond its block."""


class SinkError(RuntimeError):
    def __init__(self, stream_index: int, cause: BaseException):
        super().__init__(f"sink failed on stream {stream_index}: {cause}")
        self.stream_index = stream_index


@dataclass(frozen=True)
class Counter:
    """Hidden sanity generator: successive integers. Only the test battery uses it."""

    n: int = 0


_KIND_CODES = {
    GeneratorKind.MWC: kernels.MWC,
    GeneratorKind.XORSHIFT256: kernels.XORSHIFT,
    GeneratorKind.SHR3: kernels.SHR3,
    GeneratorKind.LCG: kernels.LCG,
    GeneratorKind.KISS: kernels.KISS,
}


def _mwc_row(s: CombinedMwcState):
    return [s.hi.to_word(), s.lo.to_word(), s.hi.a, s.lo.a]


def state_to_row(state) -> tuple:
    """``(kernel_kind_code, row)`` for a generator state."""
    if isinstance(state, Counter):
        return kernels.COUNTER, [state.n]
    kind = kind_of(state)
    if kind is GeneratorKind.MWC:
        row = _mwc_row(state)
    elif kind is GeneratorKind.XORSHIFT256:
        row = list(state.v) + [state.k]
    elif kind is GeneratorKind.SHR3:
        row = [state.y]
    elif kind is GeneratorKind.LCG:
        row = [state.X, state.a, state.c]
    else:
        row = _mwc_row(state.mwc) + [state.shr3.y, state.lcg.X, state.lcg.a, state.lcg.c]
    return _KIND_CODES[kind], row


def _mwc_from_row(r) -> CombinedMwcState:
    def lane(word, a):
        return MwcLaneState(x=word & 0xFFFF, c=word >> 16, a=a)

    return CombinedMwcState(lane(r[0], r[2]), lane(r[1], r[3]))


def row_to_state(code: int, row: Sequence[int]):
    r = [int(w) for w in row]
    if code == kernels.MWC:
        return _mwc_from_row(r)
    if code == kernels.XORSHIFT:
        return XorShift256State(tuple(r[:8]), r[8])
    if code == kernels.SHR3:
        return Shr3State(r[0])
    if code == kernels.LCG:
        return LcgState(r[0], r[1], r[2])
    if code == kernels.KISS:
        return KissState(_mwc_from_row(r[:4]), Shr3State(r[4]), LcgState(r[5], r[6], r[7]))
    return Counter(r[0])


def _chunks(n: int, parts: int):
    parts = max(1, min(parts, n))
    edges = np.linspace(0, n, parts + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def generate_many(states: Sequence, n: int, workers: int = 1, out: Optional[np.ndarray] = None):
    """Generate ``n`` words for each state with the compiled kernels.

    Returns ``(final_states, values)`` where ``values`` has shape ``(len(states), n)``.
    All states must be of the same kind. Rows are split across ``workers`` threads;
    the result does not depend on the split.
    """
    packed = [state_to_row(s) for s in states]
    codes = {c for c, _ in packed}
    if len(codes) != 1:
        raise ValueError("generate_many needs states of a single kind")
    code = codes.pop()
    rows = np.array([r for _, r in packed], dtype=np.uint32)
    if out is None:
        out = np.empty((len(states), n), dtype=np.uint32)
    _run_rows(workers, rows, lambda r, lo, hi: kernels.fill_u32(code, r, out[lo:hi]))
    return [row_to_state(code, r) for r in rows], out


def _run_rows(workers: int, rows: np.ndarray, fn: Callable) -> None:
    spans = _chunks(rows.shape[0], workers)
    if len(spans) <= 1:
        fn(rows, 0, rows.shape[0])
        return
    # basic slices are views, so kernels advance ``rows`` in place
    with ThreadPoolExecutor(max_workers=len(spans)) as pool:
        for f in [pool.submit(fn, rows[lo:hi], lo, hi) for lo, hi in spans]:
            f.result()


def generate_words(state, n: int):
    """``(final_state, uint32 array of n words)`` for one stream."""
    finals, out = generate_many([state], n)
    return finals[0], out[0]


@dataclass(frozen=True)
class EnsembleConfig:
    kind: GeneratorKind
    stream_count: int
    per_stream_count: int
    master_seed: int = 0
    scheme: Scheme = Scheme.PARAMETERIZE
    worker_count: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", GeneratorKind(self.kind))
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        if self.stream_count < 1:
            raise ValueError("stream_count must be at least 1")
        if self.per_stream_count < 1:
            raise ValueError("per_stream_count must be at least 1")
        if self.worker_count < 1:
            raise ValueError("worker_count must be at least 1")
        if self.scheme is not Scheme.PARAMETERIZE and self.kind not in JUMPABLE:
            raise SchemeError(_jump_message(self.kind, self.scheme))


def _jump_message(kind: GeneratorKind, scheme: Scheme) -> str:
    return (
        f"scheme '{scheme.value}' needs jump-ahead, which {kind.value} does not support; "
        f"use the parameterize scheme"
    )


def _require_jumpable(cfg: EnsembleConfig) -> None:
    if cfg.kind not in JUMPABLE:
        raise SchemeError(_jump_message(cfg.kind, cfg.scheme))


def state_from_params(kind: GeneratorKind, p: StreamParams):
    kind = GeneratorKind(kind)
    if kind is GeneratorKind.MWC:
        return CombinedMwcState.from_words(p.seeds[0], p.seeds[1], p.mwc_multipliers)
    if kind is GeneratorKind.KISS:
        return KissState.from_words(p.seeds, p.mwc_multipliers)
    if kind is GeneratorKind.XORSHIFT256:
        return XorShift256State(p.xorshift_seeds)
    if kind is GeneratorKind.SHR3:
        return Shr3State(p.seeds[2])
    return LcgState(p.seeds[3])


def master_state(kind: GeneratorKind, master_seed: int):
    """The single sequence that split and leapfrog streams carve up.

    The LCG starts at ``X = master_seed mod 2^32``; XorShift256 takes eight words
    from the master seed's mixing sequence.
    """
    kind = GeneratorKind(kind)
    if kind is GeneratorKind.LCG:
        return LcgState(master_seed & 0xFFFFFFFF)
    if kind is GeneratorKind.XORSHIFT256:
        seq = SeedSequence(master_seed & 0xFFFFFFFFFFFFFFFF)
        words = [seq.next32() for _ in range(8)]
        while not any(words):
            words = [seq.next32() for _ in range(8)]
        return XorShift256State(tuple(words))
    raise SchemeError(f"{kind.value} has no master sequence; use the parameterize scheme")


def parameterize_streams(cfg: EnsembleConfig, table: MultiplierTable | None = None) -> list:
    table = table or default_table()
    needs_pair = cfg.kind in (GeneratorKind.MWC, GeneratorKind.KISS)
    if needs_pair and cfg.stream_count > table.pair_count:
        raise ValueError(
            f"{cfg.stream_count} streams requested but only {table.pair_count} "
            f"distinct multiplier pairs exist"
        )
    return [
        state_from_params(cfg.kind, stream_params(cfg.master_seed, i, table, needs_pair))
        for i in range(cfg.stream_count)
    ]


def _jump(state, k: int):
    if isinstance(state, LcgState):
        return lcg_jump(state, k)
    return xorshift_jump(state, k)


def split_streams(cfg: EnsembleConfig) -> list:
    """Stream ``j`` starts ``j * per_stream_count`` steps into the master sequence."""
    _require_jumpable(cfg)
    base = master_state(cfg.kind, cfg.master_seed)
    B = cfg.per_stream_count
    states = [base]
    for _ in range(1, cfg.stream_count):
        states.append(_jump(states[-1], B))
    return states


class SplitStream:
    """A contiguous block of the master sequence; refuses to run past its end."""

    def __init__(self, state, block: int):
        self.state = state
        self.remaining = block

    def take(self, n: int) -> np.ndarray:
        if n > self.remaining:
            raise StreamExhaustedError(
                f"requested {n} values but only {self.remaining} remain in this block; "
                f"continuing would overlap the next stream"
            )
        self.state, out = generate_words(self.state, n)
        self.remaining -= n
        return out


class LeapfrogStream:
    """Every ``stride``-th value of the master sequence, starting at ``offset``.

    The held state is always the one whose newest output is the next value to emit.
    """

    def __init__(self, master, offset: int, stride: int):
        self.stride = stride
        self.offset = offset
        start = _jump(master, offset + 1)
        if isinstance(start, LcgState):
            self._coeffs = lcg_jump_coefficients(start.a, start.c, stride)
            self._pending = start
        else:
            self._jump = build_xorshift_jump(stride)
            self._pending = start

    @property
    def state(self):
        return self._pending

    def take(self, n: int) -> np.ndarray:
        out = np.empty(n, dtype=np.uint32)
        if n == 0:
            return out
        s = self._pending
        if isinstance(s, LcgState):
            A, C = self._coeffs
            rows = np.array([[s.X, A, C]], dtype=np.uint32)
            jumped = np.empty((1, n), dtype=np.uint32)
            kernels.fill_u32(kernels.LCG, rows, jumped)
            out[0] = s.X
            out[1:] = jumped[0, :-1]
            self._pending = LcgState(int(jumped[0, -1]), s.a, s.c)
        else:
            words = np.array(s.ordered(), dtype=np.uint32)
            kernels.leapfrog_xorshift(words, self._jump.packed_rows, n, out)
            k = (s.k + n * self.stride) % 8
            self._pending = XorShift256State.from_ordered([int(w) for w in words], k)
        return out

    def __iter__(self):
        return self

    def __next__(self) -> int:
        return int(self.take(1)[0])


def leapfrog_streams(cfg: EnsembleConfig) -> List[LeapfrogStream]:
    _require_jumpable(cfg)
    base = master_state(cfg.kind, cfg.master_seed)
    N = cfg.stream_count
    return [LeapfrogStream(base, j, N) for j in range(N)]


def stream_digest(values: np.ndarray) -> str:
    """64-bit BLAKE2b of a stream's little-endian words, as 16 hex digits."""
    return hashlib.blake2b(np.ascontiguousarray(values, dtype="<u4").tobytes(), digest_size=8).hexdigest()


@dataclass
class EnsembleResult:
    config: EnsembleConfig
    values: np.ndarray
    digests: List[str]
    final_states: list

    @property
    def total(self) -> int:
        return int(self.values.size)


def generate_ensemble(cfg: EnsembleConfig, sink: Optional[Callable[[int, np.ndarray], None]] = None) -> EnsembleResult:
    """Generate ``per_stream_count`` values on every stream, stream-major.

    ``sink(stream_index, values)`` is called once per stream in index order after
    generation; an exception there is re-raised as :class:`SinkError`.
    """
    n = cfg.per_stream_count
    if cfg.scheme is Scheme.LEAPFROG:
        views = leapfrog_streams(cfg)
        values = np.empty((cfg.stream_count, n), dtype=np.uint32)

        def work(_rows, lo, hi):
            for j in range(lo, hi):
                values[j] = views[j].take(n)

        _run_rows(cfg.worker_count, np.zeros((cfg.stream_count, 1), np.uint32), work)
        finals = [v.state for v in views]
    else:
        if cfg.scheme is Scheme.SPLIT:
            states = split_streams(cfg)
        else:
            states = parameterize_streams(cfg)
        finals, values = generate_many(states, n, cfg.worker_count)
    digests = [stream_digest(row) for row in values]
    if sink is not None:
        for j, row in enumerate(values):
            try:
                sink(j, row)
            except Exception as exc:
                raise SinkError(j, exc) from exc
    return EnsembleResult(cfg, values, digests, finals)
