"""Throughput measurement with bandwidth and useful-operations metrics."""

from __future__ import annotations

import csv
import io
import math
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from prngforge import kernels, lockstep
from prngforge.core import GeneratorKind
from prngforge.streams import EnsembleConfig, _chunks, parameterize_streams, state_to_row

# useful word operations per output; lcg and shr3 counted the same way from their recurrences
OP_COUNTS = {
    GeneratorKind.MWC: 10,
    GeneratorKind.XORSHIFT256: 18,
    GeneratorKind.KISS: 18,
    GeneratorKind.LCG: 2,
    GeneratorKind.SHR3: 6,
}

OP_COUNT_NOTE = (
    "n_ops: mwc 10, xorshift256 18, kiss 18 as tabulated for the GPU kernels; "
    "lcg 2 (mul, add) and shr3 6 (3 shifts, 3 xors) counted the same way"
)

DEFAULT_BUDGET_BYTES = 1 << 30
DEFAULT_TOTAL = 80_000_000

CSV_HEADER = (
    "kind",
    "writeback",
    "workers",
    "n_t",
    "N_t",
    "t_seconds",
    "bw_gbps",
    "uops_gops",
    "rate_gsps",
    "uniform_rate_gsps",
)


class BudgetExceededError(ValueError):
    pass


_RATE_BITS = 47


def _quantize(x: float) -> float:
    """Round to 47 significant bits.

    Products with small integers (4 bytes per word, n_ops < 32) are then exact, so
    ``bw / rate == 4`` and ``uops / rate == n_ops`` hold bit-for-bit in float64.
    The relative change, under 1e-14, is far below timing noise.
    """
    m, e = math.frexp(x)
    return math.ldexp(round(m * (1 << _RATE_BITS)), e - _RATE_BITS)


@dataclass(frozen=True)
class BenchReport:
    kind: GeneratorKind
    writeback: bool
    workers: int
    n_t: int
    N_t: int
    t_seconds: float
    bw_gbps: Optional[float]
    uops_gops: float
    rate_gsps: float
    uniform_rate_gsps: Optional[float]

    @classmethod
    def from_timing(
        cls,
        kind,
        writeback: bool,
        n_t: int,
        N_t: int,
        t: float,
        t_uniform: Optional[float] = None,
        workers: int = 1,
    ) -> "BenchReport":
        kind = GeneratorKind(kind)
        total = n_t * N_t
        rate = _quantize(total / (t * 1e9))
        return cls(
            kind=kind,
            writeback=writeback,
            workers=workers,
            n_t=n_t,
            N_t=N_t,
            t_seconds=t,
            bw_gbps=rate * 4 if writeback else None,
            uops_gops=rate * OP_COUNTS[kind],
            rate_gsps=rate,
            uniform_rate_gsps=None if t_uniform is None else total / (t_uniform * 1e9),
        )

    @property
    def n_ops(self) -> int:
        return OP_COUNTS[self.kind]


def _prepare(kind: GeneratorKind, N_t: int, seed: int):
    """Parameterized streams as a structure-of-arrays state, ``S[word, stream]``."""
    states = parameterize_streams(EnsembleConfig(kind, N_t, 1, seed))
    code = state_to_row(states[0])[0]
    rows = np.array([state_to_row(s)[1] for s in states], dtype=np.uint32)
    return code, np.ascontiguousarray(rows.T)


_MODE = {
    (True, False): lockstep.WRITE,
    (True, True): lockstep.WRITE_UNIFORM,
    (False, False): lockstep.ADVANCE,
    (False, True): lockstep.SUM_UNIFORM,
}


class _Workload:
    """Per-worker contiguous state blocks and pre-touched output buffers."""

    def __init__(self, code, S, n_t, writeback, uniform, workers):
        self.code = code
        self.n_t = n_t
        self.mode = _MODE[(writeback, uniform)]
        self.spans = _chunks(S.shape[1], workers)
        self.initial = [np.ascontiguousarray(S[:, lo:hi]) for lo, hi in self.spans]
        self.outputs = []
        for lo, hi in self.spans:
            width = hi - lo
            out_u = np.zeros((n_t if self.mode == lockstep.WRITE else 1, width), np.uint32)
            out_f = np.zeros((n_t if self.mode == lockstep.WRITE_UNIFORM else 1, width), np.float32)
            acc = np.zeros(width, np.float32)
            for buf in (out_u, out_f):
                buf.fill(1)  # touch pages outside the timed region
            self.outputs.append((out_u, out_f, acc))
        self.kernel = lockstep.KERNELS[code]

    def warm_up(self):
        S = self.initial[0][:, :1].copy()
        u, f, a = (np.zeros((1, 1), np.uint32), np.zeros((1, 1), np.float32), np.zeros(1, np.float32))
        self.kernel(S, 1, self.mode, u, f, a)

    def run(self):
        """Time one pass; returns (seconds, final SoA state)."""
        blocks = [b.copy() for b in self.initial]
        for _, _, acc in self.outputs:
            acc.fill(0)

        def work(i):
            u, f, a = self.outputs[i]
            self.kernel(blocks[i], self.n_t, self.mode, u, f, a)

        t0 = time.perf_counter()
        if len(blocks) == 1:
            work(0)
        else:
            with ThreadPoolExecutor(max_workers=len(blocks)) as pool:
                list(pool.map(work, range(len(blocks))))
        t = time.perf_counter() - t0
        if t <= 0:
            raise RuntimeError("monotonic clock did not advance")
        S = np.concatenate(blocks, axis=1)
        if self.code == kernels.XORSHIFT:
            S[8] = (S[8] + self.n_t) % 8
        return t, S

    def written(self) -> np.ndarray:
        """Writeback buffer as ``[step, stream]`` (uniform sums in no-writeback modes)."""
        if self.mode == lockstep.WRITE:
            return np.concatenate([o[0] for o in self.outputs], axis=1)
        if self.mode == lockstep.WRITE_UNIFORM:
            return np.concatenate([o[1] for o in self.outputs], axis=1)
        return np.concatenate([o[2] for o in self.outputs])


def _check_budget(n_t: int, N_t: int, writeback: bool, budget_bytes: int) -> None:
    if writeback and n_t * N_t * 4 > budget_bytes:
        raise BudgetExceededError(
            f"{n_t}x{N_t} words need {n_t * N_t * 4} bytes, budget is {budget_bytes}"
        )


def _check_xorshift(code, S) -> None:
    if code == kernels.XORSHIFT and np.any(S[8] != S[8, 0]):
        raise ValueError("lockstep XorShift needs every stream at the same cursor")


@dataclass
class BenchRun:
    report: BenchReport
    final_states: np.ndarray  # SoA, S[word, stream]
    sink: np.ndarray


def run_benchmark_detailed(
    kind,
    n_t: int,
    N_t: int,
    writeback: bool = True,
    uniform: bool = False,
    repeats: int = 5,
    workers: int = 1,
    seed: int = 0,
    budget_bytes: int = DEFAULT_BUDGET_BYTES,
) -> BenchRun:
    kind = GeneratorKind(kind)
    if n_t < 1 or N_t < 1 or repeats < 1 or workers < 1:
        raise ValueError("n_t, N_t, repeats and workers must be positive")
    _check_budget(n_t, N_t, writeback, budget_bytes)
    code, S = _prepare(kind, N_t, seed)
    _check_xorshift(code, S)

    def median_time(as_float: bool):
        load = _Workload(code, S, n_t, writeback, as_float, workers)
        load.warm_up()
        times = []
        for _ in range(repeats):
            t, final = load.run()
            times.append(t)
        return statistics.median(times), final, load

    t, final, load = median_time(False)
    t_uniform = median_time(True)[0] if uniform else None
    report = BenchReport.from_timing(kind, writeback, n_t, N_t, t, t_uniform, workers)
    return BenchRun(report, final, load.written())


def run_benchmark(kind, n_t: int, N_t: int, writeback: bool = True, uniform: bool = False,
                  repeats: int = 5, workers: int = 1, seed: int = 0,
                  budget_bytes: int = DEFAULT_BUDGET_BYTES) -> BenchReport:
    """Median-of-``repeats`` timing of ``n_t`` values on each of ``N_t`` streams.

    Timing covers generation only; buffers are allocated and touched beforehand.
    With ``uniform`` the loop is timed a second time with the [0, 1) conversion
    applied, giving ``uniform_rate_gsps``.
    """
    return run_benchmark_detailed(
        kind, n_t, N_t, writeback, uniform, repeats, workers, seed, budget_bytes
    ).report


def compare_writeback(kind, n_t: int, N_t: int, repeats: int = 5, workers: int = 1,
                      seed: int = 0, budget_bytes: int = DEFAULT_BUDGET_BYTES):
    """``(writeback_report, no_writeback_report)`` from interleaved repeats.

    The two modes alternate within each repeat so both medians see the same
    machine conditions.
    """
    kind = GeneratorKind(kind)
    _check_budget(n_t, N_t, True, budget_bytes)
    code, S = _prepare(kind, N_t, seed)
    _check_xorshift(code, S)
    wb_load = _Workload(code, S, n_t, True, False, workers)
    nowb_load = _Workload(code, S, n_t, False, False, workers)
    wb_load.warm_up()
    nowb_load.warm_up()
    wb, nowb = [], []
    for _ in range(repeats):
        wb.append(wb_load.run()[0])
        nowb.append(nowb_load.run()[0])
    return (
        BenchReport.from_timing(kind, True, n_t, N_t, statistics.median(wb), None, workers),
        BenchReport.from_timing(kind, False, n_t, N_t, statistics.median(nowb), None, workers),
    )


def _fmt(x: Optional[float], spec: str = ".3f") -> str:
    return "-" if x is None else format(x, spec)


def emit_text(report: BenchReport) -> str:
    r = report
    mode = "W/ writeback" if r.writeback else "W/o writeback"
    header = f"{'':<14}{'t':>10}{'BW':>10}{'U_ops':>10}{'rate':>10}{'uniform rate':>14}"
    row = (
        f"{mode:<14}{r.t_seconds * 1e3:>10.3f}{_fmt(r.bw_gbps):>10}{r.uops_gops:>10.3f}"
        f"{r.rate_gsps:>10.3f}{_fmt(r.uniform_rate_gsps):>14}"
    )
    return (
        f"{r.kind.value}: n_t={r.n_t} N_t={r.N_t} workers={r.workers}\n"
        f"{header}\n{row}\n"
        f"units: t ms, BW GBps, U_ops GOps, rates GSamples/s\n"
        f"{OP_COUNT_NOTE}\n"
    )


def _cell(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, bool):
        return "yes" if x else "no"
    if isinstance(x, GeneratorKind):
        return x.value
    return repr(x)


def emit_csv(reports, header: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if header:
        w.writerow(CSV_HEADER)
    for r in reports:
        w.writerow([_cell(getattr(r, name)) for name in CSV_HEADER])
    return buf.getvalue()


def emit_report(report: BenchReport, format: str = "text") -> str:
    if format == "text":
        return emit_text(report)
    if format in ("csv", "machine"):
        return emit_csv([report])
    raise ValueError(f"unknown report format {format!r}")


def parse_csv(text: str):
    out = []
    types = {f.name: f.type for f in fields(BenchReport)}
    for rec in csv.DictReader(io.StringIO(text)):
        kw = {}
        for name in CSV_HEADER:
            v = rec[name]
            if name == "kind":
                kw[name] = GeneratorKind(v)
            elif name == "writeback":
                kw[name] = v == "yes"
            elif v == "-":
                kw[name] = None
            elif types[name] == "int":
                kw[name] = int(v)
            else:
                kw[name] = float(v)
        out.append(BenchReport(**kw))
    return out
