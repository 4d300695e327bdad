import numpy as np
import pytest
from hypothesis import given, strategies as st

from prngforge import bench, streams
from prngforge.bench import BenchReport, BudgetExceededError
from prngforge.core import GeneratorKind as K

kinds = st.sampled_from(list(K))


@given(kinds, st.booleans(), st.integers(1, 2**20), st.integers(1, 2**14),
       st.floats(1e-7, 1e3), st.one_of(st.none(), st.floats(1e-7, 1e3)))
def test_metric_identities_exact(kind, wb, n, N, t, tu):
    r = BenchReport.from_timing(kind, wb, n, N, t, tu)
    assert r.uops_gops / r.rate_gsps == r.n_ops
    if wb:
        assert r.bw_gbps / r.rate_gsps == 4
    else:
        assert r.bw_gbps is None
    assert r.rate_gsps == pytest.approx(n * N / (t * 1e9), rel=1e-13)


def test_op_counts():
    assert {k.value: v for k, v in bench.OP_COUNTS.items()} == {
        "mwc": 10, "xorshift256": 18, "kiss": 18, "lcg": 2, "shr3": 6,
    }


@pytest.mark.parametrize("kind", list(K))
def test_writeback_buffer_matches_generated_values(kind):
    run = bench.run_benchmark_detailed(kind, 64, 37, repeats=1, seed=3)
    states = streams.parameterize_streams(streams.EnsembleConfig(kind, 37, 1, 3))
    _, ref = streams.generate_many(states, 64)
    assert (run.sink == ref.T).all()
    ref_final = np.array([streams.state_to_row(s)[1] for s in streams.generate_many(states, 64)[0]]).T
    assert (run.final_states == ref_final).all()


def test_uniform_rate_reported():
    run = bench.run_benchmark_detailed(K.KISS, 32, 16, uniform=True, repeats=1)
    assert run.report.uniform_rate_gsps is not None
    assert run.sink.dtype == np.uint32  # the returned sink comes from the word pass
    nowb = bench.run_benchmark_detailed(K.KISS, 32, 16, writeback=False, uniform=True, repeats=1)
    assert nowb.report.bw_gbps is None


def test_budget_enforced():
    with pytest.raises(BudgetExceededError):
        bench.run_benchmark(K.MWC, 1024, 1024, budget_bytes=1 << 20)
    # no writeback buffer, so no budget
    bench.run_benchmark(K.MWC, 1024, 1024, writeback=False, repeats=1, budget_bytes=1 << 20)


def test_invalid_sizes():
    with pytest.raises(ValueError):
        bench.run_benchmark(K.MWC, 0, 10)


def test_text_report_dash_for_no_writeback():
    r = bench.run_benchmark(K.MWC, 256, 64, writeback=False, repeats=1)
    text = bench.emit_text(r)
    row = next(line for line in text.splitlines() if line.startswith("W/o writeback"))
    assert row.split()[3] == "-"
    assert "n_ops" in text


def test_csv_round_trip():
    reports = [
        BenchReport.from_timing(K.MWC, True, 100, 10, 0.001234, 0.002),
        BenchReport.from_timing(K.XORSHIFT256, False, 8, 3, 1e-5, None, workers=2),
    ]
    text = bench.emit_csv(reports)
    assert text.splitlines()[0] == ",".join(bench.CSV_HEADER)
    assert bench.parse_csv(text) == reports
    assert text.splitlines()[2].split(",")[6] == "-"


def test_compare_writeback_returns_both_modes():
    wb, nowb = bench.compare_writeback(K.LCG, 64, 64, repeats=2)
    assert wb.writeback and not nowb.writeback
    assert wb.bw_gbps is not None and nowb.bw_gbps is None


def test_workers_split_streams():
    one = bench.run_benchmark_detailed(K.SHR3, 40, 50, repeats=1, workers=1)
    three = bench.run_benchmark_detailed(K.SHR3, 40, 50, repeats=1, workers=3)
    assert (one.sink == three.sink).all()
    assert three.report.workers == 3


def test_xorshift_partial_block():
    run = bench.run_benchmark_detailed(K.XORSHIFT256, 13, 5, repeats=1)
    states = streams.parameterize_streams(streams.EnsembleConfig(K.XORSHIFT256, 5, 1, 0))
    _, ref = streams.generate_many(states, 13)
    assert (run.sink == ref.T).all()

