"""A small statistical test battery over 32-bit word streams."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import List, Optional

import numba as nb
import numpy as np
from scipy import special, stats as sps

from prngforge import kernels
from prngforge.core import DEFAULT_MWC_MULTIPLIERS, GeneratorKind
from prngforge.params import stream_params
from prngforge.streams import Counter, generate_words, state_from_params

ALPHA_FAIL = 1e-3
ALPHA_SUSPECT = 1e-2

COUNTER_KIND = "_counter"

LEVELS = {
    # minimum words, birthday-spacings trials
    "quick": (10**6, 200),
    "full": (10**8, 2000),
}


class InsufficientSamplesError(ValueError):
    pass


@dataclass(frozen=True)
class TestResult:
    test_name: str
    n_samples: int
    statistic: float
    p_value: float
    verdict: str
    detail: str = ""

    @property
    def failed(self) -> bool:
        return self.verdict == "fail"


def verdict(p: float, upper_tail_suspect: bool = False) -> str:
    """Map a p-value to pass/suspect/fail.

    Small p fails or is suspect. For chi-square style statistics a p-value near 1
    means the counts fit too well, which is flagged suspect but never fails.
    """
    if p < ALPHA_FAIL:
        return "fail"
    if p < ALPHA_SUSPECT:
        return "suspect"
    if upper_tail_suspect and p > 1 - ALPHA_SUSPECT:
        return "suspect"
    return "pass"


def _words(samples) -> np.ndarray:
    return np.ascontiguousarray(samples, dtype=np.uint32)


def _need(n: int, minimum: int, name: str) -> None:
    if n < minimum:
        raise InsufficientSamplesError(f"{name} needs at least {minimum} words, got {n}")


def _two_sided(z: float) -> float:
    return float(math.erfc(abs(z) / math.sqrt(2.0)))


def monobit(samples) -> TestResult:
    """Balance of ones and zeros over all 32*n bits."""
    w = _words(samples)
    _need(w.size, 10**4, "monobit")
    ones, _ = kernels.bit_counts(w)
    nbits = 32 * w.size
    z = (2 * int(ones) - nbits) / math.sqrt(nbits)
    p = _two_sided(z)
    return TestResult("monobit", w.size, z, p, verdict(p))


@nb.njit(nogil=True, cache=True)
def _byte_histogram(words):
    h = np.zeros(256, dtype=np.int64)
    for i in range(words.shape[0]):
        w = words[i]
        h[w & np.uint32(0xFF)] += 1
        h[(w >> np.uint32(8)) & np.uint32(0xFF)] += 1
        h[(w >> np.uint32(16)) & np.uint32(0xFF)] += 1
        h[w >> np.uint32(24)] += 1
    return h


def chi2_bytes(samples) -> TestResult:
    """Chi-square of the 256 byte frequencies (255 degrees of freedom)."""
    w = _words(samples)
    _need(w.size, 10**5, "chi2_bytes")
    counts = _byte_histogram(w).astype(np.float64)
    expected = 4 * w.size / 256
    chi2 = float(((counts - expected) ** 2).sum() / expected)
    p = float(special.gammaincc(255 / 2, chi2 / 2))
    return TestResult("chi2_bytes", w.size, chi2, p, verdict(p, upper_tail_suspect=True))


def runs_test(samples) -> TestResult:
    """Number of bit runs against its distribution given the observed ones count.

    Bits are read most significant first within each word.
    """
    w = _words(samples)
    _need(w.size, 10**4, "runs")
    ones, transitions = kernels.bit_counts(w)
    N = 32 * w.size
    n1 = int(ones)
    n0 = N - n1
    runs = int(transitions) + 1
    if n1 == 0 or n0 == 0:
        return TestResult("runs", w.size, float(runs), 0.0, "fail", "all bits equal")
    prod = 2.0 * n1 * n0
    mean = prod / N + 1
    var = prod * (prod - N) / (float(N) ** 2 * (N - 1))
    if var <= 0:
        return TestResult("runs", w.size, float(runs), 0.0, "fail", "degenerate bit balance")
    z = (runs - mean) / math.sqrt(var)
    p = _two_sided(z)
    return TestResult("runs", w.size, z, p, verdict(p))


@nb.njit(nogil=True, cache=True)
def _lag_moments(words, lag):
    # centred at 2^31 to keep the float64 sums well conditioned
    n = words.shape[0] - lag
    sx = 0.0
    sy = 0.0
    sxx = 0.0
    syy = 0.0
    sxy = 0.0
    for i in range(n):
        x = np.float64(words[i]) - 2147483648.0
        y = np.float64(words[i + lag]) - 2147483648.0
        sx += x
        sy += y
        sxx += x * x
        syy += y * y
        sxy += x * y
    return n, sx, sy, sxx, syy, sxy


def serial_correlation(samples, lag: int = 1) -> TestResult:
    """Pearson correlation between the word sequence and itself shifted by ``lag``."""
    w = _words(samples)
    name = f"serial_correlation_lag{lag}"
    _need(w.size, 10**4, name)
    if not 1 <= lag <= 64 or lag >= w.size:
        raise ValueError(f"lag must be in [1, 64] and below the sample count, got {lag}")
    n, sx, sy, sxx, syy, sxy = _lag_moments(w, lag)
    vx = sxx - sx * sx / n
    vy = syy - sy * sy / n
    if vx <= 0 or vy <= 0:
        return TestResult(name, w.size, float("nan"), 0.0, "fail", "zero variance")
    r = (sxy - sx * sy / n) / math.sqrt(vx * vy)
    z = r * math.sqrt(n)
    p = _two_sided(z)
    return TestResult(name, w.size, r, p, verdict(p))


def birthday_lambda(m: int, bits: int) -> float:
    return m**3 / 2 ** (bits + 2)


def _poisson_bins(lam: float, trials: int):
    """Edges ``[lo, hi]`` such that each lumped bin expects at least 5 trials."""
    lo = 0
    while trials * sps.poisson.cdf(lo, lam) < 5:
        lo += 1
    hi = lo + 1
    while trials * sps.poisson.sf(hi, lam) >= 5:
        hi += 1
    return lo, hi


def birthday_spacings(samples, m: int = 512, bits: int = 25, trials: Optional[int] = None) -> TestResult:
    """Repeated spacings among ``m`` birthdays drawn from the top ``bits`` bits of each word.

    Each trial sorts its birthdays, takes the ``m`` circular spacings and counts
    ``m - distinct``; the counts over trials are compared with Poisson(m^3 / 2^(bits+2)).
    """
    lam = birthday_lambda(m, bits)
    if not 0.1 <= lam <= 20:
        raise ValueError(f"m={m}, bits={bits} gives lambda={lam:.3g}, outside [0.1, 20]")
    if not (m <= 4096 and 1 <= bits <= 30):
        raise ValueError("birthday spacings needs m <= 4096 and bits <= 30")
    w = _words(samples)
    available = w.size // m
    trials = available if trials is None else trials
    if trials < 200 or trials > available:
        raise InsufficientSamplesError(
            f"birthday spacings needs at least 200 trials of {m} words; "
            f"asked for {trials}, {available} available"
        )
    b = np.sort((w[: trials * m] >> np.uint32(32 - bits)).astype(np.int64).reshape(trials, m), axis=1)
    spacings = np.empty_like(b)
    spacings[:, 0] = b[:, 0] + (1 << bits) - b[:, -1]
    spacings[:, 1:] = np.diff(b, axis=1)
    spacings.sort(axis=1)
    repeats = (np.diff(spacings, axis=1) == 0).sum(axis=1)
    lo, hi = _poisson_bins(lam, trials)
    observed = np.array(
        [(repeats <= lo).sum()]
        + [(repeats == k).sum() for k in range(lo + 1, hi)]
        + [(repeats >= hi).sum()],
        dtype=np.float64,
    )
    probs = np.array(
        [sps.poisson.cdf(lo, lam)]
        + [sps.poisson.pmf(k, lam) for k in range(lo + 1, hi)]
        + [sps.poisson.sf(hi - 1, lam)]
    )
    expected = trials * probs
    chi2 = float(((observed - expected) ** 2 / expected).sum())
    p = float(sps.chi2.sf(chi2, len(observed) - 1))
    return TestResult(
        f"birthday_spacings_m{m}_b{bits}", trials * m, chi2, p,
        verdict(p, upper_tail_suspect=True), f"lambda={lam:g} trials={trials}",
    )


def battery(samples, level: str = "quick") -> List[TestResult]:
    if level not in LEVELS:
        raise ValueError(f"level must be one of {sorted(LEVELS)}")
    minimum, trials = LEVELS[level]
    w = _words(samples)
    _need(w.size, minimum, f"the {level} battery")
    return [
        monobit(w),
        chi2_bytes(w),
        runs_test(w),
        serial_correlation(w, 1),
        serial_correlation(w, 8),
        birthday_spacings(w, 512, 25, trials),
    ]


def battery_state(kind: str, seed: int = 0, multipliers=DEFAULT_MWC_MULTIPLIERS):
    """Generator under test: stream-0 seed words for ``seed``.

    MWC and KISS use ``multipliers`` (the default pair unless given) rather than the
    stream's table pair; the smallest table multipliers make visibly weak lanes.
    """
    if kind == COUNTER_KIND:
        return Counter(seed & 0xFFFFFFFF)
    p = stream_params(seed, 0)
    if multipliers is not None:
        p = replace(p, mwc_multipliers=tuple(multipliers))
    return state_from_params(GeneratorKind(kind), p)


def battery_samples(kind: str, n: int, seed: int = 0, multipliers=DEFAULT_MWC_MULTIPLIERS) -> np.ndarray:
    return generate_words(battery_state(kind, seed, multipliers), n)[1]


def run_battery(kind: str, n: Optional[int] = None, level: str = "quick", seed: int = 0,
                multipliers=DEFAULT_MWC_MULTIPLIERS) -> List[TestResult]:
    """Generate ``n`` words (the level minimum by default) and run the level's tests."""
    if level not in LEVELS:
        raise ValueError(f"level must be one of {sorted(LEVELS)}")
    n = LEVELS[level][0] if n is None else n
    _need(n, LEVELS[level][0], f"the {level} battery")
    return battery(battery_samples(kind, n, seed, multipliers), level)


def summary_verdict(results) -> str:
    return "fail" if any(r.failed for r in results) else "pass"


def format_report(results, machine: bool = False) -> str:
    if machine:
        lines = ["test_name,n_samples,statistic,p_value,verdict"]
        lines += [f"{r.test_name},{r.n_samples},{r.statistic!r},{r.p_value!r},{r.verdict}" for r in results]
        lines.append(f"summary,,,,{summary_verdict(results)}")
        return "\n".join(lines) + "\n"
    lines = [f"{r.test_name} {r.p_value:.6g} {r.verdict}" for r in results]
    fails = sum(r.failed for r in results)
    suspects = sum(r.verdict == "suspect" for r in results)
    lines.append(f"summary {summary_verdict(results)} ({fails} fail, {suspects} suspect, {len(results)} tests)")
    return "\n".join(lines) + "\n"
