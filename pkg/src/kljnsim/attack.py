"""Eve's passive zero-crossing attack.

Eve watches the wire, finds the instants where the current crosses zero,
samples the wire voltage there, and forms the per-bit mean-square of those
samples.  After calibrating both secure hypotheses offline (every parameter
except the bit choices is public), she thresholds the statistic to guess
each secure bit.  Aggregated over runs this yields her success probability
p and its run-to-run spread sigma_p.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import CalibrationError
from .noise import derive_seed
from .schemes import SchemeConfig

#: How the voltage at a detected crossing is read off.  A crossing exists
#: between samples k and k+1 iff i[k] * i[k+1] < 0 (an exact zero sample is
#: itself a crossing).  "interpolated" reads the linearly interpolated
#: voltage at the linear-interpolation zero of the current; the three
#: sample-aligned modes read a neighboring grid sample instead.  Note the
#: interpolant of a band-limited process has slightly less variance than
#: the process, so interpolated-mode mean squares run low by roughly
#: (1 - sinc(1/oversample)) / 3 until the oversampling ratio is large;
#: sample-aligned modes are free of that shrinkage.
ZC_MODES = ("interpolated", "sample_before", "sample_after", "nearest")

STREAM_EVE_TIE = 5
STREAM_CALIBRATION = 6


@dataclass(frozen=True, eq=False)
class CrossingSampleSet:
    """Wire voltages sampled at the current's zero crossings."""

    values: np.ndarray   # V
    times: np.ndarray    # s, strictly increasing
    mode: str


@dataclass(frozen=True)
class AttackCalibration:
    """Reference statistics Eve prepares before attacking."""

    mean_zc_lh: float
    mean_zc_hl: float
    threshold: float               # midpoint of the two means
    polarity: str                  # "hl_above", "lh_above", or "indistinct"


@dataclass(frozen=True)
class AttackOutcome:
    """Eve's guessing success over a whole session."""

    p: float
    sigma_p: float
    n_secure_bits: int
    n_runs: int
    per_run_p: tuple[float, ...]
    n_excluded_runs: int = 0


def detect_zero_crossings(wire, mode: str) -> CrossingSampleSet:
    """Locate current zero crossings and sample the wire voltage there.

    Constant-sign current yields an empty set.  In "nearest" mode two
    adjacent crossings can elect the same grid sample; duplicates are
    collapsed so the reported times stay strictly increasing.
    """
    if mode not in ZC_MODES:
        raise ValueError(f"mode must be one of {ZC_MODES}, got {mode!r}")
    i = wire.i_c
    u = wire.u_c
    if i.size == 0:
        raise ValueError("wire trace is empty")
    dt = 1.0 / wire.sample_rate

    exact = np.flatnonzero(i == 0.0)
    kk = np.flatnonzero(i[:-1] * i[1:] < 0.0)

    if mode == "interpolated":
        frac = i[kk] / (i[kk] - i[kk + 1])
        times = (kk + frac) * dt
        values = u[kk] + frac * (u[kk + 1] - u[kk])
    elif mode == "sample_before":
        times = kk * dt
        values = u[kk]
    elif mode == "sample_after":
        times = (kk + 1) * dt
        values = u[kk + 1]
    else:  # nearest
        pick = kk + (np.abs(i[kk + 1]) < np.abs(i[kk]))
        times = pick * dt
        values = u[pick]

    if exact.size:
        times = np.concatenate([times, exact * dt])
        values = np.concatenate([values, u[exact]])
        order = np.argsort(times, kind="stable")
        times = times[order]
        values = values[order]
    if times.size > 1:
        keep = np.concatenate([[True], np.diff(times) > 0.0])
        times = times[keep]
        values = values[keep]
    return CrossingSampleSet(values=values, times=times, mode=mode)


def zc_mean_square(crossings: CrossingSampleSet) -> float | None:
    """Mean of the squared crossing voltages; None for an empty set."""
    if crossings.values.size == 0:
        return None
    return float(np.mean(crossings.values * crossings.values))


#: Calibration aborts when crossings are scarcer than this per bit on average.
MIN_CROSSINGS_PER_BIT = 10.0

#: The two hypothesis means count as distinct beyond this many combined
#: standard errors; below it Eve cannot orient a threshold.
POLARITY_SIGMAS = 4.0


def calibrate(
    scheme: SchemeConfig,
    *,
    samples_per_bit: int,
    oversample: float,
    zc_mode: str,
    calibration_bits: int = 200,
    seed: int = 0,
) -> AttackCalibration:
    """Eve's offline rehearsal of both secure hypotheses.

    Simulates ``calibration_bits`` known-case bits for LH and for HL at the
    same sampling settings the attack will face, estimates the mean per-bit
    zero-crossing mean-square for each, and places the decision threshold at
    the arithmetic midpoint.  Polarity is "indistinct" when the two means
    differ by less than ``POLARITY_SIGMAS`` combined standard errors.
    """
    from .protocol import case_wire  # deferred: protocol imports this module

    if calibration_bits < 100:
        raise ValueError(f"calibration_bits must be >= 100, got {calibration_bits}")
    sample_rate = 2.0 * scheme.bandwidth * oversample
    means = {}
    std_errs = {}
    total_crossings = 0
    for case_idx, case in enumerate(("LH", "HL")):
        per_bit = []
        for bit in range(calibration_bits):
            wire = case_wire(
                scheme, case, samples_per_bit, sample_rate,
                (seed, STREAM_CALIBRATION, case_idx, bit),
            )
            crossings = detect_zero_crossings(wire, zc_mode)
            total_crossings += crossings.values.size
            m = zc_mean_square(crossings)
            if m is not None:
                per_bit.append(m)
        if len(per_bit) < 2:
            raise CalibrationError(
                f"case {case}: almost no bits produced crossings; increase samples_per_bit"
            )
        per_bit = np.asarray(per_bit)
        means[case] = float(per_bit.mean())
        std_errs[case] = float(per_bit.std(ddof=1) / math.sqrt(per_bit.size))
    if total_crossings / (2.0 * calibration_bits) < MIN_CROSSINGS_PER_BIT:
        raise CalibrationError(
            "average crossings per bit below "
            f"{MIN_CROSSINGS_PER_BIT:g}; increase samples_per_bit"
        )
    diff = means["HL"] - means["LH"]
    combined_se = math.hypot(std_errs["LH"], std_errs["HL"])
    if abs(diff) < POLARITY_SIGMAS * combined_se:
        polarity = "indistinct"
    else:
        polarity = "hl_above" if diff > 0 else "lh_above"
    return AttackCalibration(
        mean_zc_lh=means["LH"],
        mean_zc_hl=means["HL"],
        threshold=0.5 * (means["LH"] + means["HL"]),
        polarity=polarity,
    )


def eve_guess_bit(u_zc2: float | None, cal: AttackCalibration, tie_seed) -> str:
    """Guess the secure case from one bit's zero-crossing statistic.

    Indistinct calibration or a bit without crossings falls back to a
    seeded fair coin; otherwise it is a threshold comparison.
    """
    if cal.polarity == "indistinct" or u_zc2 is None:
        rng = np.random.default_rng(tie_seed)
        return "HL" if rng.integers(0, 2) else "LH"
    if cal.polarity == "hl_above":
        return "HL" if u_zc2 > cal.threshold else "LH"
    return "LH" if u_zc2 > cal.threshold else "HL"


def attack_statistics(runs, cal: AttackCalibration, guess_seed: int = 0) -> AttackOutcome:
    """Aggregate Eve's per-run success probability over secure bits.

    Per run, p is the fraction of secure bits guessed correctly; the overall
    p is the unweighted mean of the per-run values and sigma_p their sample
    standard deviation.  Runs without secure bits are excluded (counted in
    ``n_excluded_runs``).  Coin-flip guesses draw from a stream disjoint
    from the simulation seeds, namespaced by ``guess_seed``.
    """
    per_run_p = []
    n_secure = 0
    excluded = 0
    for run_idx, run in enumerate(runs):
        correct = 0
        n = 0
        for bit_idx, record in enumerate(run.records):
            if not record.secure:
                continue
            guess = eve_guess_bit(
                record.u_zc2, cal, derive_seed(guess_seed, run_idx, bit_idx, STREAM_EVE_TIE)
            )
            correct += guess == record.case.label
            n += 1
        if n == 0:
            warnings.warn(f"run {run_idx} has no secure bits; excluded from attack statistics")
            excluded += 1
            continue
        per_run_p.append(correct / n)
        n_secure += n
    if not per_run_p:
        raise ValueError("no run contained a secure bit")
    p = float(np.mean(per_run_p))
    sigma_p = float(np.std(per_run_p, ddof=1)) if len(per_run_p) > 1 else 0.0
    return AttackOutcome(
        p=p,
        sigma_p=sigma_p,
        n_secure_bits=n_secure,
        n_runs=len(per_run_p),
        per_run_p=tuple(per_run_p),
        n_excluded_runs=excluded,
    )


def binomial_ci_halfwidth(p: float, n: int, z: float = 1.96) -> float:
    """Half-width of the normal-approximation binomial confidence interval."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return z * math.sqrt(max(p * (1.0 - p), 0.0) / n)


def histogram(values, bins: int, value_range: tuple[float, float]):
    """Fixed-width binning with overflow sentinel bins.

    Returns ``bins + 2`` rows of (bin_lo, bin_hi, count): a (-inf, lo)
    underflow row, the interior bins, and a (hi, +inf) overflow row.
    """
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")
    lo, hi = float(value_range[0]), float(value_range[1])
    if not lo < hi:
        raise ValueError(f"range must satisfy lo < hi, got ({lo}, {hi})")
    values = np.asarray(values, dtype=float)
    counts, edges = np.histogram(values, bins=bins, range=(lo, hi))
    rows = [(-math.inf, lo, int((values < lo).sum()))]
    rows.extend(
        (float(edges[j]), float(edges[j + 1]), int(counts[j])) for j in range(bins)
    )
    rows.append((hi, math.inf, int((values > hi).sum())))
    return rows
