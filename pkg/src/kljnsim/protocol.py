"""Key-exchange session simulation.

Each bit period, Alice and Bob independently pick their low or high
resistor, the connected branches get fresh synthetic noise, and both
parties classify the partner's choice from the measured wire mean-square
voltage.  The eavesdropper's zero-crossing statistics are recorded per bit.

Seeding contract: every random draw derives its seed from
(master_seed, run index, bit index, stream tag) so that results are
independent of execution order and per-bit traces are independent across
bits.  Stream tags 0-4 are used here; the attack module uses higher tags.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import attack
from .circuit import MomentSummary, WireTrace, measure_moments, wire_observables
from .errors import ConfigurationError
from .noise import NoiseSpec, derive_seed, synthesize
from .schemes import SchemeConfig, level_table

CASES = ("LL", "LH", "HL", "HH")
SECURE_CASES = ("LH", "HL")

STREAM_CHOICES = 0
BRANCH_STREAMS = {"LA": 1, "HA": 2, "LB": 3, "HB": 4}
CASE_TAGS = {"LL": 0, "LH": 1, "HL": 2, "HH": 3}


@dataclass(frozen=True)
class BitCase:
    """The two parties' resistor choices for one bit period."""

    alice: str  # "L" or "H"
    bob: str

    def __post_init__(self):
        if self.alice not in ("L", "H") or self.bob not in ("L", "H"):
            raise ValueError(f"choices must be 'L' or 'H', got {self.alice!r}, {self.bob!r}")

    @property
    def label(self) -> str:
        return self.alice + self.bob

    @property
    def secure(self) -> bool:
        return self.label in SECURE_CASES


@dataclass(frozen=True)
class SessionConfig:
    """Parameters of a simulated key-exchange session."""

    scheme: SchemeConfig
    samples_per_bit: int = 16384
    oversample: float = 16.0     # sample_rate / (2 * bandwidth)
    bits_per_run: int = 1000
    runs: int = 10
    master_seed: int = 1
    zc_mode: str = "sample_after"

    def __post_init__(self):
        if self.samples_per_bit < 2:
            raise ConfigurationError(f"samples_per_bit must be >= 2, got {self.samples_per_bit}")
        if self.oversample < 1:
            raise ConfigurationError(f"oversample must be >= 1, got {self.oversample}")
        if self.bits_per_run < 1 or self.runs < 1:
            raise ConfigurationError("bits_per_run and runs must be >= 1")
        if self.master_seed < 0:
            raise ConfigurationError(f"master_seed must be >= 0, got {self.master_seed}")
        if self.zc_mode not in attack.ZC_MODES:
            raise ConfigurationError(
                f"zc_mode must be one of {attack.ZC_MODES}, got {self.zc_mode!r}"
            )

    @property
    def sample_rate(self) -> float:
        return 2.0 * self.scheme.bandwidth * self.oversample


@dataclass(frozen=True)
class ExchangeRecord:
    """Everything observed in one bit period."""

    case: BitCase
    moments: MomentSummary
    n_crossings: int
    u_zc2: float | None          # absent iff n_crossings == 0
    alice_inference: str         # Alice's guess of Bob's choice
    bob_inference: str
    secure: bool


@dataclass(frozen=True)
class RunResult:
    records: tuple[ExchangeRecord, ...]
    secure_count: int
    classification_error_count: int


def case_wire(
    scheme: SchemeConfig,
    case: str,
    samples_per_bit: int,
    sample_rate: float,
    entropy_prefix: tuple[int, ...],
) -> WireTrace:
    """Synthesize the two connected branches for a given case and solve the wire.

    The branch seeds extend ``entropy_prefix`` with the branch stream tag,
    honoring the deterministic seeding contract.
    """
    a_id = "LA" if case[0] == "L" else "HA"
    b_id = "LB" if case[1] == "L" else "HB"
    traced = {}
    for bid in (a_id, b_id):
        branch = scheme.branches[bid]
        spec = NoiseSpec(
            mean_square=branch.mean_square,
            bandwidth=scheme.bandwidth,
            sample_rate=sample_rate,
            num_samples=samples_per_bit,
            seed=derive_seed(*entropy_prefix, BRANCH_STREAMS[bid]),
        )
        traced[bid] = replace(branch, trace=synthesize(spec))
    return wire_observables(traced[a_id], traced[b_id])


def _infer_partner(own_choice: str, measured_u2: float, levels: dict) -> str:
    """Nearest-level decision: does the partner share our choice or not?"""
    same_level = levels["LL" if own_choice == "L" else "HH"].u2
    secure_level = levels["LH"].u2
    if same_level == secure_level:
        warnings.warn("degenerate level table: candidate levels coincide; defaulting to L")
        return "L"
    d_same = abs(measured_u2 - same_level)
    d_secure = abs(measured_u2 - secure_level)
    if d_same == d_secure:
        return "L"
    if d_same < d_secure:
        return own_choice
    return "H" if own_choice == "L" else "L"


def classify_partner_choice(
    own_choice: str,
    own_resistance: float,
    wire: WireTrace,
    scheme: SchemeConfig,
) -> str:
    """Classify the partner's choice from the measured wire mean-square voltage.

    Compares against the two candidate levels consistent with ``own_choice``
    and returns the nearer level's implied partner choice; ties break toward
    "L" (a measure-zero event for noisy wires).
    """
    if own_choice not in ("L", "H"):
        raise ValueError(f"own_choice must be 'L' or 'H', got {own_choice!r}")
    if wire.u_c.size == 0:
        raise ValueError("wire trace is empty")
    candidates = (
        (scheme.branches["LA"].resistance, scheme.branches["LB"].resistance)
        if own_choice == "L"
        else (scheme.branches["HA"].resistance, scheme.branches["HB"].resistance)
    )
    if not any(abs(own_resistance - r) <= 1e-12 * max(own_resistance, r) for r in candidates):
        raise ValueError(
            f"own_resistance {own_resistance} matches no {own_choice} branch of the scheme"
        )
    measured = float(np.mean(wire.u_c * wire.u_c))
    return _infer_partner(own_choice, measured, level_table(scheme))


def run_session(config: SessionConfig) -> list[RunResult]:
    """Simulate ``config.runs`` runs of ``config.bits_per_run`` bit exchanges.

    Per bit: draw independent fair choices for both parties, synthesize
    fresh branch noise, compute wire observables, classify both partners'
    views, and record the zero-crossing statistics for the attack harness.
    Deterministic for a fixed config.
    """
    scheme = config.scheme
    fs = config.sample_rate
    levels = level_table(scheme)
    results = []
    for run_idx in range(config.runs):
        records = []
        secure_count = 0
        error_count = 0
        for bit_idx in range(config.bits_per_run):
            rng = np.random.default_rng(
                derive_seed(config.master_seed, run_idx, bit_idx, STREAM_CHOICES)
            )
            pick_a, pick_b = rng.integers(0, 2, size=2)
            case = BitCase(alice="LH"[pick_a], bob="LH"[pick_b])
            wire = case_wire(
                scheme,
                case.label,
                config.samples_per_bit,
                fs,
                (config.master_seed, run_idx, bit_idx),
            )
            moments = measure_moments(wire)
            crossings = attack.detect_zero_crossings(wire, config.zc_mode)
            u_zc2 = attack.zc_mean_square(crossings)
            alice_inf = _infer_partner(case.alice, moments.u2, levels)
            bob_inf = _infer_partner(case.bob, moments.u2, levels)
            record = ExchangeRecord(
                case=case,
                moments=moments,
                n_crossings=crossings.values.size,
                u_zc2=u_zc2,
                alice_inference=alice_inf,
                bob_inference=bob_inf,
                secure=case.secure,
            )
            records.append(record)
            secure_count += case.secure
            error_count += (alice_inf != case.bob) or (bob_inf != case.alice)
        results.append(
            RunResult(
                records=tuple(records),
                secure_count=secure_count,
                classification_error_count=error_count,
            )
        )
    return results


def filter_secure_bits(records) -> list[ExchangeRecord]:
    """Keep only the LH/HL records, preserving order."""
    return [r for r in records if r.secure]


def secure_bit_value(case_label: str, hl_value: int = 1) -> int:
    """Bit value of a secure case under the public HL-means-``hl_value`` convention."""
    if hl_value not in (0, 1):
        raise ValueError(f"hl_value must be 0 or 1, got {hl_value}")
    if case_label == "HL":
        return hl_value
    if case_label == "LH":
        return 1 - hl_value
    raise ValueError(f"case {case_label!r} is not a secure case")
