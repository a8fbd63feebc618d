"""Reproducible experiment driver.

Reads a flat ``key = value`` config file, runs scheme solving, session
simulation, attack scoring, or histogram extraction, and writes
machine-readable CSV with a provenance header (config hash, seed, generator
id, artifact version).  Identical configs produce byte-identical files.

Exit codes: 0 success, 2 configuration error, 3 unphysical scheme,
4 runtime/calibration failure.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import __version__
from .attack import ZC_MODES, binomial_ci_halfwidth, histogram
from .benchmarks import (
    BENCHMARKS,
    benchmark_scheme,
    match_benchmark,
    measure_case_moments,
    run_attack_experiment,
)
from .errors import CalibrationError, ConfigurationError, UnphysicalSchemeError
from .noise import GENERATOR_ID, derive_seed
from .protocol import SessionConfig, run_session
from .schemes import (
    SchemeConfig,
    branch_temperatures,
    classic_kljn,
    fck1_fourth_resistor,
    fck1_kljn,
    security_check,
    solve_vmg,
)

STREAM_TABLE = 7

HIST_STATISTICS = ("u2", "i2", "u_zc2")


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str = "classic"
    r_l: float | None = None
    r_h: float | None = None
    r_ha: float | None = None
    r_la: float | None = None
    r_hb: float | None = None
    r_lb: float | None = None
    u_la_sq: float = 1.0
    bandwidth_hz: float = 500.0
    oversample: float = 16.0
    samples_per_bit: int = 16384
    bits_per_run: int = 1000
    runs: int = 10
    seed: int = 1
    zc_mode: str = "sample_after"
    calibration_bits: int = 200
    output_prefix: str = "kljn"


_FLOAT_KEYS = ("r_l", "r_h", "r_ha", "r_la", "r_hb", "r_lb",
               "u_la_sq", "bandwidth_hz", "oversample")
_INT_KEYS = ("samples_per_bit", "bits_per_run", "runs", "seed", "calibration_bits")
_STR_KEYS = ("kind", "zc_mode", "output_prefix")

_RESISTANCES_BY_KIND = {
    "classic": ("r_l", "r_h"),
    "vmg": ("r_ha", "r_la", "r_hb", "r_lb"),
    "fck1": ("r_ha", "r_la", "r_hb"),  # r_lb optional, derived
}


def parse_config(text: str) -> ExperimentConfig:
    """Parse flat ``key = value`` config text ('#' starts a comment).

    Unknown keys, unparsable values, and invariant violations raise
    ConfigurationError naming the key and line.
    """
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key in values:
            raise ConfigurationError(f"line {lineno}: duplicate key {key!r}")
        if key in _FLOAT_KEYS:
            try:
                values[key] = float(value)
            except ValueError:
                raise ConfigurationError(
                    f"line {lineno}: key {key!r}: cannot parse {value!r} as a number"
                ) from None
        elif key in _INT_KEYS:
            try:
                values[key] = int(value)
            except ValueError:
                raise ConfigurationError(
                    f"line {lineno}: key {key!r}: cannot parse {value!r} as an integer"
                ) from None
        elif key in _STR_KEYS:
            values[key] = value
        else:
            raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
    config = ExperimentConfig(**values)
    validate_config(config)
    return config


def validate_config(config: ExperimentConfig) -> None:
    if config.kind not in _RESISTANCES_BY_KIND:
        raise ConfigurationError(
            f"key 'kind': must be one of {tuple(_RESISTANCES_BY_KIND)}, got {config.kind!r}"
        )
    required = _RESISTANCES_BY_KIND[config.kind]
    allowed = set(required) | ({"r_lb"} if config.kind == "fck1" else set())
    all_resistance_keys = ("r_l", "r_h", "r_ha", "r_la", "r_hb", "r_lb")
    for key in all_resistance_keys:
        value = getattr(config, key)
        if key in required and value is None:
            raise ConfigurationError(f"key {key!r}: required for kind {config.kind!r}")
        if value is not None and key not in allowed:
            raise ConfigurationError(f"key {key!r}: not applicable to kind {config.kind!r}")
        if value is not None and value <= 0:
            raise ConfigurationError(f"key {key!r}: must be > 0, got {value}")
    if config.u_la_sq <= 0:
        raise ConfigurationError(f"key 'u_la_sq': must be > 0, got {config.u_la_sq}")
    if config.bandwidth_hz <= 0:
        raise ConfigurationError(f"key 'bandwidth_hz': must be > 0, got {config.bandwidth_hz}")
    if config.oversample < 1:
        raise ConfigurationError(f"key 'oversample': must be >= 1, got {config.oversample}")
    if config.samples_per_bit < 2:
        raise ConfigurationError(
            f"key 'samples_per_bit': must be >= 2, got {config.samples_per_bit}"
        )
    if config.bits_per_run < 1:
        raise ConfigurationError(f"key 'bits_per_run': must be >= 1, got {config.bits_per_run}")
    if config.runs < 1:
        raise ConfigurationError(f"key 'runs': must be >= 1, got {config.runs}")
    if config.seed < 0:
        raise ConfigurationError(f"key 'seed': must be >= 0, got {config.seed}")
    if config.zc_mode not in ZC_MODES:
        raise ConfigurationError(
            f"key 'zc_mode': must be one of {ZC_MODES}, got {config.zc_mode!r}"
        )
    if config.calibration_bits < 100:
        raise ConfigurationError(
            f"key 'calibration_bits': must be >= 100, got {config.calibration_bits}"
        )
    if config.kind == "fck1" and config.r_lb is not None:
        derived = fck1_fourth_resistor(config.r_ha, config.r_la, config.r_hb)
        if not math.isclose(config.r_lb, derived, rel_tol=1e-9):
            raise ConfigurationError(
                f"key 'r_lb': {config.r_lb} violates the zero-power condition "
                f"(expected {derived!r})"
            )


def serialize_config(config: ExperimentConfig) -> str:
    """Canonical text form; ``parse_config`` round-trips it exactly."""
    lines = []
    for f in fields(ExperimentConfig):
        value = getattr(config, f.name)
        if value is None:
            continue
        lines.append(f"{f.name} = {value!r}" if isinstance(value, float) else f"{f.name} = {value}")
    return "\n".join(lines) + "\n"


def config_hash(config: ExperimentConfig) -> str:
    """Hash of the experiment content (the output location does not matter)."""
    canonical = serialize_config(replace(config, output_prefix=""))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def build_scheme(config: ExperimentConfig) -> SchemeConfig:
    if config.kind == "classic":
        return classic_kljn(config.r_l, config.r_h, config.u_la_sq, config.bandwidth_hz)
    if config.kind == "fck1":
        return fck1_kljn(
            config.r_ha, config.r_la, config.r_hb, config.u_la_sq, config.bandwidth_hz
        )
    return solve_vmg(
        config.r_ha, config.r_la, config.r_hb, config.r_lb,
        config.u_la_sq, config.bandwidth_hz,
    )


def _fmt(value) -> str:
    """Shortest round-trip decimal for floats; empty string for None."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, meta: dict, header: list[str], rows, footer: dict | None = None):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for key, value in meta.items():
            fh.write(f"# {key}={_fmt(value)}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
        if footer:
            for key, value in footer.items():
                fh.write(f"# {key}={_fmt(value)}\n")


def _base_meta(config: ExperimentConfig, command: str) -> dict:
    return {
        "artifact": f"kljnsim/{__version__}",
        "command": command,
        "config_hash": config_hash(config),
        "seed": config.seed,
        "generator": GENERATOR_ID,
    }


def cmd_solve(config: ExperimentConfig) -> int:
    """Solve and print the scheme's branch levels, temperatures, and security report."""
    scheme = build_scheme(config)
    temps = branch_temperatures(scheme)
    report = security_check(scheme)
    print(f"scheme kind: {scheme.kind}   bandwidth: {scheme.bandwidth:g} Hz")
    print(f"{'branch':<8}{'resistance [ohm]':>18}{'mean square [V^2]':>20}{'temperature [K]':>18}")
    rows = []
    for bid in ("HA", "LA", "HB", "LB"):
        b = scheme.branches[bid]
        print(f"{bid:<8}{b.resistance:>18.6g}{b.mean_square:>20.6g}{temps[bid]:>18.6g}")
        rows.append((bid, b.resistance, b.mean_square, temps[bid]))
    print(
        f"security: u2 {report.u2_lh:.6g}/{report.u2_hl:.6g} V^2, "
        f"i2 {report.i2_lh:.6g}/{report.i2_hl:.6g} A^2, "
        f"p {report.p_lh:.6g}/{report.p_hl:.6g} W (LH/HL)"
    )
    print(f"max relative mismatch: {report.max_relative_mismatch:.3e}")
    if report.power_is_zero is not None:
        print(f"equilibrium (zero net power): {'yes' if report.power_is_zero else 'NO'}")
    meta = _base_meta(config, "solve")
    meta["max_relative_mismatch"] = report.max_relative_mismatch
    _write_csv(
        Path(f"{config.output_prefix}_solution.csv"),
        meta,
        ["branch", "resistance_ohm", "mean_square_v2", "temperature_k"],
        rows,
    )
    return 0


def _session(config: ExperimentConfig, scheme: SchemeConfig) -> SessionConfig:
    return SessionConfig(
        scheme=scheme,
        samples_per_bit=config.samples_per_bit,
        oversample=config.oversample,
        bits_per_run=config.bits_per_run,
        runs=config.runs,
        master_seed=config.seed,
        zc_mode=config.zc_mode,
    )


def _mean_se(values) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        return math.nan, math.nan
    if arr.size == 1:
        return float(arr[0]), math.nan
    return float(arr.mean()), float(arr.std(ddof=1) / math.sqrt(arr.size))


def cmd_simulate(config: ExperimentConfig) -> int:
    """Run the session and write one CSV row per exchanged bit."""
    scheme = build_scheme(config)
    results = run_session(_session(config, scheme))
    rows = []
    for run_idx, run in enumerate(results):
        for bit_idx, rec in enumerate(run.records):
            rows.append((
                run_idx, bit_idx, rec.case.alice, rec.case.bob, rec.case.label,
                rec.moments.u2, rec.moments.i2, rec.moments.p_ab,
                rec.n_crossings, rec.u_zc2, 1 if rec.secure else 0,
            ))
    meta = _base_meta(config, "simulate")
    meta.update(zc_mode=config.zc_mode, oversample=config.oversample,
                samples_per_bit=config.samples_per_bit)
    _write_csv(
        Path(f"{config.output_prefix}_bits.csv"),
        meta,
        ["run", "bit", "alice", "bob", "case", "u2", "i2", "p_ab", "n_zc", "u_zc2", "secure"],
        rows,
    )
    records = [rec for run in results for rec in run.records]
    print(f"{len(records)} bits simulated "
          f"({sum(r.secure_count for r in results)} secure, "
          f"{sum(r.classification_error_count for r in results)} classification errors)")
    for case in ("LL", "LH", "HL", "HH"):
        sel = [r for r in records if r.case.label == case]
        if not sel:
            continue
        u2, u2_se = _mean_se([r.moments.u2 for r in sel])
        i2, i2_se = _mean_se([r.moments.i2 for r in sel])
        p, p_se = _mean_se([r.moments.p_ab for r in sel])
        zc, zc_se = _mean_se([r.u_zc2 for r in sel if r.u_zc2 is not None])
        print(
            f"{case}: n={len(sel):<6d} u2={u2:.4g}+-{u2_se:.2g} V^2  "
            f"i2={i2:.4g}+-{i2_se:.2g} A^2  p={p:.4g}+-{p_se:.2g} W  "
            f"u_zc2={zc:.4g}+-{zc_se:.2g} V^2"
        )
    return 0


def cmd_attack(config: ExperimentConfig) -> int:
    """Calibrate Eve, attack a session, and report p with its dispersion."""
    scheme = build_scheme(config)
    outcome, cal, results = run_attack_experiment(
        scheme,
        samples_per_bit=config.samples_per_bit,
        oversample=config.oversample,
        zc_mode=config.zc_mode,
        bits_per_run=config.bits_per_run,
        runs=config.runs,
        seed=config.seed,
        calibration_bits=config.calibration_bits,
    )
    rows = []
    run_ps = iter(outcome.per_run_p)
    for run_idx, run in enumerate(results):
        p_run = next(run_ps) if run.secure_count > 0 else None
        rows.append((run_idx, run.secure_count, p_run))
    hw = binomial_ci_halfwidth(outcome.p, outcome.n_secure_bits)
    zc_counts = {
        case: [rec.n_crossings for run in results for rec in run.records
               if rec.case.label == case]
        for case in ("LH", "HL")
    }
    zc_lh, zc_lh_se = _mean_se(zc_counts["LH"])
    zc_hl, zc_hl_se = _mean_se(zc_counts["HL"])
    footer = {
        "p": outcome.p,
        "sigma_p": outcome.sigma_p,
        "ci95_halfwidth": hw,
        "n_secure_bits": outcome.n_secure_bits,
        "n_excluded_runs": outcome.n_excluded_runs,
        "cal_mean_zc_lh": cal.mean_zc_lh,
        "cal_mean_zc_hl": cal.mean_zc_hl,
        "cal_threshold": cal.threshold,
        "cal_polarity": cal.polarity,
        "n_zc_lh_mean": zc_lh,
        "n_zc_lh_se": zc_lh_se,
        "n_zc_hl_mean": zc_hl,
        "n_zc_hl_se": zc_hl_se,
        "zc_mode": config.zc_mode,
        "oversample": config.oversample,
    }
    row = match_benchmark(scheme)
    if row is not None:
        footer["reference_p"] = row.p_eve_ref
        footer["reference_sigma_p"] = row.sigma_p_ref
    _write_csv(
        Path(f"{config.output_prefix}_attack.csv"),
        _base_meta(config, "attack"),
        ["run", "n_secure", "p_run"],
        rows,
        footer=footer,
    )
    print(f"p = {outcome.p:.4f} (sigma_p {outcome.sigma_p:.4f}, 95% CI +-{hw:.4f}, "
          f"{outcome.n_secure_bits} secure bits over {outcome.n_runs} runs)")
    print(f"calibration: mean u_zc2 LH {cal.mean_zc_lh:.4g}, HL {cal.mean_zc_hl:.4g}, "
          f"threshold {cal.threshold:.4g} V^2, polarity {cal.polarity}")
    print(f"settings: zc_mode={config.zc_mode} oversample={config.oversample:g} "
          f"samples_per_bit={config.samples_per_bit}")
    if row is not None:
        print(f"reference for this configuration (not asserted): "
              f"p = {row.p_eve_ref} +- {row.sigma_p_ref}")
    return 0


def cmd_hist(config: ExperimentConfig, statistic: str, bins: int) -> int:
    """Write per-case histograms of a per-bit statistic for the LH/HL populations."""
    if statistic not in HIST_STATISTICS:
        raise ConfigurationError(
            f"statistic must be one of {HIST_STATISTICS}, got {statistic!r}"
        )
    if bins < 1:
        raise ConfigurationError(f"bins must be >= 1, got {bins}")
    scheme = build_scheme(config)
    results = run_session(_session(config, scheme))
    values = {"LH": [], "HL": []}
    for run in results:
        for rec in run.records:
            if not rec.secure:
                continue
            v = {"u2": rec.moments.u2, "i2": rec.moments.i2, "u_zc2": rec.u_zc2}[statistic]
            if v is not None:
                values[rec.case.label].append(v)
    combined = values["LH"] + values["HL"]
    if not combined:
        raise RuntimeError(f"no per-bit values available for statistic {statistic!r}")
    lo, hi = min(combined), max(combined)
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    rows = []
    for case in ("LH", "HL"):
        for j, (bin_lo, bin_hi, count) in enumerate(histogram(values[case], bins, (lo, hi))):
            is_sentinel = j == 0 or j == bins + 1
            if is_sentinel and count == 0:
                continue
            rows.append((statistic, case, bin_lo, bin_hi, count))
    meta = _base_meta(config, "hist")
    meta.update(statistic=statistic, bins=bins)
    _write_csv(
        Path(f"{config.output_prefix}_hist.csv"),
        meta,
        ["stat", "case", "bin_lo", "bin_hi", "count"],
        rows,
    )
    print(f"{statistic}: {len(values['LH'])} LH and {len(values['HL'])} HL values "
          f"binned into {bins} bins over [{lo:.4g}, {hi:.4g}]")
    return 0


def cmd_table1(config: ExperimentConfig) -> int:
    """Simulated wire moments for all benchmark rows, beside the reference values."""
    rows = []
    print(f"{'scheme':<7}{'case':<6}{'u2 sim':>12}{'u2 ref':>9}{'i2 sim':>13}{'i2 ref':>11}"
          f"{'p sim':>13}{'p ref':>10}{'u_zc2 sim':>12}{'u_zc2 ref':>10}")
    for row_idx, (name, bench) in enumerate(BENCHMARKS.items()):
        scheme = benchmark_scheme(name, bandwidth=config.bandwidth_hz, u2_la=config.u_la_sq)
        for case in ("LH", "HL"):
            m = measure_case_moments(
                scheme, case,
                n_bits=config.bits_per_run,
                samples_per_bit=config.samples_per_bit,
                oversample=config.oversample,
                zc_mode=config.zc_mode,
                seed=derive_seed(config.seed, STREAM_TABLE, row_idx),
            )
            r_alice = scheme.branches["LA" if case[0] == "L" else "HA"].resistance
            r_bob = scheme.branches["LB" if case[1] == "L" else "HB"].resistance
            zc_ref = bench.u_zc2_lh_ref if case == "LH" else bench.u_zc2_hl_ref
            rows.append((
                name, case, r_alice, r_bob,
                m.u2, m.u2_se, bench.u2_ref,
                m.i2, m.i2_se, bench.i2_ref,
                m.p_ab, m.p_ab_se, bench.p_ref,
                m.u_zc2, m.u_zc2_se, zc_ref,
            ))
            print(f"{name:<7}{case:<6}{m.u2:>12.4g}{bench.u2_ref:>9.3g}"
                  f"{m.i2:>13.4g}{bench.i2_ref:>11.3g}"
                  f"{m.p_ab:>13.4g}{bench.p_ref:>10.3g}"
                  f"{m.u_zc2 if m.u_zc2 is not None else math.nan:>12.4g}{zc_ref:>10.3g}")
    meta = _base_meta(config, "table1")
    meta.update(zc_mode=config.zc_mode, oversample=config.oversample,
                samples_per_bit=config.samples_per_bit, n_bits_per_case=config.bits_per_run)
    _write_csv(
        Path(f"{config.output_prefix}_table1.csv"),
        meta,
        ["scheme", "case", "r_alice_ohm", "r_bob_ohm",
         "u2_sim", "u2_se", "u2_ref", "i2_sim", "i2_se", "i2_ref",
         "p_sim", "p_se", "p_ref", "u_zc2_sim", "u_zc2_se", "u_zc2_ref"],
        rows,
    )
    return 0


def cmd_table2(config: ExperimentConfig) -> int:
    """Attack outcome for all benchmark rows, beside the reference values."""
    rows = []
    print(f"{'scheme':<7}{'p sim':>9}{'sigma':>9}{'ci95':>9}{'p ref':>9}{'sigma ref':>11}"
          f"{'polarity':>12}")
    for row_idx, (name, bench) in enumerate(BENCHMARKS.items()):
        scheme = benchmark_scheme(name, bandwidth=config.bandwidth_hz, u2_la=config.u_la_sq)
        outcome, cal, _ = run_attack_experiment(
            scheme,
            samples_per_bit=config.samples_per_bit,
            oversample=config.oversample,
            zc_mode=config.zc_mode,
            bits_per_run=config.bits_per_run,
            runs=config.runs,
            seed=derive_seed(config.seed, STREAM_TABLE, row_idx),
            calibration_bits=config.calibration_bits,
        )
        hw = binomial_ci_halfwidth(outcome.p, outcome.n_secure_bits)
        rows.append((
            name, outcome.p, outcome.sigma_p, hw, outcome.n_secure_bits,
            cal.polarity, cal.threshold, bench.p_eve_ref, bench.sigma_p_ref,
        ))
        print(f"{name:<7}{outcome.p:>9.4f}{outcome.sigma_p:>9.4f}{hw:>9.4f}"
              f"{bench.p_eve_ref:>9.4f}{bench.sigma_p_ref:>11.4f}{cal.polarity:>12}")
    meta = _base_meta(config, "table2")
    meta.update(zc_mode=config.zc_mode, oversample=config.oversample,
                samples_per_bit=config.samples_per_bit,
                bits_per_run=config.bits_per_run, runs=config.runs)
    _write_csv(
        Path(f"{config.output_prefix}_table2.csv"),
        meta,
        ["scheme", "p_sim", "sigma_p_sim", "ci95_halfwidth", "n_secure",
         "polarity", "threshold_v2", "p_ref", "sigma_p_ref"],
        rows,
    )
    return 0


def _load_config(path: str) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from exc
    return parse_config(text)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="kljnsim",
        description="KLJN-family key exchanger simulation and zero-crossing attack harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("solve", "solve branch noise levels and temperatures, check security equalities"),
        ("simulate", "simulate key-exchange bits and write per-bit CSV"),
        ("attack", "run the zero-crossing attack and report Eve's success probability"),
        ("hist", "histogram a per-bit statistic for the LH/HL populations"),
        ("table1", "simulated wire moments for all benchmark schemes vs reference values"),
        ("table2", "attack outcome for all benchmark schemes vs reference values"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", help="path to a key = value config file")
        p.add_argument("--output-prefix", default=None,
                       help="override the config's output path prefix")
        if name == "hist":
            p.add_argument("--statistic", default="u_zc2", choices=HIST_STATISTICS)
            p.add_argument("--bins", type=int, default=30)
    args = parser.parse_args(argv)
    try:
        config = _load_config(args.config)
        if args.output_prefix is not None:
            config = replace(config, output_prefix=args.output_prefix)
        if args.command == "solve":
            return cmd_solve(config)
        if args.command == "simulate":
            return cmd_simulate(config)
        if args.command == "attack":
            return cmd_attack(config)
        if args.command == "hist":
            return cmd_hist(config, args.statistic, args.bins)
        if args.command == "table1":
            return cmd_table1(config)
        return cmd_table2(config)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except UnphysicalSchemeError as exc:
        print(f"unphysical scheme: {exc}", file=sys.stderr)
        return 3
    except (CalibrationError, RuntimeError, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
