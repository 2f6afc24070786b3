"""Batch command line: manifest in, CSV summaries and figure data out.

Output files in ``--output``:

``summary.csv``
    scheme, sweep_param, sweep_value, mean_ee_bits_per_joule, stderr_ee,
    mean_queue_bits, convergence_slot (one row per sweep value and scheme;
    convergence_slot is empty when the running EE never settles within 2%).
``trace.csv`` (``--emit-trace``)
    scheme, sweep_value, realization, slot, then per-user columns f_<n>,
    p_<n>, r_loc_<n>, r_off_<n>, q_<n>, a_<n> (user n is 1-based), then
    total_rate, total_power, ee_ratio, effective_throughput.
``figure_<sweep>.csv``
    scheme, sweep_value, mean_ee_bits_per_joule, stderr_ee, mean_queue_bits;
    without a sweep ``figure_ee_vs_slot.csv`` holds scheme, slot, mean_running_ee.
``metadata.json``
    the resolved configuration and averaging notes.

Numbers are written with 12 significant digits so reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from .manifest import DEFAULT_SWEEPS, ExperimentManifest, ManifestError, load_manifest, manifest_from_mapping
from .schemes import ALL_SCHEMES, SchemeId
from .sim import ExperimentResult, Sweep, run_experiment

log = logging.getLogger("noma_mec")

SUMMARY_COLUMNS = (
    "scheme", "sweep_param", "sweep_value", "mean_ee_bits_per_joule",
    "stderr_ee", "mean_queue_bits", "convergence_slot",
)
FIGURE_COLUMNS = ("scheme", "sweep_value", "mean_ee_bits_per_joule", "stderr_ee", "mean_queue_bits")


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    return format(float(x), ".12g")


def _writer(path: Path):
    fh = open(path, "w", newline="", encoding="utf-8")
    return fh, csv.writer(fh, lineterminator="\n")


def write_summary(result: ExperimentResult, path: Path) -> None:
    sweep = result.config.sweep
    fh, w = _writer(path)
    with fh:
        w.writerow(SUMMARY_COLUMNS)
        for r in result.results:
            w.writerow([
                r.scheme.value,
                sweep.param if sweep else "none",
                fmt(r.sweep_value),
                fmt(r.mean_ee),
                fmt(r.stderr_ee),
                fmt(r.mean_queue),
                fmt(r.convergence_slot),
            ])


def trace_columns(num_users: int) -> list:
    cols = ["scheme", "sweep_value", "realization", "slot"]
    for name in ("f", "p", "r_loc", "r_off", "q", "a"):
        cols += [f"{name}_{n + 1}" for n in range(num_users)]
    return cols + ["total_rate", "total_power", "ee_ratio", "effective_throughput"]


def write_trace(result: ExperimentResult, path: Path) -> None:
    fh, w = _writer(path)
    with fh:
        w.writerow(trace_columns(result.config.num_users))
        for r in result.results:
            for ep in r.episodes:
                for rec in ep.trace.records():
                    row = [r.scheme.value, fmt(r.sweep_value), rec.realization, rec.slot]
                    for vec in (rec.cpu_freq, rec.tx_power, rec.local_rate, rec.offload_rate, rec.queue, rec.arrival):
                        row += [fmt(v) for v in vec]
                    row += [fmt(rec.total_rate), fmt(rec.total_power), fmt(rec.ee_ratio), fmt(rec.effective_throughput)]
                    w.writerow(row)


def write_figure_data(result: ExperimentResult, out_dir: Path) -> Path:
    sweep = result.config.sweep
    if sweep is None:
        path = out_dir / "figure_ee_vs_slot.csv"
        fh, w = _writer(path)
        with fh:
            w.writerow(("scheme", "slot", "mean_running_ee"))
            for r in result.results:
                for t, v in enumerate(r.running_ee, start=1):
                    w.writerow((r.scheme.value, t, fmt(v)))
        return path
    path = out_dir / f"figure_{sweep.param}.csv"
    fh, w = _writer(path)
    with fh:
        w.writerow(FIGURE_COLUMNS)
        for r in result.results:
            w.writerow((r.scheme.value, fmt(r.sweep_value), fmt(r.mean_ee), fmt(r.stderr_ee), fmt(r.mean_queue)))
    return path


def write_metadata(manifest: ExperimentManifest, path: Path) -> None:
    cfg = manifest.config
    meta = {
        "params": dataclasses.asdict(cfg.params),
        "geometry": [dataclasses.asdict(g) for g in cfg.geometry],
        "arrival": dataclasses.asdict(cfg.arrival),
        "num_slots": cfg.num_slots,
        "num_realizations": cfg.num_realizations,
        "seed": cfg.seed,
        "schemes": [s.value for s in cfg.schemes],
        "sweep": None if cfg.sweep is None else {"param": cfg.sweep.param, "values": list(cfg.sweep.values)},
        "ee_averaging": "full horizon: sum(R_tot tau) / sum(P_tot tau) per realization, then mean over realizations",
        "mean_queue": "time average of the total backlog at slot start, then mean over realizations",
    }
    path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="noma-mec",
        description="Secure energy-efficient NOMA MEC offloading simulator.",
    )
    ap.add_argument("--config", type=Path, help="YAML manifest (default: built-in two-user setting)")
    ap.add_argument("--scheme", choices=[s.value for s in SchemeId] + ["all"], help="policy to run")
    ap.add_argument("--sweep", choices=sorted(DEFAULT_SWEEPS) + ["none"], help="parameter sweep")
    ap.add_argument("--sweep-values", type=float, nargs="+", help="override the sweep grid")
    ap.add_argument("--output", type=Path, help="output directory")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--realizations", type=int)
    ap.add_argument("--slots", type=int)
    ap.add_argument("--emit-trace", action="store_true", help="also write the per-slot trace CSV")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def _apply_flags(manifest: ExperimentManifest, args) -> ExperimentManifest:
    cfg = manifest.config
    changes = {}
    if args.scheme:
        changes["schemes"] = ALL_SCHEMES if args.scheme == "all" else (SchemeId(args.scheme),)
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            raise ManifestError("expected an unsigned 64-bit integer", "seed")
        changes["seed"] = args.seed
    for flag, attr in (("realizations", "num_realizations"), ("slots", "num_slots")):
        v = getattr(args, flag)
        if v is not None:
            if v < 1:
                raise ManifestError("must be >= 1", flag)
            changes[attr] = v
    if args.sweep == "none":
        changes["sweep"] = None
    elif args.sweep:
        values = args.sweep_values or DEFAULT_SWEEPS[args.sweep]
        try:
            changes["sweep"] = Sweep(args.sweep, tuple(values))
        except ValueError as exc:
            raise ManifestError(str(exc), "sweep_values") from None
    elif args.sweep_values:
        if cfg.sweep is None:
            raise ManifestError("needs --sweep or a manifest sweep_param", "sweep_values")
        changes["sweep"] = Sweep(cfg.sweep.param, tuple(args.sweep_values))
    sweep = changes.get("sweep", cfg.sweep)
    if sweep and sweep.param == "p_max" and min(sweep.values) <= cfg.params.circuit_power:
        raise ManifestError("every p_max must exceed circuit_power", "sweep_values")
    out = dataclasses.replace(manifest, config=dataclasses.replace(cfg, **changes))
    if args.output is not None:
        out = dataclasses.replace(out, output_dir=args.output)
    if args.emit_trace:
        out = dataclasses.replace(out, emit_trace=True)
    return out


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        manifest = load_manifest(args.config) if args.config else manifest_from_mapping({})
        manifest = _apply_flags(manifest, args)
    except (OSError, ManifestError) as exc:
        print(f"noma-mec: error: {exc}", file=sys.stderr)
        return 2

    out = manifest.output_dir
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write_test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        print(f"noma-mec: error: cannot write to {out}: {exc}", file=sys.stderr)
        return 2

    def progress(done, total):
        if done % max(1, total // 20) == 0:
            log.info("%d/%d episodes", done, total)

    result = run_experiment(manifest.config, keep_traces=manifest.emit_trace, progress=progress)
    write_summary(result, out / "summary.csv")
    if manifest.emit_trace:
        write_trace(result, out / "trace.csv")
    if manifest.emit_figure_data:
        write_figure_data(result, out)
    write_metadata(manifest, out / "metadata.json")
    log.info("wrote results to %s", out)
    return 0


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
