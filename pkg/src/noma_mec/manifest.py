"""Experiment manifests: a flat YAML mapping in natural units.

Example::

    bandwidth: 1 MHz
    noise_power: -60 dBm
    pathloss_const: -40 dB
    f_max: 2.15 GHz
    dist_to_mec: [80, 40]
    dist_to_eve: [120, 80]
    sweep_param: p_max
    sweep_values: [0.25, 0.5, 1.0, 1.5, 2.0]

Bare numbers are taken as SI. Every key is optional; missing keys take the
default two-user setting. Unknown keys are rejected.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Optional

import yaml

from .model import SystemParams, UserGeometry
from .queueing import ArrivalModel
from .schemes import ALL_SCHEMES, SchemeId
from .sim import SimConfig, Sweep


class ManifestError(ValueError):
    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        self.message = message
        self.key = key
        self.line = line
        where = f"line {line}: " if line else ""
        super().__init__(f"{where}{key + ': ' if key else ''}{message}")


_SCALE = {
    "frequency": {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9},
    "power": {"w": 1.0, "mw": 1e-3, "uw": 1e-6},
    "time": {"s": 1.0, "ms": 1e-3},
    "distance": {"m": 1.0, "km": 1e3},
    "bits": {"bit": 1.0, "bits": 1.0, "kbit": 1e3, "kbits": 1e3, "mbit": 1e6, "mbits": 1e6},
    "gain": {},
    "plain": {},
}

# manifest key -> (SystemParams field, unit kind)
PARAM_KEYS = {
    "bandwidth": ("bandwidth", "frequency"),
    "slot_duration": ("slot_duration", "time"),
    "pathloss_exponent": ("pathloss_exponent", "plain"),
    "pathloss_const": ("pathloss_const", "gain"),
    "ref_distance": ("ref_distance", "distance"),
    "noise_power": ("noise_power", "power"),
    "kappa": ("kappa", "plain"),
    "cycles_per_bit": ("cycles_per_bit", "plain"),
    "amp_coeff": ("amp_coeff", "plain"),
    "circuit_power": ("circuit_power", "power"),
    "p_max": ("p_max", "power"),
    "f_max": ("f_max", "frequency"),
    "lyapunov_v": ("lyapunov_v", "plain"),
}
OTHER_KEYS = {
    "num_users", "dist_to_mec", "dist_to_eve", "arrival_low", "arrival_high",
    "num_slots", "num_realizations", "seed", "scheme", "sweep_param", "sweep_values",
    "initial_queue", "output_dir", "emit_trace", "emit_figure_data",
}

DEFAULT_SWEEPS = {
    "task_length": (1.5e6, 1.875e6, 2.25e6, 2.625e6, 3.0e6),
    "eve_distance": (0.5, 0.75, 1.0, 1.5, 2.0),
    "p_max": (0.25, 0.5, 1.0, 1.5, 2.0),
}

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z]*)\s*$")


def parse_quantity(value: Any, kind: str, key: str = "") -> float:
    """Convert ``value`` (number or "<number> <unit>") to SI."""
    if isinstance(value, bool):
        raise ManifestError(f"expected a number, got {value!r}", key)
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ManifestError(f"expected a number, got {value!r}", key)
    m = _QUANTITY.match(value)
    if not m:
        raise ManifestError(f"cannot parse quantity {value!r}", key)
    x, unit = float(m.group(1)), m.group(2).lower()
    if not unit:
        return x
    if kind == "power" and unit == "dbm":
        return 10.0 ** ((x - 30.0) / 10.0)
    if kind == "power" and unit == "dbw":
        return 10.0 ** (x / 10.0)
    if kind == "gain" and unit == "db":
        return 10.0 ** (x / 10.0)
    scale = _SCALE[kind].get(unit)
    if scale is None:
        raise ManifestError(f"unit {m.group(2)!r} not valid here", key)
    return x * scale


@dataclass(frozen=True)
class ExperimentManifest:
    config: SimConfig
    output_dir: Path = Path("results")
    emit_trace: bool = False
    emit_figure_data: bool = True


def _as_int(raw, key: str, minimum: int) -> int:
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise ManifestError(f"expected an integer, got {raw!r}", key)
    if raw < minimum:
        raise ManifestError(f"must be >= {minimum}, got {raw}", key)
    return raw


def _as_bool(raw, key: str) -> bool:
    if not isinstance(raw, bool):
        raise ManifestError(f"expected true/false, got {raw!r}", key)
    return raw


def _as_list(raw, key: str, kind: str) -> list:
    if not isinstance(raw, (list, tuple)):
        raw = [raw]
    return [parse_quantity(v, kind, key) for v in raw]


def manifest_from_mapping(doc: Optional[dict]) -> ExperimentManifest:
    doc = dict(doc or {})
    unknown = sorted(set(doc) - set(PARAM_KEYS) - OTHER_KEYS)
    if unknown:
        raise ManifestError("unknown key", unknown[0])

    kwargs = {}
    for key, (attr, kind) in PARAM_KEYS.items():
        if key in doc:
            kwargs[attr] = parse_quantity(doc[key], kind, key)
    try:
        params = SystemParams(**kwargs)
    except ValueError as exc:
        msg = str(exc)
        bad = next((k for k, (a, _) in PARAM_KEYS.items() if msg.startswith(a)), None)
        raise ManifestError(msg, bad) from None

    d_b = _as_list(doc.get("dist_to_mec", [80.0, 40.0]), "dist_to_mec", "distance")
    d_e = _as_list(doc.get("dist_to_eve", [120.0, 80.0]), "dist_to_eve", "distance")
    if len(d_b) != len(d_e):
        raise ManifestError("dist_to_mec and dist_to_eve need the same length", "dist_to_eve")
    if "num_users" in doc and _as_int(doc["num_users"], "num_users", 1) != len(d_b):
        raise ManifestError(f"does not match the {len(d_b)} distances given", "num_users")
    for key, ds in (("dist_to_mec", d_b), ("dist_to_eve", d_e)):
        if any(d < params.ref_distance for d in ds):
            raise ManifestError(f"distances must be >= ref_distance ({params.ref_distance} m)", key)
    geometry = tuple(UserGeometry(b, e) for b, e in zip(d_b, d_e))

    low = parse_quantity(doc.get("arrival_low", 1e6), "bits", "arrival_low")
    high = parse_quantity(doc.get("arrival_high", 2e6), "bits", "arrival_high")
    if low < 0:
        raise ManifestError("must be >= 0", "arrival_low")
    if high < low:
        raise ManifestError("must be >= arrival_low", "arrival_high")

    scheme = doc.get("scheme", "all")
    schemes = _parse_schemes(scheme)

    sweep = None
    sweep_param = doc.get("sweep_param", "none")
    if sweep_param not in ("none", None):
        if sweep_param not in DEFAULT_SWEEPS:
            raise ManifestError(f"expected one of {sorted(DEFAULT_SWEEPS)} or none", "sweep_param")
        kind = {"task_length": "bits", "eve_distance": "plain", "p_max": "power"}[sweep_param]
        values = _as_list(doc.get("sweep_values", DEFAULT_SWEEPS[sweep_param]), "sweep_values", kind)
        if not values or any(v <= 0 for v in values):
            raise ManifestError("values must be positive", "sweep_values")
        if sweep_param == "p_max" and any(v <= params.circuit_power for v in values):
            raise ManifestError("every p_max must exceed circuit_power", "sweep_values")
        sweep = Sweep(sweep_param, tuple(values))
    elif "sweep_values" in doc:
        raise ManifestError("given without sweep_param", "sweep_values")

    seed = doc.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ManifestError("expected an unsigned 64-bit integer", "seed")
    initial_queue = parse_quantity(doc.get("initial_queue", 0.0), "bits", "initial_queue")
    if initial_queue < 0:
        raise ManifestError("must be >= 0", "initial_queue")

    config = SimConfig(
        params=params,
        geometry=geometry,
        arrival=ArrivalModel(low, high),
        num_slots=_as_int(doc.get("num_slots", 1000), "num_slots", 1),
        num_realizations=_as_int(doc.get("num_realizations", 1000), "num_realizations", 1),
        seed=seed,
        schemes=schemes,
        sweep=sweep,
        initial_queue=initial_queue,
    )
    return ExperimentManifest(
        config=config,
        output_dir=Path(str(doc.get("output_dir", "results"))),
        emit_trace=_as_bool(doc.get("emit_trace", False), "emit_trace"),
        emit_figure_data=_as_bool(doc.get("emit_figure_data", True), "emit_figure_data"),
    )


def _parse_schemes(raw) -> tuple:
    names = raw if isinstance(raw, (list, tuple)) else [raw]
    if names == ["all"]:
        return ALL_SCHEMES
    try:
        return tuple(SchemeId(n) for n in names)
    except ValueError:
        raise ManifestError(f"unknown scheme in {raw!r}", "scheme") from None


def load_manifest(path) -> ExperimentManifest:
    """Read and validate a manifest file; an empty file gives the defaults."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        raise ManifestError(exc.problem or str(exc), line=mark.line + 1 if mark else None) from None
    if doc is not None and not isinstance(doc, dict):
        raise ManifestError("top level must be a key-value mapping", line=1)
    try:
        return manifest_from_mapping(doc)
    except ManifestError as exc:
        line = _key_lines(text).get(exc.key)
        if line is None or exc.line is not None:
            raise
        raise ManifestError(exc.message, exc.key, line) from None


def _key_lines(text: str) -> dict:
    node = yaml.compose(text)
    if not isinstance(node, yaml.MappingNode):
        return {}
    return {k.value: k.start_mark.line + 1 for k, _ in node.value if isinstance(k, yaml.ScalarNode)}


def with_overrides(manifest: ExperimentManifest, **changes) -> ExperimentManifest:
    """Apply CLI overrides (None means keep) and re-validate the config."""
    cfg_changes = {k: v for k, v in changes.items() if k in {f.name for f in fields(SimConfig)} and v is not None}
    top = {k: v for k, v in changes.items() if k in {f.name for f in fields(ExperimentManifest)} and v is not None}
    return replace(manifest, config=replace(manifest.config, **cfg_changes), **top)
