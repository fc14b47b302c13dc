"""Reading and writing configs, traces, spectra and reports."""

from __future__ import annotations

import csv
import io
import json
import os
import re
import tempfile
from dataclasses import fields
from importlib import resources
from pathlib import Path

import numpy as np

from slitaudit.audit import ObservedFeatures
from slitaudit.geometry import ApparatusConfig
from slitaudit.spectral import PowerSpectrum, r_from_log_powers
from slitaudit.synthesis import Trace

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib


class InputError(ValueError):
    """A config, trace or features file could not be used."""


LENGTH_UNITS = {"nm": 1e-9, "um": 1e-6, "μm": 1e-6, "µm": 1e-6, "mm": 1e-3, "cm": 1e-2, "m": 1.0}
POWER_UNITS = {"uW": 1e-6, "µW": 1e-6, "μW": 1e-6, "mW": 1e-3, "W": 1.0}

# config key -> (ApparatusConfig field, unit table)
CONFIG_KEYS = {
    "wavelength": ("wavelength", LENGTH_UNITS),
    "slit_width": ("slit_width_a", LENGTH_UNITS),
    "slit_separation": ("slit_separation_d", LENGTH_UNITS),
    "screen_distance": ("screen_distance_D", LENGTH_UNITS),
    "pixel_pitch": ("pixel_pitch", LENGTH_UNITS),
    "beam_power": ("beam_power", POWER_UNITS),
    "beam_diameter": ("beam_diameter", LENGTH_UNITS),
}

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([^\s\d].*?)\s*$")


def parse_quantity(text: str, units: dict[str, float]) -> float:
    """Convert a string such as ``"632.8 nm"`` or ``"0.5 mW"`` to SI."""
    match = _QUANTITY.match(str(text))
    if not match:
        raise InputError(f"cannot parse quantity {text!r}; expected '<number> <unit>'")
    value, unit = match.groups()
    if unit not in units:
        raise InputError(f"unknown unit {unit!r} in {text!r}; allowed: {', '.join(units)}")
    return float(value) * units[unit]


def _read_toml(path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    try:
        with path.open("rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise InputError(f"{path}: {exc}") from exc


def config_from_dict(data: dict) -> ApparatusConfig:
    data = dict(data)
    metadata = data.pop("metadata", {})
    unknown = set(data) - set(CONFIG_KEYS) - {"pixel_count"}
    if unknown:
        raise InputError(f"unknown config keys: {', '.join(sorted(unknown))}")
    missing = {"wavelength", "slit_width", "slit_separation", "screen_distance"} - set(data)
    if missing:
        raise InputError(f"missing config keys: {', '.join(sorted(missing))}")
    kwargs = {}
    for key, (name, units) in CONFIG_KEYS.items():
        if key in data:
            if not isinstance(data[key], str):
                raise InputError(f"{key} needs an explicit unit, e.g. \"10 um\"")
            kwargs[name] = parse_quantity(data[key], units)
    if "pixel_count" in data:
        kwargs["pixel_count"] = data["pixel_count"]
    return ApparatusConfig(**kwargs, metadata=metadata)


def load_config(path) -> ApparatusConfig:
    return config_from_dict(_read_toml(path))


def reference_config_path() -> Path:
    return Path(str(resources.files("slitaudit") / "data" / "reference_config.toml"))


def recorded_features_path() -> Path:
    return Path(str(resources.files("slitaudit") / "data" / "recorded_features.toml"))


def load_features(path) -> ObservedFeatures:
    """Manual feature override, e.g. values read off a published figure."""
    data = _read_toml(path)
    table = dict(data.get("features", {}))
    spectrum = data.get("spectrum", {})
    if "r_value" not in table and {"p_k_log10", "p_1_log10"} <= set(spectrum):
        table["r_value"] = r_from_log_powers(spectrum["p_k_log10"], spectrum["p_1_log10"])
    table.setdefault("notes", {}).update(data.get("notes", {}))
    if spectrum:
        table["notes"]["spectrum"] = spectrum
    known = {f.name for f in fields(ObservedFeatures)}
    unknown = set(table) - known
    if unknown:
        raise InputError(f"unknown feature keys: {', '.join(sorted(unknown))}")
    return ObservedFeatures(**table)


def _meta_lines(trace: Trace) -> list[str]:
    return [
        f"# pixel_pitch={trace.pixel_pitch!r}",
        f"# center_pixel={float(trace.center_pixel)!r}",
        f"# unit={trace.unit}",
    ]


def trace_to_csv(trace: Trace) -> str:
    out = io.StringIO()
    out.write("\n".join(_meta_lines(trace)) + "\n")
    out.write("pixel_index,intensity\n")
    for i, value in enumerate(trace.samples):
        out.write(f"{i},{float(value)!r}\n")
    return out.getvalue()


def read_trace(path) -> Trace:
    """Read a ``pixel_index,intensity`` CSV; leading ``# key=value`` lines carry metadata."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    meta = {}
    rows = []
    header_seen = False
    with path.open(newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            if stripped.startswith("#"):
                key, _, value = stripped[1:].partition("=")
                meta[key.strip()] = value.strip()
                continue
            if not header_seen:
                header = [h.strip() for h in next(csv.reader([stripped]))]
                if header != ["pixel_index", "intensity"]:
                    raise InputError(f"{path}:{lineno}: expected header 'pixel_index,intensity'")
                header_seen = True
                continue
            parts = stripped.split(",")
            try:
                if len(parts) != 2:
                    raise ValueError
                index, value = int(parts[0]), float(parts[1])
            except ValueError:
                raise InputError(f"{path}:{lineno}: malformed row {stripped!r}") from None
            if index != len(rows):
                raise InputError(f"{path}:{lineno}: expected pixel_index {len(rows)}, got {index}")
            rows.append(value)
    if not rows:
        raise InputError(f"{path}: trace is empty")
    try:
        return Trace(
            np.array(rows),
            pixel_pitch=float(meta.get("pixel_pitch", 7e-6)),
            center_pixel=float(meta["center_pixel"]) if "center_pixel" in meta else None,
            unit=meta.get("unit", "m"),
        )
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc


def spectrum_to_csv(spectrum: PowerSpectrum, log10: bool = False) -> str:
    out = io.StringIO()
    out.write("wavenumber,power,frequency\n" if not log10 else "wavenumber,log10_power,frequency\n")
    values = spectrum.log10() if log10 else spectrum.powers
    for k, p, f in zip(spectrum.wavenumbers, values, spectrum.frequencies):
        out.write(f"{int(k)},{float(p)!r},{float(f)!r}\n")
    return out.getvalue()


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


def to_json(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def atomic_write(path, text: str) -> Path:
    """Write ``text`` to a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def schema_path(name: str) -> Path:
    return Path(str(resources.files("slitaudit") / "schemas" / f"{name}.schema.json"))


def load_schema(name: str) -> dict:
    return json.loads(schema_path(name).read_text())
