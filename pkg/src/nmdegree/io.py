"""CSV / JSON serialization.  Floats are written in shortest round-trip form
(``repr``), so reading a file back reproduces every double bit for bit."""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .rates import CumulativeRates, ProbabilityProfile, RateProfile, Spectrum, TimeGrid

PROFILE_TYPES = {
    "rates": RateProfile,
    "cumulative": CumulativeRates,
    "spectrum": Spectrum,
    "probabilities": ProbabilityProfile,
}
_PREFIX = {"rates": "gamma", "cumulative": "Gamma", "spectrum": "lambda", "probabilities": "p"}


class InputError(ValueError):
    """Malformed user input (CLI exit code 2)."""


def _kind(profile) -> str:
    for kind, cls in PROFILE_TYPES.items():
        if type(profile) is cls:
            return kind
    raise TypeError(f"not a profile: {type(profile).__name__}")


def fmt(x: float) -> str:
    return repr(float(x))


def profile_columns(profile, kind: str | None = None) -> tuple[list[str], list[np.ndarray]]:
    kind = kind or _kind(profile)
    prefix = _PREFIX[kind]
    first = 1 if kind in ("rates", "cumulative") else 0
    names, cols = [], []
    for j in range(profile.values.shape[1]):
        a = j + first
        if np.iscomplexobj(profile.values):
            names += [f"{prefix}_{a}_re", f"{prefix}_{a}_im"]
            cols += [profile.values[:, j].real, profile.values[:, j].imag]
        else:
            names.append(f"{prefix}_{a}")
            cols.append(profile.values[:, j])
    return names, cols


def write_table(path, names: list[str], columns: list[np.ndarray]):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(names)
    for row in zip(*columns):
        w.writerow([fmt(v) for v in row])
    Path(path).write_text(buf.getvalue())


def profile_to_csv(profile, path):
    names, cols = profile_columns(profile)
    write_table(path, ["t"] + names, [profile.times] + cols)


def profile_from_csv(path, kind: str, d: int | None = None):
    header, data = read_table(path)
    width = data.shape[1] - 1
    cls = PROFILE_TYPES[kind]
    complex_vals = cls is Spectrum
    n_comp = width // 2 if complex_vals else width
    d = d or _infer_d(n_comp + (1 if kind in ("rates", "cumulative") else 0))
    vals = data[:, 1:]
    if complex_vals:
        vals = vals[:, 0::2] + 1j * vals[:, 1::2]
    return cls(d, TimeGrid(data[:, 0]), vals)


def _infer_d(n_components: int) -> int:
    d = int(round(np.sqrt(n_components)))
    if d < 2 or d * d != n_components:
        raise InputError(f"{n_components} components do not form d^2 for any d >= 2")
    return d


def read_table(path) -> tuple[list[str], np.ndarray]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if len(rows) < 2:
        raise InputError(f"{path}: table has no data rows")
    header = [h.strip() for h in rows[0]]
    if header[0] != "t":
        raise InputError(f"{path}: first column must be 't', got {header[0]!r}")
    try:
        data = np.array([[float(v) for v in r] for r in rows[1:]])
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc
    if data.ndim != 2 or data.shape[1] != len(header):
        raise InputError(f"{path}: rows do not match the header width {len(header)}")
    return header, data


def read_rate_table(path, d: int | None = None) -> RateProfile:
    """Rate table with header ``t,gamma_1,...,gamma_{d^2-1}`` in flat Weyl order."""
    header, data = read_table(path)
    inferred = _infer_d(len(header))  # t column stands in for gamma_0
    if d is not None and d != inferred:
        raise InputError(f"{path}: table has {len(header) - 1} rates (d={inferred}), but --d {d}")
    expected = ["t"] + [f"gamma_{k}" for k in range(1, inferred ** 2)]
    if header != expected:
        raise InputError(f"{path}: header must be {','.join(expected)}")
    try:
        grid = TimeGrid(data[:, 0])
        return RateProfile(inferred, grid, data[:, 1:], provenance=f"table:{Path(path).name}")
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _encode(values: np.ndarray):
    if np.iscomplexobj(values):
        return [[[float(z.real), float(z.imag)] for z in row] for row in values]
    return values.tolist()


def profile_to_dict(profile) -> dict:
    kind = _kind(profile)
    return {"kind": kind, "d": profile.d, "grid": profile.times.tolist(),
            "values": _encode(profile.values)}


def profile_from_dict(doc: dict):
    kind = doc["kind"]
    vals = np.array(doc["values"], dtype=float)
    if kind == "spectrum":
        vals = vals[..., 0] + 1j * vals[..., 1]
    return PROFILE_TYPES[kind](int(doc["d"]), TimeGrid(doc["grid"]), vals)


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def profile_to_json(profile, path):
    Path(path).write_text(dumps(profile_to_dict(profile)))


def profile_from_json(path):
    return profile_from_dict(json.loads(Path(path).read_text()))
