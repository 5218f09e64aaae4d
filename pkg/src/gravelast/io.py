"""CSV/manifest serialization and model-spec parsing for the CLI.

Arrays go to CSV with one leading unit-comment line, a header row, and
17-significant-digit decimals so values round-trip bit-exactly.  Each run
directory gets a JSON manifest recording inputs, results and sha256 hashes
of the emitted CSVs; wall time and timestamps live only in the manifest,
so identical reruns produce byte-identical CSVs.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .constitutive import ConstitutiveModel, make_builtin_model

PROFILE_FILE = "profile.csv"
MANIFEST_FILE = "manifest.json"
REPORT_FILE = "report.txt"

PROFILE_COLUMNS = ("R", "zeta", "f", "fprime", "lambda", "y", "c1", "c2", "rho_t0")
PROFILE_UNITS = (
    "# units: R reference radius and zeta, f, fprime, lambda, y dimensionless; "
    "c1, c2 referential stress (brho^(4/3) scale); rho_t0 mass density at t=0"
)
SWEEP_COLUMNS = (
    "mu", "brho0", "y1", "fprime0", "zeta_norm", "iters", "bc_residual", "error"
)
SWEEP_UNITS = (
    "# units: mu acceleration/length scale; brho0 mass density; "
    "y1, fprime0, zeta_norm, bc_residual dimensionless; iters count"
)
TEMPORAL_COLUMNS = ("t", "q", "qdot", "energy_drift")
TEMPORAL_UNITS = "# units: t time; q dimensionless amplitude; qdot 1/time; energy_drift specific energy"
SNAPSHOT_COLUMNS = ("R", "phi", "u", "rho")
SNAPSHOT_UNITS = "# units: R reference radius; phi current radius; u velocity; rho mass density"


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv(path: Path, comment: str, header, columns) -> None:
    rows = zip(*columns)
    lines = [comment, ",".join(header)]
    for row in rows:
        lines.append(",".join(x if isinstance(x, str) else fmt(x) for x in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_csv(path: Path) -> dict[str, list[str]]:
    lines = path.read_text(encoding="utf-8").splitlines()
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ValueError(f"{path} has no header row")
    header = lines[0].split(",")
    cols: dict[str, list[str]] = {name: [] for name in header}
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != len(header):
            raise ValueError(f"{path}: malformed row {ln!r}")
        for name, val in zip(header, parts):
            cols[name].append(val)
    return cols


def read_float_columns(path: Path, names) -> dict[str, np.ndarray]:
    cols = read_csv(path)
    out = {}
    for name in names:
        if name not in cols:
            raise ValueError(f"{path}: missing column {name!r}")
        out[name] = np.array([float(v) for v in cols[name]])
    return out


def sha256_of(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def file_entry(path: Path) -> dict:
    return {"sha256": sha256_of(path), "bytes": path.stat().st_size}


def write_manifest(path: Path, manifest: dict) -> None:
    path.write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def read_manifest(path: Path) -> dict:
    return json.loads(path.read_text(encoding="utf-8"))


def parse_model_spec(spec: str) -> ConstitutiveModel:
    """Parse "builtin:kappa=<float>" into a model; anything else is a usage error."""
    family, _, rest = spec.partition(":")
    if family != "builtin":
        raise ValueError(f"unknown model family {family!r}; supported: builtin")
    key, _, val = rest.partition("=")
    if key != "kappa" or not val:
        raise ValueError(f"builtin model spec must be builtin:kappa=<float>, got {spec!r}")
    try:
        kappa = float(val)
    except ValueError as exc:
        raise ValueError(f"bad kappa in model spec {spec!r}") from exc
    return make_builtin_model(kappa)


def read_config(path: Path) -> dict[str, str]:
    """Flat UTF-8 key = value file; '#' starts a comment."""
    out: dict[str, str] = {}
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}: expected key = value, got {raw!r}")
        key, val = line.split("=", 1)
        out[key.strip()] = val.strip()
    return out
