"""Curve and regressor CSV files, run configs and manifests."""

from __future__ import annotations

import configparser
import csv
import io
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .experiments import CurveSeries

OUTPUT_DIR_ENV = "PRIORBOUNDS_OUTPUT_DIR"
CURVE_COLUMNS = ("series", "label", "n", "value", "std_error")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def curves_to_csv(series_list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CURVE_COLUMNS)
    for s in series_list:
        for n, value, se in s.points:
            w.writerow([s.series, s.label, int(n), _fmt(value), _fmt(se)])
    return buf.getvalue()


def write_curves_csv(series_list, path) -> Path:
    path = Path(path)
    path.write_bytes(curves_to_csv(series_list).encode("utf-8"))
    return path


def read_curves_csv(path) -> list[CurveSeries]:
    """Parse a curve CSV back into series, preserving first-appearance order."""
    out: dict[str, CurveSeries] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CURVE_COLUMNS:
            raise ValueError(f"expected columns {','.join(CURVE_COLUMNS)}")
        for row in reader:
            s = out.setdefault(row["series"], CurveSeries(row["series"], row["label"]))
            s.points.append((int(row["n"]), float(row["value"]), float(row["std_error"])))
    for s in out.values():
        s.__post_init__()
    return list(out.values())


def read_regressors_csv(path) -> np.ndarray:
    """Regressor CSV with rows ``i`` (samples) and columns ``j`` (coordinates), returned as ``(d, n)``."""
    data = np.loadtxt(path, delimiter=",", dtype=float, ndmin=2)
    if not np.all(np.isfinite(data)):
        raise ValueError("regressors must be finite")
    return data.T.copy()


def write_regressors_csv(Z, path) -> None:
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    np.savetxt(path, Z.T, delimiter=",", fmt="%.17g")


def default_output_dir() -> Path:
    return Path(os.environ.get(OUTPUT_DIR_ENV, "."))


@dataclass
class RunConfig:
    """Fully resolved parameters of one experiment run.

    Lists are stored as comma-separated text in manifests.
    """

    experiment: str = "bernoulli"
    prior: str = "beta:1,2"
    n_list: list = field(default_factory=list)
    seed: int = 0
    num_datasets: int = 10_000
    sizes: list = field(default_factory=lambda: [5, 15, 50])
    support_size: int = 400
    num_exponents: int = 50
    loss_slope: float = 100.0
    loss_csv: str = ""
    z_csv: str = ""
    zp_csv: str = ""
    dim: int = 3
    num_samples: int = 10
    zp_scale: float = 2.0
    lam: float = 1.0
    tv: str = "auto"
    info: str = "best"
    enumeration_cap: int = 10**6
    gfano_rtol: float = 1e-6
    separation_threshold: float = 4.0
    svg: bool = False
    log_x: bool = True
    log_y: bool = True

    def to_manifest(self) -> str:
        cp = configparser.ConfigParser(interpolation=None)
        cp["run"] = {k: _to_text(v) for k, v in asdict(self).items()}
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        cp = configparser.ConfigParser(interpolation=None)
        if not cp.read(path, encoding="utf-8"):
            raise FileNotFoundError(path)
        if "run" not in cp:
            raise ValueError(f"{path}: missing [run] section")
        return cls().updated(dict(cp["run"]))

    def updated(self, values: dict) -> "RunConfig":
        """Copy with ``values`` (text or native) applied; unknown keys are rejected."""
        known = {f.name: f for f in fields(self)}
        current = asdict(self)
        for key, raw in values.items():
            if key not in known:
                raise ValueError(f"unknown config key {key!r}")
            current[key] = _from_text(raw, type(getattr(self, key)), key)
        return RunConfig(**current)


def _to_text(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, list):
        return ",".join(_to_text(x) for x in v)
    if isinstance(v, float):
        return _fmt(v)
    return str(v)


def _from_text(raw, kind, key):
    if not isinstance(raw, str):
        return list(raw) if kind is list else kind(raw)
    text = raw.strip()
    try:
        if kind is bool:
            if text.lower() in ("1", "true", "yes", "on"):
                return True
            if text.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if kind is list:
            return [int(x) for x in text.split(",") if x.strip()]
        return kind(text)
    except ValueError as exc:
        raise ValueError(f"bad value for {key}: {raw!r}") from exc
