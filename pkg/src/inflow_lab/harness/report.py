"""Solve reports: series, tables, verdicts and provenance, persisted as JSON and CSV."""

import csv
import hashlib
import io
import json
import logging
import os
import tempfile
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Mapping, Optional, Union

import numpy as np

from ..errors import ConfigurationError, SchemaMismatchError

logger = logging.getLogger(__name__)

REPORT_FILE = "report.json"


def plain(value: Any) -> Any:
    """Convert numpy scalars and arrays (recursively) to JSON-ready Python values.

    Non-finite floats stay floats; ``json`` writes them as ``Infinity`` and
    ``NaN`` and reads them back unchanged.
    """
    if isinstance(value, Mapping):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return plain(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, Path):
        return str(value)
    return value


def canonical_json(data: Any) -> str:
    return json.dumps(plain(data), sort_keys=True, separators=(",", ":"))


def config_hash(config: Mapping[str, Any]) -> str:
    """SHA-256 of the canonical JSON of an experiment config."""
    return hashlib.sha256(canonical_json(config).encode("utf-8")).hexdigest()


@dataclass
class Verdict:
    """Outcome of one acceptance criterion."""
    criterion: str
    passed: bool
    value: Optional[float] = None
    threshold: Optional[float] = None
    note: str = ""


@dataclass
class Provenance:
    config_hash: str
    version: str
    timestamp: str

    @classmethod
    def create(cls, config: Mapping[str, Any]) -> "Provenance":
        from .. import __version__

        return cls(
            config_hash=config_hash(config),
            version=__version__,
            timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        )


@dataclass
class SolveReport:
    """Everything a run produces.

    Attributes:
        module: Module the run dispatched to.
        preset: Preset name.
        series: Named time series, each a mapping column -> values; the first
            column is the abscissa.
        tables: Named row tables (contraction ratios, refinement studies).
        monitors: Scalar diagnostics.
        verdicts: One entry per evaluated criterion.
        config: The resolved experiment configuration.
        provenance: Config hash, package version and timestamp.
    """
    module: str
    preset: str
    series: dict[str, dict[str, list]] = field(default_factory=dict)
    tables: dict[str, list[dict]] = field(default_factory=dict)
    monitors: dict[str, Any] = field(default_factory=dict)
    verdicts: list[Verdict] = field(default_factory=list)
    config: dict[str, Any] = field(default_factory=dict)
    provenance: Optional[Provenance] = None

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def add_series(self, name: str, columns: Mapping[str, Any]) -> None:
        self.series[name] = {key: plain(np.asarray(values, dtype=float)) for key, values in columns.items()}

    def add_verdict(self, criterion: str, passed: bool, value: Optional[float] = None,
                    threshold: Optional[float] = None, note: str = "") -> Verdict:
        verdict = Verdict(criterion=criterion, passed=bool(passed),
                          value=None if value is None else plain(float(value)),
                          threshold=None if threshold is None else plain(float(threshold)),
                          note=note)
        self.verdicts.append(verdict)
        log = logger.info if verdict.passed else logger.warning
        log("%s: %s (value=%s, threshold=%s)", criterion, "pass" if verdict.passed else "FAIL",
            verdict.value, verdict.threshold)
        return verdict

    def verdict(self, criterion: str) -> Verdict:
        for v in self.verdicts:
            if v.criterion == criterion:
                return v
        raise KeyError(criterion)

    def to_dict(self) -> dict[str, Any]:
        return plain({
            "module": self.module,
            "preset": self.preset,
            "passed": self.passed,
            "series": self.series,
            "tables": self.tables,
            "monitors": self.monitors,
            "verdicts": [asdict(v) for v in self.verdicts],
            "config": self.config,
            "provenance": None if self.provenance is None else asdict(self.provenance),
        })

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "SolveReport":
        try:
            provenance = data.get("provenance")
            return cls(
                module=data["module"],
                preset=data["preset"],
                series=dict(data.get("series", {})),
                tables=dict(data.get("tables", {})),
                monitors=dict(data.get("monitors", {})),
                verdicts=[Verdict(**v) for v in data.get("verdicts", [])],
                config=dict(data.get("config", {})),
                provenance=None if provenance is None else Provenance(**provenance),
            )
        except (KeyError, TypeError) as exc:
            raise SchemaMismatchError(f"malformed report: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def write(self, out_dir: Union[str, Path]) -> list[Path]:
        """Write ``report.json`` and one ``<series>.csv`` per series.

        Returns:
            Paths of the written files.
        """
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        written = []
        for name, columns in self.series.items():
            path = out_dir / f"{name}.csv"
            atomic_write(path, series_csv(columns))
            written.append(path)
        path = out_dir / REPORT_FILE
        atomic_write(path, self.to_json())
        written.append(path)
        logger.info("wrote %d files to %s", len(written), out_dir)
        return written


def series_csv(columns: Mapping[str, list]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    names = list(columns)
    writer.writerow(names)
    for row in zip(*(columns[name] for name in names)):
        writer.writerow(["" if v is None else repr(v) if isinstance(v, float) else v for v in row])
    return buffer.getvalue()


def atomic_write(path: Union[str, Path], text: str) -> None:
    """Write through a temporary file in the same directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_report(path: Union[str, Path]) -> SolveReport:
    """Load a report from ``report.json`` or the directory holding it."""
    path = Path(path)
    if path.is_dir():
        path = path / REPORT_FILE
    if not path.exists():
        raise ConfigurationError(f"report not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaMismatchError(f"report {path} is not valid JSON: {exc}") from exc
    return SolveReport.from_dict(data)


def _numeric(values: list) -> np.ndarray:
    return np.array([np.nan if v is None else float(v) for v in values], dtype=float)


def compare(report_a: SolveReport, report_b: SolveReport) -> dict[str, Any]:
    """Per-series differences and verdict deltas between two reports.

    Columns of ``report_b`` are interpolated linearly onto the abscissa of
    ``report_a`` when the two series are sampled differently.

    Raises:
        SchemaMismatchError: Different modules, preset families or series layouts.
    """
    if report_a.module != report_b.module:
        raise SchemaMismatchError("reports come from different modules",
                                  details={"a": report_a.module, "b": report_b.module})
    if report_a.preset != report_b.preset:
        raise SchemaMismatchError("reports come from different presets",
                                  details={"a": report_a.preset, "b": report_b.preset})
    if set(report_a.series) != set(report_b.series):
        raise SchemaMismatchError("reports carry different series",
                                  details={"a": sorted(report_a.series), "b": sorted(report_b.series)})

    series_diff: dict[str, dict[str, dict[str, float]]] = {}
    for name, cols_a in report_a.series.items():
        cols_b = report_b.series[name]
        if list(cols_a) != list(cols_b):
            raise SchemaMismatchError(f"series '{name}' has different columns",
                                      details={"a": list(cols_a), "b": list(cols_b)})
        keys = list(cols_a)
        x_a, x_b = _numeric(cols_a[keys[0]]), _numeric(cols_b[keys[0]])
        same_axis = x_a.shape == x_b.shape and np.allclose(x_a, x_b, rtol=0.0, atol=1e-12)
        diffs = {}
        for key in keys[1:]:
            a, b = _numeric(cols_a[key]), _numeric(cols_b[key])
            if not same_axis:
                order = np.argsort(x_b, kind="stable")
                b = np.interp(x_a, x_b[order], b[order])
            absolute = float(np.nanmax(np.abs(a - b))) if a.size else 0.0
            scale = float(np.nanmax(np.abs(a))) if a.size else 0.0
            diffs[key] = {"abs": absolute, "rel": absolute / scale if scale > 0 else absolute}
        series_diff[name] = diffs

    verdicts_b = {v.criterion: v for v in report_b.verdicts}
    verdict_delta = {}
    for v in report_a.verdicts:
        other = verdicts_b.get(v.criterion)
        if other is None:
            continue
        verdict_delta[v.criterion] = {"a": v.passed, "b": other.passed, "changed": v.passed != other.passed}

    return {
        "module": report_a.module,
        "preset": report_a.preset,
        "series": series_diff,
        "verdicts": verdict_delta,
    }
