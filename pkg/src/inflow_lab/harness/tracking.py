"""Optional MLflow tracking of experiment runs."""

import logging
import math
import os
from pathlib import Path
from typing import Iterable, Optional

import mlflow

from .report import SolveReport, plain

logger = logging.getLogger(__name__)

DEFAULT_EXPERIMENT = "inflow_lab"


def tracking_enabled(flag: bool = False) -> bool:
    """True when requested on the command line or through ``INFLOW_LAB_MLFLOW=1``."""
    return flag or os.getenv("INFLOW_LAB_MLFLOW", "").strip().lower() in ("1", "true", "yes")


def configure_tracking() -> str:
    """Point MLflow at ``MLFLOW_TRACKING_URI`` (if set) and select the experiment.

    Returns:
        The experiment name in use.
    """
    uri = os.getenv("MLFLOW_TRACKING_URI")
    if uri:
        mlflow.set_tracking_uri(uri)
    experiment = os.getenv("MLFLOW_EXPERIMENT", DEFAULT_EXPERIMENT)
    mlflow.set_experiment(experiment)
    logger.info("MLflow tracking to %s, experiment %s", uri or "default store", experiment)
    return experiment


def _flatten(prefix: str, value, out: dict) -> None:
    if isinstance(value, dict):
        for key, item in value.items():
            _flatten(f"{prefix}.{key}" if prefix else str(key), item, out)
    else:
        out[prefix] = value


def log_report(report: SolveReport, artifacts: Iterable[Path] = ()) -> None:
    """Log parameters, scalar monitors, verdicts and the written files as one run."""
    params: dict = {}
    _flatten("", report.config.get("params", {}), params)
    with mlflow.start_run(run_name=f"{report.module}:{report.preset}"):
        mlflow.set_tags({"module": report.module, "preset": report.preset})
        mlflow.log_params({k: str(v)[:250] for k, v in params.items()})
        metrics = {}
        for key, value in plain(report.monitors).items():
            if isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value):
                metrics[key] = float(value)
        for verdict in report.verdicts:
            metrics[f"verdict.{verdict.criterion}"] = 1.0 if verdict.passed else 0.0
            if isinstance(verdict.value, (int, float)) and math.isfinite(verdict.value):
                metrics[f"value.{verdict.criterion}"] = float(verdict.value)
        mlflow.log_metrics(metrics)
        for path in artifacts:
            mlflow.log_artifact(str(path))


def maybe_log_report(report: SolveReport, artifacts: Iterable[Path] = (), enabled: Optional[bool] = None) -> bool:
    """Log the report when tracking is enabled; tracking failures are reported, never raised."""
    if not tracking_enabled(bool(enabled)):
        return False
    try:
        configure_tracking()
        log_report(report, artifacts)
    except Exception as exc:
        logger.warning("MLflow logging failed: %s", exc)
        return False
    return True
