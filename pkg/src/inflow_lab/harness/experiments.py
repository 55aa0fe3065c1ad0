"""Experiment configs and their dispatch to the solver modules."""

import json
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Mapping, Optional, Union

import numpy as np

from ..config import ModuleName, get_config
from ..errors import ConfigurationError, DivergenceError, InflowLabError, StabilityBudgetError
from ..pipe import (
    EulerSettings,
    PipeBoundaryData,
    PipeGrid,
    ShearProfile,
    boundary_from_spec,
    check_compatibility,
    divcurl_refinement,
    divcurl_solve,
    euler_solve,
    lateral_invariance_check,
    profile_from_spec,
)
from ..solvers import SolverSettings, outer_solve, shock_contrast, sine_problem, zero_problem
from ..transport import (
    Datum,
    TransportProblem1D,
    WeightParams,
    check_weighted_sup_estimate,
    decay_series,
    flush_check,
    solve_mild,
    speed_from_spec,
    trace,
)
from .presets import MODULE_ALIASES, SUITE, get_preset
from .report import Provenance, SolveReport, atomic_write, plain
from .tracking import maybe_log_report

logger = logging.getLogger(__name__)

GRID_RANGES = {
    ModuleName.TRANSPORT1D: (16, 1024),
    ModuleName.HYP1D: (16, 1024),
    ModuleName.PIPE3D: (16, 64),
    ModuleName.DIVCURL: (16, 64),
}


def _is_power_of_two(n: Any) -> bool:
    return isinstance(n, int) and not isinstance(n, bool) and n > 0 and n & (n - 1) == 0


@dataclass
class ExperimentConfig:
    """One experiment: module, preset, parameter overrides and seed.

    Attributes:
        module: Module to dispatch to.
        preset: Preset name; supplies the default parameters.
        params: Overrides of the preset parameters.
        seed: Seed of the randomized sampling in property checks.
        output_dir: Report directory; defaults to ``<config output_dir>/<preset>``.
    """
    module: ModuleName
    preset: str
    params: dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    output_dir: Optional[Path] = None

    def __post_init__(self):
        try:
            self.module = ModuleName(self.module)
        except ValueError:
            raise ConfigurationError(f"unknown module '{self.module}'",
                                     details={"available": [m.value for m in ModuleName]}) from None
        if isinstance(self.output_dir, str):
            self.output_dir = Path(self.output_dir)
        self.params = dict(self.params or {})

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ExperimentConfig":
        unknown = set(data) - {"module", "preset", "params", "seed", "output_dir"}
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        if "module" not in data or "preset" not in data:
            raise ConfigurationError("config needs 'module' and 'preset'")
        return cls(
            module=data["module"],
            preset=data["preset"],
            params=data.get("params") or {},
            seed=data.get("seed", 0),
            output_dir=data.get("output_dir"),
        )

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> "ExperimentConfig":
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigurationError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(data)

    def resolved_params(self) -> dict[str, Any]:
        """Preset defaults overridden by ``params``."""
        merged = dict(get_preset(self.preset).params)
        merged.update(self.params)
        return merged

    def validate(self) -> dict[str, Any]:
        """Check preset, module, ranges and seed.

        Returns:
            The resolved parameters.

        Raises:
            ConfigurationError: On any violation.
        """
        preset = get_preset(self.preset)
        allowed = MODULE_ALIASES.get(preset.module, {preset.module})
        if self.module not in allowed:
            raise ConfigurationError(
                f"preset '{self.preset}' belongs to module '{preset.module.value}'",
                details={"module": self.module.value},
            )
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or not 0 <= self.seed < 2**64:
            raise ConfigurationError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        params = self.resolved_params()
        for key, value in params.items():
            if ("tol" in key or key in ("horizon", "amplitude_limit")) and isinstance(value, (int, float)):
                if value <= 0:
                    raise ConfigurationError(f"parameter '{key}' must be positive, got {value}")
        low, high = GRID_RANGES.get(preset.module, (16, 1024))
        grids = list(params.get("grids", [])) + [params[key] for key in ("grid", "refine_grid") if key in params]
        for n in grids:
            if not _is_power_of_two(n) or not low <= n <= high:
                raise ConfigurationError(
                    f"grid size {n!r} must be a power of two in [{low}, {high}]",
                    details={"module": preset.module.value},
                )
        return params

    def to_dict(self) -> dict[str, Any]:
        """Canonical form used for hashing; the output directory is left out."""
        return {"module": self.module.value, "preset": self.preset, "params": self.resolved_params(),
                "seed": self.seed}


def _sine_datum() -> Datum:
    return Datum(func=lambda x: np.sin(np.pi * x), sup=1.0, lip=np.pi,
                 deriv=lambda x: np.pi * np.cos(np.pi * x), name="sin(pi x)")


def _weight(speed, params: Mapping[str, Any], horizon: float) -> WeightParams:
    return WeightParams.for_speed(speed, t_max=horizon, alpha=params.get("alpha"))


def series_gap(t_a, a, t_b, b) -> tuple[float, float]:
    """Largest absolute and relative gap between two sampled series.

    ``b`` is interpolated linearly onto the samples of ``a`` inside the time
    range both cover; the relative gap is taken against ``max |a|``.
    """
    t_a, a = np.asarray(t_a, dtype=float), np.asarray(a, dtype=float)
    t_b, b = np.asarray(t_b, dtype=float), np.asarray(b, dtype=float)
    inside = t_a <= min(t_a[-1], t_b[-1]) + 1e-12
    gap = float(np.max(np.abs(a[inside] - np.interp(t_a[inside], t_b, b))))
    scale = float(np.max(np.abs(a[inside])))
    return gap, gap / scale if scale > 0 else gap


def _run_transport1d(report: SolveReport, params: dict, rng: np.random.Generator) -> None:
    speed = speed_from_spec(params.get("speed", 1.0))
    grid = int(params.get("grid", 256))
    case = params.get("case", "translation")

    if case == "translation":
        if not speed.name.startswith("constant"):
            raise ConfigurationError("translation needs a constant speed")
        c = float(speed.eval(0.0, 0.0))
        problem = TransportProblem1D(speed=speed, f0=_sine_datum())
        times = np.concatenate([[float(params.get("t", 0.5))],
                                rng.uniform(0.0, 2.0 / abs(c), int(params.get("random_times", 0)))])
        errors = []
        for t in times:
            field_t = solve_mild(problem, float(t), grid)
            shifted = field_t.x - c * t
            exact = np.where(np.abs(shifted) <= 1.0, np.sin(np.pi * shifted), 0.0)
            errors.append(float(np.max(np.abs(field_t.values - exact))))
        report.add_series("translation", {"t": times, "sup_error": errors})
        report.add_verdict("transport-exactness", max(errors) <= params.get("tol", 1e-8),
                           max(errors), params.get("tol", 1e-8))

    elif case == "flush":
        problem = TransportProblem1D(speed=speed, f0=_sine_datum())
        flush_time = 2.0 / speed.lambda_m
        weights = _weight(speed, params, 2.0 * flush_time)
        times = np.linspace(0.0, 2.0 * flush_time, int(params.get("samples", 50)))
        decay = decay_series(problem, weights, times, grid)
        flush = flush_check(problem, grid)
        report.add_series("decay", {"t": decay.times, "weighted_sup": decay.lhs, "bound": decay.bound})
        report.monitors.update({"flush_time": flush.flush_time, "alpha": weights.alpha,
                                "lambda_m": weights.lambda_m})
        report.add_verdict("weighted-decay", decay.passed, decay.worst_ratio, 1.0 + 1e-6)
        report.add_verdict("flush", flush.passed, float(np.max(flush.sup_after)), 1e-12)

    elif case == "saturation":
        if not speed.name.startswith("constant"):
            raise ConfigurationError("saturation needs a constant speed")
        c = float(speed.eval(0.0, 0.0))
        h = float(params.get("forcing", 1.0))
        horizon = float(params.get("horizon", 4.0))
        problem = TransportProblem1D(speed=speed, h=Datum.constant(h))
        weights = _weight(speed, params, horizon)
        estimate = check_weighted_sup_estimate(problem, weights, horizon, grid, int(params.get("samples", 50)))
        final = solve_mild(problem, horizon, grid)
        distance = final.x - speed.inflow_point if c > 0 else speed.inflow_point - final.x
        exact = h * np.minimum(horizon, distance / abs(c))
        error = float(np.max(np.abs(final.values - exact)))
        report.add_series("estimate", {"t": estimate.times, "weighted_sup": estimate.lhs_series})
        report.monitors.update({"estimate_rhs": estimate.rhs, **estimate.components})
        report.add_verdict("weighted-sup-estimate", estimate.passed, estimate.lhs, estimate.rhs)
        report.add_verdict("saturation-profile", error <= 1e-8, error, 1e-8)

    else:
        raise ConfigurationError(f"unknown transport1d case '{case}'")


def _run_hyp1d(report: SolveReport, params: dict, rng: np.random.Generator) -> None:
    case = params.get("case", "stability")
    grid = int(params.get("grid", 256))

    if case == "stability":
        system = params.get("system", "burgers")
        amplitude = float(params.get("amplitude", 1e-2))
        if amplitude == 0.0:
            problem = zero_problem(system)
        else:
            problem = sine_problem(system, amplitude, mode=int(params.get("mode", 1)),
                                   component=int(params.get("component", 0)),
                                   pulse=float(params.get("pulse", 0.0)))
        settings = SolverSettings(grid=grid, horizon=float(params.get("horizon", get_config().horizon)),
                                  l_max=int(params.get("l_max", 12)))
        result = outer_solve(problem, settings)
        report.add_series("norms", result.series())
        report.tables["levels"] = [level.to_dict() for level in result.levels]
        report.monitors.update({
            "data_norm": result.data_norm,
            "solution_norm": result.solution_norm,
            "empirical_constant": result.empirical_constant,
            "converged_level": result.converged_level,
        })
        report.add_verdict("outer-convergence", result.converged,
                           result.converged_level, settings.l_max)
        limit = params.get("contraction_limit")
        if limit is not None:
            ratios = [r for level in result.levels for r in level.inner_ratios]
            ratios += [level.outer_ratio for level in result.levels if level.outer_ratio is not None]
            worst = max(ratios, default=0.0)
            report.add_verdict("contraction", worst <= limit, worst, limit)
        report.add_verdict("w1inf-stability", result.stable, result.empirical_constant,
                           result.stability_threshold)

        refine = params.get("refine_grid")
        if refine is not None:
            fine = outer_solve(problem, replace(settings, grid=int(refine)))
            fine_norms = fine.series()["norm_sum"]
            report.add_series("refinement", {"t": fine.times, "norm_sum": fine_norms})
            gap, _ = series_gap(result.times, result.series()["norm_sum"], fine.times, fine_norms)
            tol = float(params.get("agreement_tol", 1e-4))
            report.monitors["grid_gap"] = gap
            report.add_verdict("grid-agreement", gap <= tol, gap, tol, note=f"N={grid} against N={int(refine)}")

    elif case == "shock":
        amplitude = float(params.get("amplitude", 0.05))
        mode = int(params.get("mode", 1))
        contrast = shock_contrast(amplitude, mode=mode, grid=grid, l_max=int(params.get("l_max", 12)))
        report.add_series("gradient", {"t": contrast.times, "max_grad": contrast.inflow_max_grad})
        report.monitors.update({"periodic_shock_time": contrast.periodic_shock_time,
                                "horizon": contrast.horizon, "growth": contrast.growth})
        if amplitude != 0.0:
            predicted = 1.0 / (abs(amplitude) * mode * math.pi)
            miss = abs(contrast.periodic_shock_time / predicted - 1.0)
            report.add_verdict("shock-time", miss <= 0.02, miss, 0.02)
        report.add_verdict("inflow-gradient-growth", contrast.passed, contrast.growth, 3.0)

    else:
        raise ConfigurationError(f"unknown hyp1d case '{case}'")


def swirl_velocity(amplitude: float = 0.1, c: float = 2.0) -> Callable[[float, np.ndarray], np.ndarray]:
    """Divergence-free u = (c + cos(pi x2) cos(pi x3), a curl-type swirl) tangent to the lateral faces."""
    pi = np.pi

    def u(t, Y):
        x2, x3 = Y[1], Y[2]
        return np.stack([
            c + np.cos(pi * x2) * np.cos(pi * x3),
            amplitude * pi * np.sin(pi * x2) * np.cos(pi * x3),
            -amplitude * pi * np.cos(pi * x2) * np.sin(pi * x3),
        ])

    return u


def _compat_vectors() -> dict[str, tuple[PipeBoundaryData, dict[str, float]]]:
    """Hand-built data with the conditions expected to fail and their residuals."""
    def ones(t, x2, x3):
        return np.ones(np.broadcast(t, x2, x3).shape)

    def tilted(t, x2, x3):
        shape = np.broadcast(t, x2, x3).shape
        return np.stack([np.full(shape, 0.1), np.zeros(shape), np.zeros(shape)])

    return {
        "zero": (PipeBoundaryData(), {}),
        "unbalanced-flux": (PipeBoundaryData(v_b_minus=ones, name="unbalanced-flux"), {"flux_balance": 4.0}),
        "streamwise-vorticity": (PipeBoundaryData(omega_b_minus=tilted, name="streamwise-vorticity"),
                                 {"omega_b1_zero": 0.1}),
    }


def _run_pipe3d(report: SolveReport, params: dict, rng: np.random.Generator) -> None:
    case = params.get("case", "euler")

    if case == "euler":
        profile = profile_from_spec(params.get("profile", "plug"))
        bdata = boundary_from_spec(params.get("boundary", "zero"))
        settings = EulerSettings(
            grid=int(params.get("grid", 32)),
            horizon=float(params.get("horizon", 10.0)),
            window=float(params.get("window", 1.0)),
            n_max=int(params.get("n_max", 10)),
            tol=float(params.get("tol", 1e-6)),
            epsilon=float(params.get("epsilon", get_config().epsilon)),
            dt=float(params["dt"]) if params.get("dt") is not None else None,
        )
        try:
            result = euler_solve(profile, bdata, settings)
        except (DivergenceError, StabilityBudgetError) as exc:
            report.monitors["failure"] = exc.to_dict()
            report.add_verdict("pipe-convergence", False, note=exc.message)
            report.add_verdict("pipe-stability", False, note=exc.message)
            return
        report.add_series("norms", result.series)
        report.tables["windows"] = [vars(w).copy() for w in result.windows]
        report.tables["compatibility"] = result.compat.to_dict()["conditions"]
        report.monitors.update({
            "data_norm": result.data_norm,
            "empirical_constant": result.empirical_constant,
            "converged_n": result.converged_n,
            "smallness_lhs": result.smallness["lhs"],
            "smallness_rhs": result.smallness["rhs"],
        })
        verdicts = result.verdicts()
        report.add_verdict("pipe-convergence", verdicts["converged"], result.converged_n, settings.n_max)
        for name in ("div_omega", "omega_cross_nu"):
            report.add_verdict(f"monitor-{name}", verdicts[name], float(np.max(result.series[name])),
                               result.monitor_tol[name])
        residual = float(np.max(result.series["momentum_residual"]))
        report.add_verdict("monitor-momentum", residual <= result.monitor_tol["div_omega"], residual,
                           result.monitor_tol["div_omega"])
        limit = params.get("contraction_limit")
        if limit is not None:
            worst = max((r for w in result.windows for r in w.ratios), default=0.0)
            report.add_verdict("pipe-contraction", worst <= limit, worst, limit)
        report.add_verdict("pipe-stability", verdicts["stability"], result.empirical_constant,
                           result.stability_threshold)

        refine = params.get("refine_grid")
        if refine is not None:
            rtol = float(params.get("agreement_rtol", 0.1))
            try:
                coarse = euler_solve(profile, bdata, replace(settings, grid=int(refine)))
            except (DivergenceError, StabilityBudgetError) as exc:
                report.add_verdict("grid-agreement", False, threshold=rtol, note=exc.message)
            else:
                report.add_series("refinement", {"t": coarse.series["t"], "v_w2p": coarse.series["v_w2p"]})
                _, rel = series_gap(result.series["t"], result.series["v_w2p"],
                                    coarse.series["t"], coarse.series["v_w2p"])
                report.monitors["grid_gap"] = rel
                report.add_verdict("grid-agreement", rel <= rtol, rel, rtol,
                                   note=f"{settings.grid}^3 against {int(refine)}^3")

        if params.get("epsilon_check"):
            try:
                halved = euler_solve(profile, bdata, replace(settings, epsilon=0.5 * settings.epsilon))
            except (DivergenceError, StabilityBudgetError) as exc:
                logger.warning("epsilon/2 companion run failed: %s", exc.message)
                report.monitors["epsilon_sensitivity"] = None
            else:
                _, rel = series_gap(result.series["t"], result.series["v_w2p"],
                                    halved.series["t"], halved.series["v_w2p"])
                report.monitors["epsilon_sensitivity"] = rel

    elif case == "lateral":
        tol = float(params.get("tol", 1e-8))
        lateral = lateral_invariance_check(swirl_velocity(float(params.get("swirl", 0.1))),
                                           horizon=float(params.get("horizon", 10.0)),
                                           samples=int(params.get("samples", 7)), tol=tol)
        report.add_series("drift", {"t": lateral.times, "max_drift": lateral.drift_series})
        report.add_verdict("lateral-invariance", lateral.passed, lateral.max_drift, tol)

    elif case == "compat":
        grid = PipeGrid(int(params.get("grid", 16)))
        profile = ShearProfile.plug()
        rows = []
        for name, (bdata, expected) in _compat_vectors().items():
            result = check_compatibility(profile, bdata, grid)
            failing = {c.name: c.residual for c in result.failures()}
            matches = all(key in failing and math.isclose(failing[key], value, rel_tol=1e-8)
                          for key, value in expected.items())
            matches = matches and (bool(expected) or result.passed)
            rows.append({"vector": name, "passed": result.passed, "failures": failing, "as_documented": matches})
            report.add_verdict(f"compat-{name}", matches)
        report.tables["compatibility"] = rows

    else:
        raise ConfigurationError(f"unknown pipe3d case '{case}'")


def _run_divcurl(report: SolveReport, params: dict, rng: np.random.Generator) -> None:
    grids = tuple(int(n) for n in params.get("grids", (16, 32)))
    p = float(params.get("p", 4.0))
    table = divcurl_refinement(grids, p)
    report.tables["refinement"] = table.as_rows()
    low, high = params.get("order_range", (1.7, 2.3))
    order = table.observed_order
    report.monitors["observed_order"] = order
    report.add_verdict("divcurl-order", low <= order <= high, order, high)

    finest = table.rows[-1]
    tolerance = float(params.get("residual_factor", 5.0)) * finest.h**2
    report.add_verdict("divcurl-residual", finest.curl_residual <= tolerance, finest.curl_residual, tolerance)

    grid = PipeGrid(grids[0])
    plug = divcurl_solve(grid, np.zeros((3,) + grid.shape), 1.0, 1.0, p=p)
    expected = np.zeros_like(plug.v)
    expected[0] = 1.0
    error = float(np.max(np.abs(plug.v - expected)))
    report.add_verdict("divcurl-uniqueness", error <= 1e-10, error, 1e-10)


def _run_trace(report: SolveReport, params: dict, rng: np.random.Generator) -> None:
    speed = speed_from_spec(params.get("speed", 1.0))
    t, x = float(params.get("t", 1.0)), float(params.get("x", 1.0))
    taus = np.linspace(t, 0.0, int(params.get("samples", 101)))
    xs = []
    exit_time = None
    for tau in taus:
        result = trace(speed, t, x, float(tau))
        xs.append(result.x)
        if result.exited and exit_time is None:
            exit_time = result.exit_time
    report.add_series("trace", {"tau": taus, "x": xs})
    report.monitors["exit_time"] = exit_time
    inside = bool(np.all(np.abs(np.asarray(xs)) <= 1.0 + 1e-12))
    report.add_verdict("trace-inside", inside, float(np.max(np.abs(xs))), 1.0)


RUNNERS = {
    ModuleName.TRANSPORT1D: _run_transport1d,
    ModuleName.HYP1D: _run_hyp1d,
    ModuleName.PIPE3D: _run_pipe3d,
    ModuleName.DIVCURL: _run_divcurl,
    ModuleName.TRACE: _run_trace,
}


def execute(config: ExperimentConfig) -> SolveReport:
    """Validate and run an experiment without writing anything."""
    params = config.validate()
    preset = get_preset(config.preset)
    report = SolveReport(module=config.module.value, preset=config.preset, config=config.to_dict())
    report.provenance = Provenance.create(report.config)
    logger.info("running %s/%s (seed %d)", config.module.value, config.preset, config.seed)
    RUNNERS[preset.module](report, params, np.random.default_rng(config.seed))
    return report


def output_dir_for(config: ExperimentConfig) -> Path:
    return config.output_dir or get_config().output_dir / config.preset


def run(config: ExperimentConfig, track: Optional[bool] = None) -> SolveReport:
    """Run an experiment and persist its report.

    Args:
        config: The experiment.
        track: Log the run to MLflow; ``None`` defers to ``INFLOW_LAB_MLFLOW``.

    Returns:
        The SolveReport, already written to the output directory.
    """
    report = execute(config)
    written = report.write(output_dir_for(config))
    maybe_log_report(report, written, enabled=track)
    return report


def run_suite(
    out_dir: Union[str, Path],
    seed: int = 0,
    presets: tuple[str, ...] = SUITE,
    track: Optional[bool] = None,
) -> dict[str, Any]:
    """Run the acceptance presets, one subdirectory each, and write ``suite.json``.

    A preset that raises is recorded with its structured error and the suite
    carries on.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for name in presets:
        preset = get_preset(name)
        config = ExperimentConfig(module=preset.module, preset=name, seed=seed, output_dir=out_dir / name)
        try:
            report = run(config, track=track)
            entries.append({"preset": name, "module": preset.module.value, "passed": report.passed,
                            "verdicts": {v.criterion: v.passed for v in report.verdicts}})
        except InflowLabError as exc:
            logger.error("preset %s failed: %s", name, exc.message)
            entries.append({"preset": name, "module": preset.module.value, "passed": False,
                            "error": exc.to_dict()})
    summary = {"passed": all(e["passed"] for e in entries), "presets": entries, "seed": seed}
    atomic_write(out_dir / "suite.json", json.dumps(plain(summary), sort_keys=True, indent=2) + "\n")
    return summary
