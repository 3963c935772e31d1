"""Parameter sweeps over the steady-state solver.

A sweep solves every point of a 1-D or 2-D parameter grid independently,
collects photon statistics and optional distribution fits, and extracts
mean-photon-number contours.  Points are distributed over a process pool;
results land in pre-indexed slots so the output never depends on worker
scheduling.  Failed points carry explicit error records instead of being
dropped.
"""

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np

from . import photostats, qnbd
from .contours import marching_squares
from .model import SystemParams
from .steadystate import solve_converged

__all__ = [
    "Axis",
    "SweepConfig",
    "GridPoint",
    "GridResult",
    "DistributionReport",
    "run_grid",
    "run_phase_profile",
    "run_distribution_report",
    "run_validity_map",
]

DEFAULT_CONTOUR_LEVELS = (0.01, 0.1, 1.0)
DEFAULT_REL_TOL = 1e-6
KNOWN_OUTPUTS = ("csv", "json", "svg")

_PARAM_FIELDS = {f.name for f in fields(SystemParams)}


@dataclass(frozen=True)
class Axis:
    """One swept parameter: `steps` values from start to stop inclusive."""

    name: str
    start: float
    stop: float
    steps: int
    log: bool = False

    def __post_init__(self):
        if self.steps < 2:
            raise ValueError(f"axis {self.name}: steps must be >= 2, got {self.steps}")
        if self.log and (self.start <= 0 or self.stop <= 0):
            raise ValueError(f"axis {self.name}: log spacing needs positive bounds")

    def values(self):
        if self.log:
            return np.geomspace(self.start, self.stop, self.steps)
        return np.linspace(self.start, self.stop, self.steps)


@dataclass(frozen=True)
class SweepConfig:
    base: SystemParams = field(default_factory=SystemParams)
    axes: tuple = ()
    contour_levels: tuple = DEFAULT_CONTOUR_LEVELS
    outputs: tuple = ("csv", "json")
    workers: int = 1
    qnbd_fit: bool = True
    rel_tol: float = DEFAULT_REL_TOL

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))
        object.__setattr__(self, "contour_levels", tuple(self.contour_levels))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        if not 1 <= len(self.axes) <= 2:
            raise ValueError(f"need 1 or 2 axes, got {len(self.axes)}")
        names = [axis.name for axis in self.axes]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate axis names: {names}")
        for name in names:
            if name not in _PARAM_FIELDS:
                raise ValueError(
                    f"axis name {name!r} is not a system parameter "
                    f"(known: {sorted(_PARAM_FIELDS)})"
                )
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if self.rel_tol <= 0:
            raise ValueError(f"rel_tol must be > 0, got {self.rel_tol}")
        for level in self.contour_levels:
            if not (np.isfinite(level) and level > 0):
                raise ValueError(f"contour level must be positive, got {level}")
        for out in self.outputs:
            if out not in KNOWN_OUTPUTS:
                raise ValueError(f"unknown output format {out!r}; known: {KNOWN_OUTPUTS}")

    def echo(self):
        """Plain-dict snapshot for embedding in exported files."""
        return {
            "base": _params_dict(self.base),
            "axes": [
                {
                    "name": a.name,
                    "start": a.start,
                    "stop": a.stop,
                    "steps": a.steps,
                    "log": a.log,
                }
                for a in self.axes
            ],
            "contour_levels": list(self.contour_levels),
            "outputs": list(self.outputs),
            "workers": self.workers,
            "qnbd_fit": self.qnbd_fit,
            "rel_tol": self.rel_tol,
        }


def _params_dict(params):
    return {f.name: getattr(params, f.name) for f in fields(SystemParams)}


@dataclass
class GridPoint:
    """Outcome at one grid point; exactly one of statistics/error may be None.

    A vacuum point is not a failure: it carries statistics with NaN g2/Q and
    classification "undefined".  `extras` holds sweep-kind specific scalars
    (validity maps store |P_cr| and friends there).
    """

    index: tuple
    values: tuple
    params: SystemParams
    statistics: object = None
    qnbd_fit: object = None
    fit_error: str = None
    fidelity_qnbd: float = float("nan")
    n_max_used: int = None
    residual: float = None
    converged: bool = False
    solve_time: float = None
    error: str = None
    extras: dict = field(default_factory=dict)

    def scalar(self, name):
        """Uniform scalar access across sweep kinds (NaN when absent)."""
        if self.statistics is not None and hasattr(self.statistics, name):
            return getattr(self.statistics, name)
        if name in self.extras:
            return self.extras[name]
        return float("nan")


@dataclass
class GridResult:
    kind: str  # "grid" | "phase" | "validity"
    axes: tuple
    points: list
    contours: dict = field(default_factory=dict)
    config_echo: dict = field(default_factory=dict)

    @property
    def shape(self):
        return tuple(axis.steps for axis in self.axes)

    @property
    def axis_values(self):
        return tuple(axis.values() for axis in self.axes)

    @property
    def failures(self):
        return [p for p in self.points if p.error is not None]

    def field_array(self, name):
        """Scalar field over the grid, NaN at failed points."""
        out = np.full(self.shape, np.nan)
        for point in self.points:
            value = point.scalar(name)
            out[point.index] = np.nan if value is None else value
        return out


def _evaluate_point(task):
    """Solve one grid point; never raises (failures become error records)."""
    index, values, params, qnbd_fit, rel_tol = task
    point = GridPoint(index=index, values=values, params=params)
    t0 = time.perf_counter()
    try:
        result = solve_converged(params, rel_tol=rel_tol)
    except (ValueError, ArithmeticError, RuntimeError, np.linalg.LinAlgError) as exc:
        point.error = f"{type(exc).__name__}: {exc}"
        point.solve_time = time.perf_counter() - t0
        return point
    point.n_max_used = result.n_max_used
    point.residual = result.residual
    point.converged = result.converged
    point.solve_time = time.perf_counter() - t0

    stats_params = params.replace(n_max=result.n_max_used)
    try:
        stats = photostats.photon_statistics(result.rho, stats_params)
    except photostats.UndefinedStatisticsError:
        stats = _undefined_statistics(result.rho, stats_params)
    point.statistics = stats

    if qnbd_fit and stats.classification != "undefined":
        try:
            fit = qnbd.params_from_moments(
                stats.mean_n, stats.second_factorial_moment
            )
            fit_pmf = qnbd.qnbd_pmf(fit, stats.pmf.size - 1)
            point.qnbd_fit = fit
            point.fidelity_qnbd = qnbd.fidelity(stats.pmf, fit_pmf)
        except (qnbd.PoissonLimitError, ValueError) as exc:
            point.fit_error = f"{type(exc).__name__}: {exc}"
    return point


def _undefined_statistics(rho, params):
    """Statistics record for a (near-)vacuum state: witnesses undefined."""
    rho_cav = photostats.reduced_cavity_state(rho, params.n_atoms)
    mean_n, m2 = photostats.photon_moments(rho_cav)
    pmf = photostats.photon_pmf(rho_cav)
    populations = (
        photostats.atomic_populations(rho, params) if params.n_atoms == 2 else {}
    )
    return photostats.PhotonStatistics(
        mean_n=mean_n,
        second_factorial_moment=m2,
        g2=float("nan"),
        q=float("nan"),
        pmf=pmf,
        klyshko=photostats.klyshko(pmf),
        classification="undefined",
        dicke_populations=populations,
    )


def _run_points(tasks, workers):
    """Evaluate tasks preserving order; identical numerics for any workers."""
    if workers == 1:
        return [_evaluate_point(task) for task in tasks]
    chunksize = max(1, len(tasks) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_evaluate_point, tasks, chunksize=chunksize))


def _grid_contours(result, field_name, levels):
    if len(result.axes) != 2:
        return {}
    x, y = result.axis_values
    data = result.field_array(field_name)
    return {
        field_name: {
            float(level): marching_squares(x, y, data, level) for level in levels
        }
    }


def run_grid(config):
    """Solve every point of the configured parameter grid.

    Returns a GridResult with one GridPoint per lattice site (row-major in
    the axis order), mean-photon-number contours at the configured levels
    (2-D grids), and the config echoed for export.
    """
    axes_values = [axis.values() for axis in config.axes]
    tasks = []
    for index in np.ndindex(*(len(v) for v in axes_values)):
        values = tuple(float(axes_values[k][i]) for k, i in enumerate(index))
        overrides = {
            axis.name: (int(round(v)) if axis.name == "n_max" else v)
            for axis, v in zip(config.axes, values)
        }
        params = config.base.replace(**overrides)
        tasks.append((tuple(index), values, params, config.qnbd_fit, config.rel_tol))

    points = _run_points(tasks, config.workers)
    result = GridResult(
        kind="grid" if len(config.axes) == 2 else "scan",
        axes=config.axes,
        points=points,
        config_echo=config.echo(),
    )
    result.contours = _grid_contours(result, "mean_n", config.contour_levels)
    return result


def run_phase_profile(base, phi_steps, *, workers=1, qnbd_fit=True,
                      rel_tol=DEFAULT_REL_TOL):
    """1-D scan of the interatomic phase over a full period [0, 2pi]."""
    if phi_steps < 8:
        raise ValueError(f"phi_steps must be >= 8, got {phi_steps}")
    config = SweepConfig(
        base=base,
        axes=(Axis("phi_z", 0.0, 2.0 * math.pi, phi_steps),),
        contour_levels=(),
        workers=workers,
        qnbd_fit=qnbd_fit,
        rel_tol=rel_tol,
    )
    result = run_grid(config)
    result.kind = "phase"
    return result


@dataclass
class DistributionReport:
    """Side-by-side photon distributions at a single parameter point."""

    params: SystemParams
    statistics: object
    qnbd_fit: object
    pmfs: dict            # name -> pmf over n = 0..n_max_used
    deviations: dict      # name -> P(n) - P_system(n) for n <= n_compare
    fidelities: dict      # name -> fidelity against the system pmf
    n_max_used: int
    residual: float
    converged: bool

    def echo(self):
        return {"params": _params_dict(self.params)}


def run_distribution_report(params, *, rel_tol=DEFAULT_REL_TOL, n_compare=5):
    """System photon distribution vs same-mean reference distributions.

    Compares against a coherent (Poisson) and a thermal distribution of the
    same mean photon number and the moment-fitted qnbd; reports per-n
    deviations for n <= n_compare and fidelities.  Raises
    UndefinedStatisticsError at a vacuum point and PoissonLimitError when
    the fit degenerates (g2 = 1 exactly).
    """
    result = solve_converged(params, rel_tol=rel_tol)
    stats_params = params.replace(n_max=result.n_max_used)
    stats = photostats.photon_statistics(result.rho, stats_params)

    n_top = stats.pmf.size - 1
    fit = qnbd.params_from_moments(stats.mean_n, stats.second_factorial_moment)
    pmfs = {
        "system": stats.pmf,
        "qnbd": qnbd.qnbd_pmf(fit, n_top),
        "coherent": qnbd.poisson_pmf(stats.mean_n, n_top),
        "thermal": qnbd.thermal_pmf(stats.mean_n, n_top),
    }
    upto = min(n_compare, n_top) + 1
    deviations = {
        name: pmf[:upto] - stats.pmf[:upto]
        for name, pmf in pmfs.items()
        if name != "system"
    }
    fidelities = {
        name: qnbd.fidelity(stats.pmf, pmf)
        for name, pmf in pmfs.items()
        if name != "system"
    }
    return DistributionReport(
        params=params,
        statistics=stats,
        qnbd_fit=fit,
        pmfs=pmfs,
        deviations=deviations,
        fidelities=fidelities,
        n_max_used=result.n_max_used,
        residual=result.residual,
        converged=result.converged,
    )


def run_validity_map(g2_range, q_range, steps):
    """qnbd validity diagnostics over a (g2, Q) rectangle in the
    nonclassical quadrant (g2, Q) in (0, 1) x (-1, 0).

    Pure arithmetic on the witness maps: each point carries the fitted
    (s, p), the critical index and |P_cr|, the implied mean photon number
    Q/(g2 - 1), and the validity verdict.  Contours: |P_cr| at the validity
    threshold and the Q = -0.5 line.
    """
    g2_lo, g2_hi = map(float, g2_range)
    q_lo, q_hi = map(float, q_range)
    if not (0.0 < g2_lo < g2_hi < 1.0):
        raise ValueError(f"g2 range must lie inside (0, 1), got ({g2_lo}, {g2_hi})")
    if not (-1.0 < q_lo < q_hi < 0.0):
        raise ValueError(f"Q range must lie inside (-1, 0), got ({q_lo}, {q_hi})")
    if np.isscalar(steps):
        steps = (int(steps), int(steps))
    axes = (
        Axis("g2", g2_lo, g2_hi, steps[0]),
        Axis("q", q_lo, q_hi, steps[1]),
    )

    points = []
    for index in np.ndindex(steps[0], steps[1]):
        g2_val = float(axes[0].values()[index[0]])
        q_val = float(axes[1].values()[index[1]])
        fit = qnbd.params_from_witnesses(g2_val, q_val)
        report = qnbd.validity_check(g2_val, q_val)
        n_cr, p_cr = qnbd.critical_probability(fit.s, fit.p)
        point = GridPoint(
            index=tuple(index),
            values=(g2_val, q_val),
            params=None,
            qnbd_fit=fit,
            converged=True,
            extras={
                "mean_n": report.mean_n,
                "g2": g2_val,
                "q": q_val,
                "classification": photostats.classify_statistics(g2_val),
                "abs_p_cr": abs(p_cr),
                "n_cr": n_cr,
                "p_cr_ok": report.p_cr_ok,
                "decreasing_ok": report.decreasing_ok,
                "valid": report.valid,
            },
        )
        points.append(point)

    result = GridResult(
        kind="validity",
        axes=axes,
        points=points,
        config_echo={
            "g2_range": [g2_lo, g2_hi],
            "q_range": [q_lo, q_hi],
            "steps": list(steps),
        },
    )
    result.contours = {
        "abs_p_cr": {
            qnbd.PCR_THRESHOLD: marching_squares(
                axes[0].values(), axes[1].values(),
                result.field_array("abs_p_cr"), qnbd.PCR_THRESHOLD,
            )
        },
        "q": {
            -0.5: marching_squares(
                axes[0].values(), axes[1].values(),
                result.field_array("q"), -0.5,
            )
        },
    }
    return result
