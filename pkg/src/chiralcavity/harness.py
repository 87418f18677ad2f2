"""Experiment orchestration: SNR sweeps, critical molecule numbers, lambda-v
maps, model comparisons and the dissipation check.

Independent grid cells go to a process pool; results are gathered in grid
order so output files do not depend on the worker count.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Any, Callable, Sequence

import numpy as np

from . import detection
from .analytics import dipole_bound
from .dynamics import DissipationParams, IntegrationError, Trajectory, integrate
from .molecule import decay_rates
from .units import LIGHT_SPEED

DEFAULT_LAMBDAS = tuple(np.logspace(-2, 2, 9))
DEFAULT_SPEEDS = (1.0, 2.0, 5.0, 10.0)
NM_UPPER = 1e4


class BracketError(ValueError):
    """The target SNR is not reached inside the search bracket."""


def code_version() -> str:
    from . import __version__

    return __version__


# -- trajectory cache -------------------------------------------------------

_CACHE: dict[tuple[str, str, float], Trajectory] = {}
_CACHE_LIMIT = 256


def cached_trajectory(config, model: str, sigma_z0: float) -> Trajectory:
    """Integrate once per (config digest, model, sigma_z0) within a process."""
    key = (config.digest(), model, float(sigma_z0))
    traj = _CACHE.get(key)
    if traj is None:
        traj = integrate(model, config, sigma_z0=sigma_z0)
        if len(_CACHE) >= _CACHE_LIMIT:
            _CACHE.pop(next(iter(_CACHE)))
        _CACHE[key] = traj
    return traj


def clear_cache() -> None:
    _CACHE.clear()


def pair(config, model: str = "first") -> tuple[Trajectory, Trajectory]:
    return cached_trajectory(config, model, +1.0), cached_trajectory(config, model, -1.0)


# -- single point -----------------------------------------------------------


def evaluate_point(config, model: str = "first") -> dict[str, float]:
    """SNR and friends for one scenario, both hypotheses simulated."""
    start = time.perf_counter()
    trajs = pair(config, model)
    nL, nR, (t0, tf) = detection.hypothesis_means(config, model, trajs)
    snr = detection.snr_from_means(nL, nR, t0, tf)
    excursion = max(float(np.max(np.abs(tr.sigma_z - tr.sigma_z[0]))) for tr in trajs)
    return {
        "snr": snr,
        "n_bar_L": nL,
        "n_bar_R": nR,
        "p_err": detection.error_probability(snr),
        "sigma_z_excursion": excursion,
        "wall_s": time.perf_counter() - start,
    }


def snr_at(config, N_m: float, model: str = "first") -> float:
    return evaluate_point(config.with_(N_m=float(N_m)), model)["snr"]


# -- results ----------------------------------------------------------------


@dataclass
class SweepResult:
    """Rows of a sweep plus metadata; one row per grid point, in grid order."""

    columns: list[str]
    rows: list[dict[str, Any]]
    metadata: dict[str, Any] = field(default_factory=dict)
    summary: dict[str, Any] = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        return np.array([r.get(name, math.nan) for r in self.rows], dtype=float)

    def to_csv(self, path_or_file=None) -> str:
        buf = io.StringIO()
        for key in sorted(self.metadata):
            buf.write(f"# {key}: {self.metadata[key]}\n")
        writer = csv.DictWriter(buf, fieldnames=self.columns, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            writer.writerow({k: _fmt(row.get(k)) for k in self.columns})
        text = buf.getvalue()
        if path_or_file is not None:
            if hasattr(path_or_file, "write"):
                path_or_file.write(text)
            else:
                with open(path_or_file, "w", newline="") as fh:
                    fh.write(text)
        return text

    def summary_json(self) -> str:
        return json.dumps(self.summary, indent=2, sort_keys=True, default=_jsonable)


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return value


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    return str(obj)


def _metadata(config, model: str, **extra) -> dict[str, Any]:
    meta = {
        "config_sha256": config.digest(),
        "seed": config.seed,
        "model": model,
        "code_version": code_version(),
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    meta.update(extra)
    return meta


def default_jobs() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def run_ordered(fn: Callable, items: Sequence, jobs: int | None = None) -> list:
    """``[fn(x) for x in items]``, optionally across a process pool, in input order."""
    jobs = default_jobs() if jobs is None else max(1, int(jobs))
    if jobs == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(jobs, len(items))) as pool:
        return list(pool.map(fn, items))


# -- sweeps -----------------------------------------------------------------


def _point_task(args):
    config, model = args
    try:
        return evaluate_point(config, model)
    except IntegrationError as exc:
        return {"error": str(exc)}


def snr_vs_nm(scenario, nm_values: Sequence[float], model: str = "first", jobs: int | None = 1) -> SweepResult:
    """SNR for each molecule number; fits a line and reports its R^2."""
    nm = [float(x) for x in nm_values]
    if any(b < a for a, b in zip(nm, nm[1:])):
        raise ValueError("nm_values must be sorted ascending")
    results = run_ordered(_point_task, [(scenario.with_(N_m=n), model) for n in nm], jobs)
    rows = []
    for n, res in zip(nm, results):
        if "error" in res:
            raise IntegrationError(f"grid point N_m={n:g}: {res['error']}", math.nan)
        rows.append({"N_m": n, **res})
    out = SweepResult(
        ["N_m", "snr", "n_bar_L", "n_bar_R", "p_err", "sigma_z_excursion", "wall_s"],
        rows,
        _metadata(scenario, model, sweep="snr_vs_nm", **{"lambda": scenario.drive.lam, "v": scenario.sample.v}),
    )
    x, y = out.column("N_m"), out.column("snr")
    summary: dict[str, Any] = {"lambda": scenario.drive.lam, "v": scenario.sample.v}
    if len(x) >= 2 and np.ptp(x) > 0:
        slope, intercept = np.polyfit(x, y, 1)
        resid = y - (slope * x + intercept)
        ss_tot = float(np.sum((y - y.mean()) ** 2))
        summary.update(
            slope=float(slope),
            intercept=float(intercept),
            r_squared=1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0,
        )
    out.summary = summary
    return out


@dataclass(frozen=True)
class CriticalSearch:
    n_critical: int
    bracket: tuple[float, float]
    evaluations: int
    snr_at_result: float


def critical_nm(
    scenario,
    target_snr: float = 3.0,
    model: str = "first",
    upper: float = NM_UPPER,
    resolution: float = 0.5,
) -> CriticalSearch:
    """Smallest integer N_m whose SNR reaches ``target_snr``.

    SNR is monotone in N_m, so bisection on the real-valued N_m runs until the
    bracket is narrower than ``resolution`` and the upper end is rounded up.
    The bracket is first narrowed around the linear estimate from the SNR at
    ``upper``, which saves most of the bisection steps.
    """
    evals = 0

    def f(n):
        nonlocal evals
        evals += 1
        return snr_at(scenario, n, model) - target_snr

    f_hi = f(upper)
    if f_hi < 0:
        raise BracketError(f"SNR at N_m={upper:g} is {f_hi + target_snr:.4g} < target {target_snr}")
    lo, hi = 0.0, upper
    guess = upper * target_snr / (f_hi + target_snr)
    for width in (0.02, 0.1, 0.5):
        a, b = max(lo, guess * (1 - width)), min(hi, guess * (1 + width))
        fa = f(a) if a > 0 else -target_snr
        if fa >= 0:
            hi = a
            continue
        lo = a
        fb = f(b)
        if fb >= 0:
            hi = b
            break
        lo = b
    while hi - lo >= resolution:
        mid = 0.5 * (lo + hi)
        if f(mid) >= 0:
            hi = mid
        else:
            lo = mid
    n = math.ceil(hi)
    return CriticalSearch(n, (lo, hi), evals, snr_at(scenario, n, model))


def _critical_task(args):
    config, target, model = args
    try:
        res = critical_nm(config, target, model)
        return {"n_critical": res.n_critical, "evaluations": res.evaluations}
    except (BracketError, IntegrationError) as exc:
        return {"n_critical": math.nan, "error": str(exc)}


def lambda_v_map(
    lambda_values: Sequence[float] = DEFAULT_LAMBDAS,
    v_values: Sequence[float] = DEFAULT_SPEEDS,
    scenario=None,
    target_snr: float = 3.0,
    model: str = "first",
    jobs: int | None = None,
) -> SweepResult:
    """Critical N_m on a lambda x v grid; failed cells are recorded, not fatal."""
    if scenario is None:
        raise ValueError("lambda_v_map needs a scenario")
    if min(lambda_values) <= 0 or min(v_values) <= 0:
        raise ValueError("lambda and v grids must be positive")
    cells = [(lam, v) for v in v_values for lam in lambda_values]
    tasks = [(scenario.with_(lam=float(lam), v=float(v)), target_snr, model) for lam, v in cells]
    results = run_ordered(_critical_task, tasks, jobs)
    rows = [{"lambda": float(lam), "v": float(v), **res} for (lam, v), res in zip(cells, results)]
    out = SweepResult(
        ["lambda", "v", "n_critical", "evaluations", "error"],
        rows,
        _metadata(scenario, model, sweep="lambda_v_map", target_snr=target_snr),
    )
    violations = []
    for v in v_values:
        row = [r["n_critical"] for r in rows if r["v"] == float(v)]
        for a, b in zip(row, row[1:]):
            if not (math.isnan(a) or math.isnan(b)) and b > 1.02 * a:
                violations.append({"v": float(v), "from": a, "to": b})
    out.summary = {
        "target_snr": target_snr,
        "failed_cells": sum(1 for r in rows if "error" in r),
        "monotone_in_lambda": not violations,
        "violations": violations,
    }
    return out


# -- model comparisons ------------------------------------------------------


def _deviations(a: Trajectory, b: Trajectory) -> dict[str, float]:
    dphase = np.angle(a.c * np.conj(b.c))
    return {
        "abs_c": float(np.max(np.abs(np.abs(a.c) - np.abs(b.c)))),
        "arg_c": float(np.max(np.abs(dphase))),
        "sigma_z": float(np.max(np.abs(a.sigma_z - b.sigma_z))),
    }


def order_comparison(scenario, sigma_z0: float | None = None) -> dict[str, Any]:
    """First- vs second-order cumulant trajectories for one hypothesis."""
    if scenario.sample.N_m > 5e4:
        raise ValueError("second-order comparison is limited to N_m <= 5e4")
    sz = scenario.sample.sigma_z0 if sigma_z0 is None else sigma_z0
    first = integrate("first", scenario, sigma_z0=sz)
    second = integrate("second", scenario, sigma_z0=sz)
    t0, tf = scenario.window()
    phi = scenario.detection.phi_lo
    n1 = detection.integrate_signal(first, t0, tf, phi)
    n2 = detection.integrate_signal(second, t0, tf, phi)
    denom = abs(n1 + n2)
    report = {
        "N_m": scenario.sample.N_m,
        "lambda": scenario.drive.lam,
        "max_deviation": _deviations(first, second),
        "n_bar_first": n1,
        "n_bar_second": n2,
        "eta_cmp": abs(n1 - n2) / denom if denom > 0 else 0.0,
    }
    return report | {"first": first, "second": second}


def propanediol_dissipation(config, L: float | None = None) -> DissipationParams:
    """gamma of the 3-2 transition and the dipole-dipole bound for ``config``."""
    gamma = decay_rates(config.molecule)["32"]
    L = config.sample.L if L is None else L
    k_m = config.molecule.omega_32 / LIGHT_SPEED
    V_max, _ = dipole_bound(gamma, config.sample.N_m, L, k_m)
    return DissipationParams(gamma=gamma, V_max=V_max)


def dissipation_check(scenario, diss: DissipationParams, threshold: float = 1e-3) -> dict[str, Any]:
    """Maximum relative change of |c|, arg c and sigma_z when dissipation is switched on.

    |c| is compared relative to its peak, arg c relative to its peak
    excursion, and sigma_z in absolute terms (it is O(1)).
    """
    ref = integrate("first", scenario)
    dis = integrate("dissipative", scenario, diss=diss)
    dev = _deviations(ref, dis)
    phase_scale = max(float(np.max(np.abs(np.angle(ref.c)))), 1e-300)
    rel = {
        "abs_c": dev["abs_c"] / float(np.max(np.abs(ref.c))),
        "arg_c": dev["arg_c"] / phase_scale,
        "sigma_z": dev["sigma_z"],
    }
    worst = max(rel.values())
    identical = bool(
        np.array_equal(ref.c, dis.c) and np.array_equal(ref.sigma_z, dis.sigma_z)
    )
    return {
        "gamma": diss.gamma,
        "V_max": diss.V_max,
        "relative_deviation": rel,
        "max_relative_deviation": worst,
        "threshold": threshold,
        "negligible": worst < threshold,
        "identical": identical,
    }


def with_integrator(config, **changes):
    return replace(config, integrator=replace(config.integrator, **changes))
