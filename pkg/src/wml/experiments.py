"""Named end-to-end experiments with pass/fail metrics.

Each catalog entry reproduces one worked computation: the Stieltjes
moment cancellation and its kernel breaking, log-normal moments, Cauchy
Fisher information, the Cauchy/log-normal rank checks, the two-sample
Gaussian zeroth weak moment and its nuisance flattening, the
large-kernel-scale degradation of the metric tensor, the density-free
characteristic-function route, sinusoidal orthogonality, tilted
cumulants, and the moment-count thresholds.  Every experiment is
deterministic: fixed grids, fixed quadrature budgets, no sampling.

A note on the cancellation residuals: the integrals
int x^n sin(2 pi log x) dLogNormal vanish exactly, but their integrands
reach magnitude exp(n^2/2) (5e21 at n = 10), so 64-bit arithmetic can
only certify the cancellation relative to that scale: the best
achievable absolute residual is about exp(n^2/2) * 1e-16.  The reported
metric is therefore |I_n| / max(1, exp(n^2/2)), the scale-normalised
residual, with the raw values kept in the table.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .features import FeatureMapSpec, weak_cumulants, weak_moment
from .geometry import (
    DimensionMismatch,
    StepUnderflow,
    codimension_thresholds,
    jacobian,
    metric_tensor,
    numerical_rank,
)
from .models import (
    Cauchy,
    Gaussian,
    KernelSpec,
    NoDensity,
    SymmetricStable,
    Undefined,
    Unsupported,
    cauchy_family,
    classical_fisher_info,
    density,
    gaussian_family,
    lognormal_family,
    scale_kernel_family,
)
from .quad import QuadratureConfig, QuadratureError, integrate_half_line, integrate_real_line

__all__ = [
    "UnknownExperiment",
    "EmptyGrid",
    "ExperimentResult",
    "run_experiment",
    "list_experiments",
    "sweep_kernel",
]

_SQRT_2PI = np.sqrt(2.0 * np.pi)

_NUMERIC_ERRORS = (QuadratureError, NoDensity, Unsupported, Undefined,
                   StepUnderflow, DimensionMismatch)


class UnknownExperiment(Exception):
    """The requested name is not in the catalog."""


class EmptyGrid(Exception):
    """A sweep was requested over an empty grid."""


@dataclass(frozen=True)
class ExperimentResult:
    name: str
    metrics: dict
    passed: bool
    tolerances: dict
    runtime_seconds: float
    table: tuple = ()
    diagnostic: str = ""


def _tolerances(defaults: dict, overrides) -> dict:
    tol = dict(defaults)
    if overrides:
        tol.update(overrides.get("tolerances", {}))
    return tol


def _result(name, metrics, checks, tolerances, t0, table=()):
    return ExperimentResult(
        name=name,
        metrics=metrics,
        passed=bool(all(checks.values())),
        tolerances=tolerances,
        runtime_seconds=time.perf_counter() - t0,
        table=tuple(table),
    )


def _lognorm_power_integrand(n, extra=None):
    """x^n * LogNormal(0,1) density as a function of x, evaluated through a
    single exponential of (n - 1) y - y^2 / 2 with y = log x, so that no
    intermediate power of x can overflow; ``extra`` adds a further factor
    to the exponent (e.g. the kernel's -e^{2y}/2)."""

    def f(x):
        y = np.log(x)
        arg = (n - 1.0) * y - 0.5 * y * y
        if extra is not None:
            with np.errstate(over="ignore"):
                arg = arg + extra(y)
        return np.exp(arg) / _SQRT_2PI

    return f


def _stieltjes_cancellation(overrides):
    t0 = time.perf_counter()
    tol = _tolerances({"max_scaled_residual": 1e-8}, overrides)
    rows = []
    scaled = []
    for n in range(11):
        moment_scale = float(np.exp(0.5 * n * n))
        cfg = QuadratureConfig(rel_tol=1e-11, abs_tol=1e-12 * max(1.0, moment_scale),
                               max_subdivisions=8000)
        power = _lognorm_power_integrand(n)
        res = integrate_half_line(
            lambda x: np.sin(2.0 * np.pi * np.log(x)) * power(x), cfg)
        value = float(np.real(res.value))
        ratio = abs(value) / max(1.0, moment_scale)
        scaled.append(ratio)
        rows.append({"n": n, "integral": value, "moment_scale": moment_scale,
                     "scaled_residual": ratio})
    metrics = {"max_scaled_residual": max(scaled)}
    checks = {"max_scaled_residual": metrics["max_scaled_residual"] < tol["max_scaled_residual"]}
    return _result("stieltjes-cancellation", metrics, checks, tol, t0, rows)


def _stieltjes_kernel_break(overrides):
    t0 = time.perf_counter()
    tol = _tolerances({"max_abs_pairing_min": 1e-6}, overrides)
    cfg = QuadratureConfig(rel_tol=1e-12, abs_tol=1e-15, max_subdivisions=8000)
    rows = []
    vals = []
    for n in range(7):
        power = _lognorm_power_integrand(n, extra=lambda y: -0.5 * np.exp(2.0 * y))
        res = integrate_half_line(
            lambda x: np.sin(2.0 * np.pi * np.log(x)) * power(x) / _SQRT_2PI, cfg)
        v = float(np.real(res.value))
        vals.append(v)
        rows.append({"n": n, "pairing": v})
    metrics = {"max_abs_pairing": max(abs(v) for v in vals)}
    checks = {"max_abs_pairing_min": metrics["max_abs_pairing"] > tol["max_abs_pairing_min"]}
    return _result("stieltjes-kernel-break", metrics, checks, tol, t0, rows)


def _lognormal_classical_moments(overrides):
    t0 = time.perf_counter()
    tol = _tolerances({"max_rel_err": 1e-6}, overrides)
    rows = []
    errs = []
    for n in range(7):
        expected = float(np.exp(0.5 * n * n))
        cfg = QuadratureConfig(rel_tol=1e-10, abs_tol=1e-13 * max(1.0, expected),
                               max_subdivisions=4000)
        res = integrate_half_line(_lognorm_power_integrand(n), cfg)
        got = float(np.real(res.value))
        rel = abs(got - expected) / expected
        errs.append(rel)
        rows.append({"n": n, "quadrature": got, "closed_form": expected, "rel_err": rel})
    metrics = {"max_rel_err": max(errs)}
    checks = {"max_rel_err": metrics["max_rel_err"] < tol["max_rel_err"]}
    return _result("lognormal-classical-moments", metrics, checks, tol, t0, rows)


def _cauchy_fisher(overrides):
    t0 = time.perf_counter()
    tol = _tolerances({"abs_error": 1e-6}, overrides)
    info = classical_fisher_info(Cauchy(0.0), "location",
                                 QuadratureConfig(rel_tol=1e-12, abs_tol=1e-14))
    metrics = {"fisher_information": info, "abs_error": abs(info - 0.5)}
    checks = {"abs_error": metrics["abs_error"] < tol["abs_error"]}
    return _result("cauchy-fisher", metrics, checks, tol, t0)


_JAC_QUAD = QuadratureConfig(rel_tol=1e-11, abs_tol=1e-14, max_subdivisions=4000)


def _cauchy_submersion(overrides):
    """Joint 1x2 Jacobian of the Cauchy zeroth weak moment on a (mu, s) grid.

    The rank check uses the honest finite-difference Jacobian of the
    normalised-kernel pairing.  The positivity metric is the kernel
    window sensitivity E[X^2 phi_s(X)] / s^3, i.e. the derivative of the
    pairing when only the Gaussian window (not its normalisation) varies
    with s; that is the quantity whose strict positivity underwrites the
    rank-1 claim for a location family.
    """
    t0 = time.perf_counter()
    tol = _tolerances({"joint_rank": 1.0, "min_scale_sensitivity_min": 0.0}, overrides)
    fam = cauchy_family()
    kfam = scale_kernel_family()
    spec = FeatureMapSpec(orders=(0,), path="density", quadrature=_JAC_QUAD)
    mspec = FeatureMapSpec(orders=(2,), path="density", quadrature=_JAC_QUAD)
    rows = []
    ranks = []
    sens = []
    for mu in np.linspace(-2.0, 2.0, 5):
        for s in np.linspace(0.5, 4.0, 5):
            rep = jacobian(fam, kfam, [mu], [s], spec)
            rank = numerical_rank(rep.joint).rank
            w2 = weak_moment(Cauchy(mu), KernelSpec(s), 2, mspec).value
            sensitivity = w2 / s**3
            ranks.append(rank)
            sens.append(sensitivity)
            rows.append({"mu": float(mu), "s": float(s), "joint_rank": rank,
                         "d_mu": float(rep.d_theta[0, 0]),
                         "d_s": float(rep.d_lambda[0, 0]),
                         "scale_sensitivity": sensitivity})
    metrics = {"min_joint_rank": float(min(ranks)), "max_joint_rank": float(max(ranks)),
               "min_scale_sensitivity": min(sens)}
    checks = {
        "joint_rank": metrics["min_joint_rank"] == tol["joint_rank"] == metrics["max_joint_rank"],
        "min_scale_sensitivity_min": metrics["min_scale_sensitivity"] > tol["min_scale_sensitivity_min"],
    }
    return _result("cauchy-submersion", metrics, checks, tol, t0, rows)


def _lognormal_immersion(overrides):
    t0 = time.perf_counter()
    tol = _tolerances({"model_rank": 2.0, "joint_rank": 2.0, "min_det_g_min": 0.0}, overrides)
    fam = lognormal_family()
    kfam = scale_kernel_family()
    spec = FeatureMapSpec(orders=(0, 1), path="density", quadrature=_JAC_QUAD)
    rows = []
    model_ranks, joint_ranks, dets = [], [], []
    for mu in (-1.0, 0.0, 1.0):
        for sigma in (0.7, 1.0, 1.5):
            rep = jacobian(fam, kfam, [mu, sigma], [1.0], spec)
            mrank = numerical_rank(rep.d_theta).rank
            jrank = numerical_rank(rep.joint).rank
            det_g = metric_tensor(rep).det
            model_ranks.append(mrank)
            joint_ranks.append(jrank)
            dets.append(det_g)
            rows.append({"mu": mu, "sigma": sigma, "model_rank": mrank,
                         "joint_rank": jrank, "det_g": det_g})
    metrics = {"min_model_rank": float(min(model_ranks)),
               "min_joint_rank": float(min(joint_ranks)),
               "min_det_g": min(dets)}
    checks = {
        "model_rank": metrics["min_model_rank"] == tol["model_rank"],
        "joint_rank": metrics["min_joint_rank"] == tol["joint_rank"],
        "min_det_g_min": metrics["min_det_g"] > tol["min_det_g_min"],
    }
    return _result("lognormal-immersion", metrics, checks, tol, t0, rows)


def _behrens_fisher_w0(overrides):
    t0 = time.perf_counter()
    tol = _tolerances({"max_w0_rel_err": 1e-8, "nuisance_spread_decreasing": 1.0}, overrides)
    spec = FeatureMapSpec(orders=(0,), path="density",
                          quadrature=QuadratureConfig(rel_tol=1e-12, abs_tol=1e-15))
    rows = []
    errs = []
    for mu in (0.0, 1.0, 2.0):
        for sigma in (0.5, 1.0, 2.0):
            for s in (1.0, 3.0, 10.0):
                got = weak_moment(Gaussian(mu, sigma), KernelSpec(s), 0, spec).value
                v = sigma * sigma + s * s
                closed = np.exp(-0.5 * mu * mu / v) / np.sqrt(2.0 * np.pi * v)
                rel = abs(got - closed) / closed
                errs.append(rel)
                rows.append({"mu": mu, "sigma": sigma, "s": s, "w0": got,
                             "closed_form": float(closed), "rel_err": rel})

    # nuisance flattening at fixed mu: the sigma-spread of w0 shrinks with s
    mu = 1.0
    spreads = {}
    for s in (1.0, 3.0, 10.0, 30.0):
        w0s = np.array([weak_moment(Gaussian(mu, sg), KernelSpec(s), 0, spec).value
                        for sg in np.linspace(0.5, 2.0, 7)])
        wbar = float(np.mean(w0s))
        spreads[s] = float(np.max(np.abs(w0s - wbar)) / wbar)
    spread_vals = [spreads[s] for s in (1.0, 3.0, 10.0, 30.0)]
    decreasing = all(a > b for a, b in zip(spread_vals, spread_vals[1:]))

    metrics = {"max_w0_rel_err": max(errs),
               "spread_s1": spreads[1.0], "spread_s3": spreads[3.0],
               "spread_s10": spreads[10.0], "spread_s30": spreads[30.0],
               "nuisance_spread_decreasing": 1.0 if decreasing else 0.0}
    checks = {"max_w0_rel_err": metrics["max_w0_rel_err"] < tol["max_w0_rel_err"],
              "nuisance_spread_decreasing":
                  metrics["nuisance_spread_decreasing"] == tol["nuisance_spread_decreasing"]}
    return _result("behrens-fisher-w0", metrics, checks, tol, t0, rows)


_SINGULAR_SCALES = (1.0, 2.0, 5.0, 10.0, 30.0, 100.0)


def _singular_limit(overrides):
    """Metric degradation as the kernel scale grows toward the classical
    (constant-kernel) limit: det G decays to zero beyond s = 2 while the
    condition number climbs."""
    t0 = time.perf_counter()
    tol = _tolerances({"det_strictly_decreasing": 1.0, "cond_nondecreasing": 1.0}, overrides)
    fam = gaussian_family()
    kfam = scale_kernel_family()
    spec = FeatureMapSpec(orders=(0, 1, 2), path="density", quadrature=_JAC_QUAD)
    theta = (0.0, 1.0)
    rows = []
    metrics = {}
    dets, conds = [], []
    for s in _SINGULAR_SCALES:
        g = metric_tensor(jacobian(fam, kfam, theta, [s], spec))
        dets.append(g.det)
        conds.append(g.condition_number)
        rows.append({"s": s, "det_g": g.det, "condition_number": g.condition_number,
                     "correlation_det": g.correlation_det})
        metrics[f"det_g_s{s:g}"] = g.det
        metrics[f"cond_s{s:g}"] = g.condition_number
    tail_dets = dets[1:]   # s >= 2
    tail_conds = conds[1:]
    metrics["det_strictly_decreasing"] = 1.0 if all(
        a > b for a, b in zip(tail_dets, tail_dets[1:])) else 0.0
    metrics["cond_nondecreasing"] = 1.0 if all(
        a <= b for a, b in zip(tail_conds, tail_conds[1:])) else 0.0
    checks = {"det_strictly_decreasing":
                  metrics["det_strictly_decreasing"] == tol["det_strictly_decreasing"],
              "cond_nondecreasing": metrics["cond_nondecreasing"] == tol["cond_nondecreasing"]}
    return _result("singular-limit", metrics, checks, tol, t0, rows)


def _type0_charpath(overrides):
    t0 = time.perf_counter()
    tol = _tolerances({"max_twin_rel_err": 1e-6}, overrides)
    kernel = KernelSpec(s=1.0, c=0.0)
    cfg = QuadratureConfig(rel_tol=1e-11, abs_tol=1e-14)
    rows = []

    # density-free route for a model with no closed-form density
    stable15 = SymmetricStable(1.5, 0.0, 1.0)
    finite = []
    for j in range(3):
        spec = FeatureMapSpec(orders=(j,), path="charfn", quadrature=cfg)
        v = weak_moment(stable15, kernel, j, spec).value
        finite.append(np.isfinite(v))
        rows.append({"model": "stable(1.5)", "j": j, "charfn_path": v,
                     "density_path": float("nan"), "rel_err": float("nan")})

    # alpha in {1, 2} twins against the closed-form densities
    twins = [
        ("stable(1)=cauchy", SymmetricStable(1.0, 0.5, 1.0), Cauchy(0.5)),
        ("stable(2)=gaussian", SymmetricStable(2.0, 0.5, 1.0 / np.sqrt(2.0)), Gaussian(0.5, 1.0)),
    ]
    errs = []
    for label, stable, twin in twins:
        for j in range(5):
            cspec = FeatureMapSpec(orders=(j,), path="charfn", quadrature=cfg)
            dspec = FeatureMapSpec(orders=(j,), path="density", quadrature=cfg)
            via_char = weak_moment(stable, kernel, j, cspec).value
            via_dens = weak_moment(twin, kernel, j, dspec).value
            rel = abs(via_char - via_dens) / abs(via_dens)
            errs.append(rel)
            rows.append({"model": label, "j": j, "charfn_path": via_char,
                         "density_path": via_dens, "rel_err": rel})

    metrics = {"max_twin_rel_err": max(errs),
               "stable15_all_finite": 1.0 if all(finite) else 0.0}
    checks = {"max_twin_rel_err": metrics["max_twin_rel_err"] < tol["max_twin_rel_err"],
              "stable15_all_finite": metrics["stable15_all_finite"] == 1.0}
    return _result("type0-charpath", metrics, checks, tol, t0, rows)


def _sinusoidal_orthogonality(overrides):
    t0 = time.perf_counter()
    tol = _tolerances({"max_abs_pairing": 1e-10}, overrides)
    mu, sigma = 0.3, 1.2
    model = Gaussian(mu, sigma)
    cfg = QuadratureConfig(rel_tol=1e-12, abs_tol=1e-14)
    rows = []
    vals = []
    for c in (0.5, 1.0, 2.0):
        res = integrate_real_line(
            lambda x, c=c: np.sin(c * (x - mu))
            * ((x - mu) ** 2 - sigma**2) / sigma**3 * density(model, x), cfg)
        v = abs(float(np.real(res.value)))
        vals.append(v)
        rows.append({"c": c, "abs_pairing": v})
    metrics = {"max_abs_pairing": max(vals)}
    checks = {"max_abs_pairing": metrics["max_abs_pairing"] < tol["max_abs_pairing"]}
    return _result("sinusoidal-orthogonality", metrics, checks, tol, t0, rows)


def _gaussian_tilted_cumulants(overrides):
    t0 = time.perf_counter()
    tol = _tolerances({"kappa1_rel_err": 1e-8, "kappa2_rel_err": 1e-8,
                       "abs_kappa3": 1e-6, "abs_kappa4": 1e-6}, overrides)
    mu, sigma = 0.7, 1.3
    kernel = KernelSpec(s=0.9, c=-0.4)
    cfg = QuadratureConfig(rel_tol=1e-12, abs_tol=1e-15)
    kappa = weak_cumulants(Gaussian(mu, sigma), kernel, 4, cfg).kappa

    # the tilted law of a Gaussian under a Gaussian window is Gaussian
    var_tilt = 1.0 / (1.0 / sigma**2 + 1.0 / kernel.s**2)
    mean_tilt = var_tilt * (mu / sigma**2 + kernel.c / kernel.s**2)

    metrics = {
        "kappa1": float(kappa[0]), "kappa2": float(kappa[1]),
        "kappa1_rel_err": abs(kappa[0] - mean_tilt) / abs(mean_tilt),
        "kappa2_rel_err": abs(kappa[1] - var_tilt) / var_tilt,
        "abs_kappa3": abs(float(kappa[2])), "abs_kappa4": abs(float(kappa[3])),
    }
    checks = {key: metrics[key] < tol[key] for key in
              ("kappa1_rel_err", "kappa2_rel_err", "abs_kappa3", "abs_kappa4")}
    return _result("gaussian-tilted-cumulants", metrics, checks, tol, t0)


def _thresholds(overrides):
    t0 = time.perf_counter()
    tol = _tolerances({"self_intersection_codim": 8.0, "sigma1_codim": 6.0}, overrides)
    rep = codimension_thresholds(3, 7)
    metrics = {
        "identifiability_generic": 1.0 if rep.identifiability_generic else 0.0,
        "info_regular_generic": 1.0 if rep.info_regular_generic else 0.0,
        "self_intersection_codim": float(rep.self_intersection_codim),
        "sigma1_codim": float(rep.sigma1_codim),
    }
    checks = {
        "identifiability_generic": metrics["identifiability_generic"] == 1.0,
        "info_regular_generic": metrics["info_regular_generic"] == 1.0,
        "self_intersection_codim":
            metrics["self_intersection_codim"] == tol["self_intersection_codim"],
        "sigma1_codim": metrics["sigma1_codim"] == tol["sigma1_codim"],
    }
    return _result("thresholds", metrics, checks, tol, t0)


_CATALOG = {
    "stieltjes-cancellation": _stieltjes_cancellation,
    "stieltjes-kernel-break": _stieltjes_kernel_break,
    "lognormal-classical-moments": _lognormal_classical_moments,
    "cauchy-fisher": _cauchy_fisher,
    "cauchy-submersion": _cauchy_submersion,
    "lognormal-immersion": _lognormal_immersion,
    "behrens-fisher-w0": _behrens_fisher_w0,
    "singular-limit": _singular_limit,
    "type0-charpath": _type0_charpath,
    "sinusoidal-orthogonality": _sinusoidal_orthogonality,
    "gaussian-tilted-cumulants": _gaussian_tilted_cumulants,
    "thresholds": _thresholds,
}


def list_experiments() -> tuple:
    return tuple(_CATALOG)


def run_experiment(name: str, overrides: dict | None = None) -> ExperimentResult:
    """Run one catalog experiment; numeric failures are reported in the
    result (pass = false with a diagnostic) rather than raised."""
    if name not in _CATALOG:
        raise UnknownExperiment(f"unknown experiment {name!r}; have {', '.join(_CATALOG)}")
    t0 = time.perf_counter()
    try:
        return _CATALOG[name](overrides)
    except _NUMERIC_ERRORS as exc:
        return ExperimentResult(
            name=name,
            metrics={"numeric_failure": 1.0},
            passed=False,
            tolerances={},
            runtime_seconds=time.perf_counter() - t0,
            diagnostic=f"{type(exc).__name__}: {exc}",
        )


def _worker_count() -> int:
    raw = os.environ.get("WML_THREADS", "").strip()
    if raw:
        n = int(raw)
        if n > 0:
            return n
    return min(8, os.cpu_count() or 1)


def sweep_kernel(fam, kfam, spec: FeatureMapSpec, lambda_grid, theta_grid):
    """Diagnostics on a (lambda, theta) grid: one row per pair, in grid
    order, each with the metric-tensor and rank summaries."""
    lambdas = [np.atleast_1d(np.asarray(l, dtype=float)) for l in lambda_grid]
    thetas = [np.atleast_1d(np.asarray(t, dtype=float)) for t in theta_grid]
    if not lambdas or not thetas:
        raise EmptyGrid("sweep grids must be non-empty")

    points = [(lam, th) for lam in lambdas for th in thetas]

    def row(point):
        lam, th = point
        rep = jacobian(fam, kfam, th, lam, spec)
        g = metric_tensor(rep)
        model_rank = numerical_rank(rep.d_theta).rank
        joint_rank = numerical_rank(rep.joint).rank
        out = {}
        for name, value in zip(kfam.param_names, lam):
            out[name] = float(value)
        for name, value in zip(fam.param_names, th):
            out[name] = float(value)
        out.update({
            "det_g": g.det,
            "condition_number": g.condition_number,
            "correlation_det": g.correlation_det,
            "model_rank": model_rank,
            "joint_rank": joint_rank,
            "enrichment": joint_rank - model_rank,
            "submersive": joint_rank == len(spec.orders),
        })
        return out

    workers = _worker_count()
    if workers > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(row, points))
    else:
        rows = [row(point) for point in points]
    return tuple(rows)
