"""Experiment drivers: each turns an :class:`ExperimentConfig` into a
:class:`ScalingReport` with rows, fit blocks, summary statistics and
pass/fail checks against the configured thresholds.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager

import numpy as np

from .. import __version__
from ..frame import FrameParameterError, make_frame, make_profiles
from .config import ExperimentConfig, make_config
from .fitting import loglog_fit
from .report import ScalingReport


@contextmanager
def _mapper(workers):
    """A ``map``-like callable; a process pool when ``workers > 1``.

    Results come back in input order, so reports do not depend on the worker
    count.
    """
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=int(workers)) as pool:
            yield pool.map
    else:
        yield map


def _thresholds(cfg):
    from ..overlap import IndexThresholds

    return IndexThresholds(float(cfg["q_hi"]), float(cfg["q_lo"]), int(cfg["j_thr"]))


def _frames(cfg, report):
    """Valid frames of the (lambda, eps0) grid; invalid cells are recorded."""
    frames, skipped = [], []
    for lam in cfg["lambda"]:
        for eps0 in cfg["eps0"]:
            try:
                frames.append(make_frame(lam, eps0))
            except FrameParameterError as exc:
                skipped.append({"lambda": lam, "eps0": eps0, "reason": str(exc)})
    report.summary["skipped_cells"] = skipped
    if not frames:
        raise ValueError("empty parameter grid: no valid (lambda, eps0) cell")
    return frames


def _in_band(x, band):
    return band[0] <= x <= band[1]


# ------------------------------------------------------------------ overlap

def run_overlap_scan(cfg, workers=1):
    from ..overlap import overlap_scaling_experiment

    probe = ScalingReport("overlap-scan", [])
    frames = _frames(cfg, probe)
    with _mapper(workers) as map_fn:
        report = overlap_scaling_experiment(frames, seed=int(cfg["seed"]),
                                            n_pairs=int(cfg["n_pairs"]),
                                            thresholds=_thresholds(cfg), n_bins=int(cfg["n_bins"]),
                                            map_fn=map_fn)
    report.summary["skipped_cells"] = probe.summary["skipped_cells"]
    band = float(cfg["band_max"])
    report.checks["N1_norm_band"] = 0 < report.summary["max_N1_norm_band"] <= band
    report.checks["N2_norm_band"] = 0 < report.summary["max_N2_norm_band"] <= band
    for name, key in (("N1", "n1_slope"), ("N2", "n2_slope")):
        slopes = [f.slope for k, f in report.fits.items() if k.endswith(f":{name}_vs_t")]
        report.checks[f"{name}_slopes"] = bool(slopes) and all(_in_band(s, cfg[key]) for s in slopes)
    return report


# ------------------------------------------------------------------ envelope

LINF_REPORT_COLUMNS = ["lambda", "eps0", "j", "k", "max_ratio", "argmax_r", "zero_violations",
                       "skipped", "regime", "equation", "resolution_error"]


def _linf_job(job):
    from ..packet_bounds import envelope_decay_fit, linf_scan

    lam, eps0, js, ks, thr = job
    params = make_frame(lam, eps0)
    profiles = make_profiles(params)
    out = []
    for j in js:
        for k in ks:
            res = linf_scan(params, profiles, j, k, thresholds=thr)
            coarse = np.nanmax(res.table[::2, 3]) if np.any(np.isfinite(res.table[::2, 3])) else 0.0
            fit = envelope_decay_fit(params, k, res.table) if k == lam else None
            out.append((j, k, res, abs(res.max_ratio - coarse), fit))
    return lam, eps0, out


def run_linf_scan(cfg, workers=1):
    report = ScalingReport("linf-scan", list(LINF_REPORT_COLUMNS))
    frames = _frames(cfg, report)
    thr = _thresholds(cfg)
    jobs = []
    for p in frames:
        lam = int(p.lam)
        ks = [int(k) for k in cfg["k"]] or sorted({0, 1, math.ceil(lam / 4), math.ceil(lam / 2), lam})
        jobs.append((lam, p.eps0, [int(j) for j in cfg["j"]], ks, thr))
    worst, violations = 0.0, 0
    with _mapper(workers) as map_fn:
        for lam, eps0, out in map_fn(_linf_job, jobs):
            for j, k, res, err, fit in out:
                report.add_row(**{"lambda": lam, "eps0": eps0, "j": j, "k": k,
                                  "max_ratio": res.max_ratio, "argmax_r": res.argmax[0],
                                  "zero_violations": res.zero_violations, "skipped": res.skipped,
                                  "regime": res.regime, "equation": f"envelope-{res.regime}",
                                  "resolution_error": err})
                worst = max(worst, res.max_ratio)
                violations += res.zero_violations
                if fit is not None:
                    report.fits[f"lambda={lam:g},eps0={eps0:g},j={j}:decay_k=lambda"] = fit
    report.summary.update(max_ratio=worst, zero_violations=violations)
    report.checks["max_ratio"] = worst <= float(cfg["c_env"])
    report.checks["zero_violations"] = violations == 0
    return report


# ------------------------------------------------------------------ disjointness

DISJOINT_COLUMNS = ["lambda", "eps0", "M", "J_star", "K_star", "k_scaled", "counterexamples",
                    "equation"]


def run_disjointness(cfg, workers=1):
    from ..packet_bounds import boundary_counterexamples, disjointness_check

    report = ScalingReport("disjointness", list(DISJOINT_COLUMNS))
    frames = _frames(cfg, report)
    scaled_ok = jstar_ok = sound = monotone = True
    for p in frames:
        previous = None
        for M in sorted(int(m) for m in cfg["M"]):
            res = disjointness_check(p, M)
            bad = boundary_counterexamples(p, res)
            report.add_row(**{"lambda": p.lam, "eps0": p.eps0, "M": M, "J_star": res.J_star,
                              "K_star": res.K_star, "k_scaled": res.k_scaled,
                              "counterexamples": bad, "equation": "disjoint-rotation"})
            scaled_ok &= _in_band(res.k_scaled, cfg["scaled_band"])
            jstar_ok &= res.J_star <= int(cfg["j_star_max"])
            sound &= bad == 0
            if previous is not None:
                monotone &= res.K_star <= previous
            previous = res.K_star
    scaled = report.column("k_scaled")
    report.summary.update(k_scaled_min=min(scaled), k_scaled_max=max(scaled),
                          J_star_max=max(report.column("J_star")))
    report.checks.update(k_scaled_band=scaled_ok, J_star=jstar_ok, no_counterexample=sound,
                         K_star_monotone=monotone)
    return report


# ------------------------------------------------------------------ discrete model

def run_reduce_a3(cfg, workers=1):
    from ..superposition import (MODEL_COLUMNS, extremal_model_coefficients,
                                 gaussian_model_coefficients, model_ratio_with_error, model_rhs,
                                 single_index_coefficients, slowly_varying_coefficients)

    report = ScalingReport("reduceA3", list(MODEL_COLUMNS))
    structured = {"single": single_index_coefficients, "extremal": extremal_model_coefficients,
                  "slowly-varying": slowly_varying_coefficients}
    maxima = {e: [] for e in cfg["ensembles"]}
    for lam in (int(v) for v in cfg["lambda"]):
        for ens in cfg["ensembles"]:
            if ens == "gaussian":
                a = gaussian_model_coefficients(lam, [int(cfg["seed"]), lam], int(cfg["seeds"]))
                seeds = list(range(a.shape[0]))
            elif ens in structured:
                a = structured[ens](lam)[None, :]
                seeds = [None]
            else:
                raise ValueError(f"ensembles: unknown ensemble {ens!r}")
            ratio, err = model_ratio_with_error(a, lam)
            rhs = model_rhs(a, lam)
            for i, s in enumerate(seeds):
                report.add_row(**{"lambda": lam, "ensemble": ens, "seed": s,
                                  "norm": float(ratio[i] * rhs[i]), "rhs": float(rhs[i]),
                                  "ratio": float(ratio[i]), "equation": "model-A3",
                                  "resolution_error": float(err[i])})
            maxima[ens].append((lam, float(np.max(ratio))))
    for ens, pts in maxima.items():
        report.summary[f"max_ratio_{ens}"] = pts
        if len(pts) >= 3:
            report.fits[f"{ens}:max_ratio_vs_lambda"] = loglog_fit(pts)
    if "gaussian" in maxima:
        ceiling = max(v for _, v in maxima["gaussian"])
        report.checks["gaussian_ratio"] = ceiling <= float(cfg["c_ratio"])
        fit = report.fits.get("gaussian:max_ratio_vs_lambda")
        report.checks["gaussian_slope"] = fit is not None and _in_band(fit.slope, cfg["slope_band"])
        if "extremal" in maxima:
            top = max(v for _, v in maxima["extremal"])
            report.summary["extremal_over_gaussian"] = top / ceiling
            report.checks["extremal_within_band"] = 0.125 <= top / ceiling <= 8.0
    return report


# ------------------------------------------------------------------ dispersive

def _dispersive_job(job):
    from ..superposition import (DispersiveGrid, dispersive_batch, dispersive_rhs,
                                 gaussian_coefficients)

    lam, eps0, seed, seeds, grid_kw, thr = job
    params = make_frame(lam, eps0)
    a = gaussian_coefficients(params, [seed, int(lam), int(round(1.0 / eps0))], seeds)
    res = dispersive_batch(params, None, a, DispersiveGrid(**grid_kw), thr)
    out = {}
    for key in ("full", "A1", "A2", "A3"):
        cn = res.coef_norms[key]
        if not np.any(cn > 0):
            continue
        rhs = dispersive_rhs(params, key, cn)
        out[key] = (res.norms[key], rhs, res.error(key))
    return lam, eps0, out


def run_dispersive_sweep(cfg, workers=1):
    from ..superposition import DISPERSIVE_COLUMNS

    report = ScalingReport("dispersive-sweep", list(DISPERSIVE_COLUMNS))
    frames = _frames(cfg, report)
    grid_kw = {"r_max": float(cfg["r_max"]), "n_angles": int(cfg["n_angles"]),
               "nq": int(cfg["nq"])}
    thr = _thresholds(cfg)
    jobs = [(p.lam, p.eps0, int(cfg["seed"]), int(cfg["seeds"]), grid_kw, thr) for p in frames]
    keys = ("full", "A1", "A2", "A3") if cfg["classwise"] else ("full",)
    cell_max = {k: [] for k in keys}
    with _mapper(workers) as map_fn:
        results = list(map_fn(_dispersive_job, jobs))
    for key in keys:
        for lam, eps0, out in results:
            if key not in out:
                continue
            norms, rhs, err = out[key]
            for i in range(norms.size):
                report.add_row(**{"lambda": lam, "eps0": eps0, "ensemble": "gaussian", "seed": i,
                                  "norm": float(norms[i]), "rhs": float(rhs[i]),
                                  "ratio": float(norms[i] / rhs[i]),
                                  "equation": f"dispersive-{key}",
                                  "resolution_error": float(err[i] / rhs[i])})
            cell_max[key].append((lam, eps0, float(np.max(norms / rhs))))
    band = float(cfg["band_max"])
    for key, cells in cell_max.items():
        vals = [v for _, _, v in cells]
        report.summary[f"cell_max_{key}"] = [list(c) for c in cells]
        report.summary[f"band_{key}"] = max(vals) / min(vals) if vals else None
        report.checks[f"band_{key}"] = bool(vals) and max(vals) / min(vals) <= band
    for eps0 in sorted({e for _, e, _ in cell_max["full"]}, reverse=True):
        pts = [(lam, v) for lam, e, v in cell_max["full"] if e == eps0]
        if len(pts) >= 3:
            report.fits[f"eps0={eps0:g}:max_ratio_vs_lambda"] = loglog_fit(pts)
    return report


# ------------------------------------------------------------------ Strichartz

def _strichartz_job(job):
    from ..radial.wave import band_state, strichartz_basis, strichartz_ratio

    lam, s, T, R, control = job
    basis = strichartz_basis(lam, R)
    data = band_state(basis, lam)
    return lam, strichartz_ratio(data, s, T), strichartz_ratio(data, s, T, rhs_order=control)


def run_strichartz_sweep(cfg, workers=1):
    from ..radial.wave import STRICHARTZ_COLUMNS

    report = ScalingReport("strichartz-sweep", list(STRICHARTZ_COLUMNS))
    s, T, control = float(cfg["s"]), float(cfg["T"]), float(cfg["control_order"])
    jobs = [(int(lam), s, T, float(cfg["R"]), control) for lam in cfg["lambda"]]
    main, ctrl = [], []
    with _mapper(workers) as map_fn:
        for lam, res, res_c in map_fn(_strichartz_job, jobs):
            for r, tag in ((res, "strichartz"), (res_c, f"strichartz-control-H{control:g}")):
                report.add_row(**{"lambda": lam, "s": s, "T": T, "norm": r.norm, "rhs": r.rhs,
                                  "ratio": r.ratio, "equation": tag,
                                  "resolution_error": r.resolution_error})
            main.append((lam, res.ratio))
            ctrl.append((lam, res_c.ratio))
    if len(main) >= 3:
        report.fits["ratio_vs_lambda"] = loglog_fit(main)
        report.fits["control_vs_lambda"] = loglog_fit(ctrl)
        report.checks["slope"] = report.fits["ratio_vs_lambda"].slope <= float(cfg["slope_max"])
        report.checks["control_slope"] = \
            report.fits["control_vs_lambda"].slope >= float(cfg["control_slope_min"])
    else:
        report.checks["enough_points"] = False
    return report


# ------------------------------------------------------------------ Picard

def _picard_data(cfg, basis):
    from ..radial.fields import RadialField, gaussian_field, hs_norm
    from ..radial.wave import SolverState

    u0 = gaussian_field(basis, float(cfg["width"]))
    u0 = u0 * (float(cfg["amplitude"]) / hs_norm(u0, float(cfg["s"])))
    return SolverState(u0, RadialField.zeros(basis))


def run_picard(cfg, workers=1):
    from ..radial.fields import FourierBesselBasis
    from ..radial.wave import PICARD_COLUMNS, Nonlinearity, picard_solve

    report = ScalingReport("picard-run", list(PICARD_COLUMNS))
    basis = FourierBesselBasis(float(cfg["R"]), int(cfg["N"]))
    data = _picard_data(cfg, basis)
    s, T, tol = float(cfg["s"]), float(cfg["T"]), float(cfg["tol"])
    res = picard_solve(data, Nonlinearity(cfg["p"], cfg["q"]), s, T, tol, int(cfg["max_iter"]))
    for i, inc in enumerate(res.increments):
        factor = inc / res.increments[i - 1] if i > 0 and res.increments[i - 1] > 0 else None
        report.add_row(iteration=i + 1, increment=inc, factor=factor, s=s, T=T, equation="picard")
    lin = picard_solve(data, Nonlinearity(), s, T, tol, int(cfg["max_iter"]))
    report.summary.update(iterations=res.iterations, residual=res.residual,
                          max_factor=res.max_factor, l2linf=res.l2linf,
                          linear_iterations=lin.iterations)
    report.checks["max_factor"] = res.max_factor <= float(cfg["factor_max"])
    report.checks["residual"] = res.residual <= 10.0 * tol
    report.checks["linear_one_iteration"] = lin.iterations == 1
    return report


def run_stability(cfg, workers=1):
    from ..radial.fields import FourierBesselBasis, gaussian_field
    from ..radial.wave import STABILITY_COLUMNS, Nonlinearity, SolverState, stability_check

    report = ScalingReport("stability", list(STABILITY_COLUMNS))
    basis = FourierBesselBasis(float(cfg["R"]), int(cfg["N"]))
    bg = gaussian_field(basis, float(cfg["width"]), float(cfg["background"]))
    data = SolverState(bg, bg)
    pert = gaussian_field(basis, float(cfg["perturbation_width"]))
    nl = Nonlinearity(cfg["p"], cfg["q"])
    s, T = float(cfg["s"]), float(cfg["T"])
    kw = {"tol": float(cfg["tol"]), "max_iter": int(cfg["max_iter"])}
    cs = []
    for d in cfg["delta"]:
        other = SolverState(bg, bg + pert * float(d))
        res = stability_check(data, other, nl, s, T, **kw)
        report.add_row(delta=float(d), s=s, T=T, lhs=res.lhs, data_diff=res.data_diff,
                       gronwall_x=res.gronwall_x, fitted_C=res.fitted_C, equation="stability")
        cs.append(res.fitted_C)
    same = stability_check(data, data, nl, s, T, **kw)
    report.add_row(delta=0.0, s=s, T=T, lhs=same.lhs, data_diff=same.data_diff,
                   gronwall_x=same.gronwall_x, fitted_C=same.fitted_C, equation="stability")
    positive = [c for c in cs if c > 0]
    spread = max(positive) / min(positive) if len(positive) == len(cs) else math.inf
    report.summary.update(fitted_C=cs, C_spread=spread, identical_lhs=same.lhs)
    report.checks["C_stable"] = spread <= float(cfg["c_band"])
    report.checks["identical_data"] = same.lhs <= 1e-10
    return report


# ------------------------------------------------------------------ energy

def _striqlw_job(job):
    from ..radial.metric import striqlw_ratio
    from ..radial.wave import strichartz_basis

    lam, R, r_order, rho, T = job
    return lam, striqlw_ratio(strichartz_basis(lam, R), lam, r_order, rho, T)


def run_energy_check(cfg, workers=1):
    from ..radial.fields import FourierBesselBasis
    from ..radial.metric import ENERGY_CHECK_COLUMNS, bump_metric, energy_estimate_check

    report = ScalingReport("energy-check", list(ENERGY_CHECK_COLUMNS))
    r_order, T, R = float(cfg["r_order"]), float(cfg["T"]), float(cfg["R"])
    rho = r_order - 0.6 if cfg["rho"] is None else float(cfg["rho"])
    basis = FourierBesselBasis(R, int(cfg["N"]))
    w = float(cfg["width"])
    data = (lambda r: np.exp(-(np.asarray(r) / w) ** 2), lambda r: np.zeros_like(np.asarray(r)))
    flat = energy_estimate_check(None, data, r_order, T, r_max=R, basis=basis)
    report.add_row(case="flat", r_order=r_order, T=T, grid_points=flat.grid_points,
                   energy_ratio=flat.energy_ratio, literal_ratio=flat.literal_ratio,
                   equation="energy", resolution_error=0.0)
    g = bump_metric(float(cfg["bump_amplitude"]), float(cfg["bump_radius"]))
    bumps = [energy_estimate_check(g, data, r_order, T, n_points=int(n), r_max=R, basis=basis)
             for n in sorted(cfg["n_points"])]
    ratios = [b.energy_ratio for b in bumps]
    for i, b in enumerate(bumps):
        err = abs(ratios[i + 1] - ratios[i]) if i + 1 < len(bumps) else \
            (abs(ratios[i] - ratios[i - 1]) if i > 0 else None)
        report.add_row(case="bump", r_order=r_order, T=T, grid_points=b.grid_points,
                       energy_ratio=b.energy_ratio, literal_ratio=b.literal_ratio,
                       equation="energy", resolution_error=err)
    changes = [abs(b - a) / abs(a) for a, b in zip(ratios, ratios[1:])]
    pts = []
    jobs = [(int(lam), R, r_order, rho, T) for lam in cfg["lambda"]]
    with _mapper(workers) as map_fn:
        for lam, res in map_fn(_striqlw_job, jobs):
            report.add_row(case="striqlw", **{"lambda": lam}, r_order=r_order, rho=rho, T=T,
                           norm=res.norm, rhs=res.rhs, ratio=res.ratio, equation="striqlw",
                           resolution_error=res.resolution_error)
            pts.append((lam, res.ratio))
    report.summary.update(flat_energy_ratio=flat.energy_ratio, bump_ratios=ratios,
                          bump_changes=changes)
    report.checks["flat_conservation"] = abs(flat.energy_ratio - 1.0) <= float(cfg["flat_tol"])
    report.checks["bump_refinement"] = bool(changes) and max(changes) <= float(cfg["refinement_tol"])
    if len(pts) >= 3:
        report.fits["striqlw_vs_lambda"] = loglog_fit(pts)
        report.checks["striqlw_slope"] = \
            report.fits["striqlw_vs_lambda"].slope <= float(cfg["slope_max"])
    return report


RUNNERS = {
    "overlap-scan": run_overlap_scan,
    "linf-scan": run_linf_scan,
    "disjointness": run_disjointness,
    "reduceA3": run_reduce_a3,
    "dispersive-sweep": run_dispersive_sweep,
    "strichartz-sweep": run_strichartz_sweep,
    "picard-run": run_picard,
    "stability": run_stability,
    "energy-check": run_energy_check,
}


def run(config, workers=1):
    """Run one experiment.

    Parameters
    ----------
    config : ExperimentConfig or str
        A config, or an experiment name to run with its defaults.
    workers : int
        Process count for the cell map; results do not depend on it.

    Returns
    -------
    ScalingReport

    Raises
    ------
    ValueError
        For an unknown experiment or a violated precondition.
    """
    if isinstance(config, str):
        config = make_config(config)
    if not isinstance(config, ExperimentConfig):
        raise TypeError("config must be an ExperimentConfig or an experiment name")
    runner = RUNNERS.get(config.experiment)
    if runner is None:
        raise ValueError(f"unknown experiment {config.experiment!r}")
    report = runner(config, workers)
    report.provenance.update(config_sha256=config.sha256(), seed=config.seed,
                             version=__version__, experiment=config.experiment,
                             numpy=np.__version__)
    return report
