import logging
import time
from dataclasses import replace
from pathlib import Path

import pandas as pd

from exchange_kinetics import __version__
from exchange_kinetics.analysis.entropy import fit_sqrt_exponential_decay
from exchange_kinetics.analysis.equilibrium import equilibrium_pmf, laplace_params
from exchange_kinetics.analysis.gini import compare_gini_vs_vanilla
from exchange_kinetics.analysis.linearization import linearization_report
from exchange_kinetics.cli.config import ExperimentConfig, config_echo
from exchange_kinetics.cli.io import (
    pmf_event_filename,
    pmf_time_filename,
    write_json,
    write_pmf_csv,
    write_trajectory_csv,
)
from exchange_kinetics.distribution.functionals import total_variation
from exchange_kinetics.distribution.pmf import WealthPMF
from exchange_kinetics.logger import CSVFileLogger, Logger, PrintLogger
from exchange_kinetics.mean_field.integrator import integrate_two_phase
from exchange_kinetics.monte_carlo.monte_carlo import GENERATOR_NAME, run
from exchange_kinetics.monte_carlo.replicas import run_ensemble

logger = logging.getLogger(__name__)

FINITE_SIZE_AGENTS = 100


def _record_loggers(cfg: ExperimentConfig, csv_path: Path) -> list[Logger]:
    loggers: list[Logger] = [CSVFileLogger(csv_path, force_overwrite=True)]
    if cfg.verbose:
        loggers.append(PrintLogger())
    return loggers


def run_equilibrium(cfg: ExperimentConfig) -> dict:
    spec, pmf = equilibrium_pmf(cfg.mu, cfg.nu)
    right, left = spec.decay_rates()
    report = spec.as_dict()
    report["laplace"] = laplace_params(cfg.mu, cfg.nu).as_dict() if cfg.nu > 0 else None
    report["decay_rates"] = {"right": right, "left": left}
    write_json(report, cfg.output_dir / "equilibrium.json")
    write_pmf_csv(pmf, cfg.output_dir / "pmf_equilibrium.csv")
    return report


def run_linearize(cfg: ExperimentConfig) -> dict:
    report = linearization_report(cfg.mu, cfg.nu).as_dict()
    write_json(report, cfg.output_dir / "linearization.json")
    return report


def run_abm(cfg: ExperimentConfig) -> dict:
    out = cfg.output_dir
    config = cfg.run_config()
    if cfg.replicas == 1:
        result = run(config, loggers=_record_loggers(cfg, out / "trajectory.csv"))
        snapshots = result.snapshots
        final = WealthPMF.from_samples(result.ensemble.wealth)
        summary = result.summary()
    else:
        ensemble = run_ensemble(config, cfg.replicas)
        write_trajectory_csv(ensemble.trajectory, out / "trajectory.csv")
        snapshots = ensemble.snapshots
        final = ensemble.final_pmf
        summary = {
            "replicas": [r.summary() for r in ensemble.replicas],
            "seeds": ensemble.seeds,
            "generator": GENERATOR_NAME,
        }
    for event, pmf in snapshots.items():
        write_pmf_csv(pmf, out / pmf_event_filename(event))
    write_pmf_csv(final, out / "pmf_final.csv")
    summary["params"] = {"n_agents": cfg.n_agents, "mu": cfg.mu, "nu": cfg.nu, "lambda": cfg.lam}
    write_json(summary, out / "summary.json")
    return summary


def run_meanfield(cfg: ExperimentConfig) -> dict:
    out = cfg.output_dir
    result = integrate_two_phase(
        WealthPMF.point_mass_at_mean(cfg.mu),
        cfg.params,
        cfg.integrator_config(),
        loggers=_record_loggers(cfg, out / "trajectory.csv"),
    )
    for t, pmf in result.snapshots.items():
        write_pmf_csv(pmf, out / pmf_time_filename(t))
    write_pmf_csv(result.state.pmf, out / "pmf_final.csv")
    report = result.report()
    write_json(report, out / "report.json")

    if result.t_star is not None and cfg.nu > 0:
        traj = result.trajectory
        rows = traj[(traj["t"] > result.t_star) & (traj["dkl_to_eq"] > 0)]
        try:
            fit = fit_sqrt_exponential_decay(rows["t"], rows["dkl_to_eq"])
        except ValueError as e:
            logger.warning("no decay fit: %s", e)
        else:
            write_json(fit.as_dict(), out / "decay_fit.json")
            report["decay_fit"] = fit.as_dict()
    return report


def run_gini_sweep(cfg: ExperimentConfig) -> dict:
    out = cfg.output_dir
    integrator_config = cfg.integrator_config()
    report = {}
    for nu in cfg.nus:
        frame = compare_gini_vs_vanilla(cfg.mu, nu, cfg.t_end, integrator_config, lam=cfg.lam)
        write_trajectory_csv(frame, out / f"gini_nu_{nu:g}.csv")
        report[f"{nu:g}"] = {
            "t_star": frame.attrs["t_star"],
            "max_gini_banked": float(frame["gini_banked"].max()),
            "final_gini_banked": float(frame["gini_banked"].iloc[-1]),
            "final_gini_vanilla": float(frame["gini_vanilla"].iloc[-1]),
            "min_difference": float(frame["difference"].min()),
        }
        logger.info("nu = %g: max Gini %.6g", nu, report[f"{nu:g}"]["max_gini_banked"])
    write_json(report, out / "gini_sweep.json")
    return report


def compare_abm_meanfield(cfg: ExperimentConfig) -> dict:
    """
    Replica-averaged agent simulation against the mean-field solution from the same
    start (every agent at mu), compared in total variation at each snapshot time.
    Times are matched through t = events / (lambda N).
    """
    snapshot_times = cfg.snapshots or (cfg.t_end,)
    events = [cfg.events_at(t) for t in snapshot_times]
    run_config = replace(cfg.run_config(), max_events=max(events), snapshot_schedule=tuple(events))
    finite_size = cfg.n_agents < FINITE_SIZE_AGENTS
    if finite_size:
        logger.warning("only %d agents; expect finite-size deviations from the mean-field law", cfg.n_agents)

    abm = run_ensemble(run_config, cfg.replicas)
    meanfield = integrate_two_phase(
        WealthPMF.point_mass_at_mean(cfg.mu),
        cfg.params,
        cfg.integrator_config(t_end=max(snapshot_times), snapshot_times=snapshot_times),
    )
    rows = []
    for t, event in zip(snapshot_times, events):
        rows.append(
            {
                "t": t,
                "events": event,
                "total_variation": total_variation(abm.snapshots[event], meanfield.snapshots[t]),
            }
        )
    return {
        "n_agents": cfg.n_agents,
        "mu": cfg.mu,
        "nu": cfg.nu,
        "lambda": cfg.lam,
        "replicas": cfg.replicas,
        "seed": cfg.seed,
        "generator": GENERATOR_NAME,
        "finite_size_warning": finite_size,
        "snapshots": rows,
        "max_total_variation": max(r["total_variation"] for r in rows),
    }


def run_compare(cfg: ExperimentConfig) -> dict:
    report = compare_abm_meanfield(cfg)
    write_json(report, cfg.output_dir / "comparison.json")
    write_trajectory_csv(pd.DataFrame(report["snapshots"]), cfg.output_dir / "comparison.csv")
    return report


RUNNERS = {
    "equilibrium": run_equilibrium,
    "linearize": run_linearize,
    "abm": run_abm,
    "meanfield": run_meanfield,
    "gini-sweep": run_gini_sweep,
    "compare": run_compare,
}


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Runs the configured mode, writes its files and manifest.json, returns the mode's report."""
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    logger.info("running %s into %s", cfg.mode, cfg.output_dir)
    report = RUNNERS[cfg.mode](cfg)
    elapsed = time.perf_counter() - started

    manifest = {
        "version": __version__,
        "mode": cfg.mode,
        "config": config_echo(cfg),
        "timings": {"total_seconds": elapsed},
        "files": sorted(p.name for p in cfg.output_dir.iterdir() if p.name != "manifest.json"),
    }
    if cfg.mode in ("abm", "compare"):
        manifest["seed"] = cfg.seed
        manifest["generator"] = GENERATOR_NAME
    write_json(manifest, cfg.output_dir / "manifest.json")
    logger.info("%s finished in %.2fs", cfg.mode, elapsed)
    return report
