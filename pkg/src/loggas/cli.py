"""Command-line front end: `loggas <subcommand> --input file.json [...]`.

Subcommands: critical, bounds, closed-form, arboricity, sk-check,
mc-partition, mc-gibbs, ensemble.  Reports are JSON with a stable field
order plus a human-readable text rendering; sweeps emit CSV.  Extended
reals serialize as "inf"/"-inf", exact rationals as "p/q" strings.
Exit codes: 0 ok, 2 input error, 3 size limit, 4 domain error.
LOGGAS_THREADS caps the parallelism of ensemble trials and sweep points.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import closed_forms, sphere_mc
from .coupling import (
    CouplingMatrix,
    SystemInput,
    from_charges,
    load_system,
    sample_gaussian_charges,
    sample_gaussian_couplings,
)
from .errors import (
    DOMAIN_ERRORS,
    SIZE_ERRORS,
    InputFormatError,
    InstanceTooLarge,
    LogGasError,
    OutsideInterval,
)
from .graphs import arboricity as run_arboricity
from .graphs import sk_ground_state_check
from .rational import format_real
from .solver import CriticalReport, SolverOptions, critical_interval, solve_both
from .spectral import charge_bounds, eig_bounds, symmetric_eigs

SCHEMA_VERSION = 1


@dataclass
class RunConfig:
    subcommand: str
    input_path: Optional[str] = None
    output_path: Optional[str] = None
    mode: str = "auto"  # exact | float | auto
    tol: float = 1e-9
    seed: int = 0
    samples: int = 100_000
    beta_grid: tuple = ()
    steps: int = 20_000
    burn_in: int = 2_000
    thin: int = 1
    step_size: float = 0.5
    model: str = "gaussian_couplings"
    n: int = 8
    trials: int = 50
    variance: Optional[float] = None
    extra: dict = field(default_factory=dict)


def _threads() -> int:
    env = os.environ.get("LOGGAS_THREADS")
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def _resolve_mode(system: SystemInput, mode: str) -> bool:
    """True for exact solving; 'auto' follows the input's exactness."""
    if mode == "exact":
        if not system.coupling.is_exact:
            raise InputFormatError("exact mode requires rational-expressible input")
        return True
    if mode == "float":
        return False
    return system.coupling.is_exact


def _float_view(c: CouplingMatrix) -> CouplingMatrix:
    return CouplingMatrix(c.n, np.array(c.entries, dtype=float), None)


def _solver_matrix(system: SystemInput, exact: bool) -> CouplingMatrix:
    return system.coupling if exact else _float_view(system.coupling)


def _jsonable(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, float):
        return format_real(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _write_report(report: dict, out_path: Optional[str]):
    payload = json.dumps(_jsonable(report), indent=2) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(payload)


def _mask_labels(mask) -> list:
    return [i + 1 for i in mask.indices()]


def _asymptote(kappa: int, n: int, beta) -> Optional[str]:
    if kappa == 0:
        return None
    return f"({kappa}/{n})*log(beta-({format_real(beta)}))"


def _critical_report_dict(report: CriticalReport, mode: str) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "subcommand": "critical",
        "mode": mode,
        "n": report.n,
        "t_plus": format_real(report.t_plus),
        "t_minus": format_real(report.t_minus),
        "beta_minus": format_real(report.beta_minus),
        "beta_plus": format_real(report.beta_plus),
        "attained_plus": report.attained_plus,
        "attained_minus": report.attained_minus,
        "g_plus": [_mask_labels(s) for s in report.g_plus],
        "g_minus": [_mask_labels(s) for s in report.g_minus],
        "kappa_plus": report.kappa_plus,
        "kappa_minus": report.kappa_minus,
        "max_nests_plus": [[_mask_labels(s) for s in k.members] for k in report.max_nests_plus],
        "max_nests_minus": [[_mask_labels(s) for s in k.members] for k in report.max_nests_minus],
        "nests_truncated_plus": report.nests_truncated_plus,
        "nests_truncated_minus": report.nests_truncated_minus,
        "support_plus": list(report.support_plus.rendered),
        "support_minus": list(report.support_minus.rendered),
        "free_energy_asymptote_plus": _asymptote(report.kappa_plus, report.n, report.beta_plus),
        "free_energy_asymptote_minus": _asymptote(report.kappa_minus, report.n, report.beta_minus),
        "degenerate": report.degenerate,
    }


def _print_critical(doc: dict):
    print(f"n = {doc['n']}  (mode: {doc['mode']})")
    print(f"interval: ({doc['beta_minus']}, {doc['beta_plus']})")
    print(f"T+ = {doc['t_plus']}   T- = {doc['t_minus']}")
    if doc["degenerate"]:
        print("degenerate: both endpoints infinite, no collapse on either side")
        return
    for side in ("plus", "minus"):
        if not doc[f"attained_{side}"]:
            print(f"{side}: endpoint infinite")
            continue
        sets = ", ".join("{" + ",".join(map(str, s)) + "}" for s in doc[f"g_{side}"])
        print(f"G_{side} = [{sets}]   kappa_{side} = {doc[f'kappa_{side}']}")
        for pattern in doc[f"support_{side}"]:
            print(f"  support_{side}: {pattern}")
        if doc[f"nests_truncated_{side}"]:
            print(f"  (nest enumeration truncated)")
        print(f"  free energy ~ {doc[f'free_energy_asymptote_{side}']}")


def cmd_critical(cfg: RunConfig) -> int:
    system = load_system(cfg.input_path)
    exact = _resolve_mode(system, cfg.mode)
    opts = SolverOptions(tie_tol=cfg.tol, exact=exact)
    report = critical_interval(_solver_matrix(system, exact), opts)
    doc = _critical_report_dict(report, "exact" if exact else "float")
    _write_report(doc, cfg.output_path)
    _print_critical(doc)
    return 0


def cmd_bounds(cfg: RunConfig) -> int:
    system = load_system(cfg.input_path)
    c = _float_view(system.coupling)
    spectrum = symmetric_eigs(c)
    eig = eig_bounds(c)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "subcommand": "bounds",
        "n": c.n,
        "eigenvalues": [float(v) for v in spectrum.eigenvalues],
        "eig_beta_plus_lower": format_real(eig.beta_plus_lower),
        "eig_beta_minus_upper": format_real(eig.beta_minus_upper),
        "charge_beta_plus_lower": None,
        "charge_beta_minus_upper": None,
    }
    if system.charges is not None:
        cb = charge_bounds(system.charges)
        doc["charge_beta_plus_lower"] = format_real(cb.beta_plus_lower)
        doc["charge_beta_minus_upper"] = format_real(cb.beta_minus_upper)
    _write_report(doc, cfg.output_path)
    print(f"beta+ >= {doc['eig_beta_plus_lower']}  (eigenvalue bound, valid when beta+ finite)")
    print(f"beta- <= {doc['eig_beta_minus_upper']}  (eigenvalue bound, valid when beta- finite)")
    if system.charges is not None:
        print(f"beta+ >= {doc['charge_beta_plus_lower']}  (charge bound)")
        print(f"beta- <= {doc['charge_beta_minus_upper']}  (charge bound)")
    return 0


def cmd_closed_form(cfg: RunConfig) -> int:
    system = load_system(cfg.input_path)
    if system.two_component is not None:
        crit = closed_forms.two_component_critical(system.two_component)
        doc = {
            "schema_version": SCHEMA_VERSION,
            "subcommand": "closed-form",
            "model": "two_component",
            "beta_plus": format_real(crit.beta_plus),
            "kappa_plus": crit.kappa_plus,
            "g_plus": crit.g_plus_description,
            "free_energy_prefactor": format_real(crit.free_energy_prefactor),
        }
        _write_report(doc, cfg.output_path)
        print(f"beta+ = {doc['beta_plus']}   kappa+ = {doc['kappa_plus']}  ({doc['g_plus']})")
        print(f"free energy prefactor: {doc['free_energy_prefactor']}")
        return 0
    if system.charges is not None:
        crit = closed_forms.onsager_beta_minus(system.charges)
        doc = {
            "schema_version": SCHEMA_VERSION,
            "subcommand": "closed-form",
            "model": "onsager",
            "beta_minus": format_real(crit.beta_minus),
            "winning_side": crit.winning_side,
            "candidate_pos": format_real(crit.candidate_pos),
            "candidate_neg": format_real(crit.candidate_neg),
            "support": list(crit.support_rendered),
        }
        _write_report(doc, cfg.output_path)
        print(f"beta- = {doc['beta_minus']}   side: {doc['winning_side']}")
        for pattern in doc["support"]:
            print(f"  support: {pattern}")
        return 0
    raise InputFormatError("closed-form needs a 'two_component' or 'charges' input")


def cmd_arboricity(cfg: RunConfig) -> int:
    system = load_system(cfg.input_path)
    if system.graph is None:
        raise InputFormatError("arboricity needs a 'graph' input")
    report = run_arboricity(system.graph)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "subcommand": "arboricity",
        "n": system.graph.n,
        "edges": len(system.graph.edges),
        "fractional": str(report.fractional),
        "arboricity": report.arboricity,
        "witness": _mask_labels(report.witness),
    }
    _write_report(doc, cfg.output_path)
    print(f"fractional arboricity = {doc['fractional']}  ->  arboricity = {doc['arboricity']}")
    print(f"densest vertex set (1-based): {doc['witness']}")
    return 0


def cmd_sk_check(cfg: RunConfig) -> int:
    system = load_system(cfg.input_path)
    exact = _resolve_mode(system, cfg.mode)
    holds = sk_ground_state_check(_solver_matrix(system, exact), tol=cfg.tol)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "subcommand": "sk-check",
        "n": system.coupling.n,
        "mode": "exact" if exact else "float",
        "holds": holds,
    }
    _write_report(doc, cfg.output_path)
    print(f"ground-state identity holds: {holds}")
    return 0


def _parse_beta_grid(text: str) -> tuple:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise InputFormatError("beta grid range must be a:b:steps")
        a, b, steps = float(parts[0]), float(parts[1]), int(parts[2])
        if steps < 1:
            raise InputFormatError("beta grid needs at least one point")
        grid = tuple(float(x) for x in np.linspace(a, b, steps))
    else:
        grid = tuple(float(x) for x in text.split(","))
    if len(grid) > 1:
        diffs = np.diff(grid)
        if not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise InputFormatError("beta grid must be strictly monotone")
    return grid


def cmd_mc_partition(cfg: RunConfig) -> int:
    system = load_system(cfg.input_path)
    c = _float_view(system.coupling)
    report = critical_interval(c)
    lo, hi = float(report.beta_minus), float(report.beta_plus)
    grid = cfg.beta_grid
    if not grid:
        raise InputFormatError("mc-partition requires --beta-grid")
    for beta in grid:
        if not (lo < beta < hi):
            raise OutsideInterval(f"beta={beta} outside ({lo}, {hi})")

    def estimate(item):
        index, beta = item
        return sphere_mc.estimate_partition(c, beta, cfg.samples, cfg.seed + index)

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        estimates = list(pool.map(estimate, enumerate(grid)))
    rows = list(zip(grid, estimates))

    metadata = {}
    finite_endpoints = [e for e in (lo, hi) if math.isfinite(e)]
    for endpoint in finite_endpoints:
        if len(grid) >= 5 and abs(grid[-1] - endpoint) < abs(grid[0] - endpoint):
            betas = list(grid)
            logz = [math.log(est.mean) for est in estimates]
            try:
                kappa = sphere_mc.pole_order_fit(betas, logz, endpoint)
            except LogGasError:
                continue
            metadata["pole_fit_beta_crit"] = endpoint
            metadata["pole_fit_kappa"] = kappa
            break

    out = cfg.output_path or "partition_sweep.csv"
    sphere_mc.write_partition_csv(out, rows, metadata or None)
    print(f"wrote {len(rows)} rows to {out}")
    for beta, est in rows:
        tail = " heavy-tail" if est.heavy_tail else ""
        print(f"  beta={beta:g}: Z~{est.mean:.6g} +- {est.stderr:.2g}{tail}")
    if metadata:
        print(f"pole fit toward beta={metadata['pole_fit_beta_crit']:g}: "
              f"kappa ~ {metadata['pole_fit_kappa']:.3f}")
    return 0


def _class_labels(system: SystemInput) -> list:
    if system.two_component is not None:
        return [0] * system.two_component.n1 + [1] * system.two_component.n2
    if system.charges is not None:
        return [0 if float(v) > 0 else 1 for v in system.charges.values]
    return [0] * system.coupling.n


def cmd_mc_gibbs(cfg: RunConfig) -> int:
    system = load_system(cfg.input_path)
    c = _float_view(system.coupling)
    labels = _class_labels(system)
    grid = cfg.beta_grid
    if not grid:
        raise InputFormatError("mc-gibbs requires --beta-grid")

    def run(item):
        index, beta = item
        params = sphere_mc.ChainParams(
            beta=beta, steps=cfg.steps, burn_in=cfg.burn_in, thin=cfg.thin,
            step_size=cfg.step_size, seed=cfg.seed + index,
        )
        chain = sphere_mc.metropolis_chain(c, params)
        stats = sphere_mc.collapse_observables(chain.configurations, labels, chain.energies)
        return chain, stats

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        results = list(pool.map(run, enumerate(grid)))

    rows = []
    for beta, (chain, stats) in zip(grid, results):
        if stats.min_opposite_quantiles is not None:
            rows.append((beta, "min_opposite_dist", stats.min_opposite_quantiles))
        if stats.min_same_quantiles is not None:
            rows.append((beta, "min_same_dist", stats.min_same_quantiles))
        rows.append((beta, "max_pair_dist", stats.max_quantiles))
    out = cfg.output_path or "collapse_sweep.csv"
    sphere_mc.write_collapse_csv(out, rows)
    print(f"wrote {len(rows)} rows to {out}")
    for beta, (chain, stats) in zip(grid, results):
        print(f"  beta={beta:g}: acceptance={chain.acceptance_rate:.2f} "
              f"median max dist={stats.max_quantiles[2]:.3f}")
    return 0


# ---------------------------------------------------------------------------
# Ensemble experiments
# ---------------------------------------------------------------------------

_BOUND_SLACK = 1e-9


@dataclass(frozen=True)
class EnsembleReport:
    model: str
    n: int
    trials: int
    rows: tuple
    summary: dict
    bound_violations: int


def run_ensemble(model: str, n: int, trials: int, seed: int,
                 variance: Optional[float] = None) -> EnsembleReport:
    """Sample random instances, solve, and check the deterministic bounds.

    gaussian_couplings records the eigenvalue bounds of the coupling matrix;
    gaussian_charges records the closed-form charge bounds.  Violations
    (beyond 1e-9 relative slack) are counted and must be zero."""
    if n > 20:
        raise InstanceTooLarge(f"ensemble limited to n <= 20, got {n}")
    if trials < 1:
        raise ValueError("need trials >= 1")
    if model not in ("gaussian_couplings", "gaussian_charges"):
        raise InputFormatError(f"unknown ensemble model {model!r}")
    if model == "gaussian_couplings" and variance is None:
        variance = 1.0 / n

    def trial(index: int) -> dict:
        trial_seed = seed + index
        if model == "gaussian_couplings":
            c = sample_gaussian_couplings(n, variance, trial_seed)
            plus, minus = solve_both(c)
            spectrum = symmetric_eigs(c)
            bound_plus = -spectrum.lambda_min
            bound_minus = spectrum.lambda_max  # -T- <= lambda_max
        else:
            k = sample_gaussian_charges(n, trial_seed)
            c = from_charges(k)
            plus, minus = solve_both(c)
            kf = k.as_floats()
            bound_plus = float(np.max(kf**2))
            bound_minus = float(np.sum(kf**2) - np.min(kf**2))
        t_plus, t_minus = float(plus.t_value), float(minus.t_value)
        violations = 0
        if plus.attained and t_plus > bound_plus + _BOUND_SLACK * max(1.0, abs(bound_plus)):
            violations += 1
        if minus.attained and -t_minus > bound_minus + _BOUND_SLACK * max(1.0, abs(bound_minus)):
            violations += 1
        return {
            "trial": index,
            "seed": trial_seed,
            "t_plus": t_plus,
            "t_minus": t_minus,
            "bound_t_plus": bound_plus,
            "bound_neg_t_minus": bound_minus,
            "violations": violations,
        }

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        rows = list(pool.map(trial, range(trials)))

    t_plus_values = np.array([r["t_plus"] for r in rows])
    t_minus_values = np.array([r["t_minus"] for r in rows])
    levels = sphere_mc.QUANTILE_LEVELS
    summary = {
        "t_plus_quantiles": [float(q) for q in np.percentile(t_plus_values, levels)],
        "t_minus_quantiles": [float(q) for q in np.percentile(t_minus_values, levels)],
        "quantile_levels": list(levels),
    }
    total = int(sum(r["violations"] for r in rows))
    if total != 0:
        raise RuntimeError(f"deterministic bounds violated on {total} trials")
    return EnsembleReport(model, n, trials, tuple(rows), summary, total)


def cmd_ensemble(cfg: RunConfig) -> int:
    report = run_ensemble(cfg.model, cfg.n, cfg.trials, cfg.seed, cfg.variance)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "subcommand": "ensemble",
        "model": report.model,
        "n": report.n,
        "trials": report.trials,
        "bound_violations": report.bound_violations,
        "summary": report.summary,
        "rows": list(report.rows),
    }
    _write_report(doc, cfg.output_path)
    q = report.summary["t_plus_quantiles"]
    print(f"{report.model}: n={report.n}, trials={report.trials}, "
          f"bound violations={report.bound_violations}")
    print(f"T+ quantiles (5/25/50/75/95%): {['%.3f' % v for v in q]}")
    q = report.summary["t_minus_quantiles"]
    print(f"T- quantiles (5/25/50/75/95%): {['%.3f' % v for v in q]}")
    return 0


# ---------------------------------------------------------------------------
# Argument parsing and dispatch
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="loggas",
        description="Critical temperatures and Monte Carlo checks for "
                    "logarithmic pair-potential systems on the sphere.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", required=True, help="input JSON file")
        p.add_argument("--out", default=None, help="output file (JSON report or CSV)")
        p.add_argument("--mode", choices=["exact", "float", "auto"], default="auto")
        p.add_argument("--tol", type=float, default=1e-9, help="float-mode tie tolerance")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("critical", help="solve for the critical interval and collapse data")
    common(p)
    p = sub.add_parser("bounds", help="eigenvalue and charge bounds on beta+-")
    common(p)
    p = sub.add_parser("closed-form", help="closed-form criticals (two-component / point vortex)")
    common(p)
    p = sub.add_parser("arboricity", help="fractional arboricity of a graph input")
    common(p)
    p = sub.add_parser("sk-check", help="ground-state identity check")
    common(p)

    p = sub.add_parser("mc-partition", help="Monte Carlo partition-function sweep (CSV)")
    common(p)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--beta-grid", required=True, help="a:b:steps or comma list")

    p = sub.add_parser("mc-gibbs", help="Metropolis collapse-observable sweep (CSV)")
    common(p)
    p.add_argument("--beta-grid", required=True, help="a:b:steps or comma list")
    p.add_argument("--steps", type=int, default=20_000)
    p.add_argument("--burn-in", type=int, default=2_000)
    p.add_argument("--thin", type=int, default=1)
    p.add_argument("--step-size", type=float, default=0.5)

    p = sub.add_parser("ensemble", help="random-instance ensembles with bound checks")
    common(p, needs_input=False)
    p.add_argument("--model", choices=["gaussian_couplings", "gaussian_charges"],
                   default="gaussian_couplings")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--variance", type=float, default=None,
                   help="coupling variance (default 1/n)")
    return parser


_COMMANDS = {
    "critical": cmd_critical,
    "bounds": cmd_bounds,
    "closed-form": cmd_closed_form,
    "arboricity": cmd_arboricity,
    "sk-check": cmd_sk_check,
    "mc-partition": cmd_mc_partition,
    "mc-gibbs": cmd_mc_gibbs,
    "ensemble": cmd_ensemble,
}


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(subcommand=args.subcommand)
    cfg.input_path = getattr(args, "input", None)
    cfg.output_path = args.out
    cfg.mode = args.mode
    cfg.tol = args.tol
    cfg.seed = args.seed
    if hasattr(args, "samples"):
        cfg.samples = args.samples
    if hasattr(args, "beta_grid"):
        cfg.beta_grid = _parse_beta_grid(args.beta_grid)
    if hasattr(args, "steps"):
        cfg.steps = args.steps
        cfg.burn_in = args.burn_in
        cfg.thin = args.thin
        cfg.step_size = args.step_size
    if hasattr(args, "model"):
        cfg.model = args.model
        cfg.n = args.n
        cfg.trials = args.trials
        cfg.variance = args.variance
    if cfg.tol <= 0:
        raise InputFormatError("tol must be positive")
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
        return _COMMANDS[args.subcommand](cfg)
    except SIZE_ERRORS as exc:
        print(f"error (size limit): {exc}", file=sys.stderr)
        return 3
    except DOMAIN_ERRORS as exc:
        print(f"error (domain): {exc}", file=sys.stderr)
        return 4
    except (LogGasError, FileNotFoundError, ValueError) as exc:
        print(f"error (input): {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
