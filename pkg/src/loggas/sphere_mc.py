"""Monte Carlo verification layer on (S^2)^N.

Energy evaluation with chordal distances, plain Monte Carlo estimation of
the partition function against the analytic two-particle closed form,
least-squares pole-order fitting of the free-energy divergence, and a
single-particle Metropolis sampler of the Gibbs measure with collapse
observables.

All randomness comes from numpy's Philox counter-based generator with
explicit seeds.  Chordal distances are plain Euclidean norms in R^3; no
stereographic chart is used anywhere.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .coupling import CouplingMatrix
from .errors import (
    CoincidentPoints,
    DegenerateGrid,
    EmptySample,
    OutsideDomain,
    OutsideInterval,
)
from .solver import SolverOptions, critical_interval

_BATCHES = 32
_TUNE_WINDOW = 200
_TUNE_FACTOR = 1.25
_STEP_MIN, _STEP_MAX = 1e-3, 4.0


@dataclass(frozen=True)
class SphereConfiguration:
    """N unit vectors in R^3."""

    points: np.ndarray

    def __post_init__(self):
        pts = self.points
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError(f"expected (N,3) array, got {pts.shape}")
        norms = np.linalg.norm(pts, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-12):
            raise ValueError("points must lie on the unit sphere within 1e-12")
        pts.setflags(write=False)

    @property
    def n(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    stderr: float
    samples: int
    heavy_tail: bool


@dataclass(frozen=True)
class ChainParams:
    """Metropolis chain parameters.

    ``steps`` counts single-particle update attempts including burn-in;
    post-burn-in states are emitted every ``thin`` steps.  When
    ``auto_tune`` is on, the proposal scale is adapted toward 30-50%
    acceptance during burn-in and frozen afterwards."""

    beta: float
    steps: int
    burn_in: int
    thin: int = 1
    step_size: float = 0.5
    seed: int = 0
    auto_tune: bool = True

    def __post_init__(self):
        if not (0 <= self.burn_in < self.steps):
            raise ValueError("need 0 <= burn_in < steps")
        if self.thin < 1:
            raise ValueError("thin must be >= 1")
        if not self.step_size > 0:
            raise ValueError("step_size must be positive")


@dataclass(frozen=True)
class ChainResult:
    configurations: np.ndarray  # (M, N, 3)
    energies: np.ndarray  # (M,)
    acceptance_rate: float  # post-burn-in
    step_size: float  # frozen value actually used after burn-in


QUANTILE_LEVELS = (5, 25, 50, 75, 95)


@dataclass(frozen=True)
class CollapseStats:
    """Quantiles (5/25/50/75/95%) of per-sample pair-distance extremes."""

    min_opposite_quantiles: Optional[tuple]  # None when a single class
    min_same_quantiles: Optional[tuple]  # None when all classes are singletons
    max_quantiles: tuple
    mean_energy: float


def _philox(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def _unit_rows(raw: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    norms = np.linalg.norm(raw, axis=-1, keepdims=True)
    while np.any(norms == 0.0):  # probability-zero guard
        zero = norms[..., 0] == 0.0
        raw[zero] = rng.standard_normal((int(np.sum(zero)), 3))
        norms = np.linalg.norm(raw, axis=-1, keepdims=True)
    return raw / norms


def sample_uniform(n: int, seed: int) -> SphereConfiguration:
    """n i.i.d. uniform points on S^2 via normalized 3D normal draws."""
    if n < 1:
        raise ValueError("need n >= 1")
    rng = _philox(seed)
    pts = _unit_rows(rng.standard_normal((n, 3)), rng)
    return SphereConfiguration(pts)


def energy(c: CouplingMatrix, cfg: SphereConfiguration) -> float:
    """E = -sum_{i<j} c(i,j) log d(p_i,p_j)^2, chordal distance in R^3."""
    pts = cfg.points
    if cfg.n != c.n:
        raise ValueError(f"configuration has {cfg.n} points, matrix has n={c.n}")
    iu = np.triu_indices(c.n, k=1)
    d2 = np.sum((pts[iu[0]] - pts[iu[1]]) ** 2, axis=1)
    cij = c.entries[iu]
    coupled = cij != 0.0
    bad = coupled & (d2 == 0.0)
    if np.any(bad):
        k = int(np.where(bad)[0][0])
        raise CoincidentPoints(f"particles {iu[0][k]} and {iu[1][k]} coincide")
    with np.errstate(divide="ignore"):
        logd2 = np.log(d2[coupled])
    return float(-np.sum(cij[coupled] * logd2))


def analytic_partition_two(c12: float, beta: float) -> float:
    """Exact two-particle partition function 2^(2*c12*beta)/(c12*beta + 1).

    Equals the normalized integral of d(p,q)^(2*c12*beta) over two uniform
    points; finite exactly for c12*beta > -1."""
    s = float(c12) * float(beta)
    if s <= -1.0:
        raise OutsideDomain(f"c*beta = {s} is <= -1")
    return 2.0 ** (2.0 * s) / (s + 1.0)


def _interval(c: CouplingMatrix):
    report = critical_interval(c, SolverOptions())
    return float(report.beta_minus), float(report.beta_plus)


def _check_inside(beta: float, lo: float, hi: float):
    if not (lo < beta < hi):
        raise OutsideInterval(f"beta={beta} not strictly inside ({lo}, {hi})")


def _pair_log_weights(c: CouplingMatrix, pts: np.ndarray) -> np.ndarray:
    """sum_{i<j} c(i,j) log d_ij^2 for a batch of configurations (B,N,3)."""
    n = c.n
    iu = np.triu_indices(n, k=1)
    cij = c.entries[iu]
    coupled = cij != 0.0
    diffs = pts[:, iu[0][coupled], :] - pts[:, iu[1][coupled], :]
    d2 = np.sum(diffs * diffs, axis=2)
    with np.errstate(divide="ignore"):
        logd2 = np.log(d2)
    return logd2 @ cij[coupled]


def estimate_partition(c: CouplingMatrix, beta: float, samples: int, seed: int) -> MCEstimate:
    """Plain Monte Carlo average of prod d^(2 c beta) over uniform draws.

    Standard error by 32 batch means.  The heavy-tail flag marks exponents
    where the single-pair factor has no second moment
    (min_{i<j} c(i,j)*beta <= -1/2), so the reported stderr is then only
    indicative."""
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    lo, hi = _interval(c)
    _check_inside(beta, lo, hi)

    rng = _philox(seed)
    block = max(1, (1 << 21) // (c.n * c.n))
    weights = np.empty(samples, dtype=float)
    done = 0
    while done < samples:
        b = min(block, samples - done)
        pts = _unit_rows(rng.standard_normal((b, c.n, 3)), rng)
        logw = beta * _pair_log_weights(c, pts)
        weights[done:done + b] = np.exp(logw)
        done += b

    mean = float(np.mean(weights))
    batch_means = np.array([np.mean(chunk) for chunk in np.array_split(weights, _BATCHES)])
    stderr = float(np.std(batch_means, ddof=1) / math.sqrt(_BATCHES))
    iu = np.triu_indices(c.n, k=1)
    heavy = bool(np.min(c.entries[iu] * beta) <= -0.5)
    return MCEstimate(mean, stderr, samples, heavy)


def pole_order_fit(betas: Sequence[float], logz: Sequence[float], beta_crit: float) -> float:
    """Least-squares slope of log Z against -log|beta - beta_crit|.

    For Z ~ A (beta-beta_crit)^(-kappa) the slope is the pole order kappa.
    The grid must have >= 5 points on one side of beta_crit, ordered
    strictly toward it."""
    b = np.asarray(list(betas), dtype=float)
    y = np.asarray(list(logz), dtype=float)
    if b.shape != y.shape or b.ndim != 1:
        raise DegenerateGrid("betas and logZ must be 1D of equal length")
    if b.size < 5:
        raise DegenerateGrid(f"need >= 5 grid points, got {b.size}")
    delta = b - beta_crit
    if np.any(delta == 0.0):
        raise DegenerateGrid("grid touches beta_crit")
    if not (np.all(delta > 0) or np.all(delta < 0)):
        raise DegenerateGrid("grid straddles beta_crit")
    dist = np.abs(delta)
    if not np.all(np.diff(dist) < 0):
        raise DegenerateGrid("grid must be sorted strictly toward beta_crit")
    x = -np.log(dist)
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def _particle_energy(c_row: np.ndarray, pts: np.ndarray, i: int, p: np.ndarray):
    """Interaction energy of particle i at position p with all others.

    Returns +/-inf-free value or None when p coincides with a coupled
    particle (proposal must be rejected)."""
    diffs = pts - p
    d2 = np.sum(diffs * diffs, axis=1)
    d2[i] = 1.0
    coupled = c_row != 0.0
    if np.any(d2[coupled] == 0.0):
        return None
    with np.errstate(divide="ignore"):
        val = -np.sum(c_row[coupled] * np.log(d2[coupled]))
    return float(val)


def metropolis_chain(c: CouplingMatrix, params: ChainParams) -> ChainResult:
    """Single-particle Metropolis sampling of the Gibbs measure.

    Proposals project p_i + step * g (g a 3D standard normal) back to the
    sphere; the induced kernel depends only on chord distance so it is
    symmetric and min(1, exp(-beta dE)) is the correct acceptance rule.
    Particles are updated in a fixed cyclic order.  Acceptance is reported
    over post-burn-in steps."""
    lo, hi = _interval(c)
    _check_inside(params.beta, lo, hi)

    rng = _philox(params.seed)
    n = c.n
    pts = _unit_rows(rng.standard_normal((n, 3)), rng)
    rows = np.array(c.entries, dtype=float)
    total_energy = 0.0
    for i in range(n):
        part = _particle_energy(rows[i], pts, i, pts[i])
        total_energy += part / 2.0 if part is not None else math.inf

    step = params.step_size
    beta = params.beta
    configs, energies = [], []
    accepted_tune = 0
    accepted_main = 0
    main_steps = 0

    for t in range(params.steps):
        i = t % n
        g = rng.standard_normal(3)
        proposal = pts[i] + step * g
        norm = float(np.linalg.norm(proposal))
        u = rng.random()
        accept = False
        if norm > 0.0:
            proposal = proposal / norm
            e_old = _particle_energy(rows[i], pts, i, pts[i])
            e_new = _particle_energy(rows[i], pts, i, proposal)
            if e_new is not None:
                if e_old is None:
                    # coincident start (measure zero): escape unconditionally
                    accept = True
                    pts[i] = proposal
                    parts = [_particle_energy(rows[j], pts, j, pts[j]) for j in range(n)]
                    total_energy = (math.inf if any(p is None for p in parts)
                                    else sum(parts) / 2.0)
                else:
                    log_alpha = -beta * (e_new - e_old)
                    if log_alpha >= 0.0 or u < math.exp(log_alpha):
                        accept = True
                        pts[i] = proposal
                        total_energy += e_new - e_old

        in_burn = t < params.burn_in
        if in_burn:
            if accept:
                accepted_tune += 1
            if params.auto_tune and (t + 1) % _TUNE_WINDOW == 0:
                rate = accepted_tune / _TUNE_WINDOW
                if rate > 0.5:
                    step = min(step * _TUNE_FACTOR, _STEP_MAX)
                elif rate < 0.3:
                    step = max(step / _TUNE_FACTOR, _STEP_MIN)
                accepted_tune = 0
        else:
            main_steps += 1
            if accept:
                accepted_main += 1
            if (t - params.burn_in) % params.thin == 0:
                configs.append(pts.copy())
                energies.append(total_energy)

    rate = accepted_main / main_steps if main_steps else 0.0
    return ChainResult(
        configurations=np.array(configs),
        energies=np.array(energies),
        acceptance_rate=rate,
        step_size=step,
    )


def collapse_observables(samples: np.ndarray, labels: Sequence[int],
                         energies: Optional[np.ndarray] = None) -> CollapseStats:
    """Distance-quantile summary of sampled configurations.

    ``labels`` assigns each particle a class (charge sign or species); the
    per-sample observables are the minimum opposite-class distance, minimum
    same-class distance, and maximum pair distance."""
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 3 or samples.shape[0] == 0:
        raise EmptySample("need a nonempty (M,N,3) sample array")
    n = samples.shape[1]
    labels = np.asarray(list(labels))
    if labels.shape != (n,):
        raise ValueError(f"need {n} class labels, got {labels.shape}")

    iu = np.triu_indices(n, k=1)
    opposite = labels[iu[0]] != labels[iu[1]]
    same = ~opposite
    diffs = samples[:, iu[0], :] - samples[:, iu[1], :]
    dists = np.sqrt(np.sum(diffs * diffs, axis=2))

    def quantiles(values: np.ndarray) -> tuple:
        return tuple(float(q) for q in np.percentile(values, QUANTILE_LEVELS))

    min_opp = quantiles(np.min(dists[:, opposite], axis=1)) if np.any(opposite) else None
    min_same = quantiles(np.min(dists[:, same], axis=1)) if np.any(same) else None
    max_q = quantiles(np.max(dists, axis=1))
    mean_e = float(np.mean(energies)) if energies is not None else math.nan
    return CollapseStats(min_opp, min_same, max_q, mean_e)


# ---------------------------------------------------------------------------
# CSV emission
# ---------------------------------------------------------------------------

def write_partition_csv(path, rows, metadata: Optional[dict] = None):
    """Partition sweep: beta, logZ_mean, logZ_stderr, samples, heavy_tail.

    Optional metadata (e.g. a pole-order fit) goes into trailing comment
    lines."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["beta", "logZ_mean", "logZ_stderr", "samples", "heavy_tail"])
        for beta, est in rows:
            logz = math.log(est.mean) if est.mean > 0 else math.nan
            logz_err = est.stderr / est.mean if est.mean > 0 else math.nan
            writer.writerow([beta, logz, logz_err, est.samples,
                             "true" if est.heavy_tail else "false"])
        if metadata:
            for key, value in metadata.items():
                fh.write(f"# {key}={value}\n")


def write_collapse_csv(path, rows):
    """Collapse sweep: beta, obs_name, q05, q25, q50, q75, q95."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["beta", "obs_name", "q05", "q25", "q50", "q75", "q95"])
        for beta, name, quants in rows:
            writer.writerow([beta, name, *quants])
