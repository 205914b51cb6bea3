"""Monte Carlo learning-curve harness.

Runs the distributed, centralized, and reference recursions side by side
over many seeded trials and produces per-agent mean-square-deviation
curves, steady-state estimates with trial-level standard errors, fitted
convergence rates, and centroid-decomposition diagnostics.

Trials are evolved in lockstep (vectorized over the trial axis) but each
trial owns a counter-derived random stream, so results are independent
of batching and worker layout.  Per trial the stream is consumed in
fixed-size iteration blocks, each laid out iteration-major with the
regressor normals of all agents followed by the measurement noises.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DivergenceError
from .model import assumption_constants, limit_point
from .policy import CombinationPolicy, build_perron
from .strategy import (distributed_update, reference_init, step_reference,
                       transposed_combiners)
from .theory import stable_step_bound

_BLOCK = 256
_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_CENT_SALT = 0x94D049BB133111EB
_DIVERGENCE_SQ = 1e24  # on squared error norms, i.e. deviations above 1e12


def _splitmix64(x: int) -> int:
    x &= _MASK64
    x = (x + _GOLDEN) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def trial_seed(seed: int, trial: int, salt: int = 0) -> int:
    """Counter-based per-trial stream seed: splitmix of seed ^ trial * odd."""
    return _splitmix64((seed ^ (trial * _GOLDEN) ^ salt) & _MASK64)


@dataclass
class SimConfig:
    """Monte Carlo experiment description.

    paired_streams: when True the centralized recursion consumes the same
    samples as the distributed one (variance-reduced comparisons);
    otherwise it draws its own per-trial streams.
    """

    trials: int
    iters: int
    seed: int
    policy: CombinationPolicy
    model: object
    mus: object
    steady_window: float = 0.1
    paired_streams: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("need at least one trial")
        if self.iters < 10:
            raise ValueError("need at least 10 iterations")
        if not 0.0 < self.steady_window <= 0.5:
            raise ValueError("steady_window must lie in (0, 0.5]")


@dataclass
class LearningCurves:
    """Per-iteration error series averaged over trials, plus steady-state
    per-trial window means for standard errors."""

    msd: np.ndarray               # (iters, N)
    centralized_msd: np.ndarray   # (iters,)
    reference_err: np.ndarray     # (iters,)
    centroid_offset: np.ndarray   # (iters, N)
    trials: int
    config: SimConfig
    w_star: np.ndarray
    theta: np.ndarray
    p: np.ndarray
    mu_max: float
    _trial_msd: np.ndarray = field(repr=False)        # (T, N) full window
    _trial_msd_half: np.ndarray = field(repr=False)   # (T, N) last half of it
    _trial_cent: np.ndarray = field(repr=False)       # (T,)
    _trial_cent_half: np.ndarray = field(repr=False)  # (T,)

    @property
    def iters(self) -> int:
        return self.msd.shape[0]

    @property
    def n_agents(self) -> int:
        return self.msd.shape[1]

    def _window_start(self, half: bool) -> int:
        full = math.ceil(self.config.steady_window * self.iters)
        if half:
            return self.iters - math.ceil(0.5 * self.config.steady_window
                                          * self.iters)
        return self.iters - full

    def steady_state(self, half: bool = False):
        """Per-agent steady MSD: (mean (N,), trial-level stderr (N,))."""
        v = self._trial_msd_half if half else self._trial_msd
        return v.mean(axis=0), _stderr(v)

    def steady_state_centralized(self, half: bool = False):
        v = self._trial_cent_half if half else self._trial_cent
        return float(v.mean()), float(_stderr(v[:, None])[0])

    def steady_offset(self, half: bool = False) -> np.ndarray:
        """Per-agent steady centroid-offset energy (window mean)."""
        return self.centroid_offset[self._window_start(half):].mean(axis=0)


def _stderr(v: np.ndarray) -> np.ndarray:
    if v.shape[0] < 2:
        return np.zeros(v.shape[1])
    return v.std(axis=0, ddof=1) / math.sqrt(v.shape[0])


def run(config: SimConfig) -> LearningCurves:
    """Evolve all three recursions and accumulate learning curves.

    Agents start from zero, so the curves begin in the coordinated
    (reference-tracking) phase directly.  Raises ``DivergenceError`` when
    any trajectory leaves the trust region, which signals an unstable
    step size.
    """
    model, policy = config.model, config.policy
    n, m = model.n_agents, model.m
    mus = np.broadcast_to(np.asarray(config.mus, dtype=float), (n,)).copy()
    perron = build_perron(policy, mus)
    theta, p, mu_max = perron.theta, perron.p, perron.mu_max
    w_star = limit_point(model, p)

    bound = stable_step_bound(assumption_constants(model, p), p)
    if mu_max > 0.9 * bound:
        warnings.warn(
            f"mu_max={mu_max:.3e} is within 10% of the stability bound "
            f"{bound:.3e}; expect inaccurate or divergent behavior",
            stacklevel=2,
        )

    trials, iters = config.trials, config.iters
    combiners = transposed_combiners(policy)
    width = model.stream_width

    gens = [np.random.default_rng(trial_seed(config.seed, t))
            for t in range(trials)]
    cent_gens = None
    if not config.paired_streams:
        cent_gens = [np.random.default_rng(trial_seed(config.seed, t, _CENT_SALT))
                     for t in range(trials)]

    # deterministic reference trajectory, shared by every trial
    ref_err = np.empty(iters)
    ref = reference_init(np.zeros((n, m)), theta)
    for i in range(iters):
        ref = step_reference(ref, perron, model)
        ref_err[i] = float(np.sum((w_star - ref.w_bar) ** 2))

    msd = np.empty((iters, n))
    cent_msd = np.empty(iters)
    offsets = np.empty((iters, n))

    window = math.ceil(config.steady_window * iters)
    half = math.ceil(0.5 * config.steady_window * iters)
    full_start, half_start = iters - window, iters - half
    acc = np.zeros((trials, n))
    acc_half = np.zeros((trials, n))
    acc_c = np.zeros(trials)
    acc_c_half = np.zeros(trials)

    w = np.zeros((trials, n, m))
    w_cent = np.zeros((trials, m))
    raw = np.empty((trials, _BLOCK, width))
    raw_c = np.empty((trials, _BLOCK, width)) if cent_gens else None

    for base in range(0, iters, _BLOCK):
        blk = min(_BLOCK, iters - base)
        for t, g in enumerate(gens):
            raw[t, :blk] = g.standard_normal((blk, width))
        u_all, d_all = model.regressors_from_raw(raw[:, :blk])
        if cent_gens is None:
            uc_all, dc_all = u_all, d_all
        else:
            for t, g in enumerate(cent_gens):
                raw_c[t, :blk] = g.standard_normal((blk, width))
            uc_all, dc_all = model.regressors_from_raw(raw_c[:, :blk])

        for j in range(blk):
            i = base + j
            w = distributed_update(w, combiners, mus, model,
                                   u_all[:, j], d_all[:, j])
            err = w - w_star
            sq = np.einsum("tkm,tkm->tk", err, err)
            msd[i] = sq.mean(axis=0)

            centroid = np.einsum("k,tkm->tm", theta, w)
            off = w - centroid[:, None, :]
            offsets[i] = np.einsum("tkm,tkm->tk", off, off).mean(axis=0)

            grad_c = model.stochastic_gradient_network(
                w_cent[:, None, :], uc_all[:, j], dc_all[:, j])
            w_cent = w_cent - mu_max * np.einsum("k,tkm->tm", p, grad_c)
            err_c = w_cent - w_star
            sq_c = np.einsum("tm,tm->t", err_c, err_c)
            cent_msd[i] = sq_c.mean()

            peak = max(float(sq.max()), float(sq_c.max()))
            if not np.isfinite(peak) or peak > _DIVERGENCE_SQ:
                flat = np.where(~np.isfinite(sq) | (sq > _DIVERGENCE_SQ))
                trial = int(flat[0][0]) if flat[0].size else int(np.argmax(sq_c))
                raise DivergenceError(
                    f"trajectory diverged at trial {trial}, iteration {i}; "
                    "the step size is too large",
                    trial=trial, iteration=i,
                )

            if i >= full_start:
                acc += sq
                acc_c += sq_c
                if i >= half_start:
                    acc_half += sq
                    acc_c_half += sq_c

    return LearningCurves(
        msd=msd,
        centralized_msd=cent_msd,
        reference_err=ref_err,
        centroid_offset=offsets,
        trials=trials,
        config=config,
        w_star=w_star,
        theta=theta,
        p=p,
        mu_max=mu_max,
        _trial_msd=acc / window,
        _trial_msd_half=acc_half / half,
        _trial_cent=acc_c / window,
        _trial_cent_half=acc_c_half / half,
    )


def steady_state_estimate(series, window: float = 0.1):
    """Mean of the final ceil(window * len) points and its standard error.

    The standard error here comes from the dispersion of the window points
    (a proxy; ``LearningCurves.steady_state`` gives the trial-level one).
    """
    series = np.asarray(series, dtype=float)
    if not 0.0 < window <= 0.5:
        raise ValueError("window must lie in (0, 0.5]")
    count = math.ceil(window * series.size)
    tail = series[series.size - count:]
    if count < 2:
        return float(tail.mean()), 0.0
    return float(tail.mean()), float(tail.std(ddof=1) / math.sqrt(count))


def fit_geometric_rate(series, i_start: int, i_end: int) -> float:
    """Per-step geometric ratio from a least-squares fit of log(series).

    Applied to the reference-recursion error it recovers the squared
    spectral contraction exactly when the decay is single-mode.
    """
    series = np.asarray(series, dtype=float)
    seg = series[i_start:i_end]
    if seg.size < 2:
        raise ValueError("need at least two points to fit a rate")
    if (seg <= 0).any():
        raise ValueError("series must be strictly positive on the fit range")
    x = np.arange(i_start, i_end, dtype=float)
    slope = np.polyfit(x, np.log(seg), 1)[0]
    return float(np.exp(slope))


def decomposition_diagnostics(curves: LearningCurves,
                              halved: LearningCurves | None = None) -> dict:
    """Steady-state centroid-offset energies and their ratio to the MSD.

    The per-agent offset energy E||w_k - w_c||^2 scales with the square of
    the step size while the MSD scales linearly, so the offset/MSD ratio
    should roughly halve when the step size is halved; passing the
    halved-step curves reports that response.
    """
    steady_msd, _ = curves.steady_state()
    steady_off = curves.steady_offset()
    ratios = np.divide(steady_off, steady_msd,
                       out=np.zeros_like(steady_off),
                       where=steady_msd > 0)
    network_ratio = float(steady_off.mean() / steady_msd.mean()) \
        if steady_msd.mean() > 0 else 0.0
    report = {
        "per_agent": [
            {
                "agent": k,
                "offset_energy": float(steady_off[k]),
                "msd": float(steady_msd[k]),
                "offset_to_msd": float(ratios[k]),
            }
            for k in range(curves.n_agents)
        ],
        "network": {
            "offset_energy": float(steady_off.mean()),
            "msd": float(steady_msd.mean()),
            "offset_to_msd": network_ratio,
        },
    }
    if halved is not None:
        h_msd, _ = halved.steady_state()
        h_ratio = float(halved.steady_offset().mean() / h_msd.mean())
        report["mu_halving_response"] = {
            "ratio_at_mu": network_ratio,
            "ratio_at_half_mu": h_ratio,
            "response": (h_ratio / network_ratio) if network_ratio > 0 else None,
        }
    return report


def export_csv(curves: LearningCurves, path) -> None:
    """Long-format dump: iter, agent, msd, msd_db, centralized_msd,
    reference_err, centroid_offset."""
    def _db(x):
        return 10.0 * math.log10(x) if x > 0 else float("-inf")

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iter", "agent", "msd", "msd_db", "centralized_msd",
                         "reference_err", "centroid_offset"])
        for i in range(curves.iters):
            for k in range(curves.n_agents):
                writer.writerow([
                    i, k,
                    repr(float(curves.msd[i, k])),
                    repr(_db(float(curves.msd[i, k]))),
                    repr(float(curves.centralized_msd[i])),
                    repr(float(curves.reference_err[i])),
                    repr(float(curves.centroid_offset[i, k])),
                ])


def run_summary(curves: LearningCurves, theory: dict | None = None) -> dict:
    """Steady-state table plus deltas against a theory block, JSON-ready."""
    steady, stderr = curves.steady_state()
    cent, cent_se = curves.steady_state_centralized()

    def _db(x):
        return 10.0 * math.log10(x) if x > 0 else None

    table = [
        {
            "agent": k,
            "steady_msd": float(steady[k]),
            "steady_msd_db": _db(float(steady[k])),
            "stderr": float(stderr[k]),
        }
        for k in range(curves.n_agents)
    ]
    summary = {
        "trials": curves.trials,
        "iters": curves.iters,
        "mu_max": curves.mu_max,
        "steady_state": table,
        "centralized": {
            "steady_msd": cent,
            "steady_msd_db": _db(cent),
            "stderr": cent_se,
        },
        "decomposition": decomposition_diagnostics(curves),
    }
    if theory is not None:
        prediction = theory.get("msd_first_order")
        if prediction:
            summary["theory_delta_db"] = [
                {
                    "agent": row["agent"],
                    "delta_db": (row["steady_msd_db"]
                                 - 10.0 * math.log10(prediction))
                    if row["steady_msd_db"] is not None else None,
                }
                for row in table
            ]
    return summary
