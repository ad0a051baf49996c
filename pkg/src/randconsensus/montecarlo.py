"""Monte Carlo simulation of consensus trajectories.

Each trial owns the stream :func:`~randconsensus.random_net.trial_stream`
``(master_seed, trial)`` and pulls its uniforms in blocks of ``BLOCK_STEPS``
realizations. Trials are simulated in fixed chunks of ``CHUNK_TRIALS``
consecutive indices, so the arithmetic performed for a trial never depends
on how many worker processes are used.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import AllTrialsDiverged, ValidationError
from .graph import CandidateGraph, Scenario
from .random_net import BatchUpdater, trial_stream

BLOCK_STEPS = 16
CHUNK_TRIALS = 1024


@dataclass(frozen=True, eq=False)
class TrajectoryResult:
    consensus_value: float
    steps: int
    converged: bool
    path: np.ndarray | None = None  # states x(0), x(1), ... when recorded


def _simulate(graph, x0, streams, tol, max_steps, record=False):
    """Run a batch of trajectories; returns (values, steps, converged, path)."""
    upd = BatchUpdater(graph)
    nb = len(streams)
    x0 = np.asarray(x0, dtype=float)
    final = np.tile(x0, (nb, 1))
    steps = np.zeros(nb, dtype=np.int64)
    converged = np.zeros(nb, dtype=bool)
    path = [x0.copy()] if record else None

    idx = np.arange(nb)
    x = final.copy()
    buf = None
    k = 0
    while idx.size:
        done = (x.max(axis=1) - x.min(axis=1)) < tol
        if done.any():
            final[idx[done]] = x[done]
            converged[idx[done]] = True
            keep = ~done
            idx, x = idx[keep], x[keep]
            if buf is not None:
                buf = buf[keep]
            if not idx.size:
                break
        if k >= max_steps:
            final[idx] = x
            break
        slot = k % BLOCK_STEPS
        if slot == 0:
            buf = np.stack([streams[t].random((BLOCK_STEPS, upd.m)) for t in idx])
        x = upd.step(x, buf[:, slot, :])
        steps[idx] += 1
        k += 1
        if record:
            path.append(x[0].copy())
    values = final.mean(axis=1)
    return values, steps, converged, (np.array(path) if record else None)


def run_trajectory(
    graph: CandidateGraph,
    x0,
    trial_stream: np.random.Generator,
    tol: float = 1e-10,
    max_steps: int = 100_000,
    *,
    record: bool = False,
) -> TrajectoryResult:
    """Iterate ``x <- W_k x`` with fresh realizations until the spread drops below ``tol``.

    Non-convergence within ``max_steps`` is reported, not raised. With
    ``record=True`` the whole state path is kept.
    """
    if not tol > 0 or max_steps < 1:
        raise ValidationError("tol must be positive and max_steps at least 1")
    v, s, c, path = _simulate(graph, x0, [trial_stream], tol, max_steps, record)
    return TrajectoryResult(float(v[0]), int(s[0]), bool(c[0]), path)


def _run_chunk(args):
    graph, x0, seed, start, stop, tol, max_steps = args
    streams = [trial_stream(seed, t) for t in range(start, stop)]
    v, s, c, _ = _simulate(graph, x0, streams, tol, max_steps)
    return v, s, c


@dataclass(frozen=True, eq=False)
class EnsembleStats:
    trials: int
    converged: int
    mean: float
    std: float
    std_defined: bool
    values: np.ndarray  # converged trials only, in trial order
    histogram: list  # (bin_lower, bin_upper, count)
    all_values: np.ndarray
    steps: np.ndarray
    converged_mask: np.ndarray

    @property
    def diverged(self) -> int:
        return self.trials - self.converged

    @property
    def standard_error(self) -> float:
        return self.std / np.sqrt(self.converged) if self.converged else float("nan")

    def summary(self) -> dict:
        return {"trials": self.trials, "converged": self.converged, "mean": self.mean, "std": self.std}


def histogram(values: np.ndarray, bins: int = 20) -> list:
    if values.size == 0:
        return []
    lo, hi = float(values.min()), float(values.max())
    counts, edges = np.histogram(values, bins=bins, range=(lo, hi))
    return [(float(a), float(b), int(c)) for a, b, c in zip(edges[:-1], edges[1:], counts)]


def run_ensemble(scenario: Scenario, *, workers: int = 1, bins: int | None = None) -> EnsembleStats:
    """Simulate ``scenario.trials`` independent trajectories.

    Output is identical for any ``workers`` value. Raises
    :class:`AllTrialsDiverged` if no trial reaches consensus.
    """
    trials = int(scenario.trials)
    bounds = [(a, min(a + CHUNK_TRIALS, trials)) for a in range(0, trials, CHUNK_TRIALS)]
    jobs = [
        (scenario.graph, scenario.initial, int(scenario.master_seed), a, b, scenario.tol, int(scenario.max_steps))
        for a, b in bounds
    ]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, jobs))
    else:
        parts = [_run_chunk(j) for j in jobs]
    values = np.concatenate([p[0] for p in parts])
    steps = np.concatenate([p[1] for p in parts])
    conv = np.concatenate([p[2] for p in parts])

    good = values[conv]
    if good.size == 0:
        raise AllTrialsDiverged(f"none of {trials} trials converged within {scenario.max_steps} steps")
    defined = good.size > 1
    std = float(np.std(good, ddof=1)) if defined else 0.0
    return EnsembleStats(
        trials=trials,
        converged=int(good.size),
        mean=float(good.mean()),
        std=std,
        std_defined=defined,
        values=good,
        histogram=histogram(good, scenario.bins if bins is None else bins),
        all_values=values,
        steps=steps,
        converged_mask=conv,
    )


def write_ensemble_csv(stats: EnsembleStats, path: str | Path) -> None:
    rows = ["trial,consensus_value,steps,converged\n"]
    for t, (v, s, c) in enumerate(zip(stats.all_values, stats.steps, stats.converged_mask)):
        rows.append(f"{t},{v:.17g},{s},{int(c)}\n")
    Path(path).write_text("".join(rows), encoding="utf-8", newline="\n")


def write_histogram_csv(stats: EnsembleStats, path: str | Path) -> None:
    rows = ["bin_lower,bin_upper,count\n"]
    rows += [f"{a:.17g},{b:.17g},{c}\n" for a, b, c in stats.histogram]
    Path(path).write_text("".join(rows), encoding="utf-8", newline="\n")


def write_summary_json(stats: EnsembleStats, path: str | Path) -> None:
    Path(path).write_text(json.dumps(stats.summary(), indent=2) + "\n", encoding="utf-8", newline="\n")
