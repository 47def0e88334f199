"""Rank-based comparison protocol for repeated stochastic runs.

Two solver configurations are compared metric by metric with a two-sided
Mann-Whitney U test; a significant result counts as a win for whichever
side ranks lower (smaller time or distance is better), anything else is a
draw. Tallies of wins, draws, and losses across datasets render as an
aligned text table or CSV.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.stats import mannwhitneyu

from .engine import RunReport

_METRICS = ("Time", "Distance")


class Verdict(Enum):
    WIN = "Win"
    DRAW = "Draw"
    LOSS = "Loss"


@dataclass(frozen=True)
class ComparisonResult:
    metric: str
    u_statistic: float
    p_value: float
    verdict: Verdict


def mann_whitney_u(sample_a, sample_b, alpha: float = 0.05,
                   metric: str = "Time") -> ComparisonResult:
    """Two-sided U test with tie-corrected normal approximation and
    continuity correction, read from sample A's point of view: Win when
    the difference is significant at ``alpha`` and A ranks lower.

    The reported statistic is U of sample A, so complete separation with
    A smaller gives 0 and with A larger gives len(a)*len(b).
    """
    a = np.asarray(sample_a, dtype=np.float64)
    b = np.asarray(sample_b, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be non-empty")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie strictly between 0 and 1")
    if metric not in _METRICS:
        raise ValueError(f"metric must be one of {_METRICS}")
    half = a.size * b.size / 2.0
    if np.all(a == a[0]) and np.all(b == a[0]):
        # one shared constant carries no rank information, and the normal
        # approximation would divide by a zero spread
        return ComparisonResult(metric, half, 1.0, Verdict.DRAW)
    result = mannwhitneyu(a, b, alternative="two-sided", method="asymptotic")
    u_a = float(result.statistic)
    p = float(result.pvalue)
    if p < alpha:
        verdict = Verdict.WIN if u_a < half else Verdict.LOSS
    else:
        verdict = Verdict.DRAW
    return ComparisonResult(metric, u_a, p, verdict)


@dataclass(frozen=True)
class RunSummary:
    mean_time: float
    stddev_time: float
    mean_distance: float
    stddev_distance: float
    mean_cpu: float


def summarize_runs(reports: list[RunReport]) -> RunSummary:
    """Sample statistics over each run's final incumbent: makespan, the
    trucks' travel distance, and process CPU seconds."""
    if len(reports) < 2:
        raise ValueError("need at least 2 runs for sample statistics")
    times = np.array([r.objective for r in reports], dtype=np.float64)
    dists = np.array([r.truck_distance for r in reports], dtype=np.float64)
    cpus = np.array([r.cpu_seconds for r in reports], dtype=np.float64)
    return RunSummary(
        mean_time=float(times.mean()),
        stddev_time=float(times.std(ddof=1)),
        mean_distance=float(dists.mean()),
        stddev_distance=float(dists.std(ddof=1)),
        mean_cpu=float(cpus.mean()),
    )


@dataclass(frozen=True)
class TallyRow:
    label: str
    wins: int
    draws: int
    losses: int


def tally(label: str, results) -> TallyRow:
    counts = Counter(r.verdict for r in results)
    return TallyRow(label, counts[Verdict.WIN], counts[Verdict.DRAW],
                    counts[Verdict.LOSS])


def render_tally_text(rows: list[TallyRow]) -> str:
    width = max([len("Combination")] + [len(r.label) for r in rows])
    header = f"{'Combination':<{width}}  {'Wins':>5}  {'Draws':>5}  {'Losses':>6}"
    lines = [header, "-" * len(header)]
    for r in rows:
        lines.append(f"{r.label:<{width}}  {r.wins:>5}  {r.draws:>5}  {r.losses:>6}")
    return "\n".join(lines) + "\n"


def render_tally_csv(rows: list[TallyRow]) -> str:
    lines = ["combination,wins,draws,losses"]
    for r in rows:
        label = r.label.replace('"', '""')
        if "," in label:
            label = f'"{label}"'
        lines.append(f"{label},{r.wins},{r.draws},{r.losses}")
    return "\n".join(lines) + "\n"
