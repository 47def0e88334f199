"""Rank test, run summaries, and tally rendering."""

import numpy as np
import pytest

from support import exact_mwu_p, u_statistic
from tandemroute.engine import RunReport, Solution
from tandemroute.evaluate import DeliveryType, Gene, Genotype
from tandemroute.stats import (
    ComparisonResult,
    RunSummary,
    TallyRow,
    Verdict,
    mann_whitney_u,
    render_tally_csv,
    render_tally_text,
    summarize_runs,
    tally,
)


def report(time, distance=100.0, cpu=6.0):
    g = Genotype((Gene(1, DeliveryType.TRUCK),), (1,))
    return RunReport(
        instance_name="x", mode="vrp", seed=0, generations=1, pair_count=1,
        best=Solution(genotype=g, objective=time),
        truck_distance=distance, drone_distance=0.0,
        best_series=(time,), unique_fraction_series=(1.0,),
        fitness_stddev_series=(0.0,), wall_seconds=1.0, cpu_seconds=cpu,
    )


class TestMannWhitney:
    def test_complete_separation_at_n3_is_still_a_draw(self):
        a, b = [1.0, 2.0, 3.0], [4.0, 5.0, 6.0]
        assert u_statistic(a, b) == 0.0
        assert exact_mwu_p(a, b) == pytest.approx(0.1)
        result = mann_whitney_u(a, b, alpha=0.05)
        assert result.u_statistic == 0.0
        assert result.verdict is Verdict.DRAW
        assert abs(result.p_value - 0.1) <= 0.02

    def test_separation_at_n30_is_a_win(self):
        a = [10.0 + 0.1 * k for k in range(30)]
        b = [20.0 + 0.1 * k for k in range(30)]
        result = mann_whitney_u(a, b)
        assert result.verdict is Verdict.WIN
        assert result.u_statistic == 0.0
        assert result.p_value < 1e-9

    def test_mirrored_samples_swap_the_verdict(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            a = rng.normal(10, 2, size=12)
            b = rng.normal(12, 2, size=15)
            ab = mann_whitney_u(a, b)
            ba = mann_whitney_u(b, a)
            assert ab.p_value == pytest.approx(ba.p_value, abs=1e-12)
            assert ab.u_statistic + ba.u_statistic == pytest.approx(a.size * b.size)
            flips = {Verdict.WIN: Verdict.LOSS, Verdict.LOSS: Verdict.WIN,
                     Verdict.DRAW: Verdict.DRAW}
            assert ba.verdict is flips[ab.verdict]

    def test_identical_samples_draw(self):
        assert mann_whitney_u([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]).verdict is Verdict.DRAW
        constant = mann_whitney_u([5.0] * 10, [5.0] * 10)
        assert constant.verdict is Verdict.DRAW
        assert constant.p_value == 1.0
        assert constant.u_statistic == 50.0

    def test_asymptotic_tracks_exact_enumeration(self):
        # tie-free samples of 5..8 values each: the normal approximation
        # with continuity correction stays within 0.02 of the permutation p
        rng = np.random.default_rng(7)
        for _ in range(60):
            n1 = int(rng.integers(5, 9))
            n2 = int(rng.integers(5, 9))
            pool = rng.choice(10_000, size=n1 + n2, replace=False).astype(float)
            a, b = pool[:n1], pool[n1:]
            approx = mann_whitney_u(a, b).p_value
            exact = exact_mwu_p(a, b)
            assert abs(approx - exact) <= 0.02

    def test_input_validation(self):
        with pytest.raises(ValueError):
            mann_whitney_u([], [1.0])
        with pytest.raises(ValueError):
            mann_whitney_u([1.0], [2.0], alpha=0.0)
        with pytest.raises(ValueError):
            mann_whitney_u([1.0], [2.0], metric="Speed")


class TestSummarize:
    def test_two_value_statistics(self):
        summary = summarize_runs([report(10.0, 200.0, 60.0), report(20.0, 300.0, 120.0)])
        assert summary.mean_time == pytest.approx(15.0)
        assert summary.stddev_time == pytest.approx(7.0710678, abs=1e-6)
        assert summary.mean_distance == pytest.approx(250.0)
        assert summary.stddev_distance == pytest.approx(70.710678, abs=1e-5)
        assert summary.mean_cpu == pytest.approx(90.0)

    def test_identical_runs_have_zero_spread(self):
        summary = summarize_runs([report(10.0)] * 5)
        assert summary.stddev_time == 0.0
        assert summary.stddev_distance == 0.0

    def test_requires_two_runs(self):
        with pytest.raises(ValueError):
            summarize_runs([report(10.0)])


class TestTally:
    def make(self, verdicts):
        return [ComparisonResult("Time", 0.0, 0.01, v) for v in verdicts]

    def test_counts(self):
        row = tally("VRPDi", self.make([Verdict.WIN, Verdict.WIN, Verdict.DRAW]))
        assert (row.wins, row.draws, row.losses) == (2, 1, 0)

    def test_text_layout_aligns(self):
        rows = [TallyRow("VRPDi", 10, 0, 0), TallyRow("VRP", 0, 0, 10)]
        text = render_tally_text(rows)
        lines = text.splitlines()
        assert lines[0].split() == ["Combination", "Wins", "Draws", "Losses"]
        assert len({len(line) for line in (lines[0], *lines[2:])}) == 1
        assert "VRPDi" in lines[2] and lines[2].split()[1:] == ["10", "0", "0"]

    def test_csv_rendering(self):
        rows = [TallyRow("VRPDi, capped", 3, 0, 0)]
        assert render_tally_csv(rows) == (
            'combination,wins,draws,losses\n"VRPDi, capped",3,0,0\n'
        )
