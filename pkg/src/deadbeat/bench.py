"""Accuracy comparison of the iterated-intersection gain against Ackermann's formula.

For each dimension ``n`` a batch of random observable scalar-output pairs is
drawn; both gains are computed and the one with the smaller nilpotency
residual ``||(A - L C)^n||_F`` wins the trial. Each trial draws from its own
generator seeded by ``(seed, n, trial)``, so results do not depend on the
number of workers or the order trials run in.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .linear import LinearSystem, ackermann_gain, deadbeat_gain, is_observable

WIN, LOSS, TIE, FAILURE = "algorithm1-wins", "ackermann-wins", "tie", "failure"

MAX_REJECTIONS = 100


class GeneratorError(RuntimeError):
    pass


@dataclass(frozen=True)
class BenchConfig:
    n_min: int = 3
    n_max: int = 10
    trials: int = 10_000
    seed: int = 0
    distribution: str = "standard-normal"

    def __post_init__(self):
        if not 3 <= self.n_min <= self.n_max:
            raise ValueError("need 3 <= n_min <= n_max")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.distribution != "standard-normal":
            raise ValueError(f"unsupported distribution {self.distribution!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass
class BenchRow:
    n: int
    trials: int
    wins: int
    losses: int
    ties: int
    failures: int
    median_res_alg1: float
    median_res_acker: float

    @property
    def win_rate(self) -> float:
        """Wins over decided trials (ties and failures excluded)."""
        decided = self.wins + self.losses
        return self.wins / decided if decided else float("nan")


@dataclass
class BenchReport:
    config: BenchConfig
    rows: List[BenchRow] = field(default_factory=list)

    def row(self, n: int) -> BenchRow:
        for r in self.rows:
            if r.n == n:
                return r
        raise KeyError(n)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "trials", "wins", "losses", "ties", "failures",
                    "win_rate", "median_res_alg1", "median_res_acker"])
        for r in self.rows:
            w.writerow([r.n, r.trials, r.wins, r.losses, r.ties, r.failures,
                        f"{r.win_rate:.17g}", f"{r.median_res_alg1:.17g}",
                        f"{r.median_res_acker:.17g}"])
        return buf.getvalue()

    def to_table(self) -> str:
        """Plain-text table: one column per n, win percentages on the bottom row."""
        c = self.config
        head = [f"n={r.n}" for r in self.rows]
        vals = [f"%{round(100 * r.win_rate)}" for r in self.rows]
        widths = [max(len(h), len(v)) for h, v in zip(head, vals)]
        sep = "+" + "+".join("-" * (w + 2) for w in widths) + "+"

        def line(cells):
            return "|" + "|".join(f" {s:^{w}} " for s, w in zip(cells, widths)) + "|"

        return "\n".join([
            f"# alg1 vs ackermann, {c.trials} trials per n, seed {c.seed}, "
            f"{c.distribution} entries, Frobenius residual",
            sep, line(head), sep, line(vals), sep, "",
        ])


def random_observable_pair(n: int, rng: np.random.Generator) -> LinearSystem:
    """Standard-normal ``A`` (n x n) and ``C`` (1 x n), redrawn until observable."""
    if n < 1:
        raise ValueError("n must be >= 1")
    for _ in range(MAX_REJECTIONS):
        sys = LinearSystem(rng.standard_normal((n, n)), rng.standard_normal((1, n)))
        if is_observable(sys):
            return sys
    raise GeneratorError(f"{MAX_REJECTIONS} consecutive unobservable draws at n={n}")


def trial_rng(seed: int, n: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, n, trial]))


def compare_once(sys: LinearSystem):
    """Return ``(outcome, residual_alg1, residual_ackermann)``.

    Residuals are NaN for a method that failed.
    """
    try:
        r1 = deadbeat_gain(sys).residual
    except (ValueError, ArithmeticError, np.linalg.LinAlgError):
        r1 = float("nan")
    try:
        r2 = ackermann_gain(sys).residual
    except (ValueError, ArithmeticError, np.linalg.LinAlgError):
        r2 = float("nan")
    if not (np.isfinite(r1) and np.isfinite(r2)):
        return FAILURE, r1, r2
    if r1 < r2:
        return WIN, r1, r2
    if r2 < r1:
        return LOSS, r1, r2
    return TIE, r1, r2


def _run_trials(args):
    seed, n, start, stop = args
    out = []
    for i in range(start, stop):
        sys = random_observable_pair(n, trial_rng(seed, n, i))
        out.append(compare_once(sys))
    return out


def _summarize(n: int, results) -> BenchRow:
    counts = {WIN: 0, LOSS: 0, TIE: 0, FAILURE: 0}
    r1s, r2s = [], []
    for outcome, r1, r2 in results:
        counts[outcome] += 1
        if outcome != FAILURE:
            r1s.append(r1)
            r2s.append(r2)
    med1 = float(np.median(r1s)) if r1s else float("nan")
    med2 = float(np.median(r2s)) if r2s else float("nan")
    return BenchRow(n, len(results), counts[WIN], counts[LOSS], counts[TIE],
                    counts[FAILURE], med1, med2)


def run_benchmark(config: BenchConfig, workers: int = 1,
                  chunk: Optional[int] = None) -> BenchReport:
    """Run every trial for ``n_min..n_max`` and tally outcomes per ``n``."""
    chunk = chunk or max(1, min(1000, config.trials))
    jobs = [(config.seed, n, s, min(s + chunk, config.trials))
            for n in range(config.n_min, config.n_max + 1)
            for s in range(0, config.trials, chunk)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_trials, jobs))
    else:
        parts = [_run_trials(j) for j in jobs]

    by_n = {}
    for (_, n, _, _), part in zip(jobs, parts):
        by_n.setdefault(n, []).extend(part)
    report = BenchReport(config)
    for n in sorted(by_n):
        report.rows.append(_summarize(n, by_n[n]))
    return report
