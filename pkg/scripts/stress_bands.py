"""Ill-conditioning sweep: outcome counts per decade of cond(Q)."""
import argparse
import collections
from dataclasses import dataclass

import numpy as np

from metricjordan.canonicalize import canonical_metric, canonical_operator, decompose
from metricjordan.errors import DegenerateMetricError, NumericalFailure
from metricjordan.instancegen import cond, random_form, scrambler_with_condition
from metricjordan.linalg_core import Tolerances
from metricjordan.operators import make_operator
from metricjordan.scalar_product import make_space


@dataclass
class StressConfig:
    count: int = 1000
    max_log_cond: float = 6.0
    match_radius: float = 0.25
    base_seed: int = 50_000
    rank_tol: float = Tolerances.rank_tol


def outcome(form, Q, tol, radius):
    c = cond(Q)
    G = Q.T @ canonical_metric(form) @ Q
    T = np.linalg.solve(Q, canonical_operator(form) @ Q)
    try:
        op = make_operator(make_space((G + G.T) / 2, tol), T, tol)
        dec = decompose(op, tol)
    except DegenerateMetricError:
        return "degenerate_metric"
    except NumericalFailure:
        return "numerical_failure"
    if dec.form.match(form, radius) is None:
        return "WRONG"
    return "ok" if max(dec.residual_metric, dec.residual_operator) < 1e-6 * c * c else "residual"


def run(cfg):
    tol = Tolerances(rank_tol=cfg.rank_tol)
    bands = collections.defaultdict(collections.Counter)
    for i in range(cfg.count):
        rng = np.random.default_rng(cfg.base_seed + i)
        form = random_form(rng)
        Q = scrambler_with_condition(form.dim, 10 ** rng.uniform(0, cfg.max_log_cond), rng)
        bands[int(np.log10(cond(Q)))][outcome(form, Q, tol, cfg.match_radius)] += 1
    return bands


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=StressConfig.count)
    ap.add_argument("--max-log-cond", type=float, default=StressConfig.max_log_cond)
    ap.add_argument("--rank-tol", type=float, default=StressConfig.rank_tol)
    args = ap.parse_args()
    bands = run(StressConfig(count=args.count, max_log_cond=args.max_log_cond, rank_tol=args.rank_tol))
    total = collections.Counter()
    for b in sorted(bands):
        total.update(bands[b])
        print(f"cond 1e{b}-1e{b + 1}: {dict(bands[b])}")
    print(f"total: {dict(total)}")


if __name__ == "__main__":
    main()
