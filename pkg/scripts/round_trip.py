"""Round-trip experiment: decompose(generate(form)) against the generating form."""
import argparse
import time
from dataclasses import dataclass

import numpy as np

from metricjordan.canonicalize import decompose
from metricjordan.errors import NumericalFailure
from metricjordan.instancegen import generate, random_form


@dataclass
class RoundTripConfig:
    count: int = 1000
    n_max: int = 10
    p_max: int = 4
    conditioning: float = 100.0
    match_tol: float = 1e-6
    base_seed: int = 10_000


def run(cfg):
    t0 = time.perf_counter()
    wrong, failed, drift = [], [], 0.0
    for i in range(cfg.count):
        rng = np.random.default_rng(cfg.base_seed + i)
        form = random_form(rng, n_max=cfg.n_max, p_max=cfg.p_max)
        try:
            got = decompose(generate(form, seed=i + 1, conditioning=cfg.conditioning).op).form
        except NumericalFailure as exc:
            failed.append((i, str(exc)))
            continue
        pairs = got.match(form, cfg.match_tol)
        if pairs is None:
            wrong.append((i, form, got))
        else:
            drift = max([drift] + [abs(a.eigenvalue - b.eigenvalue) for a, b in pairs])
    return {"count": cfg.count, "wrong": wrong, "failed": failed, "drift": drift,
            "seconds": time.perf_counter() - t0}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=RoundTripConfig.count)
    ap.add_argument("--cond", type=float, default=RoundTripConfig.conditioning)
    ap.add_argument("--seed", type=int, default=RoundTripConfig.base_seed)
    args = ap.parse_args()
    res = run(RoundTripConfig(count=args.count, conditioning=args.cond, base_seed=args.seed))
    print(f"{res['count'] - len(res['wrong']) - len(res['failed'])}/{res['count']} exact, "
          f"{len(res['wrong'])} wrong, {len(res['failed'])} numerical failures, "
          f"max drift {res['drift']:.2e}, {res['seconds']:.1f}s")
    for i, form, got in res["wrong"][:10]:
        print(f"  wrong #{i}: {form} -> {got}")


if __name__ == "__main__":
    main()
