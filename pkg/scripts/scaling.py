"""Time the decision procedure on decryption chains and fit a power law.

    python scripts/scaling.py --sizes 25 50 100 200 400
"""

import argparse
import math
import statistics
import time
from dataclasses import dataclass

from intruder.engine import decide
from intruder.workloads import decryption_chain


@dataclass(frozen=True)
class ScalingConfig:
    sizes: tuple[int, ...] = (25, 50, 100, 200)
    repeats: int = 1


def run(cfg: ScalingConfig) -> list[tuple[int, float, bool, int]]:
    rows = []
    for n in cfg.sizes:
        best = math.inf
        for _ in range(cfg.repeats):
            inst = decryption_chain(n)
            th = inst.session()
            t0 = time.perf_counter()
            d = decide(inst.gamma, inst.goal, th)
            best = min(best, time.perf_counter() - t0)
        rows.append((n, best, d.provable, d.stats.st_size))
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=list(ScalingConfig.sizes))
    ap.add_argument("--repeats", type=int, default=1)
    args = ap.parse_args()
    rows = run(ScalingConfig(tuple(args.sizes), args.repeats))
    print(f"{'n':>5}  {'seconds':>9}  {'|St|':>7}  provable")
    for n, t, ok, size in rows:
        print(f"{n:>5}  {t:>9.4f}  {size:>7}  {ok}")
    if len(rows) >= 2:
        slope, _ = statistics.linear_regression([math.log(r[0]) for r in rows], [math.log(r[1]) for r in rows])
        print(f"fitted exponent: {slope:.2f}")


if __name__ == "__main__":
    main()
