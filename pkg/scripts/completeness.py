"""Compare the decision procedure with the bounded natural-deduction oracle
on random instances of one or more catalog theories.

    python scripts/completeness.py --theories xor ag --count 200 --depth 8
"""

import argparse
import random
import time
from collections import Counter
from dataclasses import dataclass

from intruder.engine import bound_violations, decide
from intruder.oracle import OracleBudget, nd_prove
from intruder.workloads import CATALOG, RandomConfig, random_instance


@dataclass(frozen=True)
class CompletenessConfig:
    theories: tuple[str, ...] = tuple(CATALOG)
    count: int = 500
    seed: int = 0
    budget: OracleBudget = OracleBudget()
    instances: RandomConfig = RandomConfig()


def run(cfg: CompletenessConfig) -> dict[str, Counter]:
    out = {}
    for theory in cfg.theories:
        rng = random.Random(f"{cfg.seed}-{theory}")
        c: Counter = Counter()
        t0 = time.perf_counter()
        for _ in range(cfg.count):
            inst = random_instance(rng, theory, cfg.instances)
            th = inst.session()
            g = [th.term(x) for x in inst.gamma]
            m = th.term(inst.goal)
            d = decide(g, m, th)
            o = nd_prove(g, m, th, cfg.budget)
            c["provable"] += d.provable
            c["oracle provable"] += o.provable
            c["oracle exhaustive"] += o.exhaustive
            c["missed"] += o.provable and not d.provable
            c["unconfirmed"] += d.provable and o.exhaustive and not o.provable
            c["bound violations"] += len(bound_violations(d))
            if o.provable and not d.provable:
                print(f"MISSED [{theory}]", [str(t) for t in g], "|-", m)
        c["seconds"] = round(time.perf_counter() - t0, 2)
        out[theory] = c
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--theories", nargs="+", choices=list(CATALOG), default=list(CATALOG))
    ap.add_argument("--count", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--depth", type=int, default=OracleBudget().max_depth)
    args = ap.parse_args()
    cfg = CompletenessConfig(tuple(args.theories), args.count, args.seed, OracleBudget(max_depth=args.depth))
    for theory, c in run(cfg).items():
        print(theory, ", ".join(f"{k}={v}" for k, v in c.items()))


if __name__ == "__main__":
    main()
