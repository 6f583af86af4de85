"""Recipe-built XOR + Abelian group instances and their one-hypothesis
perturbations.

    python scripts/combined.py --count 100 --show 3
"""

import argparse
import random
from dataclasses import dataclass

from intruder.engine import decide
from intruder.proofs import render_text
from intruder.workloads import combined_case


@dataclass(frozen=True)
class CombinedConfig:
    count: int = 100
    seed: int = 0
    max_hyps: int = 4
    max_size: int = 5


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=CombinedConfig.count)
    ap.add_argument("--seed", type=int, default=CombinedConfig.seed)
    ap.add_argument("--show", type=int, default=0, help="print this many proofs")
    args = ap.parse_args()
    cfg = CombinedConfig(args.count, args.seed)
    rng = random.Random(cfg.seed)
    derived = blocked = 0
    for i in range(cfg.count):
        case = combined_case(rng, cfg.max_hyps, cfg.max_size)
        th = case.instance.session()
        d = decide(case.instance.gamma, case.instance.goal, th)
        derived += d.provable
        if i < args.show and d.proof is not None:
            print(render_text(d.proof, th), end="\n\n")
        p = case.perturbed(rng.randrange(len(case.instance.gamma)))
        if decide(p.gamma, p.goal, p.session()).provable:
            print("perturbed instance still provable:", p.gamma, "|-", p.goal)
        else:
            blocked += 1
    print(f"{derived}/{cfg.count} recipe instances provable, {blocked}/{cfg.count} perturbed instances not provable")


if __name__ == "__main__":
    main()
