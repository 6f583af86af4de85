"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line.

Every criterion is a cached function so criterion 5 can audit the searches
run by criteria 1, 2 and 4 without repeating them.  Running this file as a
script prints the same lines without pytest.
"""

import functools
import itertools
import math
import random
import statistics
import time

from intruder.engine import bound_violations, decide
from intruder.oracle import OracleBudget, elem_reachable, nd_prove
from intruder.proofs import check_proof
from intruder.terms import saturate, st
from intruder.theories import Theories, TheoryDef, elem_deduce, verify_recipe
from intruder.workloads import (
    CATALOG,
    RandomConfig,
    ag_targets,
    ag_universe,
    combined_case,
    decryption_chain,
    random_instance,
    xor_targets,
    xor_universe,
)
from tests.conftest import ACCEPTANCE


def record(n: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[n] = (ok, detail)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")


def _checked(d, th) -> bool:
    return d.proof is not None and bool(check_proof(d.proof, d.sequent.gamma, d.sequent.goal, th))


# -- 1. worked example ---------------------------------------------------------------------


@functools.cache
def criterion_1():
    th = Theories([TheoryDef.ac()])
    t0 = time.perf_counter()
    d = decide(["a", "b"], ("+", ("pair", "a", "b"), "a"), th)
    elapsed = time.perf_counter() - t0
    shape = d.proof.shape() if d.proof else "-"
    ok = d.provable and shape == "gs(p_R(id, id), id)" and _checked(d, th) and elapsed < 0.010
    return ok, f"shape {shape}, {elapsed * 1000:.2f} ms", [d]


def test_criterion_1_worked_example():
    ok, detail, _ = criterion_1()
    record(1, ok, detail)
    assert ok, detail


# -- 2. blind signatures --------------------------------------------------------------------


BLIND = [
    ([("sign", ("blind", "m", "r"), "k"), "r"], ("sign", "m", "k"), True),
    ([("sign", ("blind", "m", "r"), "k")], ("sign", "m", "k"), False),
    ([("blind", "m", "r"), "r"], "m", True),
]


@functools.cache
def criterion_2():
    runs, got = [], []
    ok = True
    for gamma, goal, expected in BLIND:
        th = Theories()
        d = decide(gamma, goal, th)
        runs.append(d)
        got.append(d.provable)
        ok = ok and d.provable is expected and (not expected or _checked(d, th))
    return ok, f"verdicts {got}", runs


def test_criterion_2_blind_signatures():
    ok, detail, _ = criterion_2()
    record(2, ok, detail)
    assert ok, detail


# -- 3. elementary solvers against enumeration ------------------------------------------------


@functools.cache
def criterion_3():
    t0 = time.perf_counter()
    th = Theories([TheoryDef.xor()])
    universe = [th.term(x) for x in xor_universe()]
    targets = [th.term(x) for x in xor_targets()]
    xor_checks = xor_bad = 0
    for r in range(7):
        for gamma in itertools.combinations(universe, r):
            reach = elem_reachable(gamma, "xor", th)
            for m in targets:
                s = elem_deduce(gamma, m, "xor", th)
                xor_checks += 1
                if (s is None) != (m not in reach):
                    xor_bad += 1
                elif s is not None and not verify_recipe(s, gamma, m, th):
                    xor_bad += 1
    th = Theories([TheoryDef.ag()])
    universe = [th.term(x) for x in ag_universe()]
    targets = [th.term(x) for x in ag_targets()]
    budget = OracleBudget(coeff_bound=3)
    ag_checks = ag_bad = ag_hits = 0
    for r in range(4):
        for gamma in itertools.combinations(universe, r):
            reach = elem_reachable(gamma, "ag", th, budget)
            for m in targets:
                s = elem_deduce(gamma, m, "ag", th)
                ag_checks += 1
                ag_hits += m in reach
                if m in reach and s is None:
                    ag_bad += 1
                elif s is not None and not verify_recipe(s, gamma, m, th):
                    ag_bad += 1
    elapsed = time.perf_counter() - t0
    ok = xor_bad == 0 and ag_bad == 0 and elapsed < 60
    detail = (
        f"xor {xor_checks} checks/{xor_bad} disagreements, "
        f"ag {ag_checks} checks ({ag_hits} oracle hits)/{ag_bad} disagreements, {elapsed:.1f} s"
    )
    return ok, detail


def test_criterion_3_elementary_solvers():
    ok, detail = criterion_3()
    record(3, ok, detail)
    assert ok, detail


# -- 4. completeness against the natural-deduction oracle ----------------------------------------


@functools.cache
def criterion_4():
    cfg = RandomConfig(max_hyps=6, atoms=("a", "b", "c", "d"), max_size=8)
    budget = OracleBudget(max_depth=8)
    runs, parts = [], []
    ok = True
    for theory in CATALOG:
        rng = random.Random(f"completeness-{theory}")
        missed = unchecked = unconfirmed = errors = provable = confirmed = 0
        for _ in range(500):
            inst = random_instance(rng, theory, cfg)
            th = inst.session()
            try:
                g = [th.term(x) for x in inst.gamma]
                m = th.term(inst.goal)
                d = decide(g, m, th)
                o = nd_prove(g, m, th, budget)
            except Exception:
                errors += 1
                continue
            runs.append(d)
            provable += d.provable
            if o.provable and not d.provable:
                missed += 1
            if d.provable:
                if not _checked(d, th):
                    unchecked += 1
                if o.exhaustive:
                    confirmed += o.provable
                    unconfirmed += not o.provable
        ok = ok and missed == unchecked == unconfirmed == errors == 0
        parts.append(f"{theory} {provable}/500 provable ({confirmed} oracle-confirmed), {missed} missed, {errors} errors")
    return ok, "; ".join(parts), runs


def test_criterion_4_completeness():
    ok, detail, _ = criterion_4()
    record(4, ok, detail)
    assert ok, detail


# -- 5. saturated-set confinement across criteria 1-4 -----------------------------------------------


def test_criterion_5_search_bounds():
    runs = criterion_1()[2] + criterion_2()[2] + criterion_4()[2]
    bad = [v for d in runs for v in bound_violations(d)]
    ok = not bad
    detail = f"{len(runs)} searches, {len(bad)} violations" + (f" (first: {bad[0]})" if bad else "")
    record(5, ok, detail)
    assert ok, detail


# -- 6. decryption-chain scaling ---------------------------------------------------------------------


def test_criterion_6_scaling():
    sizes = [25, 50, 100, 200]
    times, verdicts = [], []
    for n in sizes:
        inst = decryption_chain(n)
        th = inst.session()
        t0 = time.perf_counter()
        d = decide(inst.gamma, inst.goal, th)
        times.append(time.perf_counter() - t0)
        verdicts.append(d.provable and _checked(d, th))
    slope, _ = statistics.linear_regression([math.log(n) for n in sizes], [math.log(t) for t in times])
    ok = all(verdicts) and slope <= 4 and times[-1] < 5
    detail = f"exponent {slope:.2f}, n=200 in {times[-1]:.2f} s, times {[round(t, 3) for t in times]}"
    record(6, ok, detail)
    assert ok, detail


# -- 7. combined XOR and Abelian group -----------------------------------------------------------------


def test_criterion_7_combined_theories():
    rng = random.Random("combined")
    derived = perturbed_no = 0
    leftovers = []
    for _ in range(100):
        case = combined_case(rng)
        th = case.instance.session()
        d = decide(case.instance.gamma, case.instance.goal, th)
        derived += d.provable and _checked(d, th)
        p = case.perturbed(rng.randrange(len(case.instance.gamma)))
        d2 = decide(p.gamma, p.goal, p.session())
        if d2.provable:
            leftovers.append(p)
        else:
            perturbed_no += 1
    th = Theories([TheoryDef.xor("x"), TheoryDef.ag("g", "*", "1", "I")])
    hand = decide([("+", "a", ("*", "b", "c")), "b", "c"], "a", th)
    rules = hand.proof.rules() if hand.proof else []
    last_id = hand.proof.premises[-1] if hand.proof else None
    hand_ok = (
        hand.provable
        and _checked(hand, th)
        and rules[0] == "cs"
        and last_id.rule == "id"
        and last_id.witness.context.theory == "x"
    )
    ok = derived == 100 and perturbed_no >= 95 and hand_ok
    detail = f"{derived}/100 derivable, {perturbed_no}/100 perturbed not provable, hand example {hand.proof.shape() if hand.proof else '-'}"
    for p in leftovers:
        print("perturbed but provable:", p.gamma, "|-", p.goal)
    record(7, ok, detail)
    assert ok, detail


# -- 8. quadratic saturation bound --------------------------------------------------------------------


def test_criterion_8_saturation_bound():
    rng = random.Random("saturation")
    worst = 0.0
    bad = 0
    for i in range(1000):
        theory = list(CATALOG)[i % len(CATALOG)]
        inst = random_instance(rng, theory)
        th = inst.session()
        g = {th.term(x) for x in inst.gamma}
        m = th.term(inst.goal)
        n = len(st(g | {m}))
        size = len(saturate(g, m, th.bank))
        bad += size > n * n + n
        worst = max(worst, size / (n * n + n))
    ok = bad == 0
    detail = f"1000 inputs, {bad} violations, max |St|/(|st|^2+|st|) = {worst:.3f}"
    record(8, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                pass
