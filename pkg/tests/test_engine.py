import random
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from intruder.engine import (
    STEP_RULES,
    Sequent,
    applicable,
    bound_violations,
    decide,
    linear_search,
    right_prove,
)
from intruder.proofs import Proof, check_proof
from intruder.theories import Theories, TheoryDef
from intruder.workloads import CATALOG, RandomConfig, decryption_chain, random_instance

SMALL = RandomConfig(max_hyps=4, max_size=6)


def seq(th, gamma, goal):
    return Sequent(frozenset(th.term(g) for g in gamma), th.term(goal))


def instances(theories=tuple(CATALOG)):
    return st.builds(
        lambda seed, name: random_instance(random.Random(seed), name, SMALL),
        st.integers(0, 10**9),
        st.sampled_from(theories),
    )


# -- right rules -----------------------------------------------------------------------


def test_right_prove_composes_constructors():
    th = Theories()
    p = right_prove(seq(th, ["a", "k"], ("enc", ("pair", "a", "a"), "k")), th)
    assert p.shape() == "e_R(p_R(id, id), id)"


def test_right_prove_does_not_decompose():
    th = Theories()
    assert right_prove(seq(th, [("pair", "a", "b")], "a"), th) is None
    # pub has no right rule
    assert right_prove(seq(th, ["a"], ("pub", "a")), th) is None


def test_right_prove_uses_theory_solver():
    th = Theories([TheoryDef.xor()])
    s = seq(th, [("+", "a", "b"), "b"], ("pair", "a", "b"))
    p = right_prove(s, th)
    assert p.shape() == "p_R(id, id)"
    assert check_proof(p, s.gamma, s.goal, th)


# -- applicability ------------------------------------------------------------------------


def test_applicable_examples():
    th = Theories()
    s = seq(th, [("pair", "a", ("enc", "m", "k")), "k"], "m")
    p = th.term(("pair", "a", ("enc", "m", "k")))
    after = applicable(p, "lp", s, th)
    assert after.gamma == s.gamma | {th.term("a"), th.term(("enc", "m", "k"))}
    assert applicable(p, "le", s, th) is None
    # the key is not known yet
    assert applicable(th.term(("enc", "m", "k")), "le", s, th) is None
    after2 = applicable(th.term(("enc", "m", "k")), "le", after, th)
    assert th.term("m") in after2.gamma


def test_applicable_requires_growth():
    th = Theories()
    s = seq(th, [("pair", "a", "b"), "a", "b"], "c")
    assert applicable(th.term(("pair", "a", "b")), "lp", s, th) is None


def test_applicable_sign_needs_pub():
    th = Theories()
    sig = th.term(("sign", "m", "k"))
    assert applicable(sig, "sign", seq(th, [("sign", "m", "k")], "m"), th) is None
    after = applicable(sig, "sign", seq(th, [("sign", "m", "k"), ("pub", "k")], "m"), th)
    assert th.term("m") in after.gamma


def test_applicable_abstraction():
    th = Theories([TheoryDef.ac()])
    s = seq(th, ["a", "b"], ("+", ("pair", "a", "b"), "a"))
    p = th.term(("pair", "a", "b"))
    assert applicable(p, "ls", s, th).gamma == s.gamma | {p}
    assert applicable(th.term(("enc", "a", "b")), "ls", s, th) is None
    assert applicable(p, "lcs", s, th) is None


def test_applicable_rejects_unknown_tags():
    th = Theories()
    with pytest.raises(ValueError, match="unknown rule"):
        applicable(th.term("a"), "cut", seq(th, ["a"], "a"), th)


# -- decisions ---------------------------------------------------------------------------


DECISIONS = [
    ("empty", [("enc", "m", "k"), "k"], "m", True),
    ("empty", [("enc", "m", "k")], "m", False),
    ("empty", [("sign", "m", "k"), ("pub", "k")], "m", True),
    ("empty", [("pair", ("enc", "s", ("pair", "a", "b")), "a"), "b"], "s", True),
    ("empty", [("blind", "m", "r")], "m", False),
    ("ac", ["a", "b"], ("+", ("pair", "a", "b"), "a"), True),
    ("ac", [("+", "a", "b")], "a", False),
    ("xor", [("enc", "s", ("+", "k", "a")), "k", "a"], "s", True),
    ("xor", [("enc", "s", ("+", "k", "a")), "k"], "s", False),
    ("xor", [("pair", ("+", "a", "b"), "c"), ("+", "b", "c")], "a", True),
    ("ag", [("+", "a", "a"), ("+", "a", "a", "a")], ("pair", "a", ("I", "a")), True),
    ("ag", [("+", "a", "a")], "a", False),
]


@pytest.mark.parametrize("theory,gamma,goal,expected", DECISIONS)
def test_decide_examples(theory, gamma, goal, expected):
    th = Theories(CATALOG[theory]())
    d = decide(gamma, goal, th)
    assert d.provable is expected
    if expected:
        assert check_proof(d.proof, d.sequent.gamma, d.sequent.goal, th)
    assert not bound_violations(d)


def test_linear_search_on_normal_sequent():
    th = Theories()
    d = linear_search(seq(th, [("pair", "a", "b")], "b"), th)
    assert d.proof.shape() == "p_L(id)"
    # pair(a,b), a, b and the four signatures over {a, b}
    assert d.stats.st_size == 7


def test_decryption_chain_proof_uses_every_key():
    inst = decryption_chain(6)
    th = inst.session()
    d = decide(inst.gamma, inst.goal, th)
    assert d.provable
    assert d.proof.rules().count("e_L") == 6


def test_stats_are_populated():
    th = Theories([TheoryDef.xor()])
    d = decide([("enc", "s", ("+", "k", "a")), "k", "a"], "s", th)
    stats = dict(d.stats.items())
    assert stats["iterations"] >= 1
    assert stats["proof_steps"] == 1
    assert stats["max_recipe_size"] >= 3
    assert stats["st_size"] == len(d.saturated)


# -- checker rejections --------------------------------------------------------------------


def test_checker_rejects_tampered_proofs():
    th = Theories()
    d = decide([("enc", "m", "k"), "k"], "m", th)
    p = d.proof
    g, m = d.sequent.gamma, d.sequent.goal
    assert check_proof(p, g, m, th)
    assert not check_proof(replace(p, rule="cut"), g, m, th)
    assert not check_proof(replace(p, rule="frob"), g, m, th)
    assert not check_proof(p, g - {th.term("k")}, m, th)
    assert not check_proof(replace(p, premises=p.premises[:1]), g, m, th)
    # a key that is not a hypothesis
    ghost = th.term(("enc", "m", "j"))
    bad = replace(p, witness=ghost)
    res = check_proof(bad, g, m, th)
    assert not res and "not a hypothesis" in res.reason


def test_checker_rejects_sign_without_pub():
    th = Theories()
    gamma = frozenset({th.term(("sign", "m", "k"))})
    m = th.term("m")
    d = decide([("sign", "m", "k"), ("pub", "k")], "m", th)
    inner = d.proof.premises[0]
    forged = Proof("sign_L", gamma, m, (replace(inner, gamma=gamma | {m}),), th.term(("sign", "m", "k")))
    res = check_proof(forged, gamma, m, th)
    assert not res and "pub" in res.reason


def test_checker_rejects_non_normal_sequents():
    th = Theories([TheoryDef.xor()])
    raw = th.intern(("+", "a", "a"))
    p = Proof("id", frozenset({raw}), raw)
    assert "normal form" in check_proof(p, {raw}, raw, th).reason


def test_checker_rejects_cs_outside_combinations():
    th = Theories([TheoryDef.ac()])
    a = th.term("a")
    p = Proof("cs", frozenset({a}), a, (), a)
    assert "combination" in check_proof(p, {a}, a, th).reason


# -- properties ------------------------------------------------------------------------------


@settings(max_examples=150, deadline=None)
@given(instances())
def test_provable_decisions_are_checked_and_bounded(inst):
    th = inst.session()
    d = decide(inst.gamma, inst.goal, th)
    if d.provable:
        assert check_proof(d.proof, d.sequent.gamma, d.sequent.goal, th)
        assert "cut" not in d.proof.rules()
    assert not bound_violations(d)


@settings(max_examples=80, deadline=None)
@given(instances(), st.data())
def test_left_steps_are_invertible(inst, data):
    th = inst.session()
    d = decide(inst.gamma, inst.goal, th)
    s = d.sequent
    candidates = sorted(s.gamma | set(d.saturated))
    principal = data.draw(st.sampled_from(candidates))
    rule = data.draw(st.sampled_from(STEP_RULES))
    after = applicable(principal, rule, s, th)
    if after is not None:
        assert linear_search(after, th).provable == d.provable


@settings(max_examples=80, deadline=None)
@given(instances(), instances())
def test_weakening(inst, other):
    th = inst.session()
    extra = [x for x in other.gamma if _declared(th, x)]
    small = decide(inst.gamma, inst.goal, th)
    big = decide(list(inst.gamma) + extra, inst.goal, th)
    if small.provable:
        assert big.provable


def _declared(th, desc):
    try:
        th.intern(desc)
        return True
    except ValueError:
        return False


@settings(max_examples=60, deadline=None)
@given(instances(), st.data())
def test_cut_is_admissible(inst, data):
    th = inst.session()
    d = decide(inst.gamma, inst.goal, th)
    middle = data.draw(st.sampled_from(sorted(d.saturated)))
    if decide(inst.gamma, middle, th).provable and decide(list(inst.gamma) + [middle], inst.goal, th).provable:
        assert d.provable


@settings(max_examples=60, deadline=None)
@given(instances())
def test_decisions_are_deterministic(inst):
    a = decide(inst.gamma, inst.goal, inst.session())
    b = decide(inst.gamma, inst.goal, inst.session())
    assert a.provable == b.provable
    if a.provable:
        assert a.proof.shape() == b.proof.shape()
        assert [str(s.principal) for s in a.steps] == [str(s.principal) for s in b.steps]
