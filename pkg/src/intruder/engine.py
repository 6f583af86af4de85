"""Decision procedure for ground intruder deduction.

Search works in the linear system: left steps only ever add terms of the
saturated set to the hypotheses, each guarded by a right-provability
obligation, until the goal is right-provable.  Because left steps are
invertible the order is irrelevant for completeness; we sweep principals in
interner-id order and rules in the fixed order of :data:`STEP_RULES`, which
makes every run reproducible.  Successful runs are pruned to the steps the
final proof depends on and expanded into a cut-free sequent proof that
:func:`intruder.proofs.check_proof` re-validates.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .proofs import RIGHT_RULES, Proof, check_proof
from .terms import Description, Kind, SaturatedSet, Term, cross_theory_subterms, hole_context, is_guarded, saturate, st
from .theories import Recipe, Theories, TheoryKind, elem_deduce

STEP_RULES = ("lp", "le", "sign", "blind1", "blind2", "ls", "lcs")
_SEQUENT_RULE = {
    "lp": "p_L",
    "le": "e_L",
    "sign": "sign_L",
    "blind1": "blind_L1",
    "blind2": "blind_L2",
    "ls": "gs",
    "lcs": "cs",
}


class InternalError(RuntimeError):
    """The checker rejected a proof the engine produced."""


@dataclass(frozen=True)
class Sequent:
    gamma: frozenset
    goal: Term

    def __str__(self) -> str:
        return f"{', '.join(str(t) for t in sorted(self.gamma))} |- {self.goal}"


@dataclass(frozen=True)
class RNode:
    """Right-rule derivation, independent of the hypothesis set it was found
    under (any superset still supports it)."""

    rule: str
    goal: Term
    children: tuple = ()
    recipe: Recipe | None = None

    def leaves(self):
        if self.recipe is not None:
            yield self.recipe
        for c in self.children:
            yield from c.leaves()

    def used(self) -> set[Term]:
        return {a for r in self.leaves() for a in r.args}

    def max_recipe(self) -> int:
        return max((r.context.skeleton.size for r in self.leaves()), default=0)

    def to_proof(self, gamma: frozenset) -> Proof:
        if self.rule == "id":
            return Proof("id", gamma, self.goal, (), self.recipe)
        return Proof(self.rule, gamma, self.goal, tuple(c.to_proof(gamma) for c in self.children))


@dataclass(frozen=True)
class Step:
    """One applied pair: principal term, linear rule, what it added, and the
    right derivation discharging its side condition (if any)."""

    principal: Term
    rule: str
    added: tuple[Term, ...]
    products: tuple[Term, ...]
    obligation: RNode | None = None
    pub: Term | None = None


@dataclass
class Stats:
    iterations: int = 0
    st_size: int = 0
    solver_calls: int = 0
    right_checks: int = 0
    wall_time: float = 0.0
    raw_steps: int = 0
    proof_steps: int = 0
    proof_nodes: int = 0
    max_recipe_size: int = 0

    def items(self) -> list[tuple[str, object]]:
        return [(k, round(v, 6) if isinstance(v, float) else v) for k, v in vars(self).items()]


@dataclass
class Decision:
    provable: bool
    proof: Proof | None
    stats: Stats
    sequent: Sequent
    steps: tuple[Step, ...] = ()
    saturated: SaturatedSet | None = None
    trace: tuple[Step, ...] = ()


class RightProver:
    """``gamma ||-_R m``: elementary deduction in some theory, else a
    backward right rule.  Positive answers survive growth of the hypothesis
    set; negative ones are dropped whenever it grows."""

    def __init__(self, th: Theories, stats: Stats):
        self.th = th
        self.stats = stats
        self.delta: set[Term] = set()
        self._sorted: list[Term] | None = None
        self._pos: dict[Term, RNode] = {}
        self._neg: set[Term] = set()
        self._solvers = [d for d in th.defs if d.kind is not TheoryKind.EMPTY or d.free]

    def add(self, terms: Iterable[Term]) -> None:
        before = len(self.delta)
        self.delta.update(terms)
        if len(self.delta) != before:
            self._sorted = None
            self._neg.clear()

    def members(self) -> list[Term]:
        if self._sorted is None:
            self._sorted = sorted(self.delta)
        return self._sorted

    def prove(self, m: Term) -> RNode | None:
        hit = self._pos.get(m)
        if hit is not None or m in self._neg:
            return hit
        self.stats.right_checks += 1
        r = self._elementary(m)
        if r is None and m.kind is Kind.CONS and m.head in RIGHT_RULES:
            subs = [self.prove(a) for a in m.args]
            if all(s is not None for s in subs):
                r = RNode(RIGHT_RULES[m.head], m, tuple(subs))
        if r is None:
            self._neg.add(m)
        else:
            self._pos[m] = r
        return r

    def _elementary(self, m: Term) -> RNode | None:
        self.stats.solver_calls += 1
        if m in self.delta:
            return RNode("id", m, recipe=Recipe(hole_context(self.th.bank, self.th.defs[0].name), (m,)))
        for d in self._solvers:
            self.stats.solver_calls += 1
            rec = elem_deduce(self.members(), m, d, self.th)
            if rec is not None:
                return RNode("id", m, recipe=rec)
        return None


class Search:
    """Mutable state of one run of the saturation loop."""

    def __init__(self, gamma: frozenset, goal: Term, th: Theories, sat: SaturatedSet, stats: Stats):
        self.th = th
        self.gamma = gamma
        self.goal = goal
        self.sat = sat
        self.stats = stats
        self.rp = RightProver(th, stats)
        self.rp.add(gamma)
        self.steps: list[Step] = []
        self.born: dict[Term, int] = {t: 0 for t in gamma}
        self.combined = th.combined
        self._theory_names = [d.name for d in th.defs]
        self._st = st((*gamma, goal))
        self._cross = self._cross_of((*gamma, goal))

    @property
    def delta(self) -> set[Term]:
        return self.rp.delta

    def _cross_of(self, terms) -> set[Term]:
        if not self.combined:
            return set()
        out: set[Term] = set()
        for t in terms:
            out.update(cross_theory_subterms(t, self._theory_names))
        return out

    # -- applicability ------------------------------------------------------

    def try_pair(self, principal: Term, rule: str) -> Step | None:
        """The step ``(principal, rule)`` would take from the current
        hypotheses, or None if the pair is not applicable."""
        delta = self.delta
        p = principal
        pub = None
        ob = None
        if rule in ("ls", "lcs"):
            if p in delta:
                return None
            if rule == "ls" and not (is_guarded(p) and p in self._st):
                return None
            if rule == "lcs" and p not in self._cross:
                return None
            ob = self.rp.prove(p)
            if ob is None:
                return None
            products: tuple[Term, ...] = (p,)
        else:
            if p not in delta or p.kind is not Kind.CONS:
                return None
            if rule == "lp" and p.head == "pair":
                products = p.args
            elif rule in ("le", "blind1") and p.head == ("enc" if rule == "le" else "blind"):
                if all(a in delta for a in p.args):
                    return None
                ob = self.rp.prove(p.args[1])
                if ob is None:
                    return None
                products = p.args
            elif rule == "sign" and p.head == "sign":
                if p.args[0] in delta:
                    return None
                pub = self.th.bank.lookup("pub", p.args[1])
                if pub is None or pub not in delta:
                    return None
                products = (p.args[0],)
            elif rule == "blind2" and p.head == "sign" and p.args[0].kind is Kind.CONS and p.args[0].head == "blind":
                m, r = p.args[0].args
                signed = self.th.bank.app("sign", m, p.args[1])
                if signed in delta and r in delta:
                    return None
                ob = self.rp.prove(r)
                if ob is None:
                    return None
                products = (signed, r)
            else:
                return None
        added = tuple(t for t in dict.fromkeys(products) if t not in delta)
        if not added:
            return None
        return Step(p, rule, added, tuple(products), ob, pub)

    def apply(self, step: Step) -> None:
        self.steps.append(step)
        n = len(self.steps)
        for t in step.added:
            self.born[t] = n
        self.rp.add(step.added)
        if self.combined:
            self._cross |= self._cross_of(step.added)

    # -- main loop ------------------------------------------------------------

    def candidates(self) -> set[Term]:
        return self.delta | {t for t in self._st if is_guarded(t)} | self._cross

    def sweep(self) -> bool:
        grew = False
        seen: set[Term] = set()
        heap = [t.id for t in self.candidates()]
        heapq.heapify(heap)
        while heap:
            i = heapq.heappop(heap)
            t = self.th.bank[i]
            if t in seen:
                continue
            seen.add(t)
            for rule in STEP_RULES:
                step = self.try_pair(t, rule)
                if step is None:
                    continue
                self.apply(step)
                grew = True
                for u in step.added:
                    if u.id > i and u not in seen:
                        heapq.heappush(heap, u.id)
                for u in self._cross_of(step.added):
                    if u.id > i and u not in seen:
                        heapq.heappush(heap, u.id)
        return grew

    def run(self) -> RNode | None:
        n = len(self.sat)
        for j in range(1, n + 2):
            self.stats.iterations = j
            final = self.rp.prove(self.goal)
            if final is not None:
                return final
            if not self.sweep():
                return None
        return None


# -- pruning and proof assembly ---------------------------------------------------


def _container(search: Search, a: Term, upto: int) -> Term:
    """A term of the sequent before step ``upto`` that has ``a`` as subterm;
    the goal if possible, else the earliest-born hypothesis."""
    if a in st((search.goal,)):
        return search.goal
    best = None
    for t, b in search.born.items():
        if b < upto and a in st((t,)):
            if best is None or (b, t.id) < (search.born[best], best.id):
                best = t
    assert best is not None, a
    return best


def _uses(search: Search, k: int, step: Step) -> set[Term]:
    used = {step.principal} if step.rule not in ("ls", "lcs") else set()
    if step.pub is not None:
        used.add(step.pub)
    if step.obligation is not None:
        used |= step.obligation.used()
    if step.rule in ("ls", "lcs"):
        used.add(_container(search, step.principal, k))
    return used


def prune(search: Search, final: RNode) -> list[Step]:
    """Keep the steps whose products the final derivation depends on."""
    needed = final.used()
    keep: list[tuple[int, Step]] = []
    for k in range(len(search.steps), 0, -1):
        step = search.steps[k - 1]
        if any(t in needed for t in step.added):
            keep.append((k, step))
            needed |= _uses(search, k, step)
    keep.reverse()
    return [s for _, s in keep]


def assemble(gamma: frozenset, goal: Term, steps: Sequence[Step], final: RNode) -> Proof:
    """Expand linear steps into sequent left rules, bottom-up."""
    sequents = [gamma]
    for s in steps:
        sequents.append(sequents[-1] | set(s.products))
    proof = final.to_proof(sequents[-1])
    for s, g in zip(reversed(steps), reversed(sequents[:-1])):
        rule = _SEQUENT_RULE[s.rule]
        if s.rule in ("lp", "sign"):
            proof = Proof(rule, g, goal, (proof,), s.principal)
        else:
            proof = Proof(rule, g, goal, (s.obligation.to_proof(g), proof), s.principal)
    return proof


def right_prove(seq: Sequent, th: Theories) -> Proof | None:
    """A proof of ``seq`` using only right rules and ``id``, if one exists."""
    rp = RightProver(th, Stats())
    rp.add(seq.gamma)
    r = rp.prove(seq.goal)
    return None if r is None else r.to_proof(frozenset(seq.gamma))


def linear_search(seq: Sequent, th: Theories, check: bool = True) -> Decision:
    """Run the saturation loop on a normal sequent."""
    t0 = time.perf_counter()
    g, m = frozenset(seq.gamma), seq.goal
    sat = saturate(g, m, th.bank)
    stats = Stats(st_size=len(sat))
    search = Search(g, m, th, sat, stats)
    final = search.run()
    seq = Sequent(g, m)
    stats.raw_steps = len(search.steps)
    if final is None:
        stats.wall_time = time.perf_counter() - t0
        return Decision(False, None, stats, seq, (), sat, tuple(search.steps))
    steps = prune(search, final)
    proof = assemble(g, m, steps, final)
    stats.proof_steps = len(steps)
    stats.proof_nodes = proof.nodes()
    stats.max_recipe_size = max(
        [final.max_recipe()] + [s.obligation.max_recipe() for s in steps if s.obligation is not None]
    )
    if check:
        res = check_proof(proof, g, m, th)
        if not res:
            raise InternalError(f"engine produced a rejected proof: {res}")
    stats.wall_time = time.perf_counter() - t0
    return Decision(True, proof, stats, seq, tuple(steps), sat, tuple(search.steps))


def decide(gamma: Iterable[Description | Term], goal: Description | Term, th: Theories, check: bool = True) -> Decision:
    """Decide ``gamma |- goal`` over the session's theories.

    Inputs are interned and normalized first; a provable answer carries a
    cut-free proof that has passed the checker.
    """
    t0 = time.perf_counter()
    g = frozenset(th.normalize(th.intern(x)) for x in gamma)
    m = th.normalize(th.intern(goal))
    d = linear_search(Sequent(g, m), th, check)
    d.stats.wall_time = time.perf_counter() - t0
    return d


def applicable(principal: Term, rule: str, seq: Sequent, th: Theories) -> Sequent | None:
    """The unique premise of the linear step ``(principal, rule)`` on
    ``seq``, or None if the pair does not apply.  Does not mutate anything
    but the term bank."""
    if rule not in STEP_RULES:
        raise ValueError(f"unknown rule tag {rule!r}; expected one of {', '.join(STEP_RULES)}")
    sat = saturate(seq.gamma, seq.goal, th.bank)
    search = Search(frozenset(seq.gamma), seq.goal, th, sat, Stats())
    step = search.try_pair(principal, rule)
    if step is None:
        return None
    return Sequent(seq.gamma | set(step.products), seq.goal)


def bound_violations(d: Decision) -> list[str]:
    """Check the saturated-set confinement and step-count bounds on a run."""
    out = []
    sat = d.saturated
    g, m = d.sequent.gamma, d.sequent.goal
    allowed = set(sat) | g | {m}
    if d.proof is not None:
        for gamma, goal in d.proof.sequents():
            stray = [t for t in (*gamma, goal) if t not in allowed]
            if stray:
                out.append(f"sequent leaves St: {', '.join(map(str, stray))}")
                break
    for s in d.trace:
        stray = [t for t in s.products if t not in allowed]
        if stray:
            out.append(f"step {s.rule} on {s.principal} adds {', '.join(map(str, stray))} outside St")
    if d.stats.raw_steps > len(sat):
        out.append(f"{d.stats.raw_steps} linear steps exceed |St| = {len(sat)}")
    if len(d.steps) > len(sat):
        out.append(f"{len(d.steps)} proof steps exceed |St| = {len(sat)}")
    return out
