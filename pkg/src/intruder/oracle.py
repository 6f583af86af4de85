"""Naive reference implementations used to cross-check the engine.

Nothing here shares code with the search or the solvers beyond term
construction and normal forms: :func:`nd_prove` is bounded forward chaining
with the natural-deduction rules, :func:`elem_bruteforce` enumerates
candidate contexts, and :func:`rewrite_normalize` applies the oriented
rewrite rules one step at a time.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

import numpy as np

from .terms import CONSTRUCTORS, Hole, Kind, Term, apply_context, make_context, st
from .theories import Recipe, Theories, TheoryDef, TheoryKind, ag_coefficients


@dataclass(frozen=True)
class OracleBudget:
    """Search caps.  ``max_terms`` bounds the closure size so runs on
    theory-heavy inputs stay cheap; hitting any cap makes the run
    inconclusive rather than wrong."""

    max_depth: int = 8
    max_term_size: int = 12
    coeff_bound: int = 3
    max_terms: int = 4000

    def __post_init__(self):
        for k, v in vars(self).items():
            if v < 1:
                raise ValueError(f"{k} must be positive, got {v}")


class Verdict(Enum):
    PROVABLE = "provable"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class OracleResult:
    verdict: Verdict
    capped: bool
    rounds: int
    known: int

    @property
    def provable(self) -> bool:
        return self.verdict is Verdict.PROVABLE

    @property
    def exhaustive(self) -> bool:
        """The closure reached a fixpoint without hitting any cap."""
        return not self.capped


def _within(t: Term, th: Theories, budget: OracleBudget) -> bool:
    if t.size > budget.max_term_size:
        return False
    for u in st((t,)):
        if u.kind is not Kind.FUN or not u.ac:
            continue
        d = th.by_name[u.theory]
        if d.kind is TheoryKind.AG:
            co = ag_coefficients(u, d)
        else:
            co = Counter(u.args)
        if any(abs(c) > budget.coeff_bound for c in co.values()):
            return False
    return True


def nd_closure(gamma: Iterable[Term], goal: Term, th: Theories, budget: OracleBudget = OracleBudget()):
    """Forward closure of ``gamma`` under the natural-deduction rules with
    the equality rule folded in as normalization.  Yields ``(round, known,
    capped)`` after each round; stops early once ``goal`` is known."""
    bank = th.bank
    norm = th.normalize
    known: set[Term] = {norm(t) for t in gamma}
    goal = norm(goal)
    frontier = set(known)
    capped = False
    # constructor and free-symbol introductions are only tried on terms that
    # already occur somewhere; theory operators combine freely under the caps
    ops = [d for d in th.defs if d.op is not None]
    consts = [norm(bank.app(d.zero)) for d in th.defs if d.zero is not None]
    for r in range(1, budget.max_depth + 1):
        new: set[Term] = set()

        def emit(t: Term):
            nonlocal capped
            t = norm(t)
            if t in known or t in new:
                return
            if not _within(t, th, budget):
                capped = True
                return
            new.add(t)

        for c in consts:
            emit(c)
        for t in known:
            if t.kind is not Kind.CONS:
                continue
            h, a = t.head, t.args
            if h == "pair":
                if t in frontier:
                    emit(a[0])
                    emit(a[1])
            elif h in ("enc", "blind") and a[1] in known and (t in frontier or a[1] in frontier):
                emit(a[0])
            elif h == "sign":
                pub = bank.lookup("pub", a[1])
                if pub is not None and pub in known and (t in frontier or pub in frontier):
                    emit(a[0])
                inner = a[0]
                if inner.kind is Kind.CONS and inner.head == "blind" and inner.args[1] in known:
                    if t in frontier or inner.args[1] in frontier:
                        emit(bank.app("sign", inner.args[0], a[1]))
        relevant = st((*known, goal))
        for u in relevant:
            if u in known or not u.args:
                continue
            if (u.kind is Kind.CONS and u.head != "pub") or (u.kind is Kind.FUN and not u.ac):
                if all(x in known for x in u.args) and any(x in frontier for x in u.args):
                    emit(u)
        for d in ops:
            pairs, rejected = _combos(sorted(frontier), sorted(known), d, budget)
            capped = capped or rejected
            for x, y in pairs:
                emit(bank.app(d.op, x, y))
            if d.inv is not None:
                for x in frontier:
                    emit(bank.app(d.inv, x))
        if not new:
            yield r, known, capped
            return
        known |= new
        frontier = new
        if len(known) > budget.max_terms:
            capped = True
            yield r, known, capped
            return
        yield r, known, capped or (r == budget.max_depth)
        if goal in known:
            return


def _coeffs(t: Term, d: TheoryDef) -> dict[Term, int]:
    if t.kind is Kind.FUN and t.theory == d.name:
        if d.kind is TheoryKind.AG:
            return dict(ag_coefficients(t, d))
        if t.head == d.zero:
            return {}
        if t.head == d.op:
            return dict(Counter(t.args))
    return {t: 1}


def _combos(frontier: list[Term], known: list[Term], d: TheoryDef, budget: OracleBudget, block: int = 64):
    """Pairs ``(x, y)`` from frontier x known whose sum ``x op y`` has a
    normal form within the size and multiplicity caps, plus whether any pair
    was rejected.  Computed on coefficient vectors so sums that are bound to
    be discarded are never interned."""
    out: list[tuple[Term, Term]] = []
    rejected = False
    if not frontier or not known:
        return out, rejected
    maps = {t: _coeffs(t, d) for t in set(frontier) | set(known)}
    atoms = sorted({u for m in maps.values() for u in m})
    col = {u: i for i, u in enumerate(atoms)}

    def matrix(ts):
        m = np.zeros((len(ts), len(atoms)), dtype=np.int32)
        for i, t in enumerate(ts):
            for u, c in maps[t].items():
                m[i, col[u]] = c
        return m

    K = matrix(known)
    pos = np.array([u.size for u in atoms], dtype=np.int32)
    neg = pos + 1
    for lo in range(0, len(frontier), block):
        F = matrix(frontier[lo : lo + block])
        S = F[:, None, :] + K[None, :, :]
        if d.kind is TheoryKind.XOR:
            S %= 2
        A = np.abs(S)
        parts = A.sum(axis=2)
        size = (A * np.where(S < 0, neg, pos)).sum(axis=2) + np.where(parts > 0, parts - 1, 1)
        ok = (A.max(axis=2, initial=0) <= budget.coeff_bound) & (size <= budget.max_term_size)
        rejected = rejected or not ok.all()
        for i, j in zip(*np.nonzero(ok)):
            out.append((frontier[lo + i], known[j]))
    return out, rejected


def nd_prove(gamma: Iterable[Term], goal: Term, th: Theories, budget: OracleBudget = OracleBudget()) -> OracleResult:
    goal = th.normalize(goal)
    rounds, known, capped = 0, {th.normalize(t) for t in gamma}, False
    if goal in known:
        return OracleResult(Verdict.PROVABLE, False, 0, len(known))
    for rounds, known, capped in nd_closure(gamma, goal, th, budget):
        if goal in known:
            return OracleResult(Verdict.PROVABLE, capped, rounds, len(known))
    return OracleResult(Verdict.UNKNOWN, capped, rounds, len(known))


# -- elementary deduction by enumeration --------------------------------------------


def _candidates(d: TheoryDef, members: list[Term], budget: OracleBudget):
    """Coefficient vectors in enumeration order (smallest total first)."""
    k = len(members)
    if d.kind is TheoryKind.XOR:
        rng = range(0, 2)
    elif d.kind is TheoryKind.AG:
        b = budget.coeff_bound
        rng = range(-b, b + 1)
    elif d.kind is TheoryKind.AC:
        rng = range(0, budget.coeff_bound + 1)
    else:
        rng = range(0, 2)
    vecs = list(itertools.product(rng, repeat=k))
    vecs.sort(key=lambda v: (sum(map(abs, v)), v))
    return vecs


def _build(th: Theories, d: TheoryDef, members, vec) -> Recipe | None:
    key = ("ctx", d.name, vec)
    ctx = th.oracle_cache.get(key)
    if ctx is None:
        parts: list = []
        for c in vec:
            if c > 0:
                parts += [Hole()] * c
            elif c < 0:
                parts += [(d.inv, Hole())] * -c
        if not parts:
            if d.zero is None:
                return None
            tree = (d.zero,)
        elif len(parts) == 1:
            tree = parts[0]
        else:
            tree = (d.op, *parts)
        ctx = th.oracle_cache[key] = make_context(th.bank, d.name, tree)
    args = [m for m, c in zip(members, vec) for _ in range(abs(c))]
    return Recipe(ctx, tuple(args))


def elem_bruteforce(gamma: Iterable[Term], m: Term, theory: str | TheoryDef, th: Theories,
                    budget: OracleBudget = OracleBudget()) -> Recipe | None:
    """First enumerated recipe whose filled context normalizes to ``m``.

    XOR enumerates subsets, AC multisets with multiplicity up to the
    coefficient bound, AG integer vectors in ``[-b, b]``; the empty theory
    only tries single members.
    """
    d = th.theory(theory)
    members = sorted(set(gamma))
    if d.kind is TheoryKind.EMPTY:
        for g in members:
            if g is m:
                return Recipe(make_context(th.bank, d.name, Hole()), (g,))
        return None
    for vec in _candidates(d, members, budget):
        r = _build(th, d, members, vec)
        if r is None:
            continue
        if th.normalize(apply_context(r.context, r.args, th.bank)) is m:
            return r
    return None


def elem_reachable(gamma: Iterable[Term], theory: str | TheoryDef, th: Theories,
                   budget: OracleBudget = OracleBudget()) -> dict[Term, Recipe]:
    """Every normal form reachable by an enumerated recipe over ``gamma``,
    mapped to the first recipe that reaches it.  Used for exhaustive sweeps
    where many targets share one hypothesis set."""
    d = th.theory(theory)
    members = sorted(set(gamma))
    out: dict[Term, Recipe] = {}
    if d.kind is TheoryKind.EMPTY:
        for g in members:
            out.setdefault(g, Recipe(make_context(th.bank, d.name, Hole()), (g,)))
        return out
    for vec in _candidates(d, members, budget):
        r = _build(th, d, members, vec)
        if r is None:
            continue
        out.setdefault(th.normalize(apply_context(r.context, r.args, th.bank)), r)
    return out


# -- stepwise rewriting ---------------------------------------------------------------


def rewrite_normalize(t: Term, th: Theories, limit: int = 100000) -> Term:
    """Normal form by repeated single rewrite steps with the oriented rules
    of XOR and Abelian groups, applied anywhere in the term.  Terms stay
    AC-canonical through interning, so matching is modulo AC for free."""
    for _ in range(limit):
        nxt = _step(t, th)
        if nxt is None:
            return t
        t = nxt
    raise RuntimeError("rewriting did not terminate within the step limit")


def _step(t: Term, th: Theories) -> Term | None:
    for i, a in enumerate(t.args):
        r = _step(a, th)
        if r is not None:
            args = list(t.args)
            args[i] = r
            return th.bank.app(t.head, *args)
    if t.kind is not Kind.FUN:
        return None
    d = th.by_name[t.theory]
    bank = th.bank
    if d.kind not in (TheoryKind.XOR, TheoryKind.AG):
        return None
    zero = bank.app(d.zero)

    def rebuild(rest: list[Term]) -> Term:
        if not rest:
            return zero
        if len(rest) == 1:
            return rest[0]
        return bank.app(d.op, *rest)

    if t.head == d.op:
        args = list(t.args)
        # x + 0 -> x
        if zero in args:
            args.remove(zero)
            return rebuild(args)
        if d.kind is TheoryKind.XOR:
            # x + x -> 0
            for x in args:
                if args.count(x) >= 2:
                    args.remove(x)
                    args.remove(x)
                    return rebuild(args + [zero]) if args else zero
        else:
            # x + I(x) -> 0
            for x in args:
                ix = bank.lookup(d.inv, x)
                if ix is not None and ix in args and ix is not x:
                    args.remove(x)
                    args.remove(ix)
                    return rebuild(args + [zero]) if args else zero
        return None
    if d.kind is TheoryKind.AG and t.head == d.inv:
        (x,) = t.args
        if x is zero:
            return zero
        if x.kind is Kind.FUN and x.head == d.inv:
            return x.args[0]
        if x.kind is Kind.FUN and x.head == d.op:
            return bank.app(d.op, *(bank.app(d.inv, y) for y in x.args))
    return None


# -- AC equality by multiset recursion ----------------------------------------------


def ac_equal_raw(s, t, ac_ops: Iterable[str]) -> bool:
    """Equality of raw descriptions modulo associativity and commutativity of
    the given operators, by flattening and multiset comparison."""
    ops = set(ac_ops)
    return _ac_key(s, ops) == _ac_key(t, ops)


def cross_theory_walk(desc, theory_of: dict[str, str], ac_ops: Iterable[str]) -> list:
    """Cross-theory subterms of a raw description: every theory-headed
    argument position under a head of a different theory, deduplicated by
    AC-insensitive key and returned as raw descriptions."""
    ac_ops = set(ac_ops)
    found: dict = {}

    def head_theory(x):
        return None if isinstance(x, str) else theory_of.get(x[0])

    def walk(x):
        if isinstance(x, str):
            return
        h = head_theory(x)
        for a in x[1:]:
            ha = head_theory(a)
            if h is not None and ha is not None and ha != h:
                found.setdefault(_ac_key(a, ac_ops), a)
            walk(a)

    walk(desc)
    return list(found.values())


def _ac_key(x, ops: set[str]):
    if isinstance(x, str):
        return ("name", x)
    head, *args = x
    keys = [_ac_key(a, ops) for a in args]
    if head in ops:
        flat: list = []
        for k in keys:
            if k[0] == "ac" and k[1] == head:
                flat.extend(k[2])
            else:
                flat.append(k)
        return ("ac", head, tuple(sorted(flat, key=repr)))
    return ("app", head, tuple(keys))


__all__ = [
    "CONSTRUCTORS",
    "OracleBudget",
    "OracleResult",
    "Verdict",
    "ac_equal_raw",
    "cross_theory_walk",
    "elem_bruteforce",
    "elem_reachable",
    "nd_closure",
    "nd_prove",
    "rewrite_normalize",
]
