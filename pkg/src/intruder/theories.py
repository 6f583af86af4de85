"""Built-in equational theories: normal forms, variable abstraction and
elementary-deduction solvers that emit checkable recipes.

A :class:`Theories` object is one session: it owns the term bank, the
variable assignment used for abstraction, and the normal-form caches.
"""

from __future__ import annotations

import threading
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from .linalg import gf2_solve, int_solve
from .terms import (
    CONSTRUCTORS,
    Context,
    Description,
    Hole,
    Kind,
    Symbol,
    Term,
    TermBank,
    TermError,
    apply_context,
    context_from_skeleton,
    hole_context,
    make_context,
)


class TheoryKind(Enum):
    EMPTY = "empty"
    AC = "ac"
    XOR = "xor"
    AG = "ag"


@dataclass(frozen=True)
class TheoryDef:
    """One equational theory of the catalog with its concrete symbol names.

    ``free`` lists uninterpreted ``(name, arity)`` symbols, only allowed in
    the empty theory.
    """

    name: str
    kind: TheoryKind
    op: str | None = None
    zero: str | None = None
    inv: str | None = None
    free: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        k = self.kind
        need = {
            TheoryKind.EMPTY: (False, False, False),
            TheoryKind.AC: (True, False, False),
            TheoryKind.XOR: (True, True, False),
            TheoryKind.AG: (True, True, True),
        }[k]
        have = (self.op is not None, self.zero is not None, self.inv is not None)
        if need != have:
            raise TermError(f"theory {self.name}: wrong symbol set for kind {k.value}")
        if self.free and k is not TheoryKind.EMPTY:
            raise TermError(f"theory {self.name}: free symbols are only allowed in an empty theory")
        names = [s.name for s in self.symbols()]
        if len(set(names)) != len(names):
            raise TermError(f"theory {self.name}: symbol names must be distinct")
        clash = set(names) & set(CONSTRUCTORS)
        if clash:
            raise TermError(f"theory {self.name}: {sorted(clash)[0]} is a constructor")

    @classmethod
    def empty(cls, name: str = "empty", free: Iterable[tuple[str, int]] = ()) -> TheoryDef:
        return cls(name, TheoryKind.EMPTY, free=tuple(free))

    @classmethod
    def ac(cls, name: str = "ac", op: str = "+") -> TheoryDef:
        return cls(name, TheoryKind.AC, op=op)

    @classmethod
    def xor(cls, name: str = "xor", op: str = "+", zero: str = "0") -> TheoryDef:
        return cls(name, TheoryKind.XOR, op=op, zero=zero)

    @classmethod
    def ag(cls, name: str = "ag", op: str = "+", zero: str = "0", inv: str = "I") -> TheoryDef:
        return cls(name, TheoryKind.AG, op=op, zero=zero, inv=inv)

    def symbols(self) -> list[Symbol]:
        out = []
        if self.op is not None:
            out.append(Symbol(self.op, 2, self.name, ac=True))
        if self.zero is not None:
            out.append(Symbol(self.zero, 0, self.name))
        if self.inv is not None:
            out.append(Symbol(self.inv, 1, self.name))
        out.extend(Symbol(f, n, self.name) for f, n in self.free)
        return out


class VarAssignment:
    """Maps each normal form to its own abstraction variable."""

    def __init__(self, bank: TermBank, normalize):
        self._bank = bank
        self._normalize = normalize
        self._fwd: dict[Term, Term] = {}
        self._back: dict[Term, Term] = {}
        self._lock = threading.Lock()

    def __call__(self, t: Term) -> Term:
        n = self._normalize(t)
        v = self._fwd.get(n)
        if v is None:
            with self._lock:
                v = self._fwd.get(n)
                if v is None:
                    v = self._bank.var(f"X{len(self._fwd) + 1}")
                    self._fwd[n] = v
                    self._back[v] = n
        return v

    def preimage(self, v: Term) -> Term:
        return self._back[v]

    def __len__(self) -> int:
        return len(self._fwd)


@dataclass(frozen=True)
class Recipe:
    context: Context
    args: tuple[Term, ...]

    @property
    def holes(self) -> int:
        return self.context.arity

    def __str__(self) -> str:
        return f"C = {self.context}; args: {', '.join(map(str, self.args)) or '-'}"


class Theories:
    """A session over a disjoint combination of catalog theories."""

    def __init__(self, defs: Sequence[TheoryDef] = ()):
        defs = tuple(defs) or (TheoryDef.empty(),)
        names = [d.name for d in defs]
        if len(set(names)) != len(names):
            raise TermError("theory names must be distinct")
        self.defs = defs
        self.by_name = {d.name: d for d in defs}
        self.bank = TermBank(s for d in defs for s in d.symbols())
        self._nf: dict[Term, Term] = {}
        self._abs: dict[tuple[str, Term], Term] = {}
        self.oracle_cache: dict = {}
        self.assignment = VarAssignment(self.bank, self.normalize)

    @property
    def combined(self) -> bool:
        return len(self.defs) > 1

    def theory(self, which: str | TheoryDef) -> TheoryDef:
        if isinstance(which, TheoryDef):
            return which
        try:
            return self.by_name[which]
        except KeyError:
            raise KeyError(f"unknown theory {which!r}") from None

    def intern(self, desc: Description) -> Term:
        return self.bank.intern(desc)

    def term(self, desc: Description) -> Term:
        """Intern and normalize."""
        return self.normalize(self.bank.intern(desc))

    # -- normal forms -------------------------------------------------------

    def normalize(self, t: Term) -> Term:
        r = self._nf.get(t)
        if r is not None:
            return r
        if t.kind is Kind.CONS:
            r = self.bank.app(t.head, *(self.normalize(a) for a in t.args))
        elif t.kind is Kind.FUN:
            d = self.by_name[t.theory]
            r = self._canon(d, t.head, [self.normalize(a) for a in t.args])
        else:
            r = t
        self._nf[t] = r
        self._nf.setdefault(r, r)
        return r

    def _canon(self, d: TheoryDef, head: str, args: list[Term]) -> Term:
        bank = self.bank
        if d.kind is TheoryKind.XOR:
            if head == d.zero:
                return bank.app(head)
            odd: Counter[Term] = Counter()
            for a in args:
                for u in (a.args if a.head == d.op else (a,)):
                    if u.head != d.zero or u.kind is not Kind.FUN:
                        odd[u] ^= 1
            keep = sorted(u for u, c in odd.items() if c)
            return self._sum(d, keep)
        if d.kind is TheoryKind.AG:
            if head == d.op:
                co: Counter[Term] = Counter()
                for a in args:
                    co.update(ag_coefficients(a, d))
            elif head == d.inv:
                co = Counter({u: -c for u, c in ag_coefficients(args[0], d).items()})
            else:
                co = Counter()
            parts: list[Term] = []
            for u in sorted(co):
                c = co[u]
                if c > 0:
                    parts.extend([u] * c)
                elif c < 0:
                    parts.extend([bank.app(d.inv, u)] * -c)
            return self._sum(d, parts)
        return bank.app(head, *args)

    def _sum(self, d: TheoryDef, parts: list[Term]) -> Term:
        if not parts:
            return self.bank.app(d.zero)
        if len(parts) == 1:
            return parts[0]
        return self.bank.app(d.op, *parts)

    def is_normal(self, t: Term) -> bool:
        return self.normalize(t) is t

    # -- abstraction ----------------------------------------------------------

    def abstract(self, t: Term, which: str | TheoryDef) -> Term:
        d = self.theory(which)
        key = (d.name, t)
        r = self._abs.get(key)
        if r is None:
            if t.kind in (Kind.NAME, Kind.VAR):
                r = t
            elif t.kind is Kind.FUN and t.theory == d.name:
                r = self.bank.app(t.head, *(self.abstract(a, d) for a in t.args))
            else:
                r = self.assignment(t)
            self._abs[key] = r
        return r


def ag_coefficients(t: Term, d: TheoryDef) -> Counter:
    """Atom -> integer exponent for a term whose subterms are normal."""
    if t.kind is Kind.FUN and t.theory == d.name:
        if t.head == d.op:
            co: Counter = Counter()
            for a in t.args:
                co.update(ag_coefficients(a, d))
            return co
        if t.head == d.inv:
            return Counter({u: -c for u, c in ag_coefficients(t.args[0], d).items()})
        return Counter()
    return Counter({t: 1})


def normalize(t: Term, th: Theories) -> Term:
    return th.normalize(t)


def abstract(t: Term, theory: str | TheoryDef, th: Theories) -> Term:
    return th.abstract(t, theory)


# -- elementary deduction ----------------------------------------------------


def elem_deduce(gamma: Iterable[Term], m: Term, theory: str | TheoryDef, th: Theories) -> Recipe | None:
    """Solve ``C[M1..Mk] = m`` modulo the theory for a context over its
    symbols and ``Mi`` drawn from ``gamma``."""
    d = th.theory(theory)
    members = sorted(set(gamma))
    if m in members:
        return Recipe(hole_context(th.bank, d.name), (m,))
    if d.kind is TheoryKind.EMPTY and not d.free:
        return None
    images = [th.abstract(g, d) for g in members]
    target = th.abstract(m, d)
    solver = _SOLVERS[d.kind]
    return solver(th, d, members, images, target)


def _atoms(u: Term, d: TheoryDef) -> tuple[Term, ...]:
    if u.kind is Kind.FUN and u.theory == d.name:
        if u.head == d.op:
            return u.args
        if u.head == d.zero:
            return ()
    return (u,)


def _sum_recipe(th: Theories, d: TheoryDef, pos: list[Term], neg: list[Term] = ()) -> Recipe:
    parts: list = [Hole() for _ in pos]
    if neg:
        inner = Hole() if len(neg) == 1 else (d.op,) + tuple(Hole() for _ in neg)
        parts.append((d.inv, inner))
    if not parts:
        tree = (d.zero,)
    elif len(parts) == 1:
        tree = parts[0]
    else:
        tree = (d.op,) + tuple(parts)
    return Recipe(make_context(th.bank, d.name, tree), tuple(pos) + tuple(neg))


def _solve_xor(th, d, members, images, target):
    index: dict[Term, int] = {}

    def vec(u: Term) -> int:
        v = 0
        for a in _atoms(u, d):
            v ^= 1 << index.setdefault(a, len(index))
        return v

    want = vec(target)
    vecs = [vec(u) for u in images]
    mask = gf2_solve(vecs, want)
    if mask is None:
        return None
    chosen = [g for j, g in enumerate(members) if mask >> j & 1]
    return _sum_recipe(th, d, chosen)


def _solve_ag(th, d, members, images, target):
    want = ag_coefficients(target, d)
    cols = [ag_coefficients(u, d) for u in images]
    atoms = sorted(set(want).union(*cols))
    if not atoms:
        return _sum_recipe(th, d, [])
    rows = [[c.get(a, 0) for c in cols] for a in atoms]
    x = int_solve(rows, [want.get(a, 0) for a in atoms])
    if x is None:
        return None
    pos = [g for g, n in zip(members, x) if n > 0 for _ in range(n)]
    neg = [g for g, n in zip(members, x) if n < 0 for _ in range(-n)]
    return _sum_recipe(th, d, pos, neg)


def _solve_ac(th, d, members, images, target):
    want = Counter(_atoms(target, d))
    bags = [(g, Counter(_atoms(u, d))) for g, u in zip(members, images)]
    bags = [(g, b) for g, b in bags if all(want[a] >= n for a, n in b.items())]
    failed: set[tuple] = set()

    def search(rest: Counter) -> list[Term] | None:
        if not rest:
            return []
        key = tuple(sorted((a.id, n) for a, n in rest.items()))
        if key in failed:
            return None
        pick = min(rest)
        for g, b in bags:
            if pick in b and all(rest[a] >= n for a, n in b.items()):
                sub = search(rest - b)
                if sub is not None:
                    return [g] + sub
        failed.add(key)
        return None

    chosen = search(+want)
    if chosen is None:
        return None
    return _sum_recipe(th, d, sorted(chosen))


def _solve_empty(th, d, members, images, target):
    by_image = {}
    for g, u in zip(members, images):
        by_image.setdefault(u, g)
    memo: dict[Term, object] = {}

    def build(u: Term):
        if u in memo:
            return memo[u]
        r = None
        if u in by_image:
            r = ("hole", by_image[u])
        elif u.kind is Kind.FUN and u.theory == d.name:
            subs = [build(a) for a in u.args]
            if all(s is not None for s in subs):
                r = (u.head, *subs)
        memo[u] = r
        return r

    tree = build(target)
    if tree is None:
        return None
    fills: list[Term] = []

    def to_desc(node):
        if node[0] == "hole" and len(node) == 2 and isinstance(node[1], Term):
            fills.append(node[1])
            return Hole()
        return (node[0],) + tuple(to_desc(c) for c in node[1:])

    return Recipe(make_context(th.bank, d.name, to_desc(tree)), tuple(fills))


_SOLVERS = {
    TheoryKind.XOR: _solve_xor,
    TheoryKind.AG: _solve_ag,
    TheoryKind.AC: _solve_ac,
    TheoryKind.EMPTY: _solve_empty,
}


def verify_recipe(r: Recipe, gamma: Iterable[Term], m: Term, th: Theories) -> bool:
    gamma = set(gamma)
    if not all(a in gamma for a in r.args):
        return False
    try:
        context_from_skeleton(r.context.theory, r.context.skeleton, th.bank)
        th.theory(r.context.theory)
        filled = apply_context(r.context, r.args, th.bank)
    except (TermError, KeyError):
        return False
    return th.normalize(filled) is m


__all__ = [
    "CONSTRUCTORS",
    "Recipe",
    "TheoryDef",
    "TheoryKind",
    "Theories",
    "VarAssignment",
    "abstract",
    "ag_coefficients",
    "elem_deduce",
    "normalize",
    "verify_recipe",
]
