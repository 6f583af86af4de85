"""Interned message terms with AC-canonical theory nodes.

Terms live in a :class:`TermBank`.  Interning is get-or-insert under a lock,
so a bank may be shared between threads; every :class:`Term` is immutable once
created.  Nodes headed by an associative-commutative symbol are flattened and
their children sorted by id when interned, which makes equality modulo AC
coincide with object identity.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Sequence, Union

CONSTRUCTORS: dict[str, int] = {"pub": 1, "sign": 2, "blind": 2, "pair": 2, "enc": 2}


class TermError(ValueError):
    """Arity mismatch, undeclared symbol or malformed term description."""


class NonGroundError(TermError):
    pass


class Kind(Enum):
    NAME = "name"
    VAR = "var"
    HOLE = "hole"
    CONS = "cons"
    FUN = "fun"


@dataclass(frozen=True)
class Symbol:
    """A function symbol of some equational theory."""

    name: str
    arity: int
    theory: str
    ac: bool = False


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Hole:
    """Hole marker in a context description; ``index`` is 1-based, or None to
    number holes by inorder position."""

    index: int | None = None


Description = Union["Term", str, Var, Hole, tuple]


class Term:
    __slots__ = ("id", "kind", "head", "args", "theory", "ac", "size")

    id: int
    kind: Kind
    head: str
    args: tuple[Term, ...]
    theory: str | None
    ac: bool
    size: int

    def __init__(self, id, kind, head, args=(), theory=None, ac=False):
        self.id = id
        self.kind = kind
        self.head = head
        self.args = args
        self.theory = theory
        self.ac = ac
        if kind is Kind.CONS or kind is Kind.FUN:
            # binary size: a flattened k-ary AC node stands for k-1 symbols
            own = len(args) - 1 if ac else 1
            self.size = own + sum(a.size for a in args)
        else:
            self.size = 1

    def __hash__(self) -> int:
        return self.id

    def __lt__(self, other: Term) -> bool:
        return self.id < other.id

    def __repr__(self) -> str:
        return f"Term#{self.id}<{self}>"

    def __str__(self) -> str:
        return render(self)

    @property
    def is_name(self) -> bool:
        return self.kind is Kind.NAME

    @property
    def is_constructor(self) -> bool:
        return self.kind is Kind.CONS


def render(t: Term, nested_ac: bool = False) -> str:
    if t.kind is Kind.NAME:
        return t.head
    if t.kind is Kind.VAR:
        return t.head
    if t.kind is Kind.HOLE:
        return f"[{t.head}]"
    if t.ac:
        body = f" {t.head} ".join(render(a, True) for a in t.args)
        return f"({body})" if nested_ac else body
    if not t.args:
        return t.head
    return f"{t.head}({', '.join(render(a) for a in t.args)})"


class TermBank:
    """Hash-consing store for terms over the constructors and a set of
    declared theory symbols."""

    def __init__(self, symbols: Iterable[Symbol] = ()):
        self._symbols: dict[str, Symbol] = {}
        for s in symbols:
            if s.name in CONSTRUCTORS:
                raise TermError(f"symbol {s.name!r} clashes with a constructor")
            if s.name in self._symbols:
                raise TermError(f"symbol {s.name!r} declared twice")
            if s.ac and s.arity != 2:
                raise TermError(f"AC symbol {s.name!r} must be binary")
            self._symbols[s.name] = s
        self._table: dict[tuple, Term] = {}
        self._terms: list[Term] = []
        self._lock = threading.Lock()

    # -- lookup -------------------------------------------------------------

    def symbol(self, name: str) -> Symbol | None:
        return self._symbols.get(name)

    @property
    def symbols(self) -> dict[str, Symbol]:
        return dict(self._symbols)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[Term]:
        return iter(list(self._terms))

    def __getitem__(self, id: int) -> Term:
        return self._terms[id]

    # -- construction -------------------------------------------------------

    def _get(self, key: tuple, make) -> Term:
        t = self._table.get(key)
        if t is not None:
            return t
        with self._lock:
            t = self._table.get(key)
            if t is None:
                t = make(len(self._terms))
                self._terms.append(t)
                self._table[key] = t
            return t

    def name(self, n: str) -> Term:
        if n in CONSTRUCTORS or n in self._symbols:
            raise TermError(f"{n!r} is a function symbol, not a name")
        return self._get((Kind.NAME, n), lambda i: Term(i, Kind.NAME, n))

    def var(self, n: str) -> Term:
        return self._get((Kind.VAR, n), lambda i: Term(i, Kind.VAR, n))

    def hole(self, index: int) -> Term:
        if index < 1:
            raise TermError("hole indices start at 1")
        return self._get((Kind.HOLE, str(index)), lambda i: Term(i, Kind.HOLE, str(index)))

    def app(self, head: str, *args: Term) -> Term:
        if head in CONSTRUCTORS:
            if len(args) != CONSTRUCTORS[head]:
                raise TermError(f"{head} expects {CONSTRUCTORS[head]} argument(s), got {len(args)}")
            key = (Kind.CONS, head, tuple(a.id for a in args))
            return self._get(key, lambda i: Term(i, Kind.CONS, head, tuple(args)))
        sym = self._symbols.get(head)
        if sym is None:
            raise TermError(f"undeclared symbol {head!r}")
        if sym.ac:
            flat: list[Term] = []
            for a in args:
                if a.ac and a.head == head:
                    flat.extend(a.args)
                else:
                    flat.append(a)
            if len(args) < 2:
                raise TermError(f"{head} expects at least 2 arguments, got {len(args)}")
            flat.sort(key=lambda a: a.id)
            args = tuple(flat)
        elif len(args) != sym.arity:
            raise TermError(f"{head} expects {sym.arity} argument(s), got {len(args)}")
        key = (Kind.FUN, head, tuple(a.id for a in args))
        return self._get(key, lambda i: Term(i, Kind.FUN, head, tuple(args), sym.theory, sym.ac))

    def lookup(self, head: str, *args: Term) -> Term | None:
        """The interned application if it already exists; never inserts."""
        kind = Kind.CONS if head in CONSTRUCTORS else Kind.FUN
        return self._table.get((kind, head, tuple(a.id for a in args)))

    def intern(self, desc: Description, *, allow_vars: bool = False, allow_holes: bool = False) -> Term:
        """Intern a raw description.

        Names are strings, applications are tuples ``(head, *args)`` (a theory
        constant is ``(head,)``), and :class:`Var` / :class:`Hole` mark
        variables and context holes.
        """
        if isinstance(desc, Term):
            return desc
        if isinstance(desc, str):
            return self.name(desc)
        if isinstance(desc, Var):
            if not allow_vars:
                raise NonGroundError(f"variable {desc.name!r} in a ground term")
            return self.var(desc.name)
        if isinstance(desc, Hole):
            if not allow_holes or desc.index is None:
                raise TermError("unexpected hole")
            return self.hole(desc.index)
        if isinstance(desc, tuple) and desc and isinstance(desc[0], str):
            args = [self.intern(a, allow_vars=allow_vars, allow_holes=allow_holes) for a in desc[1:]]
            return self.app(desc[0], *args)
        raise TermError(f"cannot interpret {desc!r} as a term")

    def check_invariants(self) -> None:
        """Assert the canonical-flattening and arity invariants over the bank."""
        for t in self._terms:
            if t.ac:
                assert len(t.args) >= 2, t
                assert all(not (a.ac and a.head == t.head) for a in t.args), t
                assert [a.id for a in t.args] == sorted(a.id for a in t.args), t
            elif t.kind is Kind.CONS:
                assert len(t.args) == CONSTRUCTORS[t.head], t
            elif t.kind is Kind.FUN:
                assert len(t.args) == self._symbols[t.head].arity, t
            assert self._table[_key(t)] is t


def _key(t: Term) -> tuple:
    if t.kind in (Kind.NAME, Kind.VAR, Kind.HOLE):
        return (t.kind, t.head)
    return (t.kind, t.head, tuple(a.id for a in t.args))


def ac_equal(s: Term, t: Term) -> bool:
    return s is t


# -- subterms --------------------------------------------------------------


def subterms(t: Term) -> set[Term]:
    seen: set[Term] = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if u in seen:
            continue
        seen.add(u)
        stack.extend(u.args)
    return seen


def st(terms: Iterable[Term]) -> set[Term]:
    out: set[Term] = set()
    stack = list(terms)
    while stack:
        u = stack.pop()
        if u in out:
            continue
        out.add(u)
        stack.extend(u.args)
    return out


def pst(terms: Iterable[Term]) -> set[Term]:
    """Proper subterms: subterms strictly below some member."""
    out: set[Term] = set()
    stack = [a for t in terms for a in t.args]
    while stack:
        u = stack.pop()
        if u in out:
            continue
        out.add(u)
        stack.extend(u.args)
    return out


def is_subterm(a: Term, t: Term) -> bool:
    if a is t:
        return True
    if a.size >= t.size:
        return False
    return any(is_subterm(a, c) for c in t.args)


# -- classification ----------------------------------------------------------


def is_guarded(t: Term) -> bool:
    return t.kind in (Kind.NAME, Kind.VAR, Kind.CONS)


def head_theory(t: Term) -> str | None:
    return t.theory if t.kind is Kind.FUN else None


def is_alien(t: Term, theory: str) -> bool:
    """Headed by a function symbol outside the given theory's signature."""
    return t.kind is Kind.CONS or (t.kind is Kind.FUN and t.theory != theory)


def is_pure(t: Term, theory: str) -> bool:
    return all(not is_alien(u, theory) and u.kind is not Kind.HOLE for u in subterms(t))


@dataclass(frozen=True)
class Classification:
    guarded: bool
    head_theory: str | None
    alien_for: frozenset[str]
    pure_for: frozenset[str]


def classify(t: Term, theories: Iterable[str]) -> Classification:
    names = list(theories)
    return Classification(
        guarded=is_guarded(t),
        head_theory=head_theory(t),
        alien_for=frozenset(n for n in names if is_alien(t, n)),
        pure_for=frozenset(n for n in names if is_pure(t, n)),
    )


def cross_theory_subterms(t: Term, theories: Sequence[str] | None = None) -> tuple[Term, ...]:
    """Theory-headed subterms sitting directly under a symbol of another theory."""
    if theories is not None and len(theories) < 2:
        return ()
    found: set[Term] = set()
    for u in subterms(t):
        if u.kind is not Kind.FUN:
            continue
        for c in u.args:
            if c.kind is Kind.FUN and c.theory != u.theory:
                found.add(c)
    return tuple(sorted(found))


# -- saturation ----------------------------------------------------------------


@dataclass(frozen=True)
class SaturatedSet:
    members: tuple[Term, ...]
    origin: tuple[frozenset[Term], Term]
    st_size: int
    pst_size: int

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, t: Term) -> bool:
        return t in self._index

    def __iter__(self) -> Iterator[Term]:
        return iter(self.members)

    @property
    def _index(self) -> frozenset[Term]:
        idx = self.__dict__.get("_idx")
        if idx is None:
            idx = frozenset(self.members)
            object.__setattr__(self, "_idx", idx)
        return idx


def saturate(gamma: Iterable[Term], m: Term, bank: TermBank) -> SaturatedSet:
    gamma = frozenset(gamma)
    delta = set(gamma) | {m}
    proper = pst(delta)
    members = delta | proper
    ps = sorted(proper)
    for x in ps:
        for y in ps:
            members.add(bank.app("sign", x, y))
    return SaturatedSet(
        members=tuple(sorted(members)),
        origin=(gamma, m),
        st_size=len(st(delta)),
        pst_size=len(proper),
    )


# -- contexts ----------------------------------------------------------------


@dataclass(frozen=True)
class Context:
    """A term over one theory's symbols whose leaves are numbered holes or
    theory constants."""

    theory: str
    skeleton: Term
    arity: int

    def __str__(self) -> str:
        return str(self.skeleton)


def holes_of(t: Term) -> list[int]:
    return [int(u.head) for u in _walk(t) if u.kind is Kind.HOLE]


def _walk(t: Term) -> Iterator[Term]:
    yield t
    for a in t.args:
        yield from _walk(a)


def make_context(bank: TermBank, theory: str, tree: Description) -> Context:
    """Build a context from a description.

    Unnumbered :class:`Hole` markers are numbered by their inorder position in
    the description as written.
    """
    counter = [0]

    def number(d):
        if isinstance(d, Hole):
            if d.index is not None:
                return d
            counter[0] += 1
            return Hole(counter[0])
        if isinstance(d, tuple):
            return (d[0],) + tuple(number(a) for a in d[1:])
        return d

    skeleton = bank.intern(number(tree), allow_holes=True)
    return context_from_skeleton(theory, skeleton, bank)


def context_from_skeleton(theory: str, skeleton: Term, bank: TermBank) -> Context:
    idx = holes_of(skeleton)
    k = len(idx)
    if sorted(idx) != list(range(1, k + 1)):
        raise TermError(f"context holes must be numbered 1..{k} once each, got {sorted(idx)}")
    for u in subterms(skeleton):
        if u.kind in (Kind.NAME, Kind.VAR, Kind.CONS):
            raise TermError(f"{u} is not allowed in a {theory}-context")
        if u.kind is Kind.FUN and u.theory != theory:
            raise TermError(f"symbol {u.head!r} is not in the signature of {theory}")
    return Context(theory, skeleton, k)


def hole_context(bank: TermBank, theory: str) -> Context:
    return Context(theory, bank.hole(1), 1)


def apply_context(c: Context, fills: Sequence[Term], bank: TermBank) -> Term:
    if len(fills) != c.arity:
        raise TermError(f"context has {c.arity} hole(s), got {len(fills)} fill(s)")
    memo: dict[Term, Term] = {}

    def go(u: Term) -> Term:
        r = memo.get(u)
        if r is None:
            if u.kind is Kind.HOLE:
                r = fills[int(u.head) - 1]
            elif u.args:
                r = bank.app(u.head, *(go(a) for a in u.args))
            else:
                r = u
            memo[u] = r
        return r

    return go(c.skeleton)


def erase_holes(t: Term, fills: Sequence[Term], theory: str, bank: TermBank) -> Context:
    """Inverse of :func:`apply_context` for fills that are distinct fresh names."""
    where = {f: i + 1 for i, f in enumerate(fills)}

    def go(u: Term) -> Term:
        if u in where:
            return bank.hole(where[u])
        if u.args:
            return bank.app(u.head, *(go(a) for a in u.args))
        return u

    return context_from_skeleton(theory, go(t), bank)
