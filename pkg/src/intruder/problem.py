"""Problem files and the concrete term syntax.

Grammar, one directive per line (``#`` starts a comment)::

    theory <name> : <kind> [symbols <sym> ...]
    assume <term>
    goal <term>

``<kind>`` is ``empty``, ``ac``, ``xor`` or ``ag``.  The optional symbol list
is positional: operator, zero, inverse (defaults ``+ 0 I``, so ``ac`` uses
``+``, ``xor`` uses ``+ 0``).  An ``empty`` theory lists uninterpreted
symbols as ``name/arity``.  Exactly one ``goal`` line is required.

Terms::

    term    := primary (OP primary)*        one operator per level
    primary := '(' term ')' | SYM '(' term, ... ')' | SYM | name | hole
    hole    := '[' N ']' | '_'              contexts only

Names are identifiers starting with a lowercase letter.  Operators of equal
precedence cannot be mixed without parentheses.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator

from .terms import CONSTRUCTORS, Description, Hole
from .theories import TheoryDef, TheoryKind, Theories


class ParseError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        self.msg, self.line, self.col = msg, line, col
        where = f"{line}:{col}: " if line else (f"col {col}: " if col else "")
        super().__init__(where + msg)


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<hole>\[\s*\d+\s*\])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<num>\d+)
  | (?P<punct>[(),])
  | (?P<op>[+*^&|~.<>@$%!?=/\\-]+)
    """,
    re.VERBOSE,
)

_OP_RE = re.compile(r"[+*^&|~.<>@$%!?=/\\-]+\Z")
_SYM_RE = re.compile(r"(?:[A-Za-z_][A-Za-z0-9_']*|\d+)\Z")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    col: int


def tokenize(text: str, line: int = 0) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos + 1)
        if m.lastgroup != "ws":
            out.append(Token(m.lastgroup, m.group(), pos + 1))
        pos = m.end()
    out.append(Token("eof", "", len(text) + 1))
    return out


@dataclass
class Signature:
    """Symbol table for the parser: name -> (arity, is_ac)."""

    symbols: dict[str, tuple[int, bool]] = field(default_factory=dict)

    @classmethod
    def of(cls, defs) -> Signature:
        sig = cls()
        for d in defs:
            for s in d.symbols():
                sig.symbols[s.name] = (s.arity, s.ac)
        return sig


class TermParser:
    def __init__(self, sig: Signature, text: str, line: int = 0, holes: bool = False):
        self.sig = sig
        self.toks = tokenize(text, line)
        self.i = 0
        self.line = line
        self.holes = holes

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.peek()
        raise ParseError(msg, self.line, tok.col)

    def peek(self) -> Token:
        return self.toks[self.i]

    def take(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        t = self.peek()
        if t.text != text:
            self.error(f"expected {text!r}, found {t.text or 'end of input'!r}")
        return self.take()

    def parse(self) -> Description:
        d = self.term()
        if self.peek().kind != "eof":
            self.error(f"unexpected {self.peek().text!r}")
        return d

    def term(self) -> Description:
        first = self.primary()
        tok = self.peek()
        if tok.kind != "op":
            return first
        op = tok.text
        arity_ac = self.sig.symbols.get(op)
        if arity_ac is None or not arity_ac[1]:
            self.error(f"undeclared infix operator {op!r}")
        parts = [first]
        while self.peek().kind == "op":
            t = self.take()
            if t.text != op:
                self.error(f"operators {op!r} and {t.text!r} mixed without parentheses", t)
            parts.append(self.primary())
        return (op, *parts)

    def primary(self) -> Description:
        tok = self.take()
        if tok.text == "(":
            d = self.term()
            self.expect(")")
            return d
        if tok.kind == "hole" or tok.text == "_":
            if not self.holes:
                self.error("holes are only allowed in contexts", tok)
            return Hole(int(tok.text.strip("[] ")) if tok.kind == "hole" else None)
        if tok.kind not in ("ident", "num"):
            self.error(f"expected a term, found {tok.text or 'end of input'!r}", tok)
        name = tok.text
        called = self.peek().text == "("
        if name in CONSTRUCTORS or name in self.sig.symbols:
            arity = CONSTRUCTORS.get(name)
            if arity is None:
                arity, ac = self.sig.symbols[name]
                if ac and not called:
                    self.error(f"{name!r} is an infix operator", tok)
            args: list[Description] = []
            if called:
                self.take()
                if self.peek().text != ")":
                    args.append(self.term())
                    while self.peek().text == ",":
                        self.take()
                        args.append(self.term())
                self.expect(")")
            if len(args) != arity:
                self.error(f"{name} expects {arity} argument(s), got {len(args)}", tok)
            return (name, *args)
        if called:
            self.error(f"undeclared symbol {name!r}", tok)
        if tok.kind == "num":
            self.error(f"undeclared constant {name!r}", tok)
        if not name[0].islower():
            self.error(f"{name!r} is a variable; problem terms must be ground", tok)
        return name


def parse_term(text: str, sig: Signature | Theories, holes: bool = False) -> Description:
    if isinstance(sig, Theories):
        sig = Signature.of(sig.defs)
    return TermParser(sig, text, holes=holes).parse()


@dataclass(frozen=True)
class Problem:
    theories: tuple[TheoryDef, ...]
    assumptions: tuple[Description, ...]
    goal: Description
    source: str | None = None

    def session(self) -> Theories:
        return Theories(self.theories)


_KINDS = {k.value: k for k in TheoryKind}


def _theory_line(rest: str, lineno: int) -> TheoryDef:
    head, sep, tail = rest.partition(":")
    name = head.strip()
    if not sep or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
        raise ParseError("expected 'theory <name> : <kind> [symbols ...]'", lineno, 1)
    words = tail.split()
    if not words or words[0] not in _KINDS:
        raise ParseError(f"unknown theory kind; expected one of {', '.join(_KINDS)}", lineno, 1)
    kind = _KINDS[words[0]]
    syms = words[1:]
    if syms and syms[0] != "symbols":
        raise ParseError(f"unexpected {syms[0]!r}; expected 'symbols'", lineno, 1)
    syms = syms[1:]
    if kind is TheoryKind.EMPTY:
        free = []
        for s in syms:
            m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_']*)/(\d+)", s)
            if m is None:
                raise ParseError(f"empty-theory symbols are written name/arity, got {s!r}", lineno, 1)
            free.append((m.group(1), int(m.group(2))))
        return TheoryDef.empty(name, free)
    slots = {TheoryKind.AC: 1, TheoryKind.XOR: 2, TheoryKind.AG: 3}[kind]
    if syms and len(syms) != slots:
        raise ParseError(f"{kind.value} takes {slots} symbol(s), got {len(syms)}", lineno, 1)
    op, zero, inv = (syms + ["+", "0", "I"][len(syms):])[:3] if syms else ("+", "0", "I")
    if not _OP_RE.match(op):
        raise ParseError(f"operator {op!r} must be made of punctuation", lineno, 1)
    for s in (zero, inv)[: slots - 1]:
        if not _SYM_RE.match(s):
            raise ParseError(f"bad symbol name {s!r}", lineno, 1)
    if kind is TheoryKind.AC:
        return TheoryDef.ac(name, op)
    if kind is TheoryKind.XOR:
        return TheoryDef.xor(name, op, zero)
    return TheoryDef.ag(name, op, zero, inv)


def _lines(text: str) -> Iterator[tuple[int, str, str]]:
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        word, _, rest = line.partition(" ")
        yield n, word, rest.strip()


def parse_problem(text: str, source: str | None = None) -> Problem:
    """Parse a problem file; raises :class:`ParseError` with a line number."""
    defs: list[TheoryDef] = []
    for n, word, rest in _lines(text):
        if word == "theory":
            defs.append(_theory_line(rest, n))
        elif word not in ("assume", "goal"):
            raise ParseError(f"unknown directive {word!r}", n, 1)
    names = [d.name for d in defs]
    if len(set(names)) != len(names):
        raise ParseError("duplicate theory name", 0)
    seen: dict[str, str] = {}
    for d in defs:
        for s in d.symbols():
            if s.name in CONSTRUCTORS:
                raise ParseError(f"symbol {s.name!r} clashes with a constructor")
            if s.name in seen:
                raise ParseError(f"symbol {s.name!r} declared by both {seen[s.name]} and {d.name}")
            seen[s.name] = d.name
    sig = Signature.of(defs)
    assumptions: list[Description] = []
    goal = None
    for n, word, rest in _lines(text):
        if word == "theory":
            continue
        offset = len(word) + 1
        try:
            d = TermParser(sig, rest, n).parse()
        except ParseError as e:
            raise ParseError(e.msg, n, e.col + offset) from None
        if word == "assume":
            assumptions.append(d)
        elif goal is not None:
            raise ParseError("more than one goal", n, 1)
        else:
            goal = d
    if goal is None:
        raise ParseError("missing goal line")
    return Problem(tuple(defs), tuple(assumptions), goal, source)


def format_problem(p: Problem) -> str:
    """Inverse of :func:`parse_problem` up to whitespace and comments."""
    th = p.session()
    out = []
    for d in p.theories:
        if d.kind is TheoryKind.EMPTY:
            syms = " ".join(f"{f}/{n}" for f, n in d.free)
        else:
            syms = " ".join(s for s in (d.op, d.zero, d.inv) if s is not None)
        out.append(f"theory {d.name} : {d.kind.value}" + (f" symbols {syms}" if syms else ""))
    for a in p.assumptions:
        out.append(f"assume {th.intern(a)}")
    out.append(f"goal {th.intern(p.goal)}")
    return "\n".join(out) + "\n"
