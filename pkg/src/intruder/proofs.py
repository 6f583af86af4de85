"""Sequent proofs, their independent checker, and text/JSON encodings.

A proof node carries its full conclusion ``gamma |- goal``.  Rules:

``id``                       witness: :class:`Recipe` (the context names its theory)
``p_L e_L sign_L``           witness: principal term
``blind_L1 blind_L2``        witness: principal term
``gs cs``                    witness: the abstracted term
``p_R e_R sign_R blind_R``   no witness

Premise order follows the usual presentation: the side obligation
(``gamma |- K`` etc.) first, the continued sequent last.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

from .terms import CONSTRUCTORS, Kind, Term, TermError, context_from_skeleton, cross_theory_subterms, is_guarded, st
from .theories import Recipe, Theories, verify_recipe

LEFT_RULES = ("p_L", "e_L", "sign_L", "blind_L1", "blind_L2")
RIGHT_RULES = {"pair": "p_R", "enc": "e_R", "sign": "sign_R", "blind": "blind_R"}
ABSTRACTION_RULES = ("gs", "cs")
RULES = ("id",) + LEFT_RULES + ABSTRACTION_RULES + tuple(RIGHT_RULES.values())


@dataclass(frozen=True)
class Proof:
    rule: str
    gamma: frozenset
    goal: Term
    premises: tuple = ()
    witness: Recipe | Term | None = None

    def nodes(self) -> int:
        return 1 + sum(p.nodes() for p in self.premises)

    def height(self) -> int:
        return 1 + max((p.height() for p in self.premises), default=0)

    def sequents(self):
        yield self.gamma, self.goal
        for p in self.premises:
            yield from p.sequents()

    def rules(self) -> list[str]:
        out = [self.rule]
        for p in self.premises:
            out.extend(p.rules())
        return out

    def shape(self) -> str:
        """Rule skeleton, e.g. ``gs(p_R(id, id), id)``."""
        if not self.premises:
            return self.rule
        return f"{self.rule}({', '.join(p.shape() for p in self.premises)})"


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    path: tuple[int, ...] = ()
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "accepted"
        where = "/".join(map(str, self.path)) or "root"
        return f"rejected at {where}: {self.reason}"


class _Reject(Exception):
    def __init__(self, path, reason):
        self.path, self.reason = path, reason


def check_proof(p: Proof, gamma: Iterable[Term], goal: Term, th: Theories) -> CheckResult:
    """Re-validate every node of ``p`` against the sequent rules."""
    gamma = frozenset(gamma)
    try:
        if p.gamma != gamma or p.goal is not goal:
            raise _Reject((), "conclusion does not match the sequent")
        _check(p, (), th)
    except _Reject as r:
        return CheckResult(False, r.path, r.reason)
    return CheckResult(True)


def _check(p: Proof, path: tuple[int, ...], th: Theories) -> None:
    def fail(msg: str):
        raise _Reject(path, msg)

    G, M = p.gamma, p.goal
    for t in (*G, M):
        if not th.is_normal(t):
            fail(f"{t} is not in normal form")
    prem = p.premises

    def premises(*expected: tuple[frozenset, Term]):
        if len(prem) != len(expected):
            fail(f"{p.rule} needs {len(expected)} premise(s), got {len(prem)}")
        for i, (q, (g, m)) in enumerate(zip(prem, expected)):
            if q.goal is not m:
                fail(f"premise {i} has goal {q.goal}, expected {m}")
            if q.gamma != g:
                extra = sorted(q.gamma ^ g)
                fail(f"premise {i} has the wrong hypotheses (differs on {', '.join(map(str, extra))})")

    def principal(head: str) -> Term:
        w = p.witness
        if not isinstance(w, Term) or w.kind is not Kind.CONS or w.head != head:
            fail(f"{p.rule} needs a {head}(...) principal term")
        if w not in G:
            fail(f"principal {w} is not a hypothesis")
        return w

    rule = p.rule
    if rule == "id":
        r = p.witness
        if not isinstance(r, Recipe):
            fail("id needs a recipe")
        if r.context.theory not in th.by_name:
            fail(f"unknown theory {r.context.theory!r}")
        try:
            context_from_skeleton(r.context.theory, r.context.skeleton, th.bank)
        except TermError as e:
            fail(f"bad context: {e}")
        if not verify_recipe(r, G, M, th):
            fail("id recipe fails")
        premises()
    elif rule == "p_L":
        w = principal("pair")
        premises((G | set(w.args), M))
    elif rule in ("e_L", "blind_L1"):
        w = principal("enc" if rule == "e_L" else "blind")
        m, k = w.args
        premises((G, k), (G | {m, k}, M))
    elif rule == "sign_L":
        w = principal("sign")
        m, k = w.args
        if not any(g.kind is Kind.CONS and g.head == "pub" and g.args[0] is k for g in G):
            fail(f"no pub({k}) among the hypotheses")
        premises((G | {m}, M))
    elif rule == "blind_L2":
        w = principal("sign")
        inner, k = w.args
        if inner.kind is not Kind.CONS or inner.head != "blind":
            fail("blind_L2 needs a sign(blind(M,R),K) principal")
        m, r = inner.args
        premises((G, r), (G | {th.bank.app("sign", m, k), r}, M))
    elif rule in ABSTRACTION_RULES:
        a = p.witness
        if not isinstance(a, Term):
            fail(f"{rule} needs an abstracted term")
        if rule == "gs":
            if not is_guarded(a):
                fail(f"{a} is not guarded")
            if a not in st((*G, M)):
                fail(f"{a} is not a subterm of the sequent")
        else:
            if not th.combined:
                fail("cs needs a combination of theories")
            names = [d.name for d in th.defs]
            if not any(a in cross_theory_subterms(t, names) for t in (*G, M)):
                fail(f"{a} is not a cross-theory subterm of the sequent")
        premises((G, a), (G | {a}, M))
    elif rule in RIGHT_RULES.values():
        head = {v: k for k, v in RIGHT_RULES.items()}[rule]
        if M.kind is not Kind.CONS or M.head != head:
            fail(f"{rule} needs a {head}(...) goal")
        premises(*((G, a) for a in M.args))
    elif rule == "cut":
        fail("cut is not part of the cut-free system")
    else:
        fail(f"unknown rule {rule!r}")
    for i, q in enumerate(prem):
        _check(q, path + (i,), th)


# -- rendering ------------------------------------------------------------------


def _rule_label(p: Proof, th: Theories) -> str:
    if p.rule == "id" and th.combined:
        return f"id_{p.witness.context.theory}"
    return p.rule


def _witness_text(p: Proof) -> str:
    w = p.witness
    if w is None:
        return ""
    if isinstance(w, Recipe):
        args = ", ".join(map(str, w.args))
        return f"  [C = {w.context}; {args}]" if args else f"  [C = {w.context}]"
    return f"  [{w}]"


def render_text(p: Proof, th: Theories, indent: int = 0) -> str:
    lines: list[str] = []

    def go(q: Proof, depth: int):
        gamma = ", ".join(str(t) for t in sorted(q.gamma))
        lines.append(f"{'  ' * depth}{_rule_label(q, th)}  {gamma} |- {q.goal}{_witness_text(q)}")
        for c in q.premises:
            go(c, depth + 1)

    go(p, indent)
    return "\n".join(lines)


def to_json(p: Proof, th: Theories) -> dict:
    def go(q: Proof) -> dict:
        d: dict = {
            "rule": q.rule,
            "gamma": [str(t) for t in sorted(q.gamma)],
            "goal": str(q.goal),
        }
        w = q.witness
        if isinstance(w, Recipe):
            d["witness"] = {
                "theory": w.context.theory,
                "context": str(w.context.skeleton),
                "args": [str(a) for a in w.args],
            }
        elif isinstance(w, Term):
            d["witness"] = {"term" if q.rule in ABSTRACTION_RULES else "principal": str(w)}
        d["premises"] = [go(c) for c in q.premises]
        return d

    return {"format": "intruder-proof", "version": 1, "theories": _theories_json(th), "proof": go(p)}


def _theories_json(th: Theories) -> list[dict]:
    out = []
    for d in th.defs:
        e = {"name": d.name, "kind": d.kind.value}
        for k in ("op", "zero", "inv"):
            if getattr(d, k) is not None:
                e[k] = getattr(d, k)
        if d.free:
            e["free"] = [[f, n] for f, n in d.free]
        out.append(e)
    return out


def dumps(p: Proof, th: Theories) -> str:
    return json.dumps(to_json(p, th), indent=2)


def from_json(doc: dict | str, th: Theories) -> Proof:
    """Rebuild a :class:`Proof` over ``th``'s bank; the declared theories
    must match the session's."""
    from .problem import parse_term
    from .terms import make_context

    if isinstance(doc, str):
        doc = json.loads(doc)
    if doc.get("format") != "intruder-proof" or doc.get("version") != 1:
        raise ValueError("not an intruder-proof v1 document")
    if doc.get("theories") != _theories_json(th):
        raise ValueError("proof was produced under different theories")

    def term(s: str) -> Term:
        return th.bank.intern(parse_term(s, th))

    def go(d: dict) -> Proof:
        w = d.get("witness")
        witness = None
        if w is not None:
            if "context" in w:
                ctx = make_context(th.bank, w["theory"], parse_term(w["context"], th, holes=True))
                witness = Recipe(ctx, tuple(term(a) for a in w["args"]))
            else:
                witness = term(w.get("principal", w.get("term")))
        return Proof(
            d["rule"],
            frozenset(term(g) for g in d["gamma"]),
            term(d["goal"]),
            tuple(go(c) for c in d.get("premises", ())),
            witness,
        )

    return go(doc["proof"])


def loads(text: str, th: Theories) -> Proof:
    return from_json(json.loads(text), th)


__all__ = [
    "CONSTRUCTORS",
    "CheckResult",
    "LEFT_RULES",
    "Proof",
    "RULES",
    "check_proof",
    "dumps",
    "from_json",
    "loads",
    "render_text",
    "to_json",
]
