"""Instance generators for the property suites and the experiment scripts.

Everything takes an explicit :class:`random.Random` so runs are
reproducible.  Instances are raw descriptions; intern them in whatever
session the caller owns.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .terms import Description, Kind, st
from .theories import Theories, TheoryDef, TheoryKind

ATOMS = ("a", "b", "c", "d")
BINARY = ("pair", "enc", "sign", "blind")

CATALOG = {
    "empty": lambda: [TheoryDef.empty()],
    "ac": lambda: [TheoryDef.ac()],
    "xor": lambda: [TheoryDef.xor()],
    "ag": lambda: [TheoryDef.ag()],
}


def combined_defs() -> list[TheoryDef]:
    """Disjoint XOR (``+``, ``0``) and Abelian group (``*``, ``1``, ``I``)."""
    return [TheoryDef.xor("x", "+", "0"), TheoryDef.ag("g", "*", "1", "I")]


@dataclass(frozen=True)
class RandomConfig:
    max_hyps: int = 6
    atoms: tuple[str, ...] = ATOMS
    max_size: int = 8
    p_theory: float = 0.45
    p_pub: float = 0.08


@dataclass(frozen=True)
class Instance:
    defs: tuple[TheoryDef, ...]
    gamma: tuple[Description, ...]
    goal: Description
    tag: str = ""

    def session(self) -> Theories:
        return Theories(self.defs)


def _split(rng: random.Random, n: int) -> tuple[int, int]:
    left = rng.randint(1, n - 1)
    return left, n - left


def random_term(rng: random.Random, defs, cfg: RandomConfig, size: int | None = None) -> Description:
    """A raw term of exactly ``size`` symbols (binary counting)."""
    if size is None:
        size = rng.randint(1, cfg.max_size)
    ops = [d for d in defs if d.op is not None]
    if size == 1:
        zeros = [d.zero for d in defs if d.zero is not None]
        if zeros and rng.random() < 0.1:
            return (rng.choice(zeros),)
        return rng.choice(cfg.atoms)
    if size == 2:
        invs = [d.inv for d in defs if d.inv is not None]
        if invs and rng.random() < 0.5:
            return (rng.choice(invs), random_term(rng, defs, cfg, 1))
        return ("pub", random_term(rng, defs, cfg, 1))
    if ops and rng.random() < cfg.p_theory:
        d = rng.choice(ops)
        if d.inv is not None and rng.random() < 0.2:
            return (d.inv, random_term(rng, defs, cfg, size - 1))
        left, right = _split(rng, size - 1)
        return (d.op, random_term(rng, defs, cfg, left), random_term(rng, defs, cfg, right))
    if rng.random() < cfg.p_pub:
        return ("pub", random_term(rng, defs, cfg, size - 1))
    left, right = _split(rng, size - 1)
    return (rng.choice(BINARY), random_term(rng, defs, cfg, left), random_term(rng, defs, cfg, right))


def _raw_subterms(d: Description) -> list[Description]:
    out = [d]
    if isinstance(d, tuple):
        for a in d[1:]:
            out.extend(_raw_subterms(a))
    return out


def _raw_size(d: Description) -> int:
    if isinstance(d, str):
        return 1
    return 1 + sum(_raw_size(a) for a in d[1:])


def random_instance(rng: random.Random, theory: str, cfg: RandomConfig = RandomConfig()) -> Instance:
    """Random ``gamma |- goal`` over one catalog theory.

    Goals are mixed: a subterm of a hypothesis, a fresh random term, or a
    one-step composition of hypothesis subterms, so both outcomes occur.
    """
    defs = tuple(CATALOG[theory]())
    k = rng.randint(1, cfg.max_hyps)
    gamma = [random_term(rng, defs, cfg) for _ in range(k)]
    if rng.random() < 0.25:
        gamma.append(("pub", rng.choice(cfg.atoms)))
    gamma = gamma[: cfg.max_hyps]
    subs = [s for g in gamma for s in _raw_subterms(g) if _raw_size(s) < cfg.max_size]
    roll = rng.random()
    if roll < 0.4:
        goal = rng.choice(subs)
    elif roll < 0.7:
        ops = [d.op for d in defs if d.op is not None] + list(BINARY)
        a, b = rng.choice(subs), rng.choice(subs)
        goal = (rng.choice(ops), a, b) if _raw_size(a) + _raw_size(b) < cfg.max_size else a
    else:
        goal = random_term(rng, defs, cfg)
    return Instance(defs, tuple(gamma), goal, theory)


def decryption_chain(n: int) -> Instance:
    """``enc(s,k1), enc(k1,k2), ..., enc(k_{n-1},k_n), k_n |- s``."""
    keys = [f"k{i}" for i in range(1, n + 1)]
    gamma = [("enc", "s", keys[0])]
    gamma += [("enc", keys[i], keys[i + 1]) for i in range(n - 1)]
    gamma.append(keys[-1])
    return Instance((TheoryDef.empty(),), tuple(gamma), "s", f"chain-{n}")


# -- combined XOR + Abelian group ------------------------------------------------------


def _mixed_term(rng: random.Random, nonce: str, size: int) -> Description:
    """A term over both theories and the constructors with ``nonce`` at a leaf."""
    names = ["a", "b", "c"]

    def go(n: int, need: bool) -> Description:
        if n <= 1:
            return nonce if need else rng.choice(names)
        choice = rng.random()
        if n == 2:
            return ("I", go(1, need)) if choice < 0.5 else ("pub", go(1, need))
        left, right = _split(rng, n - 1)
        side = rng.random() < 0.5
        if choice < 0.35:
            head = "+"
        elif choice < 0.7:
            head = "*"
        else:
            head = rng.choice(("pair", "enc", "sign"))
        return (head, go(left, need and side), go(right, need and not side))

    return go(size, True)


@dataclass(frozen=True)
class CombinedCase:
    instance: Instance
    recipe: Description
    nonces: tuple[str, ...]

    def perturbed(self, drop: int) -> Instance:
        g = self.instance.gamma
        return Instance(self.instance.defs, g[:drop] + g[drop + 1 :], self.instance.goal, f"{self.instance.tag}-drop{drop}")


def _names(t) -> set[str]:
    return {u.head for u in st((t,)) if u.kind is Kind.NAME}


def combined_case(rng: random.Random, max_hyps: int = 4, max_size: int = 5) -> CombinedCase:
    """A derivable XOR+AG instance built from a recipe over its hypotheses.

    Hypothesis ``j`` is the only one containing the nonce ``nj``, every
    hypothesis fills exactly one leaf of the recipe, and the instance is
    resampled until every nonce survives normalization of the goal.  Hence
    dropping any hypothesis removes a name the goal needs.
    """
    defs = tuple(combined_defs())
    th = Theories(defs)
    while True:
        k = rng.randint(2, max_hyps)
        nonces = tuple(f"n{j}" for j in range(1, k + 1))
        gamma = tuple(_mixed_term(rng, n, rng.randint(1, max_size)) for n in nonces)
        order = list(range(k))
        rng.shuffle(order)

        def tree(idx: list[int]) -> Description:
            if len(idx) == 1:
                leaf = gamma[idx[0]]
                return ("I", leaf) if rng.random() < 0.2 else leaf
            cut = rng.randint(1, len(idx) - 1)
            head = rng.choice(("+", "*", "+", "*", "pair"))
            return (head, tree(idx[:cut]), tree(idx[cut:]))

        recipe = tree(order)
        goal = th.normalize(th.intern(recipe))
        if all(n in _names(goal) for n in nonces) and all(th.normalize(th.intern(g)) is not goal for g in gamma):
            tag = f"combined-{len(gamma)}"
            return CombinedCase(Instance(defs, gamma, str_desc(goal), tag), recipe, nonces)


def str_desc(t) -> Description:
    """Raw description of an interned term."""
    if t.kind is Kind.NAME:
        return t.head
    return (t.head, *(str_desc(a) for a in t.args))


def xor_universe(atoms=ATOMS) -> list[Description]:
    """Normal pure XOR terms over ``atoms`` of size at most 4: ``0``, the
    atoms and their pairwise sums."""
    out: list[Description] = [("0",)] + list(atoms)
    out += [("+", x, y) for x, y in itertools.combinations(atoms, 2)]
    return out


def xor_targets(atoms=ATOMS) -> list[Description]:
    out: list[Description] = []
    for r in range(len(atoms) + 1):
        for combo in itertools.combinations(atoms, r):
            if r == 0:
                out.append(("0",))
            elif r == 1:
                out.append(combo[0])
            else:
                out.append(("+", *combo))
    return out


def ag_universe(atoms=("a", "b", "c")) -> list[Description]:
    """Normal pure Abelian-group terms over ``atoms`` of size at most 4."""
    out: list[Description] = [("0",)] + list(atoms)
    out += [("I", x) for x in atoms]
    out += [("+", x, y) for x, y in itertools.combinations_with_replacement(atoms, 2)]
    out += [("+", x, ("I", y)) for x in atoms for y in atoms if x != y]
    return out


def ag_targets(atoms=("a", "b", "c"), bound: int = 2) -> list[Description]:
    out: list[Description] = []
    for vec in itertools.product(range(-bound, bound + 1), repeat=len(atoms)):
        parts: list[Description] = []
        for x, c in zip(atoms, vec):
            parts += [x] * c if c > 0 else [("I", x)] * -c
        if not parts:
            out.append(("0",))
        elif len(parts) == 1:
            out.append(parts[0])
        else:
            out.append(("+", *parts))
    return out
