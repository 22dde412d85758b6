"""Shared random generators for the test suites.

Everything is seeded explicitly at the call site so failures reproduce.
"""

from __future__ import annotations

import random

from filtrakit.semantics import Frame, Model, transitive_closure
from filtrakit.syntax import (
    Atom,
    BOT,
    Box,
    Formula,
    FormulaSet,
    IndexTerm,
    Implies,
    Var,
    sub_closure,
)


def rand_relation(rng: random.Random, n: int, density: float = 0.25) -> frozenset:
    return frozenset(
        (i, j) for i in range(n) for j in range(n) if rng.random() < density
    )


def rand_reflexive(rng: random.Random, n: int, density: float = 0.25) -> frozenset:
    return rand_relation(rng, n, density) | frozenset((i, i) for i in range(n))


def rand_transitive(rng: random.Random, n: int, density: float = 0.2) -> frozenset:
    return transitive_closure(rand_relation(rng, n, density), n)


def rand_preorder(rng: random.Random, n: int, density: float = 0.2) -> frozenset:
    return transitive_closure(rand_reflexive(rng, n, density), n)


def rand_equivalence(rng: random.Random, n: int) -> frozenset:
    labels = [rng.randrange(max(1, n // 2 + 1)) for _ in range(n)]
    return frozenset(
        (i, j) for i in range(n) for j in range(n) if labels[i] == labels[j]
    )


def base_relation(rng: random.Random, base_id: str, n: int) -> frozenset:
    if base_id == "K":
        return rand_relation(rng, n)
    if base_id == "T":
        return rand_reflexive(rng, n)
    if base_id == "K4":
        return rand_transitive(rng, n)
    if base_id == "S4":
        return rand_preorder(rng, n)
    if base_id == "S5":
        return rand_equivalence(rng, n)
    raise ValueError(base_id)


def rand_valuation(rng: random.Random, n: int, names=("p", "q")) -> dict:
    return {
        name: frozenset(w for w in range(n) if rng.random() < 0.5) for name in names
    }


def rand_model(
    rng: random.Random,
    n: int,
    indices: tuple[str, ...] = ("r",),
    names=("p", "q"),
    density: float = 0.25,
    transitive: bool = False,
) -> Model:
    relations = {}
    for a in indices:
        rel = rand_relation(rng, n, density)
        if transitive:
            rel = transitive_closure(rel, n)
        relations[Atom(a)] = rel
    return Model(Frame(n, relations), rand_valuation(rng, n, names))


def rand_closure_model(
    rng: random.Random, n: int, base_id: str = "K", names=("p", "q")
) -> Model:
    """Model carrying a base relation plus its explicit transitive closure."""
    rel = base_relation(rng, base_id, n)
    relations = {Atom("r"): rel, "r+": transitive_closure(rel, n)}
    return Model(Frame(n, relations), rand_valuation(rng, n, names))


def rand_formula(
    rng: random.Random,
    depth: int,
    names=("p", "q"),
    indices: tuple[IndexTerm, ...] = (Atom("r"),),
) -> Formula:
    if depth <= 0 or rng.random() < 0.3:
        roll = rng.random()
        if roll < 0.85:
            return Var(rng.choice(names))
        return BOT
    if rng.random() < 0.5:
        return Implies(
            rand_formula(rng, depth - 1, names, indices),
            rand_formula(rng, depth - 1, names, indices),
        )
    return Box(rng.choice(indices), rand_formula(rng, depth - 1, names, indices))


def rand_gamma(
    rng: random.Random,
    count: int,
    depth: int = 3,
    names=("p", "q"),
    indices: tuple[IndexTerm, ...] = (Atom("r"),),
) -> FormulaSet:
    return sub_closure(
        rand_formula(rng, rng.randint(0, depth), names, indices) for _ in range(count)
    )
