"""Logic descriptors bundling axiom schemas, a decidable frame condition, and
the strict-filtration recipe of each supported base logic.

Supported bases are K, T, K4, S4, S5 (all admitting strict filtration) and
K.2 (convergent frames; carried for the proof checker, no filtration recipe).
Descriptors compose: transitive-closure extension of a base, n-fold
expansion by composition/union/closure, and fusions over disjoint alphabets.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import UnsupportedLogic
from .semantics import (
    Frame,
    RowResolver,
    Rows,
    closure_rows,
    relation_of,
    rel_to_rows,
    rows_to_rel,
    sharp_terms,
)
from .syntax import (
    Atom,
    Box,
    Formula,
    FormulaSet,
    Implies,
    IndexTerm,
    Plus,
    Var,
    diamond,
    formula_set,
    instantiate_segerberg,
    pdl_axioms_terms,
)

BASE_IDS = ("K", "T", "K4", "S4", "S5", "K.2")

_BASE_RECIPES = {
    "K": "minimal",
    "T": "minimal",
    "K4": "closure_of_minimal",
    "S4": "closure_of_minimal",
    "S5": "closure_of_minimal",
    "K.2": None,
}


@dataclass(frozen=True)
class LogicSpec:
    """Identifier plus the derived data the rest of the package needs."""

    name: str
    kind: str  # "base" | "plus" | "sharp" | "fusion"
    atoms: tuple[str, ...]
    base_id: str = ""
    base: "LogicSpec | None" = None
    level: int = 0
    components: tuple["LogicSpec", ...] = ()

    def __str__(self) -> str:
        return self.name

    @property
    def alphabet(self) -> tuple[IndexTerm, ...]:
        return _alphabet(self)

    @property
    def recipe(self) -> str | None:
        """Strict-filtration recipe of a base logic, None when unavailable."""
        if self.kind == "base":
            return _BASE_RECIPES[self.base_id]
        return None

    def axioms(self) -> FormulaSet:
        return _axioms(self)

    def frame_condition(self, frame: Frame) -> bool:
        """Decidable first-order condition characterizing the logic's frames."""
        return _frame_condition(self, frame)


def base_logic(base_id: str, atom: str = "r") -> LogicSpec:
    if base_id not in BASE_IDS:
        raise UnsupportedLogic(f"unknown base logic {base_id!r}")
    name = base_id if atom == "r" else f"{base_id}:{atom}"
    return LogicSpec(name=name, kind="base", atoms=(atom,), base_id=base_id)


def plus_logic(base: LogicSpec) -> LogicSpec:
    return LogicSpec(name=f"{base.name}+", kind="plus", atoms=base.atoms, base=base)


def sharp_logic(base: LogicSpec, level: int) -> LogicSpec:
    if level < 0:
        raise ValueError("expansion level must be nonnegative")
    if level == 0:
        return base
    return LogicSpec(name=f"{base.name}#{level}", kind="sharp", atoms=base.atoms, base=base, level=level)


def fusion_logic(components: Sequence[LogicSpec]) -> LogicSpec:
    components = tuple(components)
    if not components:
        raise ValueError("fusion needs at least one component")
    seen: set[str] = set()
    for c in components:
        overlap = seen & set(c.atoms)
        if overlap:
            raise ValueError(f"fusion components share atoms {sorted(overlap)}")
        seen |= set(c.atoms)
    atoms = tuple(a for c in components for a in c.atoms)
    name = "fusion(" + ",".join(f"{c.base_id}:{c.atoms[0]}" if c.kind == "base" else c.name for c in components) + ")"
    return LogicSpec(name=name, kind="fusion", atoms=atoms, components=components)


def parse_logic(text: str) -> LogicSpec:
    """Parse a logic identifier.

    Grammar: a base name (``K``, ``T``, ``K4``, ``S4``, ``S5``, ``K.2``),
    ``<base>+`` for the transitive-closure extension, ``<base>#n`` for the
    n-fold expansion, or ``fusion(<base>:<atom>,...)``.
    """
    text = text.strip()
    if text.startswith("fusion(") and text.endswith(")"):
        inner = text[len("fusion(") : -1]
        components = []
        for part in inner.split(","):
            part = part.strip()
            if not part:
                continue
            if ":" in part:
                base_id, atom = part.split(":", 1)
            else:
                base_id, atom = part, "r"
            components.append(base_logic(base_id.strip(), atom.strip()))
        return fusion_logic(components)
    if text.endswith("+"):
        return plus_logic(parse_logic(text[:-1]))
    if "#" in text:
        head, _, level = text.rpartition("#")
        if not level.isdigit():
            raise UnsupportedLogic(f"bad expansion level in {text!r}")
        return sharp_logic(parse_logic(head), int(level))
    if text in BASE_IDS:
        return base_logic(text)
    raise UnsupportedLogic(f"cannot parse logic {text!r}")


# ---------------------------------------------------------------------------
# alphabets


@lru_cache(maxsize=None)
def _alphabet(logic: LogicSpec) -> tuple[IndexTerm, ...]:
    if logic.kind == "base":
        return tuple(Atom(a) for a in logic.atoms)
    if logic.kind == "plus":
        base = _alphabet(logic.base)
        return base + tuple(Plus(t) for t in base)
    if logic.kind == "sharp":
        terms = _alphabet(logic.base)
        for _ in range(logic.level):
            terms = sharp_terms(terms)
        return terms
    if logic.kind == "fusion":
        return tuple(t for c in logic.components for t in _alphabet(c))
    raise UnsupportedLogic(f"unknown logic kind {logic.kind!r}")


# ---------------------------------------------------------------------------
# axiom schemas


def _base_axioms(base_id: str, t: IndexTerm) -> list[Formula]:
    p = Var("p")
    refl = Implies(Box(t, p), p)
    four = Implies(Box(t, p), Box(t, Box(t, p)))
    sym = Implies(p, Box(t, diamond(t, p)))
    conv = Implies(diamond(t, Box(t, p)), Box(t, diamond(t, p)))
    return {
        "K": [],
        "T": [refl],
        "K4": [four],
        "S4": [refl, four],
        "S5": [refl, four, sym],
        "K.2": [conv],
    }[base_id]


@lru_cache(maxsize=None)
def _axioms(logic: LogicSpec) -> FormulaSet:
    if logic.kind == "base":
        out: list[Formula] = []
        for a in logic.atoms:
            out.extend(_base_axioms(logic.base_id, Atom(a)))
        return formula_set(out)
    if logic.kind == "plus":
        out = list(_axioms(logic.base))
        for t in _alphabet(logic.base):
            out.extend(instantiate_segerberg(t, Plus(t)))
        return formula_set(out)
    if logic.kind == "sharp":
        out = list(_axioms(logic.base))
        terms = _alphabet(logic.base)
        for _ in range(logic.level):
            out.extend(pdl_axioms_terms(terms))
            terms = sharp_terms(terms)
        return formula_set(out)
    if logic.kind == "fusion":
        return formula_set(f for c in logic.components for f in _axioms(c))
    raise UnsupportedLogic(f"unknown logic kind {logic.kind!r}")


# ---------------------------------------------------------------------------
# frame conditions


def _is_reflexive(rows: Rows) -> bool:
    return all(row >> i & 1 for i, row in enumerate(rows))


def _is_transitive(rows: Rows) -> bool:
    return closure_rows(rows) == tuple(rows)


def _is_symmetric(rows: Rows) -> bool:
    n = len(rows)
    return all(
        not (rows[i] >> j & 1) or (rows[j] >> i & 1) for i in range(n) for j in range(n)
    )


def _is_convergent(rows: Rows) -> bool:
    n = len(rows)
    for x in range(n):
        succ = [y for y in range(n) if rows[x] >> y & 1]
        for a in range(len(succ)):
            for b in range(a, len(succ)):
                if not rows[succ[a]] & rows[succ[b]]:
                    return False
    return True


_BASE_CONDITIONS = {
    "K": lambda rows: True,
    "T": _is_reflexive,
    "K4": _is_transitive,
    "S4": lambda rows: _is_reflexive(rows) and _is_transitive(rows),
    "S5": lambda rows: _is_reflexive(rows) and _is_symmetric(rows) and _is_transitive(rows),
    "K.2": _is_convergent,
}


def atom_requirements(logic: LogicSpec) -> dict[str, str]:
    """Base-logic requirement attached to each atomic index symbol."""
    if logic.kind == "base":
        return {a: logic.base_id for a in logic.atoms}
    if logic.kind in ("plus", "sharp"):
        return atom_requirements(logic.base)
    if logic.kind == "fusion":
        out: dict[str, str] = {}
        for c in logic.components:
            out.update(atom_requirements(c))
        return out
    raise UnsupportedLogic(f"unknown logic kind {logic.kind!r}")


def _frame_condition(logic: LogicSpec, frame: Frame) -> bool:
    n = frame.world_count
    for atom, base_id in atom_requirements(logic).items():
        rows = rel_to_rows(relation_of(frame, Atom(atom)), n)
        if not _BASE_CONDITIONS[base_id](rows):
            return False
    # Expanded logics additionally pin every composite term to the value
    # computed from the atoms; explicit entries must not disagree.
    if logic.kind in ("plus", "sharp"):
        atom_frame = Frame(
            n, {Atom(a): relation_of(frame, Atom(a)) for a in logic.atoms}
        )
        resolver = RowResolver(atom_frame)
        for t in _alphabet(logic):
            if rows_to_rel(resolver.get(t)) != relation_of(frame, t):
                return False
    if logic.kind == "fusion":
        return all(_frame_condition(c, frame) for c in logic.components)
    return True
