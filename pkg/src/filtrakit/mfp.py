"""First-order fragment preserved under minimal filtration.

Membership in the fragment is purely syntactic: atoms and equalities, closed
under conjunction, disjunction, quantification, and the two guarded
universal forms (relational and equality guards, taken literally).  The
semantic counterpart of minimal filtration is the strong onto homomorphism;
sentences of the fragment transfer along such maps, so frame conditions in
the fragment survive minimal strict filtration.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

from .errors import (
    ParseError,
    PreconditionFailed,
    RecipeMismatch,
    UnboundVariable,
    UninterpretedIndex,
    UnknownRelationSymbol,
)
from .filtration import FilteredModel, min_filtered_relation
from .semantics import Frame, Relation, relation_of
from .syntax import Atom, IndexTerm, fmt_index


# ---------------------------------------------------------------------------
# first-order ASTs


class FOFormula:
    __slots__ = ()

    def __str__(self) -> str:
        return fmt_fo(self)

    def __repr__(self) -> str:
        return fmt_fo(self)


@dataclass(frozen=True, repr=False)
class Rel(FOFormula):
    symbol: str
    left: str
    right: str


@dataclass(frozen=True, repr=False)
class Eq(FOFormula):
    left: str
    right: str


@dataclass(frozen=True, repr=False)
class Not(FOFormula):
    body: FOFormula


@dataclass(frozen=True, repr=False)
class And(FOFormula):
    left: FOFormula
    right: FOFormula


@dataclass(frozen=True, repr=False)
class Or(FOFormula):
    left: FOFormula
    right: FOFormula


@dataclass(frozen=True, repr=False)
class Implies(FOFormula):
    left: FOFormula
    right: FOFormula


@dataclass(frozen=True, repr=False)
class Forall(FOFormula):
    var: str
    body: FOFormula


@dataclass(frozen=True, repr=False)
class Exists(FOFormula):
    var: str
    body: FOFormula


def fmt_fo(f: FOFormula, need: int = 1) -> str:
    # precedence: quantifier/implication 1 < or 2 < and 3 < unary 4
    if isinstance(f, Rel):
        text, prec = f"{f.symbol}({f.left},{f.right})", 4
    elif isinstance(f, Eq):
        text, prec = f"{f.left}={f.right}", 4
    elif isinstance(f, Not):
        text, prec = "~" + fmt_fo(f.body, 4), 4
    elif isinstance(f, And):
        text, prec = fmt_fo(f.left, 3) + " & " + fmt_fo(f.right, 4), 3
    elif isinstance(f, Or):
        text, prec = fmt_fo(f.left, 2) + " | " + fmt_fo(f.right, 3), 2
    elif isinstance(f, Implies):
        text, prec = fmt_fo(f.left, 2) + " -> " + fmt_fo(f.right, 1), 1
    elif isinstance(f, Forall):
        text, prec = f"forall {f.var}. " + fmt_fo(f.body, 1), 1
    elif isinstance(f, Exists):
        text, prec = f"exists {f.var}. " + fmt_fo(f.body, 1), 1
    else:
        raise TypeError(f"not a first-order formula: {f!r}")
    return f"({text})" if prec < need else text


def free_vars(f: FOFormula) -> frozenset[str]:
    if isinstance(f, Rel):
        return frozenset((f.left, f.right))
    if isinstance(f, Eq):
        return frozenset((f.left, f.right))
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, (And, Or, Implies)):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, (Forall, Exists)):
        return free_vars(f.body) - {f.var}
    raise TypeError(f"not a first-order formula: {f!r}")


def relation_symbols(f: FOFormula) -> frozenset[str]:
    if isinstance(f, Rel):
        return frozenset((f.symbol,))
    if isinstance(f, Eq):
        return frozenset()
    if isinstance(f, Not):
        return relation_symbols(f.body)
    if isinstance(f, (And, Or, Implies)):
        return relation_symbols(f.left) | relation_symbols(f.right)
    if isinstance(f, (Forall, Exists)):
        return relation_symbols(f.body)
    raise TypeError(f"not a first-order formula: {f!r}")


# ---------------------------------------------------------------------------
# fragment membership


def _is_guard(guard: FOFormula, x: str, y: str) -> bool:
    if isinstance(guard, Rel):
        return guard.left == x and guard.right == y
    if isinstance(guard, Eq):
        return guard.left == x and guard.right == y
    return False


def mfp_member(f: FOFormula) -> bool:
    """Syntactic membership in the preserved fragment.

    Negation and unguarded implication are excluded; the guarded forms
    ``forall x. forall y. R(x,y) -> A`` and ``forall x. forall y. x=y -> A``
    are recognized token-for-token, guard variables in binding order.
    """
    if isinstance(f, (Rel, Eq)):
        return True
    if isinstance(f, (And, Or)):
        return mfp_member(f.left) and mfp_member(f.right)
    if isinstance(f, Forall):
        inner = f.body
        if isinstance(inner, Forall) and isinstance(inner.body, Implies):
            if _is_guard(inner.body.left, f.var, inner.var):
                return mfp_member(inner.body.right)
        return mfp_member(inner)
    if isinstance(f, Exists):
        return mfp_member(f.body)
    return False


# ---------------------------------------------------------------------------
# evaluation


def fo_eval(frame: Frame, f: FOFormula, assignment: Mapping[str, int] | None = None) -> bool:
    """Tarskian truth over the frame's worlds and relations."""
    env = dict(assignment or {})
    missing = free_vars(f) - env.keys()
    if missing:
        raise UnboundVariable(f"unbound variables: {sorted(missing)}")
    for name, w in env.items():
        if not 0 <= w < frame.world_count:
            raise ValueError(f"assignment of {name!r} out of range")
    rels: dict[str, Relation] = {}

    def rel(symbol: str) -> Relation:
        cached = rels.get(symbol)
        if cached is None:
            try:
                cached = relation_of(frame, Atom(symbol))
            except UninterpretedIndex as exc:
                raise UnknownRelationSymbol(str(exc)) from exc
            rels[symbol] = cached
        return cached

    n = frame.world_count

    def go(g: FOFormula) -> bool:
        if isinstance(g, Rel):
            return (env[g.left], env[g.right]) in rel(g.symbol)
        if isinstance(g, Eq):
            return env[g.left] == env[g.right]
        if isinstance(g, Not):
            return not go(g.body)
        if isinstance(g, And):
            return go(g.left) and go(g.right)
        if isinstance(g, Or):
            return go(g.left) or go(g.right)
        if isinstance(g, Implies):
            return not go(g.left) or go(g.right)
        if isinstance(g, (Forall, Exists)):
            had = g.var in env
            saved = env.get(g.var)
            universal = isinstance(g, Forall)
            out = universal
            for w in range(n):
                env[g.var] = w
                if go(g.body) != universal:
                    out = not universal
                    break
            if had:
                env[g.var] = saved
            else:
                env.pop(g.var, None)
            return out
        raise TypeError(f"not a first-order formula: {g!r}")

    return go(f)


# ---------------------------------------------------------------------------
# strong onto homomorphisms

WorldMap = Sequence[int]


@dataclass(frozen=True)
class HomCheck:
    """Outcome of the three homomorphism conditions, with a failure witness."""

    ok: bool
    failed: str | None = None  # "onto" | "monotonicity" | "lifting"
    witness: tuple | None = None

    def __bool__(self) -> bool:
        return self.ok


def is_strong_onto_hom(
    source: Frame, target: Frame, h: WorldMap, index: IndexTerm
) -> HomCheck:
    """Check surjectivity, monotonicity, and weak lifting for one relation."""
    h = tuple(h)
    if len(h) != source.world_count:
        raise ValueError("map must be total on the source worlds")
    if any(not 0 <= w < target.world_count for w in h):
        raise ValueError("map must land in the target worlds")
    src = relation_of(source, index)
    tgt = relation_of(target, index)
    if set(h) != set(range(target.world_count)):
        missing = sorted(set(range(target.world_count)) - set(h))
        return HomCheck(False, "onto", tuple(missing))
    for x, y in sorted(src):
        if (h[x], h[y]) not in tgt:
            return HomCheck(False, "monotonicity", (x, y))
    lifted = {(h[x], h[y]) for x, y in src}
    for xt, yt in sorted(tgt):
        if (xt, yt) not in lifted:
            return HomCheck(False, "lifting", (xt, yt))
    return HomCheck(True)


def filtration_map(fm: FilteredModel, index: IndexTerm) -> tuple[tuple[int, ...], HomCheck]:
    """The quotient map of a minimal filtration, as a strong onto homomorphism.

    Raises RecipeMismatch when the quotient relation for the index is not the
    minimal filtered relation (the claim is specific to minimal filtration).
    """
    mn = min_filtered_relation(fm.source, fm.partition, index)
    have = relation_of(fm.quotient.frame, index)
    if have != mn:
        raise RecipeMismatch(
            f"quotient relation for {fmt_index(index)} is not the minimal filtered relation"
        )
    h = tuple(fm.partition.class_of)
    check = is_strong_onto_hom(fm.source.frame, fm.quotient.frame, h, index)
    if not check.ok:
        raise AssertionError(
            f"filtration map is not a strong onto homomorphism: {check.failed} {check.witness}"
        )
    return h, check


# ---------------------------------------------------------------------------
# preservation


@dataclass(frozen=True)
class PreservationReport:
    source_truth: bool
    target_truth: bool

    @property
    def preserved(self) -> bool:
        return (not self.source_truth) or self.target_truth


def preservation_check(
    source: Frame, target: Frame, h: WorldMap, f: FOFormula
) -> PreservationReport:
    """Assert that a fragment sentence true in the source holds in the target.

    Preconditions: the sentence is in the fragment and the map is a strong
    onto homomorphism for every relation symbol it mentions.  A violation is
    a counterexample to the preservation property and raises.
    """
    if not mfp_member(f):
        raise PreconditionFailed("sentence is outside the preserved fragment")
    for symbol in sorted(relation_symbols(f)):
        check = is_strong_onto_hom(source, target, h, Atom(symbol))
        if not check.ok:
            raise PreconditionFailed(
                f"map is not a strong onto homomorphism for {symbol!r}: "
                f"{check.failed} {check.witness}"
            )
    src = fo_eval(source, f)
    tgt = fo_eval(target, f)
    report = PreservationReport(src, tgt)
    if not report.preserved:
        raise AssertionError(
            f"preservation violated for {fmt_fo(f)}: true in source, false in target"
        )
    return report


# ---------------------------------------------------------------------------
# random sentences from the fragment


def random_mfp(
    rng: random.Random,
    symbols: Sequence[str] = ("r",),
    depth: int = 3,
) -> FOFormula:
    """Random sentence of the fragment.

    Production weights: 40% guarded universal, 30% conjunction/disjunction,
    20% plain quantifier, 10% atom; atoms are only drawn once a variable is
    in scope, and the result is closed.  Seed the generator for reproducible
    suites.
    """
    counter = [0]

    def fresh() -> str:
        counter[0] += 1
        return f"x{counter[0]}"

    def atom(scope: list[str]) -> FOFormula:
        a = rng.choice(scope)
        b = rng.choice(scope)
        if rng.random() < 0.8:
            return Rel(rng.choice(symbols), a, b)
        return Eq(a, b)

    def go(d: int, scope: list[str]) -> FOFormula:
        if d <= 0:
            if scope:
                return atom(scope)
            d = 1  # no variable to mention yet; force a binder below
        roll = rng.random()
        if not scope and roll >= 0.6:
            roll = rng.random() * 0.6  # redirect atom/boolean rolls to binders
        if roll < 0.4:
            x, y = fresh(), fresh()
            guard = (
                Rel(rng.choice(symbols), x, y) if rng.random() < 0.8 else Eq(x, y)
            )
            return Forall(x, Forall(y, Implies(guard, go(d - 1, scope + [x, y]))))
        if roll < 0.6:
            x = fresh()
            binder = Forall if rng.random() < 0.5 else Exists
            return binder(x, go(d - 1, scope + [x]))
        if roll < 0.9:
            op = And if rng.random() < 0.5 else Or
            return op(go(d - 1, scope), go(d - 1, scope))
        return atom(scope)

    return go(depth, [])


# ---------------------------------------------------------------------------
# parsing

_KEYWORDS = ("forall", "exists")


def _tokenize_fo(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if text.startswith("->", i):
            tokens.append(("->", "->", i))
            i += 2
            continue
        if c in "(),=.&|~":
            tokens.append((c, c, i))
            i += 1
            continue
        if c.isalpha():
            j = i + 1
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = word if word in _KEYWORDS else "ident"
            tokens.append((kind, word, i))
            i = j
            continue
        raise ParseError(f"unexpected character {c!r}", i)
    tokens.append(("eof", "", len(text)))
    return tokens


class _FOParser:
    def __init__(self, text: str):
        self.tokens = _tokenize_fo(text)
        self.pos = 0

    def peek(self) -> str:
        return self.tokens[self.pos][0]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str):
        tok = self.tokens[self.pos]
        if tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[1] or 'end of input'!r}", tok[2])
        return self.take()

    def formula(self) -> FOFormula:
        if self.peek() in _KEYWORDS:
            kind, _, _ = self.take()
            names = [self.expect("ident")[1]]
            while self.peek() == "ident":
                names.append(self.take()[1])
            self.expect(".")
            body = self.formula()
            binder = Forall if kind == "forall" else Exists
            for name in reversed(names):
                body = binder(name, body)
            return body
        left = self.disjunction()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.formula())
        return left

    def disjunction(self) -> FOFormula:
        out = self.conjunction()
        while self.peek() == "|":
            self.take()
            out = Or(out, self.conjunction())
        return out

    def conjunction(self) -> FOFormula:
        out = self.unary()
        while self.peek() == "&":
            self.take()
            out = And(out, self.unary())
        return out

    def unary(self) -> FOFormula:
        if self.peek() == "~":
            self.take()
            return Not(self.unary())
        if self.peek() == "(":
            self.take()
            inner = self.formula()
            self.expect(")")
            return inner
        if self.peek() in _KEYWORDS:
            return self.formula()
        kind, name, position = self.expect("ident")
        if self.peek() == "(":
            self.take()
            left = self.expect("ident")[1]
            self.expect(",")
            right = self.expect("ident")[1]
            self.expect(")")
            return Rel(name, left, right)
        if self.peek() == "=":
            self.take()
            right = self.expect("ident")[1]
            return Eq(name, right)
        raise ParseError(f"expected a relation atom or equality after {name!r}", position)


def parse_fo(text: str) -> FOFormula:
    """Parse a first-order sentence in the module grammar."""
    parser = _FOParser(text)
    out = parser.formula()
    parser.expect("eof")
    return out


REFLEXIVITY = parse_fo("forall x. r(x,x)")
SYMMETRY = parse_fo("forall x y. r(x,y) -> r(y,x)")
DENSITY = parse_fo("forall x y. r(x,y) -> exists z. r(x,z) & r(z,y)")

# Modal axioms and their first-order frame conditions within the fragment.
MODAL_FO_PAIRS: tuple[tuple[str, str, FOFormula], ...] = (
    ("reflexivity", "[r]p -> p", REFLEXIVITY),
    ("symmetry", "p -> [r]<r>p", SYMMETRY),
    ("density", "[r][r]p -> [r]p", DENSITY),
)
