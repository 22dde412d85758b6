"""Modal formulas over an index algebra: ASTs, parsing, printing, subformula
closure, substitution, and the axiom schemas used throughout the package.

Derived connectives (negation, conjunction, disjunction, top, diamonds) are
desugared at parse time, so the core formula AST has exactly four shapes and
every downstream evaluator handles four cases.  Index terms are structural:
``r|r`` is not normalized to ``r`` because expanded alphabets treat composite
terms as fresh atoms.  All values are immutable and hashable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import ParseError, UnknownIndexSymbol


# ---------------------------------------------------------------------------
# index terms


class IndexTerm:
    """Modality index: atoms closed under composition, union, and closure."""

    __slots__ = ()

    def __str__(self) -> str:
        return fmt_index(self)

    def __repr__(self) -> str:
        return fmt_index(self)


@dataclass(frozen=True, repr=False)
class Atom(IndexTerm):
    symbol: str


@dataclass(frozen=True, repr=False)
class Comp(IndexTerm):
    left: IndexTerm
    right: IndexTerm


@dataclass(frozen=True, repr=False)
class Union(IndexTerm):
    left: IndexTerm
    right: IndexTerm


@dataclass(frozen=True, repr=False)
class Plus(IndexTerm):
    inner: IndexTerm


def _fmt_idx(t: IndexTerm, need: int) -> str:
    # precedence: union 1 < composition 2 < postfix closure 3 < atom 4
    if isinstance(t, Atom):
        text, prec = t.symbol, 4
    elif isinstance(t, Plus):
        text, prec = _fmt_idx(t.inner, 3) + "+", 3
    elif isinstance(t, Comp):
        text, prec = _fmt_idx(t.left, 2) + ";" + _fmt_idx(t.right, 3), 2
    elif isinstance(t, Union):
        text, prec = _fmt_idx(t.left, 1) + "|" + _fmt_idx(t.right, 2), 1
    else:
        raise TypeError(f"not an index term: {t!r}")
    return f"({text})" if prec < need else text


def fmt_index(t: IndexTerm) -> str:
    """Canonical text of an index term; parsing it back is the identity."""
    return _fmt_idx(t, 1)


def atoms_of_index(t: IndexTerm) -> frozenset[str]:
    """Atomic symbols occurring in a term."""
    if isinstance(t, Atom):
        return frozenset((t.symbol,))
    if isinstance(t, Plus):
        return atoms_of_index(t.inner)
    return atoms_of_index(t.left) | atoms_of_index(t.right)


# ---------------------------------------------------------------------------
# formulas


class Formula:
    """Core modal formula: falsum, variable, implication, or box."""

    __slots__ = ()

    def __str__(self) -> str:
        return fmt_formula(self)

    def __repr__(self) -> str:
        return fmt_formula(self)


@dataclass(frozen=True, repr=False)
class Bot(Formula):
    pass


@dataclass(frozen=True, repr=False)
class Var(Formula):
    name: str


@dataclass(frozen=True, repr=False)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class Box(Formula):
    index: IndexTerm
    body: Formula


BOT = Bot()
TOP = Implies(BOT, BOT)


def neg(a: Formula) -> Formula:
    return Implies(a, BOT)


def conj(a: Formula, b: Formula) -> Formula:
    return neg(Implies(a, neg(b)))


def disj(a: Formula, b: Formula) -> Formula:
    return Implies(neg(a), b)


def iff(a: Formula, b: Formula) -> Formula:
    return conj(Implies(a, b), Implies(b, a))


def diamond(t: IndexTerm, a: Formula) -> Formula:
    return neg(Box(t, neg(a)))


def conj_all(formulas: Sequence[Formula]) -> Formula:
    """Left-associated conjunction; TOP for the empty sequence."""
    if not formulas:
        return TOP
    out = formulas[0]
    for f in formulas[1:]:
        out = conj(out, f)
    return out


def _fmt_fml(f: Formula, need: int) -> str:
    # precedence: implication 1 < box 2 < atoms 3
    if isinstance(f, Bot):
        text, prec = "bot", 3
    elif isinstance(f, Var):
        text, prec = f.name, 3
    elif isinstance(f, Box):
        text, prec = f"[{fmt_index(f.index)}]" + _fmt_fml(f.body, 2), 2
    elif isinstance(f, Implies):
        text, prec = _fmt_fml(f.left, 2) + " -> " + _fmt_fml(f.right, 1), 1
    else:
        raise TypeError(f"not a formula: {f!r}")
    return f"({text})" if prec < need else text


def fmt_formula(f: Formula) -> str:
    """Canonical text of a formula; parsing it back is the identity."""
    return _fmt_fml(f, 1)


def subformulas(f: Formula) -> Iterator[Formula]:
    """Yield ``f`` and all its subformulas (with repetition)."""
    yield f
    if isinstance(f, Implies):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    elif isinstance(f, Box):
        yield from subformulas(f.body)


def vars_of(f: Formula) -> frozenset[str]:
    return frozenset(g.name for g in subformulas(f) if isinstance(g, Var))


def index_terms_of(f: Formula) -> frozenset[IndexTerm]:
    """Indices of all boxes occurring in the formula."""
    return frozenset(g.index for g in subformulas(f) if isinstance(g, Box))


# ---------------------------------------------------------------------------
# formula sets

_sort_key = fmt_formula


@dataclass(frozen=True, repr=False)
class FormulaSet:
    """Finite set of formulas in canonical (printed-text) order.

    ``closed`` records that subformula closure has been verified; downstream
    quotients rely on the deterministic element order.
    """

    elements: tuple[Formula, ...]
    closed: bool = False

    def __iter__(self) -> Iterator[Formula]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, f: object) -> bool:
        return f in self.elements

    def __repr__(self) -> str:
        inner = ", ".join(map(fmt_formula, self.elements))
        return "{" + inner + "}"


def formula_set(formulas: Iterable[Formula]) -> FormulaSet:
    """Deduplicate and canonically order a collection of formulas."""
    unique = {f: None for f in formulas}
    return FormulaSet(tuple(sorted(unique, key=_sort_key)))


def sub_closure(gamma: FormulaSet | Iterable[Formula]) -> FormulaSet:
    """Smallest subformula-closed superset, canonically ordered."""
    seen: dict[Formula, None] = {}
    for f in gamma:
        for g in subformulas(f):
            seen[g] = None
    return FormulaSet(tuple(sorted(seen, key=_sort_key)), closed=True)


def ensure_closed(gamma: FormulaSet | Iterable[Formula]) -> FormulaSet:
    """Return ``gamma`` as a verified subformula-closed FormulaSet.

    Raises ValueError when the input is not already closed.
    """
    if isinstance(gamma, FormulaSet) and gamma.closed:
        return gamma
    closed = sub_closure(gamma)
    given = set(gamma)
    if set(closed.elements) != given:
        missing = [f for f in closed if f not in given]
        raise ValueError(f"formula set is not subformula-closed; missing {missing}")
    return closed


# ---------------------------------------------------------------------------
# substitution

Substitution = Mapping[str, Formula]


def apply_substitution(f: Formula, sigma: Substitution) -> Formula:
    """Homomorphic replacement of variables."""
    if isinstance(f, Var):
        return sigma.get(f.name, f)
    if isinstance(f, Implies):
        return Implies(apply_substitution(f.left, sigma), apply_substitution(f.right, sigma))
    if isinstance(f, Box):
        return Box(f.index, apply_substitution(f.body, sigma))
    return f


def compose_substitutions(tau: Substitution, sigma: Substitution) -> dict[str, Formula]:
    """Composite substitution: applying it equals applying sigma, then tau."""
    out = {p: apply_substitution(g, tau) for p, g in sigma.items()}
    for p, g in tau.items():
        out.setdefault(p, g)
    return out


def fresh_surrogates(gamma: FormulaSet) -> tuple[dict[str, Formula], dict[Formula, str]]:
    """Surrogate variables for a subformula-closed set.

    Assigns each member a fresh variable, named ``q0, q1, ...`` in canonical
    element order, skipping names that already occur in the set.  Returns the
    back-substitution (surrogate name to formula) and the forward map.
    """
    gamma = ensure_closed(gamma)
    used = set()
    for f in gamma:
        used |= vars_of(f)
    sigma: dict[str, Formula] = {}
    q_map: dict[Formula, str] = {}
    counter = 0
    for f in gamma:
        while f"q{counter}" in used:
            counter += 1
        name = f"q{counter}"
        counter += 1
        sigma[name] = f
        q_map[f] = name
    return sigma, q_map


# ---------------------------------------------------------------------------
# axiom schemas


def instantiate_segerberg(e: IndexTerm, s: IndexTerm, var: str = "p") -> tuple[Formula, Formula, Formula]:
    """The three transitive-closure axioms for the modality pair (e, s):

    ``[s]p -> [e]p``, ``[s]p -> [e][s]p``, and the induction axiom
    ``[s](p -> [e]p) -> ([e]p -> [s]p)``.
    """
    p = Var(var)
    a1 = Implies(Box(s, p), Box(e, p))
    a2 = Implies(Box(s, p), Box(e, Box(s, p)))
    a3 = Implies(Box(s, Implies(p, Box(e, p))), Implies(Box(e, p), Box(s, p)))
    return a1, a2, a3


def pdl_axioms_terms(terms: Sequence[IndexTerm], var: str = "p") -> list[Formula]:
    """Union, composition, and transitive-closure axioms over a term alphabet."""
    p = Var(var)
    out: list[Formula] = []
    ordered = sorted(terms, key=fmt_index)
    for e in ordered:
        for c in ordered:
            out.append(iff(Box(Union(e, c), p), conj(Box(e, p), Box(c, p))))
            out.append(iff(Box(Comp(e, c), p), Box(e, Box(c, p))))
    for e in ordered:
        out.extend(instantiate_segerberg(e, Plus(e), var))
    return out


def pdl_axioms(alphabet: Iterable[str], var: str = "p") -> FormulaSet:
    """Axioms of the one-step expansion of a logic over atomic symbols."""
    return formula_set(pdl_axioms_terms([Atom(a) for a in alphabet], var))


# ---------------------------------------------------------------------------
# parsing

_SINGLE = "[]<>()~&|;+#"


def _tokenize(text: str) -> list[tuple[str, str, int]]:
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
        if c in _SINGLE:
            tokens.append((c, c, i))
            i += 1
            continue
        if c.isalpha() and c.islower():
            j = i + 1
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = word if word in ("bot", "top") else "ident"
            tokens.append((kind, word, i))
            i = j
            continue
        raise ParseError(f"unexpected character {c!r}", i)
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, alphabet, plus_atom: str):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.alphabet = frozenset(alphabet) if alphabet is not None else None
        self.plus_atom = plus_atom

    def peek(self) -> str:
        return self.tokens[self.pos][0]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str) -> tuple[str, str, int]:
        tok = self.tokens[self.pos]
        if tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[1] or 'end of input'!r}", tok[2])
        return self.take()

    def _atom_symbol(self, name: str, position: int) -> Atom:
        if self.alphabet is not None and name not in self.alphabet:
            raise UnknownIndexSymbol(f"unknown index symbol {name!r}", position)
        return Atom(name)

    # formulas -------------------------------------------------------------

    def formula(self) -> Formula:
        left = self.disjunction()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.formula())
        return left

    def disjunction(self) -> Formula:
        out = self.conjunction()
        while self.peek() == "|":
            self.take()
            out = disj(out, self.conjunction())
        return out

    def conjunction(self) -> Formula:
        out = self.unary()
        while self.peek() == "&":
            self.take()
            out = conj(out, self.unary())
        return out

    def unary(self) -> Formula:
        kind = self.peek()
        if kind == "~":
            self.take()
            return neg(self.unary())
        if kind == "[":
            self.take()
            t = self.index()
            self.expect("]")
            return Box(t, self.unary())
        if kind == "<":
            self.take()
            t = self.index()
            self.expect(">")
            return diamond(t, self.unary())
        if kind == "#":
            _, _, position = self.take()
            return Box(Plus(self._atom_symbol(self.plus_atom, position)), self.unary())
        return self.primary()

    def primary(self) -> Formula:
        kind, value, position = self.take()
        if kind == "bot":
            return BOT
        if kind == "top":
            return TOP
        if kind == "ident":
            return Var(value)
        if kind == "(":
            inner = self.formula()
            self.expect(")")
            return inner
        raise ParseError(f"expected a formula, found {value or 'end of input'!r}", position)

    # index terms ----------------------------------------------------------

    def index(self) -> IndexTerm:
        out = self.index_comp()
        while self.peek() == "|":
            self.take()
            out = Union(out, self.index_comp())
        return out

    def index_comp(self) -> IndexTerm:
        out = self.index_postfix()
        while self.peek() == ";":
            self.take()
            out = Comp(out, self.index_postfix())
        return out

    def index_postfix(self) -> IndexTerm:
        out = self.index_primary()
        while self.peek() == "+":
            self.take()
            out = Plus(out)
        return out

    def index_primary(self) -> IndexTerm:
        kind, value, position = self.take()
        if kind == "ident":
            return self._atom_symbol(value, position)
        if kind == "(":
            inner = self.index()
            self.expect(")")
            return inner
        raise ParseError(f"expected an index term, found {value or 'end of input'!r}", position)


def parse_formula(text: str, alphabet: Iterable[str] | None = None, plus_atom: str = "r") -> Formula:
    """Parse a formula; derived connectives are desugared into the core AST.

    ``alphabet`` restricts index atoms when given.  ``#F`` abbreviates
    ``[<plus_atom>+]F`` in unimodal use.
    """
    parser = _Parser(text, alphabet, plus_atom)
    out = parser.formula()
    parser.expect("eof")
    return out


def parse_index(text: str, alphabet: Iterable[str] | None = None) -> IndexTerm:
    """Parse an index term."""
    parser = _Parser(text, alphabet, "r")
    out = parser.index()
    parser.expect("eof")
    return out
