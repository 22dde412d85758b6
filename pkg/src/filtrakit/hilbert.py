"""Hilbert-style proof checker for normal modal logics and their
transitive-closure extensions.

Lines carry one of six justifications: an axiom-schema instance (schema name
plus explicit substitution, which realizes closure under substitution while
keeping line checking local), a classical tautology (truth table over the
Boolean skeleton, boxed subformulas abstracted as atoms), modus ponens,
necessitation, the derived closure-introduction rule expanded to its primitive
steps before checking, and premises for derived-rule scripts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from itertools import product
from typing import Mapping

from .errors import CapExceeded, PreconditionFailed
from .decision import logic_frames
from .logics import LogicSpec, parse_logic
from .semantics import DEFAULT_ENUMERATION_BITS, Evaluator, sharp_terms
from .syntax import (
    Atom,
    Box,
    Bot,
    Comp,
    Formula,
    Implies,
    IndexTerm,
    Plus,
    Union,
    Var,
    apply_substitution,
    conj,
    diamond,
    fmt_formula,
    fmt_index,
    iff,
    instantiate_segerberg,
    parse_formula,
    parse_index,
    vars_of,
)

RULES = ("axiom", "taut", "mp", "nec", "rboxplus", "premise")


@dataclass(frozen=True)
class ProofLine:
    formula: Formula
    rule: str
    refs: tuple[int, ...] = ()
    schema: str | None = None
    subst: Mapping[str, Formula] | None = None
    index: IndexTerm | None = None


@dataclass(frozen=True)
class ProofScript:
    logic: LogicSpec
    lines: tuple[ProofLine, ...]

    @property
    def theorem(self) -> Formula:
        return self.lines[-1].formula

    def premises(self) -> tuple[Formula, ...]:
        return tuple(ln.formula for ln in self.lines if ln.rule == "premise")


# ---------------------------------------------------------------------------
# axiom schemas


def schema_registry(logic: LogicSpec) -> dict[str, Formula]:
    """Named axiom schemas of a logic, keyed by ``name(index)`` tags.

    Normality (the distribution axiom) is available for every index of the
    language.  Base-logic axioms attach to the base atoms; closure
    extensions add the three interaction schemas (plus the alternative
    second schema left as an experiment hook) per closed atom; expansions
    add the union/composition schemas per term pair.
    """
    p, q = Var("p"), Var("q")
    out: dict[str, Formula] = {}
    for t in logic.alphabet:
        out[f"K({fmt_index(t)})"] = Implies(
            Box(t, Implies(p, q)), Implies(Box(t, p), Box(t, q))
        )

    def add_base(spec: LogicSpec) -> None:
        for a in spec.atoms:
            t = Atom(a)
            refl = Implies(Box(t, p), p)
            four = Implies(Box(t, p), Box(t, Box(t, p)))
            sym = Implies(p, Box(t, diamond(t, p)))
            conv = Implies(diamond(t, Box(t, p)), Box(t, diamond(t, p)))
            named = {
                "K": {},
                "T": {"T": refl},
                "K4": {"4": four},
                "S4": {"T": refl, "4": four},
                "S5": {"T": refl, "4": four, "B": sym},
                "K.2": {"2": conv},
            }[spec.base_id]
            for tag, formula in named.items():
                out[f"{tag}({a})"] = formula

    def walk(spec: LogicSpec) -> None:
        if spec.kind == "base":
            add_base(spec)
        elif spec.kind == "plus":
            walk(spec.base)
            for t in spec.base.alphabet:
                a1, a2, a3 = instantiate_segerberg(t, Plus(t))
                tag = fmt_index(t)
                out[f"A1({tag})"] = a1
                out[f"A2({tag})"] = a2
                out[f"A3({tag})"] = a3
                out[f"A2'({tag})"] = Implies(Box(Plus(t), p), Box(Plus(t), Box(t, p)))
        elif spec.kind == "sharp":
            walk(spec.base)
            terms = spec.base.alphabet
            for _ in range(spec.level):
                for e in terms:
                    for c in terms:
                        te, tc = fmt_index(e), fmt_index(c)
                        out[f"Un({te},{tc})"] = iff(
                            Box(Union(e, c), p), conj(Box(e, p), Box(c, p))
                        )
                        out[f"Cm({te},{tc})"] = iff(Box(Comp(e, c), p), Box(e, Box(c, p)))
                for e in terms:
                    a1, a2, a3 = instantiate_segerberg(e, Plus(e))
                    tag = fmt_index(e)
                    out[f"A1({tag})"] = a1
                    out[f"A2({tag})"] = a2
                    out[f"A3({tag})"] = a3
                terms = sharp_terms(terms)
        elif spec.kind == "fusion":
            for comp in spec.components:
                walk(comp)

    walk(logic)
    return out


# ---------------------------------------------------------------------------
# tautology checking

TAUTOLOGY_ATOM_CAP = 16


def _skeleton_atoms(f: Formula, atoms: dict[Formula, int]) -> None:
    if isinstance(f, (Var, Box)):
        atoms.setdefault(f, len(atoms))
    elif isinstance(f, Implies):
        _skeleton_atoms(f.left, atoms)
        _skeleton_atoms(f.right, atoms)


def is_tautology(f: Formula, atom_cap: int = TAUTOLOGY_ATOM_CAP) -> bool:
    """Truth-table check of the Boolean skeleton.

    Variables and maximal boxed subformulas are the atoms; the cap bounds the
    table size.
    """
    atoms: dict[Formula, int] = {}
    _skeleton_atoms(f, atoms)
    if len(atoms) > atom_cap:
        raise CapExceeded(f"{len(atoms)} skeleton atoms exceed the cap {atom_cap}")

    def value(g: Formula, row: int) -> bool:
        if isinstance(g, Bot):
            return False
        if isinstance(g, Implies):
            return not value(g.left, row) or value(g.right, row)
        return bool(row >> atoms[g] & 1)

    return all(value(f, row) for row in range(1 << len(atoms)))


# ---------------------------------------------------------------------------
# line checking


@dataclass(frozen=True)
class LineResult:
    ok: bool
    reason: str = ""


@dataclass(frozen=True)
class ProofCheck:
    line_results: tuple[LineResult, ...]
    ok: bool

    def first_failure(self) -> int | None:
        for i, r in enumerate(self.line_results):
            if not r.ok:
                return i
        return None


def _fail(reason: str) -> LineResult:
    return LineResult(False, reason)


def _check_line(
    line: ProofLine,
    k: int,
    lines: tuple[ProofLine, ...],
    schemas: Mapping[str, Formula],
    alphabet: frozenset[IndexTerm],
) -> LineResult:
    for r in line.refs:
        if not 0 <= r < k:
            return _fail(f"reference {r} is not an earlier line")
    rule = line.rule
    if rule == "premise":
        return LineResult(True)
    if rule == "axiom":
        if line.schema not in schemas:
            return _fail(f"unknown schema {line.schema!r}")
        instance = apply_substitution(schemas[line.schema], line.subst or {})
        if instance != line.formula:
            return _fail("substitution does not reproduce the line")
        return LineResult(True)
    if rule == "taut":
        try:
            if not is_tautology(line.formula):
                return _fail("not a tautology of the Boolean skeleton")
        except CapExceeded as exc:
            return _fail(str(exc))
        return LineResult(True)
    if rule == "mp":
        if len(line.refs) != 2:
            return _fail("modus ponens takes two references")
        major = lines[line.refs[0]].formula
        minor = lines[line.refs[1]].formula
        if not isinstance(major, Implies):
            return _fail("first reference is not an implication")
        if major.left != minor:
            return _fail("antecedent does not match the second reference")
        if major.right != line.formula:
            return _fail("consequent does not match the line")
        return LineResult(True)
    if rule == "nec":
        if len(line.refs) != 1 or line.index is None:
            return _fail("necessitation takes one reference and an index")
        if line.index not in alphabet:
            return _fail(f"index {fmt_index(line.index)} outside the language")
        if line.formula != Box(line.index, lines[line.refs[0]].formula):
            return _fail("line is not the boxed reference")
        return LineResult(True)
    if rule == "rboxplus":
        return _check_rboxplus(line, lines, schemas, alphabet)
    return _fail(f"unknown rule {rule!r}")


def _check_rboxplus(
    line: ProofLine,
    lines: tuple[ProofLine, ...],
    schemas: Mapping[str, Formula],
    alphabet: frozenset[IndexTerm],
) -> LineResult:
    """Closure-introduction rule, validated by expanding its derivation.

    From ``A -> [e]A`` infer ``A -> [e+]A``: box the reference with the
    closure index, instantiate the induction schema at A, then chain.  Each
    expanded step is checked with the primitive rules.
    """
    if len(line.refs) != 1:
        return _fail("closure introduction takes one reference")
    ref = lines[line.refs[0]].formula
    if not (isinstance(ref, Implies) and isinstance(ref.right, Box)):
        return _fail("reference is not of the shape A -> [e]A")
    body = ref.left
    e = ref.right.index
    if ref.right.body != body:
        return _fail("reference is not of the shape A -> [e]A")
    s = Plus(e)
    if s not in alphabet:
        return _fail(f"closure index {fmt_index(s)} outside the language")
    schema_name = f"A3({fmt_index(e)})"
    if schema_name not in schemas:
        return _fail("induction schema unavailable in this logic")
    if line.formula != Implies(body, Box(s, body)):
        return _fail("line is not the closure of the reference")

    a3 = apply_substitution(schemas[schema_name], {"p": body})
    boxed = Box(s, ref)
    step = Implies(Box(e, body), Box(s, body))
    chain = Implies(ref, Implies(step, line.formula))
    expansion = (
        ProofLine(ref, "premise"),
        ProofLine(boxed, "nec", refs=(0,), index=s),
        ProofLine(a3, "axiom", schema=schema_name, subst={"p": body}),
        ProofLine(step, "mp", refs=(2, 1)),
        ProofLine(chain, "taut"),
        ProofLine(Implies(step, line.formula), "mp", refs=(4, 0)),
        ProofLine(line.formula, "mp", refs=(5, 3)),
    )
    for i, sub in enumerate(expansion):
        result = _check_line(sub, i, expansion, schemas, alphabet)
        if not result.ok:
            return _fail(f"expansion step {i} failed: {result.reason}")
    return LineResult(True)


def check_proof(script: ProofScript) -> ProofCheck:
    """Validate every line against its justification."""
    schemas = schema_registry(script.logic)
    alphabet = frozenset(script.logic.alphabet)
    results = []
    for k, line in enumerate(script.lines):
        if line.rule not in RULES:
            results.append(_fail(f"unknown rule {line.rule!r}"))
            continue
        results.append(_check_line(line, k, script.lines, schemas, alphabet))
    return ProofCheck(tuple(results), all(r.ok for r in results))


# ---------------------------------------------------------------------------
# semantic spot-check


@dataclass(frozen=True)
class SpotcheckReport:
    ok: bool
    frames_checked: int
    frames_skipped: int
    failures: tuple[tuple[int, int], ...]  # (frame ordinal, line number)


def soundness_spotcheck(
    script: ProofScript,
    max_frame_size: int = 3,
    cap_bits: int = DEFAULT_ENUMERATION_BITS,
) -> SpotcheckReport:
    """Brute-force frame validity of every line on small logic frames.

    Frames on which some premise line is not valid are skipped: a derived
    rule only promises its conclusion on frames validating its premises.
    The script must already check.
    """
    if not check_proof(script).ok:
        raise PreconditionFailed("script does not check; nothing to spot-check")
    premises = script.premises()
    buckets: dict[tuple[str, ...], list[int]] = {}
    for ln, line in enumerate(script.lines):
        buckets.setdefault(tuple(sorted(vars_of(line.formula))), []).append(ln)
    checked = skipped = 0
    failures = []
    ordinal = 0

    def valid_on(ev: Evaluator, f: Formula, names: tuple[str, ...]) -> bool:
        for combo in product(range(ev.full + 1), repeat=len(names)):
            if ev.mask(f, dict(zip(names, combo))) != ev.full:
                return False
        return True

    for n in range(1, max_frame_size + 1):
        for frame in logic_frames(script.logic, n, cap_bits):
            ordinal += 1
            ev = Evaluator(frame)
            if any(not valid_on(ev, f, tuple(sorted(vars_of(f)))) for f in premises):
                skipped += 1
                continue
            checked += 1
            # lines of one script share large subformulas: evaluate every
            # bucket of same-variable lines under one memo per valuation
            failed: set[int] = set()
            for names, lns in buckets.items():
                for combo in product(range(ev.full + 1), repeat=len(names)):
                    val = dict(zip(names, combo))
                    memo: dict = {}
                    for ln in lns:
                        if ln not in failed and ev.mask(script.lines[ln].formula, val, memo) != ev.full:
                            failed.add(ln)
            failures.extend((ordinal, ln) for ln in sorted(failed))
    return SpotcheckReport(not failures, checked, skipped, tuple(failures))


# ---------------------------------------------------------------------------
# JSON interchange and shipped corpus


def proof_to_obj(script: ProofScript) -> dict:
    lines = []
    for line in script.lines:
        obj: dict = {"formula": fmt_formula(line.formula), "rule": line.rule}
        if line.refs:
            obj["refs"] = list(line.refs)
        if line.schema is not None:
            obj["schema"] = line.schema
        if line.subst:
            obj["subst"] = {p: fmt_formula(f) for p, f in sorted(line.subst.items())}
        if line.index is not None:
            obj["index"] = fmt_index(line.index)
        lines.append(obj)
    return {"logic": script.logic.name, "lines": lines}


def proof_from_obj(obj: Mapping, logic: LogicSpec | None = None) -> ProofScript:
    if logic is None:
        logic = parse_logic(obj["logic"])
    lines = []
    for entry in obj["lines"]:
        subst = entry.get("subst")
        lines.append(
            ProofLine(
                formula=parse_formula(entry["formula"]),
                rule=entry["rule"],
                refs=tuple(entry.get("refs", ())),
                schema=entry.get("schema"),
                subst={p: parse_formula(t) for p, t in subst.items()} if subst else None,
                index=parse_index(entry["index"]) if "index" in entry else None,
            )
        )
    return ProofScript(logic, tuple(lines))


CORPUS_NAMES = (
    "closure_intro_rule",
    "strengthened_induction",
    "diamond_closure_exchange",
    "convergence_closure",
)


def load_corpus(name: str) -> ProofScript:
    """Load one of the shipped proof scripts by name."""
    if name not in CORPUS_NAMES:
        raise KeyError(f"unknown corpus proof {name!r}; have {CORPUS_NAMES}")
    text = resources.files("filtrakit").joinpath(f"proofs/{name}.json").read_text()
    return proof_from_obj(json.loads(text))


# ---------------------------------------------------------------------------
# proof construction


class ProofBuilder:
    """Accumulates checked-shape lines with formula-level deduplication.

    Derived helpers (chaining, monotonicity, contraposition) expand into
    primitive lines, so the emitted script contains only the six rules.
    """

    def __init__(self, logic: LogicSpec):
        self.logic = logic
        self.schemas = schema_registry(logic)
        self.lines: list[ProofLine] = []
        self._by_formula: dict[Formula, int] = {}

    def _add(self, line: ProofLine) -> int:
        existing = self._by_formula.get(line.formula)
        if existing is not None:
            return existing
        self.lines.append(line)
        idx = len(self.lines) - 1
        self._by_formula[line.formula] = idx
        return idx

    def premise(self, f: Formula) -> int:
        return self._add(ProofLine(f, "premise"))

    def taut(self, f: Formula) -> int:
        return self._add(ProofLine(f, "taut"))

    def axiom(self, schema: str, subst: Mapping[str, Formula] | None = None) -> int:
        f = apply_substitution(self.schemas[schema], subst or {})
        return self._add(ProofLine(f, "axiom", schema=schema, subst=dict(subst or {})))

    def mp(self, major: int, minor: int) -> int:
        impl = self.lines[major].formula
        if not isinstance(impl, Implies) or impl.left != self.lines[minor].formula:
            raise ValueError("modus ponens references do not fit")
        return self._add(ProofLine(impl.right, "mp", refs=(major, minor)))

    def nec(self, ref: int, index: IndexTerm) -> int:
        f = Box(index, self.lines[ref].formula)
        return self._add(ProofLine(f, "nec", refs=(ref,), index=index))

    def rboxplus(self, ref: int) -> int:
        f = self.lines[ref].formula
        assert (
            isinstance(f, Implies) and isinstance(f.right, Box) and f.right.body == f.left
        ), "closure introduction needs a line of shape A -> [e]A"
        out = Implies(f.left, Box(Plus(f.right.index), f.left))
        return self._add(ProofLine(out, "rboxplus", refs=(ref,)))

    # derived helpers ------------------------------------------------------

    def chain(self, first: int, second: int) -> int:
        """From A -> B and B -> C conclude A -> C."""
        ab = self.lines[first].formula
        bc = self.lines[second].formula
        assert isinstance(ab, Implies) and isinstance(bc, Implies) and ab.right == bc.left
        ac = Implies(ab.left, bc.right)
        shuffle = self.taut(Implies(ab, Implies(bc, ac)))
        return self.mp(self.mp(shuffle, first), second)

    def contrapose(self, ref: int) -> int:
        """From A -> B conclude ~B -> ~A (negations as implication to falsum)."""
        ab = self.lines[ref].formula
        assert isinstance(ab, Implies)
        out = Implies(Implies(ab.right, Bot()), Implies(ab.left, Bot()))
        return self.mp(self.taut(Implies(ab, out)), ref)

    def mono_box(self, index: IndexTerm, ref: int) -> int:
        """From A -> B conclude [t]A -> [t]B."""
        ab = self.lines[ref].formula
        assert isinstance(ab, Implies)
        boxed = self.nec(ref, index)
        k = self.axiom(f"K({fmt_index(index)})", {"p": ab.left, "q": ab.right})
        return self.mp(k, boxed)

    def mono_dia(self, index: IndexTerm, ref: int) -> int:
        """From A -> B conclude <t>A -> <t>B."""
        flipped = self.contrapose(ref)
        boxed = self.mono_box(index, flipped)
        return self.contrapose(boxed)

    def pair_under(self, first: int, second: int) -> int:
        """From X -> A and X -> B conclude X -> (A and B)."""
        xa = self.lines[first].formula
        xb = self.lines[second].formula
        assert isinstance(xa, Implies) and isinstance(xb, Implies) and xa.left == xb.left
        out = Implies(xa.left, conj(xa.right, xb.right))
        shuffle = self.taut(Implies(xa, Implies(xb, out)))
        return self.mp(self.mp(shuffle, first), second)

    # assembly ---------------------------------------------------------------

    def prune(self, final: int) -> ProofScript:
        """Script containing only the ancestors of the final line."""
        keep = set()
        stack = [final]
        while stack:
            i = stack.pop()
            if i in keep:
                continue
            keep.add(i)
            stack.extend(self.lines[i].refs)
        order = sorted(keep)
        renumber = {old: new for new, old in enumerate(order)}
        lines = []
        for old in order:
            line = self.lines[old]
            lines.append(
                ProofLine(
                    formula=line.formula,
                    rule=line.rule,
                    refs=tuple(renumber[r] for r in line.refs),
                    schema=line.schema,
                    subst=line.subst,
                    index=line.index,
                )
            )
        return ProofScript(self.logic, tuple(lines))

    def script(self) -> ProofScript:
        return ProofScript(self.logic, tuple(self.lines))
