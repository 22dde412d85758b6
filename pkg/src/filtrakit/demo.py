"""Reviewer-facing demonstrations: the exhaustive correspondence table for
the transitive-closure axioms, the non-compactness witnesses, and the proof
corpus replay.

The table sweep covers every two-relation frame up to a world bound, so it
uses bit-packed per-relation tables (box clause evaluated once per relation
and valuation) instead of the generic evaluator; the generic evaluator is
cross-checked against the tables on a sample.
"""

from __future__ import annotations

from dataclasses import dataclass

from .decision import CompactnessWitness, compactness_demo
from .hilbert import CORPUS_NAMES, SpotcheckReport, check_proof, load_corpus, soundness_spotcheck
from .semantics import Frame, Rows, closure_rows


@dataclass(frozen=True)
class SegerbergTable:
    """Exhaustive correspondence results for the closure axioms.

    ``containment``, ``unfolding`` and ``exact_closure`` report whether the
    three biconditionals held on every frame: validity of the first axiom
    equals S containing R, validity of the second equals S containing R
    composed with S, and joint validity of all three equals S being exactly
    the transitive closure of R.  ``one_way_*`` report the two implications;
    the converse witnesses are frames where the converse fails.
    """

    frames_checked: int
    containment: bool
    unfolding: bool
    exact_closure: bool
    one_way_above_closure: bool
    one_way_below_closure: bool
    converse_above_witness: tuple[int, frozenset, frozenset]
    converse_below_witness: tuple[int, frozenset, frozenset]

    @property
    def ok(self) -> bool:
        return (
            self.containment
            and self.unfolding
            and self.exact_closure
            and self.one_way_above_closure
            and self.one_way_below_closure
        )


def _rows_of_code(code: int, n: int) -> Rows:
    return tuple((code >> (i * n)) & ((1 << n) - 1) for i in range(n))


def _box_table(rows: Rows, n: int) -> tuple[int, ...]:
    # box clause per valuation mask: worlds whose successors all satisfy it
    full = (1 << n) - 1
    out = []
    for v in range(1 << n):
        miss = ~v
        mask = 0
        for x, row in enumerate(rows):
            if not row & miss:
                mask |= 1 << x
        out.append(mask)
    return tuple(out)


def axiom_validity_tables(n: int) -> tuple[list[Rows], list[tuple[int, ...]], list[int]]:
    """Per-relation rows, box tables, and closure codes for all relations."""
    count = 1 << (n * n)
    rows_of = [_rows_of_code(code, n) for code in range(count)]
    boxes = [_box_table(rows, n) for rows in rows_of]
    closure_codes = []
    for rows in rows_of:
        closed = closure_rows(rows)
        closure_codes.append(sum(row << (i * n) for i, row in enumerate(closed)))
    return rows_of, boxes, closure_codes


def segerberg_axiom_validity(r_rows: Rows, s_rows: Rows, n: int) -> tuple[bool, bool, bool]:
    """Validity of the three closure axioms on one two-relation frame,
    computed directly from the box tables (used by the sweep and as a
    reference point for the generic evaluator)."""
    full = (1 << n) - 1
    box_r = _box_table(r_rows, n)
    box_s = _box_table(s_rows, n)
    a1 = all(not (box_s[v] & ~box_r[v] & full) for v in range(full + 1))
    a2 = all(not (box_s[v] & ~box_r[box_s[v]] & full) for v in range(full + 1))
    a3 = all(
        not (box_s[(~v | box_r[v]) & full] & box_r[v] & ~box_s[v] & full)
        for v in range(full + 1)
    )
    return a1, a2, a3


def segerberg_table(max_worlds: int = 3) -> SegerbergTable:
    """Sweep all two-relation frames up to the bound."""
    checked = 0
    containment = unfolding = exact = above = below = True
    above_witness = below_witness = None
    for n in range(1, max_worlds + 1):
        full = (1 << n) - 1
        count = 1 << (n * n)
        rows_of, boxes, closure_codes = axiom_validity_tables(n)
        union_over: list[tuple[int, ...]] = []
        for s_code in range(count):
            s_rows = rows_of[s_code]
            table = []
            for m in range(full + 1):
                acc = 0
                for j in range(n):
                    if m >> j & 1:
                        acc |= s_rows[j]
                table.append(acc)
            union_over.append(tuple(table))
        valuations = range(full + 1)
        for r_code in range(count):
            box_r = boxes[r_code]
            r_rows = rows_of[r_code]
            r_plus = closure_codes[r_code]
            for s_code in range(count):
                checked += 1
                box_s = boxes[s_code]
                s_rows = rows_of[s_code]
                compose_in_s = all(
                    not (union_over[s_code][r_rows[i]] & ~s_rows[i] & full)
                    for i in range(n)
                )
                a1 = all(not (box_s[v] & ~box_r[v] & full) for v in valuations)
                a2 = all(not (box_s[v] & ~box_r[box_s[v]] & full) for v in valuations)
                a3 = all(
                    not (box_s[(~v | box_r[v]) & full] & box_r[v] & ~box_s[v] & full)
                    for v in valuations
                )
                s_contains_r = not (r_code & ~s_code)
                s_is_closure = s_code == r_plus
                s_above_closure = not (r_plus & ~s_code)
                s_below_closure = not (s_code & ~r_plus)
                if a1 != s_contains_r:
                    containment = False
                if a2 != compose_in_s:
                    unfolding = False
                if (a1 and a2 and a3) != s_is_closure:
                    exact = False
                if (a1 and a2) and not s_above_closure:
                    above = False
                if a3 and not s_below_closure:
                    below = False
                if above_witness is None and s_above_closure and not (a1 and a2):
                    above_witness = (n, r_code, s_code)
                if below_witness is None and s_below_closure and not a3:
                    below_witness = (n, r_code, s_code)
    if above_witness is None or below_witness is None:
        raise AssertionError("expected converse witnesses within the bound")

    def decode(entry):
        n, r_code, s_code = entry
        r = frozenset(
            (i, j) for i in range(n) for j in range(n) if r_code >> (i * n + j) & 1
        )
        s = frozenset(
            (i, j) for i in range(n) for j in range(n) if s_code >> (i * n + j) & 1
        )
        return n, r, s

    return SegerbergTable(
        frames_checked=checked,
        containment=containment,
        unfolding=unfolding,
        exact_closure=exact,
        one_way_above_closure=above,
        one_way_below_closure=below,
        converse_above_witness=decode(above_witness),
        converse_below_witness=decode(below_witness),
    )


@dataclass(frozen=True)
class CorpusReport:
    name: str
    lines: int
    checks: bool
    spotcheck: SpotcheckReport
    theorem: str


def proof_corpus_demo(max_frame_size: int = 3) -> list[CorpusReport]:
    """Check every shipped proof and spot-check it on small frames."""
    out = []
    for name in CORPUS_NAMES:
        script = load_corpus(name)
        result = check_proof(script)
        spot = soundness_spotcheck(script, max_frame_size=max_frame_size)
        out.append(
            CorpusReport(
                name=name,
                lines=len(script.lines),
                checks=result.ok,
                spotcheck=spot,
                theorem=str(script.theorem),
            )
        )
    return out


def compactness_witnesses(n: int = 4) -> list[CompactnessWitness]:
    """Satisfiable finite fragments of the unsatisfiable closure set."""
    return compactness_demo(n)
