"""Bounded validity and satisfiability over the frames of a logic.

Search enumerates only the atomic relations of the logic's base alphabet (in
lexicographic adjacency-bit order), filters by the decidable frame condition,
and materializes composite relations from the atoms.  Frames of expanded
logics therefore never carry an inconsistent closure relation, and verdicts
below the completeness bound are conclusive.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from multiprocessing import Pool
from typing import Iterator, Sequence

from .errors import CapExceeded, UninterpretedIndex, UnsupportedLogic
from .logics import LogicSpec, atom_requirements, base_logic, plus_logic, _BASE_CONDITIONS
from .semantics import (
    DEFAULT_ENUMERATION_BITS,
    DEFAULT_VALUATION_CAP,
    Frame,
    Model,
    Rows,
    closure_rows,
    compose_rows,
    eval_mask,
    mask_to_set,
    rows_to_rel,
    sharp_terms,
    truth,
    union_rows,
)
from .syntax import (
    Atom,
    Box,
    Comp,
    Formula,
    IndexTerm,
    Plus,
    Union,
    Var,
    conj_all,
    index_terms_of,
    neg,
    sub_closure,
    vars_of,
)


@dataclass(frozen=True)
class DecisionResult:
    """Outcome of a bounded search.

    ``complete`` is only meaningful for the verdicts ``valid`` and ``unsat``:
    it records that the search reached the completeness bound, making the
    verdict conclusive rather than a failure to find a witness.
    """

    verdict: str  # "valid" | "refuted" | "sat" | "unsat"
    searched_up_to: int
    complete: bool = False
    model: Model | None = None
    world: int | None = None


def completeness_bound(f: Formula, logic: LogicSpec) -> int:
    """Quotient-size bound licensing a conclusive verdict.

    Derived from the surrogate-set construction: two surrogate formulas per
    subformula, hence at most ``2^(2 * |Sub(f)|)`` truth vectors.  Supported
    for the five strict-filtration bases and their closure/expansion
    extensions.
    """
    spine = logic
    while spine.kind in ("plus", "sharp"):
        spine = spine.base
    if spine.kind != "base" or spine.base_id not in ("K", "T", "K4", "S4", "S5"):
        raise UnsupportedLogic(f"no completeness bound for {logic.name}")
    return 2 ** (2 * len(sub_closure([f])))


# ---------------------------------------------------------------------------
# candidate frames


def _materialize(logic: LogicSpec, atom_rows: dict[IndexTerm, Rows]) -> dict[IndexTerm, Rows]:
    if logic.kind == "base":
        return {Atom(a): atom_rows[Atom(a)] for a in logic.atoms}
    if logic.kind == "plus":
        out = _materialize(logic.base, atom_rows)
        for t in list(out):
            out[Plus(t)] = closure_rows(out[t])
        return out
    if logic.kind == "sharp":
        out = _materialize(logic.base, atom_rows)
        terms = tuple(out)
        for _ in range(logic.level):
            for e in terms:
                for c in terms:
                    out[Comp(e, c)] = compose_rows(out[e], out[c])
                    out[Union(e, c)] = union_rows(out[e], out[c])
            for e in terms:
                out[Plus(e)] = closure_rows(out[e])
            terms = sharp_terms(terms)
        return out
    if logic.kind == "fusion":
        out = {}
        for comp in logic.components:
            out.update(_materialize(comp, atom_rows))
        return out
    raise UnsupportedLogic(f"unknown logic kind {logic.kind!r}")


def candidate_count(logic: LogicSpec, n: int) -> int:
    return 1 << (n * n * len(logic.atoms))


def frame_candidate(logic: LogicSpec, n: int, code: int) -> dict[IndexTerm, Rows] | None:
    """Decode a candidate id into materialized rows, or None when the atomic
    relations violate the logic's frame condition."""
    atoms = logic.atoms
    bits = n * n * len(atoms)
    atom_rows: dict[IndexTerm, Rows] = {}
    pos = bits
    requirements = atom_requirements(logic)
    for a in atoms:
        rows = []
        for i in range(n):
            row = 0
            for j in range(n):
                pos -= 1
                if code >> pos & 1:
                    row |= 1 << j
            rows.append(row)
        rows = tuple(rows)
        if not _BASE_CONDITIONS[requirements[a]](rows):
            return None
        atom_rows[Atom(a)] = rows
    return _materialize(logic, atom_rows)


def logic_frames(
    logic: LogicSpec, n: int, cap_bits: int = DEFAULT_ENUMERATION_BITS
) -> Iterator[Frame]:
    """Frames of the logic on ``n`` worlds, composites materialized."""
    bits = n * n * len(logic.atoms)
    if bits > cap_bits:
        raise CapExceeded(f"enumeration needs {bits} adjacency bits, cap is {cap_bits}")
    for code in range(1 << bits):
        rows = frame_candidate(logic, n, code)
        if rows is not None:
            yield Frame(n, {t: rows_to_rel(r) for t, r in rows.items()})


# ---------------------------------------------------------------------------
# search


def _check_indices(f: Formula, logic: LogicSpec) -> None:
    missing = index_terms_of(f) - set(logic.alphabet)
    if missing:
        names = ", ".join(sorted(map(str, missing)))
        raise UninterpretedIndex(f"indices {names} are not in the language of {logic.name}")


def _scan_chunk(args) -> tuple[int, tuple[int, ...], int] | None:
    """Search a candidate-id range; returns (code, valuation combo, world)."""
    logic, n, lo, hi, f, names, mode = args
    full = (1 << n) - 1
    for code in range(lo, hi):
        rows = frame_candidate(logic, n, code)
        if rows is None:
            continue
        getter = rows.__getitem__
        for combo in product(range(1 << n), repeat=len(names)):
            val = dict(zip(names, combo))
            mask = eval_mask(f, getter, val, full)
            if mode == "refute" and mask != full:
                world = next(x for x in range(n) if not mask >> x & 1)
                return code, combo, world
            if mode == "satisfy" and mask:
                world = next(x for x in range(n) if mask >> x & 1)
                return code, combo, world
    return None


def _witness_model(logic: LogicSpec, n: int, code: int, names, combo) -> Model:
    rows = frame_candidate(logic, n, code)
    frame = Frame(n, {t: rows_to_rel(r) for t, r in rows.items()})
    return Model(frame, {p: mask_to_set(m) for p, m in zip(names, combo)})


def _search(
    f: Formula,
    logic: LogicSpec,
    max_size: int,
    mode: str,
    cap_bits: int,
    valuation_cap: int,
    jobs: int,
) -> tuple[int, int, tuple[int, ...], int] | None:
    """First (size, code, combo, world) hit in deterministic order, or None."""
    names = tuple(sorted(vars_of(f)))
    for n in range(1, max_size + 1):
        bits = n * n * len(logic.atoms)
        if bits > cap_bits:
            raise CapExceeded(f"size {n} needs {bits} adjacency bits, cap is {cap_bits}")
        if (1 << n) ** len(names) > valuation_cap:
            raise CapExceeded(f"size {n} exceeds the valuation cap {valuation_cap}")
        total = 1 << bits
        if jobs > 1 and total >= 1 << 12:
            chunk = max(1 << 10, total // (jobs * 16))
            ranges = [(lo, min(lo + chunk, total)) for lo in range(0, total, chunk)]
            with Pool(jobs) as pool:
                args = [(logic, n, lo, hi, f, names, mode) for lo, hi in ranges]
                for hit in pool.imap(_scan_chunk, args):
                    if hit is not None:
                        pool.terminate()
                        code, combo, world = hit
                        return n, code, combo, world
        else:
            hit = _scan_chunk((logic, n, 0, total, f, names, mode))
            if hit is not None:
                code, combo, world = hit
                return n, code, combo, world
    return None


def _complete(f: Formula, logic: LogicSpec, max_size: int) -> bool:
    try:
        return max_size >= completeness_bound(f, logic)
    except UnsupportedLogic:
        return False


def decide_validity(
    f: Formula,
    logic: LogicSpec,
    max_size: int,
    cap_bits: int = DEFAULT_ENUMERATION_BITS,
    valuation_cap: int = DEFAULT_VALUATION_CAP,
    jobs: int = 1,
) -> DecisionResult:
    """Exhaustive refutation search over logic frames up to ``max_size``."""
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    _check_indices(f, logic)
    names = tuple(sorted(vars_of(f)))
    hit = _search(f, logic, max_size, "refute", cap_bits, valuation_cap, jobs)
    if hit is None:
        return DecisionResult("valid", max_size, complete=_complete(f, logic, max_size))
    n, code, combo, world = hit
    return DecisionResult("refuted", n, model=_witness_model(logic, n, code, names, combo), world=world)


def decide_sat(
    f: Formula,
    logic: LogicSpec,
    max_size: int,
    cap_bits: int = DEFAULT_ENUMERATION_BITS,
    valuation_cap: int = DEFAULT_VALUATION_CAP,
    jobs: int = 1,
) -> DecisionResult:
    """Search for a satisfying world in a model on a logic frame."""
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    _check_indices(f, logic)
    names = tuple(sorted(vars_of(f)))
    hit = _search(f, logic, max_size, "satisfy", cap_bits, valuation_cap, jobs)
    if hit is None:
        return DecisionResult("unsat", max_size, complete=_complete(f, logic, max_size))
    n, code, combo, world = hit
    return DecisionResult("sat", n, model=_witness_model(logic, n, code, names, combo), world=world)


# ---------------------------------------------------------------------------
# non-compactness witnesses


@dataclass(frozen=True)
class CompactnessWitness:
    formulas: tuple[Formula, ...]
    model: Model
    world: int


DEFAULT_COMPACTNESS_CAP = 8


def compactness_demo(
    n: int, search_up_to: int = 2, cap: int = DEFAULT_COMPACTNESS_CAP
) -> list[CompactnessWitness]:
    """Satisfiable finite fragments of the classic unsatisfiable set.

    For each k up to ``n``, produces a closure model satisfying all of
    ``[r]p, [r][r]p, ..., [r]^k p`` together with ``~[r+]p`` at a world.  A
    cycle of k+1 worlds works (every world up to k steps away satisfies p,
    the start itself is reachable in k+1 steps and refutes it); the witness
    is constructed, then re-verified by evaluation, and for small k
    additionally cross-checked against the exhaustive satisfiability search.
    """
    if n > cap:
        raise CapExceeded(f"requested {n} fragments, cap is {cap}")
    k_plus = plus_logic(base_logic("K"))
    p = Var("p")
    r = Atom("r")
    out = []
    for k in range(n + 1):
        boxes = []
        body = p
        for _ in range(k):
            body = Box(r, body)
            boxes.append(body)
        subset = tuple(boxes) + (neg(Box(Plus(r), p)),)
        conjunction = conj_all(list(subset))
        size = k + 1
        cycle = frozenset((i, (i + 1) % size) for i in range(size))
        frame = Frame(
            size,
            {Atom("r"): cycle, Plus(Atom("r")): rows_to_rel(closure_rows(
                tuple(1 << ((i + 1) % size) for i in range(size))
            ))},
        )
        witness = Model(frame, {"p": frozenset(range(1, size))})
        if not truth(witness, 0, conjunction):
            raise AssertionError("constructed fragment witness failed verification")
        if k + 1 <= search_up_to:
            searched = decide_sat(conjunction, k_plus, k + 1)
            if searched.verdict != "sat":
                raise AssertionError("search disagrees with the constructed witness")
        out.append(CompactnessWitness(subset, witness, 0))
    return out
