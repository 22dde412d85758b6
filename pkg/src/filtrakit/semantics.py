"""Finite Kripke frames and models: relation algebra, truth evaluation,
validity, index-algebra expansions, fusion, frame enumeration, convergence.

Relations are sets of world pairs on the surface; evaluation packs them into
integer adjacency rows so that the truth set of a formula comes out of one
bottom-up pass per valuation.  Frames and models are immutable after
construction and safe to share across workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Iterable, Iterator, Mapping

from .errors import (
    AlphabetClash,
    CapExceeded,
    SizeCap,
    UninterpretedIndex,
    WorldCountMismatch,
)
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
    atoms_of_index,
    fmt_index,
    parse_index,
    vars_of,
)

Pair = tuple[int, int]
Relation = frozenset


# ---------------------------------------------------------------------------
# frames and models


def _as_relation(pairs: Iterable) -> Relation:
    return frozenset((int(i), int(j)) for i, j in pairs)


def _as_index(key) -> IndexTerm:
    return key if isinstance(key, IndexTerm) else parse_index(key)


@dataclass(frozen=True, eq=True)
class Frame:
    """Nonempty world set plus one binary relation per index term.

    Relation keys may be composite index terms; an explicit entry shadows the
    compositional reading, which is what makes generic two-relation frames
    (with the second relation unrelated to the first) representable.
    """

    world_count: int
    relations: Mapping[IndexTerm, Relation]

    def __post_init__(self):
        if self.world_count < 1:
            raise ValueError("frames are nonempty: world_count must be >= 1")
        normalized = {}
        for key, pairs in self.relations.items():
            rel = _as_relation(pairs)
            for i, j in rel:
                if not (0 <= i < self.world_count and 0 <= j < self.world_count):
                    raise ValueError(f"pair ({i}, {j}) out of range for {self.world_count} worlds")
            normalized[_as_index(key)] = rel
        object.__setattr__(self, "relations", normalized)

    @property
    def worlds(self) -> range:
        return range(self.world_count)

    def atoms(self) -> frozenset[str]:
        out: frozenset[str] = frozenset()
        for t in self.relations:
            out |= atoms_of_index(t)
        return out


@dataclass(frozen=True, eq=True)
class Model:
    """A frame together with a finitely supported valuation."""

    frame: Frame
    valuation: Mapping[str, frozenset[int]]

    def __post_init__(self):
        normalized = {}
        for name, worlds in self.valuation.items():
            ws = frozenset(int(w) for w in worlds)
            for w in ws:
                if not 0 <= w < self.frame.world_count:
                    raise ValueError(f"valuation of {name!r} mentions world {w} out of range")
            normalized[str(name)] = ws
        object.__setattr__(self, "valuation", normalized)

    @property
    def world_count(self) -> int:
        return self.frame.world_count


# ---------------------------------------------------------------------------
# packed-row relation algebra

Rows = tuple[int, ...]


def rel_to_rows(rel: Iterable[Pair], n: int) -> Rows:
    rows = [0] * n
    for i, j in rel:
        rows[i] |= 1 << j
    return tuple(rows)


def rows_to_rel(rows: Rows) -> Relation:
    return frozenset(
        (i, j) for i, row in enumerate(rows) for j in range(row.bit_length()) if row >> j & 1
    )


def closure_rows(rows: Rows) -> Rows:
    # Warshall with bit-packed rows: after step k, paths may route through
    # any intermediate <= k.
    out = list(rows)
    for k in range(len(out)):
        bit = 1 << k
        for i in range(len(out)):
            if out[i] & bit:
                out[i] |= out[k]
    return tuple(out)


def compose_rows(a: Rows, b: Rows) -> Rows:
    out = []
    for row in a:
        acc = 0
        j = 0
        r = row
        while r:
            if r & 1:
                acc |= b[j]
            r >>= 1
            j += 1
        out.append(acc)
    return tuple(out)


def union_rows(a: Rows, b: Rows) -> Rows:
    return tuple(x | y for x, y in zip(a, b))


def transitive_closure(rel: Iterable[Pair], n: int) -> Relation:
    """Smallest transitive superset of a relation on ``n`` worlds."""
    return rows_to_rel(closure_rows(rel_to_rows(rel, n)))


def compose_relations(a: Iterable[Pair], b: Iterable[Pair], n: int) -> Relation:
    return rows_to_rel(compose_rows(rel_to_rows(a, n), rel_to_rows(b, n)))


class RowResolver:
    """Per-frame cache resolving index terms to adjacency rows.

    Explicit relation entries take priority; anything else is computed
    compositionally from the term's parts.
    """

    def __init__(self, frame: Frame):
        self.n = frame.world_count
        self._cache: dict[IndexTerm, Rows] = {
            t: rel_to_rows(r, self.n) for t, r in frame.relations.items()
        }

    def get(self, t: IndexTerm) -> Rows:
        cached = self._cache.get(t)
        if cached is not None:
            return cached
        if isinstance(t, Atom):
            raise UninterpretedIndex(f"index {fmt_index(t)!r} is not interpreted in the frame")
        if isinstance(t, Plus):
            rows = closure_rows(self.get(t.inner))
        elif isinstance(t, Comp):
            rows = compose_rows(self.get(t.left), self.get(t.right))
        elif isinstance(t, Union):
            rows = union_rows(self.get(t.left), self.get(t.right))
        else:
            raise TypeError(f"not an index term: {t!r}")
        self._cache[t] = rows
        return rows


def relation_of(frame: Frame, t: IndexTerm) -> Relation:
    """Relation interpreting ``t``: explicit entry first, else compositional."""
    return rows_to_rel(RowResolver(frame).get(t))


# ---------------------------------------------------------------------------
# truth and validity


def eval_mask(
    f: Formula,
    rows_of: Callable[[IndexTerm], Rows],
    val: Mapping[str, int],
    full: int,
    memo: dict | None = None,
) -> int:
    """Truth set of ``f`` as a bitmask of worlds, for one valuation."""
    if memo is None:
        memo = {}
    hit = memo.get(f)
    if hit is not None:
        return hit
    if isinstance(f, Var):
        out = val.get(f.name, 0)
    elif isinstance(f, Bot):
        out = 0
    elif isinstance(f, Implies):
        left = eval_mask(f.left, rows_of, val, full, memo)
        right = eval_mask(f.right, rows_of, val, full, memo)
        out = (~left | right) & full
    elif isinstance(f, Box):
        body = eval_mask(f.body, rows_of, val, full, memo)
        rows = rows_of(f.index)
        miss = ~body
        out = 0
        for x, row in enumerate(rows):
            if not row & miss:
                out |= 1 << x
    else:
        raise TypeError(f"not a formula: {f!r}")
    memo[f] = out
    return out


class Evaluator:
    """Evaluates formulas on a fixed frame, reusable across valuations.

    Passing a shared ``memo`` amortizes common subformulas across several
    formulas evaluated under the same valuation.
    """

    def __init__(self, frame: Frame):
        self._rows = RowResolver(frame)
        self.n = frame.world_count
        self.full = (1 << self.n) - 1

    def mask(self, f: Formula, val: Mapping[str, int], memo: dict | None = None) -> int:
        return eval_mask(f, self._rows.get, val, self.full, memo)


def valuation_masks(model: Model) -> dict[str, int]:
    out = {}
    for name, worlds in model.valuation.items():
        mask = 0
        for w in worlds:
            mask |= 1 << w
        out[name] = mask
    return out


def set_to_mask(worlds: Iterable[int]) -> int:
    mask = 0
    for w in worlds:
        mask |= 1 << w
    return mask


def mask_to_set(mask: int) -> frozenset[int]:
    return frozenset(i for i in range(mask.bit_length()) if mask >> i & 1)


def extension(model: Model, f: Formula) -> frozenset[int]:
    """Worlds of the model where the formula is true."""
    ev = Evaluator(model.frame)
    return mask_to_set(ev.mask(f, valuation_masks(model)))


def truth(model: Model, world: int, f: Formula) -> bool:
    """Standard Kripke truth at a world."""
    if not 0 <= world < model.world_count:
        raise ValueError(f"world {world} out of range")
    ev = Evaluator(model.frame)
    return bool(ev.mask(f, valuation_masks(model)) >> world & 1)


def model_valid(model: Model, f: Formula) -> bool:
    """Truth at every world of the model."""
    ev = Evaluator(model.frame)
    return ev.mask(f, valuation_masks(model)) == ev.full


@dataclass(frozen=True)
class Counterexample:
    """Refuting valuation (restricted to the formula's variables) and world."""

    valuation: Mapping[str, frozenset[int]]
    world: int


DEFAULT_VALUATION_CAP = 1 << 24


def frame_valid(
    frame: Frame, f: Formula, valuation_cap: int = DEFAULT_VALUATION_CAP
) -> Counterexample | None:
    """Exhaustive validity over all valuations of the formula's variables.

    Returns the first counterexample in deterministic order (valuations by
    ascending truth-set bitmask, variables in sorted order, lowest failing
    world), or None when the formula is valid on the frame.
    """
    names = sorted(vars_of(f))
    n = frame.world_count
    count = (1 << n) ** len(names)
    if count > valuation_cap:
        raise CapExceeded(f"{count} valuations exceed the cap {valuation_cap}")
    ev = Evaluator(frame)
    for combo in product(range(1 << n), repeat=len(names)):
        val = dict(zip(names, combo))
        mask = ev.mask(f, val)
        if mask != ev.full:
            world = next(x for x in range(n) if not mask >> x & 1)
            witness = {name: mask_to_set(m) for name, m in val.items()}
            return Counterexample(witness, world)
    return None


# ---------------------------------------------------------------------------
# expansions of the index algebra


def expand_plus(frame: Frame, e: IndexTerm) -> Frame:
    """Add (or overwrite) the explicit transitive-closure relation for ``e``."""
    closure = transitive_closure(relation_of(frame, e), frame.world_count)
    relations = dict(frame.relations)
    relations[Plus(e)] = closure
    return Frame(frame.world_count, relations)


def sharp_terms(terms: Iterable[IndexTerm]) -> tuple[IndexTerm, ...]:
    """One-step expanded term alphabet: composition, union, closure pairs."""
    base = sorted(set(terms), key=fmt_index)
    out = list(base)
    for e in base:
        for c in base:
            out.append(Comp(e, c))
            out.append(Union(e, c))
    for e in base:
        out.append(Plus(e))
    seen: dict[IndexTerm, None] = {}
    for t in out:
        seen[t] = None
    return tuple(seen)


def expand_sharp(frame: Frame) -> Frame:
    """Materialize all one-step composite relations over the current terms."""
    resolver = RowResolver(frame)
    base = sorted(frame.relations, key=fmt_index)
    relations = dict(frame.relations)
    for e in base:
        for c in base:
            relations[Comp(e, c)] = rows_to_rel(compose_rows(resolver.get(e), resolver.get(c)))
            relations[Union(e, c)] = rows_to_rel(union_rows(resolver.get(e), resolver.get(c)))
    for e in base:
        relations[Plus(e)] = rows_to_rel(closure_rows(resolver.get(e)))
    return Frame(frame.world_count, relations)


DEFAULT_TERM_CAP = 512


def iterate_sharp(frame: Frame, n: int, term_cap: int = DEFAULT_TERM_CAP) -> Frame:
    """n-fold expansion; the zero-fold expansion is the frame itself."""
    out = frame
    for _ in range(n):
        size = len(out.relations)
        grown = 2 * size + 2 * size * size
        if grown > term_cap:
            raise SizeCap(f"expansion needs {grown} index terms, cap is {term_cap}")
        out = expand_sharp(out)
    return out


# ---------------------------------------------------------------------------
# fusion


def fuse_frames(frames: Iterable[Frame]) -> Frame:
    """Single frame carrying the relations of all inputs.

    Inputs must share the world count and have pairwise disjoint atomic
    alphabets.
    """
    frames = list(frames)
    if not frames:
        raise ValueError("fusion needs at least one frame")
    n = frames[0].world_count
    seen_atoms: set[str] = set()
    relations: dict[IndexTerm, Relation] = {}
    for f in frames:
        if f.world_count != n:
            raise WorldCountMismatch(f"world counts differ: {n} vs {f.world_count}")
        overlap = seen_atoms & f.atoms()
        if overlap:
            raise AlphabetClash(f"atoms {sorted(overlap)} occur in more than one input")
        seen_atoms |= f.atoms()
        relations.update(f.relations)
    return Frame(n, relations)


def fuse_models(models: Iterable[Model]) -> Model:
    models = list(models)
    frame = fuse_frames(m.frame for m in models)
    valuation: dict[str, frozenset[int]] = {}
    for m in models:
        for name, worlds in m.valuation.items():
            if name in valuation and valuation[name] != worlds:
                raise ValueError(f"conflicting valuation for variable {name!r}")
            valuation[name] = worlds
    return Model(frame, valuation)


# ---------------------------------------------------------------------------
# enumeration and convergence

DEFAULT_ENUMERATION_BITS = 24


def enumerate_frames(
    n: int, indices: Iterable[IndexTerm], cap_bits: int = DEFAULT_ENUMERATION_BITS
) -> Iterator[Frame]:
    """All frames on ``n`` worlds over the given indices, in lexicographic
    order of the adjacency bit string (first index, then row-major pairs,
    most significant first)."""
    indices = [_as_index(t) for t in indices]
    bits = n * n * len(indices)
    if bits > cap_bits:
        raise CapExceeded(f"enumeration needs {bits} adjacency bits, cap is {cap_bits}")
    positions = [(t, i, j) for t in indices for i in range(n) for j in range(n)]
    for code in range(1 << bits):
        relations: dict[IndexTerm, set] = {t: set() for t in indices}
        for b, (t, i, j) in enumerate(positions):
            if code >> (bits - 1 - b) & 1:
                relations[t].add((i, j))
        yield Frame(n, relations)


def check_convergence(rel: Iterable[Pair], n: int) -> bool:
    """Church-Rosser condition: successors of a common point can be joined.

    The quantifier reading is literal, so a successor without successors of
    its own already refutes it (take both successors equal).
    """
    rows = rel_to_rows(rel, n)
    for x in range(n):
        succ = [y for y in range(n) if rows[x] >> y & 1]
        for a in range(len(succ)):
            for b in range(a, len(succ)):
                if not rows[succ[a]] & rows[succ[b]]:
                    return False
    return True


# ---------------------------------------------------------------------------
# JSON interchange


def frame_to_obj(frame: Frame) -> dict:
    relations = {
        fmt_index(t): sorted([i, j] for i, j in rel) for t, rel in frame.relations.items()
    }
    return {"worlds": frame.world_count, "relations": dict(sorted(relations.items()))}


def frame_from_obj(obj: Mapping) -> Frame:
    relations = {parse_index(k): [(i, j) for i, j in v] for k, v in obj.get("relations", {}).items()}
    return Frame(int(obj["worlds"]), relations)


def model_to_obj(model: Model) -> dict:
    out = frame_to_obj(model.frame)
    out["valuation"] = {p: sorted(ws) for p, ws in sorted(model.valuation.items())}
    return out


def model_from_obj(obj: Mapping) -> Model:
    frame = frame_from_obj(obj)
    valuation = {p: frozenset(ws) for p, ws in obj.get("valuation", {}).items()}
    return Model(frame, valuation)
