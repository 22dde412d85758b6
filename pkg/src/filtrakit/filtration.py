"""Filtration constructions on finite models.

Covers induced partitions, the minimal and maximal filtered relations,
recipe-based strict filtrations, a verifier for the four defining conditions,
the surrogate-variable transfer construction for transitive-closure
modalities, fusion filtration, quotienting by modal equivalence, and the
interaction of the induction axiom with minimal filtration.

Everything here is a pure function over immutable inputs; verification
results are value objects.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

from .errors import (
    AlphabetClash,
    EquivalenceMismatch,
    PartitionDoesNotRespectGamma,
    PreconditionFailed,
    RecipeViolation,
    UninterpretedIndex,
    UnsupportedLogic,
)
from .logics import LogicSpec
from .semantics import (
    Evaluator,
    Frame,
    Model,
    Relation,
    closure_rows,
    extension,
    frame_valid,
    mask_to_set,
    rel_to_rows,
    relation_of,
    rows_to_rel,
    set_to_mask,
    transitive_closure,
    valuation_masks,
)
from .syntax import (
    Atom,
    Box,
    Formula,
    FormulaSet,
    IndexTerm,
    Plus,
    Var,
    conj_all,
    diamond,
    ensure_closed,
    fmt_index,
    formula_set,
    fresh_surrogates,
    instantiate_segerberg,
    neg,
    vars_of,
)

RECIPES = ("minimal", "closure_of_minimal", "maximal")


# ---------------------------------------------------------------------------
# partitions


@dataclass(frozen=True)
class InducedBy:
    """Partition induced by agreement on a formula set in a model."""

    gamma: FormulaSet
    model: Model


@dataclass(frozen=True)
class Through:
    """Partition known to equal the one induced by an explicit formula set."""

    phi: FormulaSet


@dataclass(frozen=True)
class Refinement:
    """Partition produced by successive refinement (modal equivalence)."""


@dataclass(frozen=True)
class Partition:
    """Equivalence relation on worlds; class ids ordered by least member."""

    world_count: int
    class_of: tuple[int, ...]
    classes: tuple[frozenset[int], ...]
    provenance: object = Refinement()

    def __post_init__(self):
        if len(self.class_of) != self.world_count:
            raise ValueError("class_of must assign every world")
        seen: set[int] = set()
        for cid, members in enumerate(self.classes):
            if not members:
                raise ValueError("partition classes are nonempty")
            if seen & members:
                raise ValueError("partition classes must be disjoint")
            seen |= members
            for w in members:
                if self.class_of[w] != cid:
                    raise ValueError("class_of disagrees with classes")
        if seen != set(range(self.world_count)):
            raise ValueError("classes must cover the world set")
        mins = [min(c) for c in self.classes]
        if mins != sorted(mins):
            raise ValueError("classes must be ordered by least member")

    def __len__(self) -> int:
        return len(self.classes)


def partition_from_labels(labels: Sequence, provenance: object = Refinement()) -> Partition:
    """Group worlds by label; classes ordered by their least world."""
    groups: dict[object, list[int]] = {}
    for w, label in enumerate(labels):
        groups.setdefault(label, []).append(w)
    ordered = sorted(groups.values(), key=min)
    class_of = [0] * len(labels)
    for cid, members in enumerate(ordered):
        for w in members:
            class_of[w] = cid
    return Partition(
        world_count=len(labels),
        class_of=tuple(class_of),
        classes=tuple(frozenset(m) for m in ordered),
        provenance=provenance,
    )


def identity_partition(n: int) -> Partition:
    return partition_from_labels(range(n))


def compose_partitions(inner: Partition, outer: Partition) -> Partition:
    """Partition of the inner source induced by a partition of its classes."""
    if outer.world_count != len(inner.classes):
        raise ValueError("outer partition must live on the inner quotient")
    labels = [outer.class_of[inner.class_of[w]] for w in range(inner.world_count)]
    return partition_from_labels(labels)


def _truth_vectors(model: Model, formulas: Iterable[Formula]) -> list[tuple[int, ...]]:
    ev = Evaluator(model.frame)
    val = valuation_masks(model)
    masks = [ev.mask(f, val) for f in formulas]
    return [tuple(m >> w & 1 for m in masks) for w in range(model.world_count)]


def induced_equivalence(model: Model, gamma: FormulaSet) -> Partition:
    """Partition of the model's worlds by agreement on every member formula."""
    labels = _truth_vectors(model, gamma)
    return partition_from_labels(labels, provenance=InducedBy(gamma, model))


def respects(model: Model, partition: Partition, gamma: Iterable[Formula]) -> bool:
    """Whether every class is uniform on every formula of the set."""
    ev = Evaluator(model.frame)
    val = valuation_masks(model)
    class_masks = [set_to_mask(c) for c in partition.classes]
    for f in gamma:
        ext = ev.mask(f, val)
        for cm in class_masks:
            inside = cm & ext
            if inside and inside != cm:
                return False
    return True


# ---------------------------------------------------------------------------
# filtered relations


def min_filtered_relation(model: Model, partition: Partition, e: IndexTerm) -> Relation:
    """Image of the relation under the quotient map."""
    rel = relation_of(model.frame, e)
    cls = partition.class_of
    return frozenset((cls[x], cls[y]) for x, y in rel)


def max_filtered_relation(
    model: Model, partition: Partition, gamma: FormulaSet, e: IndexTerm
) -> Relation:
    """Largest quotient relation compatible with the boxed members of gamma."""
    if not respects(model, partition, gamma):
        raise PartitionDoesNotRespectGamma(
            "maximal filtered relation needs a partition respecting the formula set"
        )
    ev = Evaluator(model.frame)
    val = valuation_masks(model)
    boxed = [f for f in gamma if isinstance(f, Box) and f.index == e]
    box_masks = [ev.mask(f, val) for f in boxed]
    body_masks = [ev.mask(f.body, val) for f in boxed]
    reps = [min(c) for c in partition.classes]
    k = len(reps)
    out = set()
    for a in range(k):
        xa = reps[a]
        needed = [bm for fm, bm in zip(box_masks, body_masks) if fm >> xa & 1]
        for b in range(k):
            yb = reps[b]
            if all(bm >> yb & 1 for bm in needed):
                out.add((a, b))
    return frozenset(out)


# ---------------------------------------------------------------------------
# filtered models


@dataclass(frozen=True)
class FilteredModel:
    """Quotient model plus the data needed to re-verify it is a filtration."""

    quotient: Model
    source: Model
    gamma: FormulaSet
    partition: Partition
    through: FormulaSet | None
    recipe_used: str


def _apply_recipe(recipe: str, mn: Relation, mx: Relation, k: int, label: str) -> Relation:
    if recipe == "minimal":
        rel = mn
    elif recipe == "closure_of_minimal":
        rel = transitive_closure(mn, k)
    elif recipe == "maximal":
        rel = mx
    else:
        raise ValueError(f"unknown recipe {recipe!r}")
    if not (mn <= rel <= mx):
        raise RecipeViolation(
            f"recipe {recipe!r} left the [min, max] corridor for index {label}"
        )
    return rel


def _canonical_valuation(model: Model, partition: Partition, names: Iterable[str]) -> dict:
    cls = partition.class_of
    return {
        p: frozenset(cls[w] for w in model.valuation.get(p, frozenset())) for p in sorted(names)
    }


def build_filtration(model: Model, gamma: FormulaSet, recipe: str) -> FilteredModel:
    """Strict filtration through gamma itself, with the given recipe.

    The quotient valuation is canonical on the variables of gamma and false
    elsewhere.  Recipe output is re-checked against the [min, max] corridor
    rather than trusted.
    """
    gamma = ensure_closed(gamma)
    partition = induced_equivalence(model, gamma)
    k = len(partition)
    relations = {}
    for t in model.frame.relations:
        mn = min_filtered_relation(model, partition, t)
        mx = max_filtered_relation(model, partition, gamma, t)
        relations[t] = _apply_recipe(recipe, mn, mx, k, fmt_index(t))
    names = set()
    for f in gamma:
        names |= vars_of(f)
    quotient = Model(Frame(k, relations), _canonical_valuation(model, partition, names))
    return FilteredModel(
        quotient=quotient,
        source=model,
        gamma=gamma,
        partition=partition,
        through=gamma,
        recipe_used=recipe,
    )


# ---------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class VerificationReport:
    """One boolean per defining condition of a filtration, plus diagnostics."""

    quotient_well_formed: bool
    respects_gamma: bool
    valuation_canonical: bool
    relation_bounds: tuple[tuple[IndexTerm, bool, bool], ...]
    problems: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return (
            self.quotient_well_formed
            and self.respects_gamma
            and self.valuation_canonical
            and all(mn and mx for _, mn, mx in self.relation_bounds)
        )


def verify_filtration(source: Model, gamma: FormulaSet, candidate: FilteredModel) -> VerificationReport:
    """Check the four defining conditions of a filtration of ``source``."""
    gamma = ensure_closed(gamma)
    problems: list[str] = []
    partition = candidate.partition
    quotient = candidate.quotient

    well_formed = True
    if partition.world_count != source.world_count:
        well_formed = False
        problems.append("partition does not live on the source worlds")
    if quotient.world_count != len(partition.classes):
        well_formed = False
        problems.append("quotient world count differs from the number of classes")

    resp = well_formed and respects(source, partition, gamma)
    if well_formed and not resp:
        problems.append("partition mixes truth values of a member formula")

    canonical = well_formed
    if well_formed:
        names = set()
        for f in gamma:
            names |= vars_of(f)
        cls = partition.class_of
        for p in sorted(names):
            want = frozenset(cls[w] for w in source.valuation.get(p, frozenset()))
            have = quotient.valuation.get(p, frozenset())
            if want != have:
                canonical = False
                problems.append(f"valuation of {p!r} is not canonical")

    bounds: list[tuple[IndexTerm, bool, bool]] = []
    if well_formed and resp:
        for t in source.frame.relations:
            mn = min_filtered_relation(source, partition, t)
            mx = max_filtered_relation(source, partition, gamma, t)
            try:
                have = relation_of(quotient.frame, t)
            except UninterpretedIndex:
                bounds.append((t, False, False))
                problems.append(f"quotient does not interpret index {fmt_index(t)}")
                continue
            ok_min = mn <= have
            ok_max = have <= mx
            if not ok_min:
                problems.append(f"minimal filtered relation not contained for {fmt_index(t)}")
            if not ok_max:
                problems.append(f"maximal filtered relation exceeded for {fmt_index(t)}")
            bounds.append((t, ok_min, ok_max))

    return VerificationReport(
        quotient_well_formed=well_formed,
        respects_gamma=resp,
        valuation_canonical=canonical,
        relation_bounds=tuple(bounds),
        problems=tuple(problems),
    )


def verify_filtration_lemma(source: Model, gamma: FormulaSet, candidate: FilteredModel) -> bool:
    """Truth of every member formula agrees at each world and its class."""
    gamma = ensure_closed(gamma)
    src = Evaluator(source.frame)
    quo = Evaluator(candidate.quotient.frame)
    sval = valuation_masks(source)
    qval = valuation_masks(candidate.quotient)
    cls = candidate.partition.class_of
    for f in gamma:
        sm = src.mask(f, sval)
        qm = quo.mask(f, qval)
        for w in range(source.world_count):
            if (sm >> w & 1) != (qm >> cls[w] & 1):
                return False
    return True


# ---------------------------------------------------------------------------
# transfer construction for transitive-closure modalities


def _definable_variant(model: Model, sigma_vars: Mapping[str, Formula]) -> dict[str, frozenset[int]]:
    """Valuation sending each surrogate variable to its formula's truth set."""
    valuation = dict(model.valuation)
    for name, f in sigma_vars.items():
        valuation[name] = extension(model, f)
    return valuation


def transclosure_filtration(
    model: Model,
    gamma: FormulaSet,
    base: LogicSpec,
    box_index: IndexTerm | None = None,
    plus_index: IndexTerm | None = None,
) -> FilteredModel:
    """Filtrate a model of a transitive-closure extension.

    Requires the second relation to be exactly the transitive closure of the
    first (which makes all substitution instances of the interaction axioms
    true) and the base reduct to satisfy the base frame condition.  Builds
    surrogate variables for gamma, filtrates the one-relation reduct through
    the surrogate set with the base recipe, and closes the quotient relation
    to reinstall the second modality.
    """
    gamma = ensure_closed(gamma)
    if base.kind != "base" or base.recipe is None:
        raise UnsupportedLogic(f"base logic {base.name} has no strict-filtration recipe")
    if box_index is None:
        box_index = Atom(base.atoms[0])
    if plus_index is None:
        plus_index = Plus(box_index)

    n = model.world_count
    r_rel = relation_of(model.frame, box_index)
    s_rel = relation_of(model.frame, plus_index)
    if s_rel != transitive_closure(r_rel, n):
        raise PreconditionFailed(
            "second relation must be the transitive closure of the first"
        )
    reduct_frame = Frame(n, {Atom(base.atoms[0]): r_rel})
    if not base.frame_condition(reduct_frame):
        raise PreconditionFailed(f"reduct violates the frame condition of {base.name}")

    sigma, q_map = fresh_surrogates(gamma)
    variant_valuation = _definable_variant(model, sigma)
    reduct = Model(Frame(n, {box_index: r_rel}), variant_valuation)

    delta = FormulaSet(
        tuple(
            sorted(
                {Var(q) for q in sigma} | {Box(box_index, Var(q)) for q in sigma},
                key=str,
            )
        ),
        closed=True,
    )
    partition = induced_equivalence(reduct, delta)
    k = len(partition)
    mn = min_filtered_relation(reduct, partition, box_index)
    mx = max_filtered_relation(reduct, partition, delta, box_index)
    r_hat = _apply_recipe(base.recipe, mn, mx, k, fmt_index(box_index))
    s_hat = transitive_closure(r_hat, k)

    names = set()
    for f in gamma:
        names |= vars_of(f)
    quotient = Model(
        Frame(k, {box_index: r_hat, plus_index: s_hat}),
        _canonical_valuation(reduct, partition, names),
    )

    through = formula_set(
        list(gamma) + [Box(box_index, f) for f in gamma]
    )
    partition = replace(partition, provenance=Through(through))
    out = FilteredModel(
        quotient=quotient,
        source=model,
        gamma=gamma,
        partition=partition,
        through=through,
        recipe_used=f"transfer({base.name})",
    )
    report = verify_filtration(model, gamma, out)
    if not report.ok:
        raise RecipeViolation(
            "transfer construction failed verification: " + "; ".join(report.problems)
        )
    return out


# ---------------------------------------------------------------------------
# fusion filtration


def fusion_strict_filtration(
    model: Model, gamma: FormulaSet, components: Sequence[LogicSpec]
) -> FilteredModel:
    """Strict filtration of a model over a fusion of base logics.

    Each component filtrates its own reduct through the surrogate set built
    from gamma; the per-component partitions are asserted to coincide with
    the one induced by gamma, and the quotients are assembled on that shared
    world set.
    """
    gamma = ensure_closed(gamma)
    seen_atoms: set[str] = set()
    for comp in components:
        if comp.kind != "base" or comp.recipe is None:
            raise UnsupportedLogic(f"component {comp.name} has no strict-filtration recipe")
        overlap = seen_atoms & set(comp.atoms)
        if overlap:
            raise AlphabetClash(f"components share atoms {sorted(overlap)}")
        seen_atoms |= set(comp.atoms)

    n = model.world_count
    for comp in components:
        reduct = Frame(n, {Atom(a): relation_of(model.frame, Atom(a)) for a in comp.atoms})
        if not comp.frame_condition(reduct):
            raise PreconditionFailed(f"frame violates the condition of component {comp.name}")

    sigma, q_map = fresh_surrogates(gamma)
    variant_valuation = _definable_variant(model, sigma)

    partition = induced_equivalence(model, gamma)
    k = len(partition)
    relations: dict[IndexTerm, Relation] = {}
    for comp in components:
        terms = [Atom(a) for a in comp.atoms]
        gamma_i_elems = {Var(q) for q in sigma}
        for t in terms:
            for f in gamma:
                if isinstance(f, Box) and f.index == t:
                    gamma_i_elems.add(Box(t, Var(q_map[f.body])))
        gamma_i = FormulaSet(tuple(sorted(gamma_i_elems, key=str)), closed=True)
        reduct = Model(
            Frame(n, {t: relation_of(model.frame, t) for t in terms}), variant_valuation
        )
        partition_i = induced_equivalence(reduct, gamma_i)
        if partition_i.class_of != partition.class_of:
            raise EquivalenceMismatch(
                f"surrogate equivalence of component {comp.name} differs from the full one"
            )
        for t in terms:
            mn = min_filtered_relation(reduct, partition_i, t)
            mx = max_filtered_relation(reduct, partition_i, gamma_i, t)
            relations[t] = _apply_recipe(comp.recipe, mn, mx, k, fmt_index(t))

    names = set()
    for f in gamma:
        names |= vars_of(f)
    quotient = Model(Frame(k, relations), _canonical_valuation(model, partition, names))
    out = FilteredModel(
        quotient=quotient,
        source=model,
        gamma=gamma,
        partition=partition,
        through=gamma,
        recipe_used="fusion(" + ",".join(c.name for c in components) + ")",
    )
    report = verify_filtration(model, gamma, out)
    if not report.ok:
        raise RecipeViolation(
            "fusion construction failed verification: " + "; ".join(report.problems)
        )
    quotient_frame = quotient.frame
    for comp in components:
        reduct = Frame(k, {Atom(a): relation_of(quotient_frame, Atom(a)) for a in comp.atoms})
        if not comp.frame_condition(reduct):
            raise RecipeViolation(f"quotient violates the condition of component {comp.name}")
    return out


# ---------------------------------------------------------------------------
# differentiation (quotient by modal equivalence)


@dataclass(frozen=True)
class Differentiation:
    """Modal-equivalence quotient with explicit separating formulas.

    The partition equals agreement on the separator formulas, so any two
    distinct quotient worlds disagree on at least one separator.
    """

    quotient: Model
    partition: Partition
    separators: tuple[Formula, ...]

    def witness(self, a: int, b: int) -> Formula:
        """A separator distinguishing two quotient worlds."""
        if a == b:
            raise ValueError("worlds are equal; nothing separates them")
        for f in self.separators:
            ext = extension(self.quotient, f)
            if (a in ext) != (b in ext):
                return f
        raise AssertionError("quotient worlds are not separated; refinement bug")


def differentiate(model: Model) -> Differentiation:
    """Quotient a finite model by modal equivalence.

    Runs partition refinement: start from agreement on the variables with an
    explicit valuation, then repeatedly split classes by box-prefixed
    descriptions of existing classes until stable.  On finite models the
    result coincides with agreement on all formulas, so the quotient is
    differentiated.
    """
    n = model.world_count
    ev = Evaluator(model.frame)
    val = valuation_masks(model)
    names = sorted(model.valuation)
    separators: list[Formula] = [Var(p) for p in names]
    ext_masks: list[int] = [val.get(p, 0) for p in names]
    terms = sorted(model.frame.relations, key=fmt_index)
    rows_by_term = {t: rel_to_rows(relation_of(model.frame, t), n) for t in terms}

    def labels() -> list[tuple[int, ...]]:
        return [tuple(m >> w & 1 for m in ext_masks) for w in range(n)]

    partition = partition_from_labels(labels())
    while True:
        new_formulas: list[Formula] = []
        new_masks: list[int] = []
        for t in terms:
            rows = rows_by_term[t]
            for members in partition.classes:
                target = set_to_mask(members)
                pre = 0
                for x in range(n):
                    if rows[x] & target:
                        pre |= 1 << x
                splits = any(
                    (cm := set_to_mask(c)) & pre and cm & ~pre for c in partition.classes
                )
                if splits:
                    rep = min(members)
                    literals = [
                        f if m >> rep & 1 else neg(f)
                        for f, m in zip(separators, ext_masks)
                    ]
                    describe = conj_all(literals)
                    new_formulas.append(diamond(t, describe))
                    new_masks.append(pre)
        if not new_formulas:
            break
        separators.extend(new_formulas)
        ext_masks.extend(new_masks)
        partition = partition_from_labels(labels())

    k = len(partition)
    relations = {t: min_filtered_relation(model, partition, t) for t in terms}
    quotient = Model(Frame(k, relations), _canonical_valuation(model, partition, names))
    return Differentiation(quotient=quotient, partition=partition, separators=tuple(separators))


# ---------------------------------------------------------------------------
# induction axiom and minimal filtration


@dataclass(frozen=True)
class InductionMinimalReport:
    """Checks for minimal filtration under the induction axiom."""

    closure_inclusion: bool
    induction_axiom_valid: bool
    quotient_frame: Frame

    @property
    def ok(self) -> bool:
        return self.closure_inclusion and self.induction_axiom_valid


def check_a3_min(
    model: Model,
    phi: FormulaSet,
    box_index: IndexTerm | None = None,
    plus_index: IndexTerm | None = None,
) -> InductionMinimalReport:
    """Minimal filtrated frame of a closure model, against the induction axiom.

    Requires the second relation to be the transitive closure of the first (a
    decidable condition under which every substitution instance of the
    induction axiom holds in the model).  Reports whether the minimal
    filtered closure relation stays inside the closure of the minimal base
    relation, and whether the minimal filtrated frame validates the
    induction axiom.
    """
    if box_index is None:
        box_index = Atom("r")
    if plus_index is None:
        plus_index = Plus(box_index)
    n = model.world_count
    r_rel = relation_of(model.frame, box_index)
    s_rel = relation_of(model.frame, plus_index)
    if s_rel != transitive_closure(r_rel, n):
        raise PreconditionFailed(
            "second relation must be the transitive closure of the first"
        )
    partition = induced_equivalence(model, phi)
    k = len(partition)
    r_min = min_filtered_relation(model, partition, box_index)
    s_min = min_filtered_relation(model, partition, plus_index)
    inclusion = s_min <= transitive_closure(r_min, k)
    quotient = Frame(k, {box_index: r_min, plus_index: s_min})
    _, _, a3 = instantiate_segerberg(box_index, plus_index)
    valid = frame_valid(quotient, a3) is None
    return InductionMinimalReport(
        closure_inclusion=inclusion,
        induction_axiom_valid=valid,
        quotient_frame=quotient,
    )
