"""Workbench for finite Kripke semantics: filtrations, transitive-closure
modalities, PDL-style expansions, bounded decision, and proof checking."""

from .syntax import (
    Atom,
    BOT,
    Box,
    Bot,
    Comp,
    Formula,
    FormulaSet,
    Implies,
    IndexTerm,
    Plus,
    TOP,
    Union,
    Var,
    apply_substitution,
    conj,
    conj_all,
    diamond,
    disj,
    fmt_formula,
    fmt_index,
    formula_set,
    fresh_surrogates,
    iff,
    instantiate_segerberg,
    neg,
    parse_formula,
    parse_index,
    pdl_axioms,
    sub_closure,
    vars_of,
)
from .semantics import (
    Counterexample,
    Evaluator,
    Frame,
    Model,
    check_convergence,
    enumerate_frames,
    expand_plus,
    expand_sharp,
    extension,
    frame_from_obj,
    frame_to_obj,
    frame_valid,
    fuse_frames,
    fuse_models,
    iterate_sharp,
    model_from_obj,
    model_to_obj,
    model_valid,
    relation_of,
    transitive_closure,
    truth,
)
from .logics import LogicSpec, base_logic, fusion_logic, parse_logic, plus_logic, sharp_logic
from .filtration import (
    Differentiation,
    FilteredModel,
    Partition,
    VerificationReport,
    build_filtration,
    check_a3_min,
    compose_partitions,
    differentiate,
    fusion_strict_filtration,
    induced_equivalence,
    max_filtered_relation,
    min_filtered_relation,
    transclosure_filtration,
    verify_filtration,
    verify_filtration_lemma,
)
from .decision import (
    CompactnessWitness,
    DecisionResult,
    compactness_demo,
    completeness_bound,
    decide_sat,
    decide_validity,
)

__version__ = "0.1.0"
