"""Frames, models, relation algebra, truth, validity, expansions, fusion."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import rand_relation
from filtrakit.errors import (
    AlphabetClash,
    CapExceeded,
    SizeCap,
    UninterpretedIndex,
    WorldCountMismatch,
)
from filtrakit.semantics import (
    Counterexample,
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
from filtrakit.syntax import (
    Atom,
    Box,
    Comp,
    Plus,
    Union,
    Var,
    instantiate_segerberg,
    parse_formula,
)

R = Atom("r")
S = Atom("s")
P = Var("p")


def chain_closure_model(valuation):
    frame = Frame(3, {"r": [(0, 1), (1, 2)], "r+": [(0, 1), (1, 2), (0, 2)]})
    return Model(frame, valuation)


class TestTransitiveClosure:
    def test_chain(self):
        assert transitive_closure({(0, 1), (1, 2)}, 3) == {(0, 1), (1, 2), (0, 2)}

    def test_empty(self):
        assert transitive_closure(set(), 3) == frozenset()

    def test_loop_fixed(self):
        assert transitive_closure({(0, 0)}, 1) == {(0, 0)}

    def test_cycle(self):
        full = {(i, j) for i in range(2) for j in range(2)}
        assert transitive_closure({(0, 1), (1, 0)}, 2) == full


class TestRelationOf:
    def test_composition(self):
        frame = Frame(3, {"r": [(0, 1)], "s": [(1, 2)]})
        assert relation_of(frame, Comp(R, S)) == {(0, 2)}

    def test_union(self):
        frame = Frame(3, {"r": [(0, 1)], "s": [(1, 2)]})
        assert relation_of(frame, Union(R, S)) == {(0, 1), (1, 2)}

    def test_explicit_entry_shadows_composition(self):
        # explicit entry deliberately disagrees with the compositional value
        frame = Frame(3, {"r": [(0, 1)], "s": [(1, 2)], "r;s": [(2, 2)]})
        assert relation_of(frame, Comp(R, S)) == {(2, 2)}

    def test_explicit_atom_verbatim(self):
        frame = Frame(2, {"r": [(0, 1)], "s": [(1, 1)]})
        assert relation_of(frame, S) == {(1, 1)}

    def test_uninterpreted_atom(self):
        frame = Frame(2, {"r": [(0, 1)]})
        with pytest.raises(UninterpretedIndex):
            relation_of(frame, Atom("t"))
        with pytest.raises(UninterpretedIndex):
            relation_of(frame, Comp(R, Atom("t")))


class TestTruth:
    def test_box_with_successor(self):
        model = Model(Frame(2, {"r": [(0, 1)]}), {"p": [1]})
        assert truth(model, 0, parse_formula("[r]p"))

    def test_box_vacuous(self):
        model = Model(Frame(2, {"r": [(0, 1)]}), {"p": [1]})
        assert truth(model, 1, parse_formula("[r]p"))

    def test_closure_box_sees_two_steps(self):
        model = chain_closure_model({"p": [1]})
        assert not truth(model, 0, parse_formula("[r+]p"))

    def test_propagates_uninterpreted(self):
        model = Model(Frame(2, {"r": [(0, 1)]}), {})
        with pytest.raises(UninterpretedIndex):
            truth(model, 0, parse_formula("[s]p"))


class TestModelValid:
    def test_tautology_on_reflexive_point(self):
        model = Model(Frame(1, {"r": [(0, 0)]}), {})
        assert model_valid(model, parse_formula("p -> p"))

    def test_containment_axiom_on_closure_model(self):
        model = chain_closure_model({"p": [1]})
        assert model_valid(model, parse_formula("[r+]p -> [r]p"))

    def test_converse_fails_on_chain(self):
        model = chain_closure_model({"p": [1]})
        formula = parse_formula("[r]p -> [r+]p")
        assert not model_valid(model, formula)
        assert not truth(model, 0, formula)


class TestFrameValid:
    def test_counterexample_with_empty_second_relation(self):
        frame = Frame(2, {"r": [(0, 1)], "s": []})
        a1, _, _ = instantiate_segerberg(R, S)
        assert frame_valid(frame, a1) == Counterexample({"p": frozenset()}, 0)

    def test_closure_frames_validate_all_three(self):
        rng = random.Random(5)
        for _ in range(25):
            n = rng.randint(1, 4)
            rel = rand_relation(rng, n)
            frame = Frame(n, {R: rel, Plus(R): transitive_closure(rel, n)})
            for axiom in instantiate_segerberg(R, Plus(R)):
                assert frame_valid(frame, axiom) is None

    def test_induction_axiom_counterexample_frozen(self):
        frame = Frame(3, {"r": [(0, 1), (1, 2)], "s": [(0, 2)]})
        _, _, a3 = instantiate_segerberg(R, S)
        assert frame_valid(frame, a3) == Counterexample({"p": frozenset({1})}, 0)

    def test_cap(self):
        frame = Frame(3, {"r": []})
        with pytest.raises(CapExceeded):
            frame_valid(frame, parse_formula("p -> q"), valuation_cap=60)


class TestExpansions:
    def test_expand_plus_adds_entry(self):
        frame = Frame(3, {"r": [(0, 1), (1, 2)]})
        expanded = expand_plus(frame, R)
        assert relation_of(expanded, Plus(R)) == {(0, 1), (1, 2), (0, 2)}

    def test_expand_plus_idempotent(self):
        frame = Frame(3, {"r": [(0, 1), (1, 2)]})
        once = expand_plus(frame, R)
        assert expand_plus(once, R) == once

    def test_expand_plus_overwrites_stale_entry(self):
        frame = Frame(2, {"r": [(0, 1)], "r+": [(1, 1)]})
        assert relation_of(expand_plus(frame, R), Plus(R)) == {(0, 1)}

    def test_expand_sharp_term_count(self):
        frame = Frame(2, {"r": [(0, 1)]})
        expanded = expand_sharp(frame)
        assert set(expanded.relations) == {R, Comp(R, R), Union(R, R), Plus(R)}

    def test_iterate_zero_is_identity(self):
        frame = Frame(2, {"r": [(0, 1)]})
        assert iterate_sharp(frame, 0) == frame

    def test_self_union_is_identity(self):
        frame = Frame(2, {"r": [(0, 1)]})
        assert relation_of(expand_sharp(frame), Union(R, R)) == {(0, 1)}

    def test_size_cap(self):
        frame = Frame(2, {"r": [(0, 1)]})
        with pytest.raises(SizeCap):
            iterate_sharp(frame, 3, term_cap=100)

    def test_sharp_consistency_with_compositional_reading(self):
        rng = random.Random(12)
        for _ in range(20):
            n = rng.randint(1, 4)
            frame = Frame(n, {R: rand_relation(rng, n), S: rand_relation(rng, n)})
            expanded = expand_sharp(frame)
            for t in expanded.relations:
                assert relation_of(expanded, t) == relation_of(frame, t)


class TestFusion:
    def test_bimodal_fusion(self):
        one = Frame(2, {"r": [(0, 0), (1, 1), (0, 1)]})
        two = Frame(2, {"s": [(0, 0), (1, 1), (0, 1), (1, 0)]})
        fused = fuse_frames([one, two])
        assert set(fused.relations) == {R, S}

    def test_single_input_identity(self):
        frame = Frame(2, {"r": [(0, 1)]})
        assert fuse_frames([frame]) == frame

    def test_alphabet_clash(self):
        with pytest.raises(AlphabetClash):
            fuse_frames([Frame(2, {"r": []}), Frame(2, {"r": [(0, 1)]})])

    def test_world_count_mismatch(self):
        with pytest.raises(WorldCountMismatch):
            fuse_frames([Frame(2, {"r": []}), Frame(3, {"s": []})])

    def test_fuse_models_merges_valuations(self):
        one = Model(Frame(2, {"r": []}), {"p": [0]})
        two = Model(Frame(2, {"s": []}), {"q": [1]})
        fused = fuse_models([one, two])
        assert fused.valuation == {"p": frozenset({0}), "q": frozenset({1})}


class TestEnumeration:
    def test_one_world_single_index(self):
        assert sum(1 for _ in enumerate_frames(1, [R])) == 2

    def test_two_worlds_single_index(self):
        assert sum(1 for _ in enumerate_frames(2, [R])) == 16

    def test_three_worlds_two_indices(self):
        assert sum(1 for _ in enumerate_frames(3, [R, S], cap_bits=18)) == 2**18

    def test_deterministic_order(self):
        frames = list(enumerate_frames(2, [R]))
        assert frames[0].relations[R] == frozenset()
        assert frames[-1].relations[R] == {(0, 0), (0, 1), (1, 0), (1, 1)}
        assert frames[1].relations[R] == {(1, 1)}  # least significant bit last

    def test_cap(self):
        with pytest.raises(CapExceeded):
            next(enumerate_frames(3, [R, S], cap_bits=17))


class TestConvergence:
    def test_empty_vacuous(self):
        assert check_convergence(set(), 3)

    def test_unjoined_fork(self):
        assert not check_convergence({(0, 1), (0, 2)}, 4)

    def test_joined_fork(self):
        assert check_convergence({(0, 1), (0, 2), (1, 3), (2, 3), (3, 3)}, 4)

    def test_dead_end_successor_refutes(self):
        # a successor without successors fails the literal condition
        assert not check_convergence({(0, 1)}, 2)


class TestJson:
    def test_model_roundtrip(self):
        model = chain_closure_model({"p": [1, 2]})
        assert model_from_obj(model_to_obj(model)) == model

    def test_frame_roundtrip_with_composite_keys(self):
        frame = Frame(2, {"r": [(0, 1)], "(r;r)+": [(0, 0)]})
        assert frame_from_obj(frame_to_obj(frame)) == frame

    def test_pairs_sorted(self):
        obj = frame_to_obj(Frame(2, {"r": [(1, 0), (0, 1)]}))
        assert obj["relations"]["r"] == [[0, 1], [1, 0]]


class TestFrameValidation:
    def test_nonempty(self):
        with pytest.raises(ValueError):
            Frame(0, {})

    def test_bounds(self):
        with pytest.raises(ValueError):
            Frame(2, {"r": [(0, 2)]})
        with pytest.raises(ValueError):
            Model(Frame(2, {"r": []}), {"p": [5]})


# ---------------------------------------------------------------------------
# properties

_relations = st.integers(min_value=0, max_value=2**9 - 1).map(
    lambda code: frozenset(
        (i, j) for i in range(3) for j in range(3) if code >> (3 * i + j) & 1
    )
)


@settings(max_examples=200, deadline=None)
@given(_relations)
def test_closure_properties(rel):
    closed = transitive_closure(rel, 3)
    assert rel <= closed
    assert transitive_closure(closed, 3) == closed
    for x, y in closed:
        for y2, z in closed:
            if y == y2:
                assert (x, z) in closed


@settings(max_examples=200, deadline=None)
@given(_relations, _relations)
def test_closure_monotone(a, b):
    assert transitive_closure(a, 3) <= transitive_closure(a | b, 3)


@settings(max_examples=300, deadline=None)
@given(_relations)
def test_convergence_preserved_by_closure(rel):
    if check_convergence(rel, 3):
        assert check_convergence(transitive_closure(rel, 3), 3)


def test_expanded_frame_validates_expanded_axioms_iff_base_does():
    # finite-scale reading of: a frame validates the base logic iff its
    # closure expansion validates the closure extension
    from filtrakit.logics import base_logic, plus_logic, sharp_logic

    for base_id in ("K", "T", "K4", "S4", "S5"):
        base = base_logic(base_id)
        plus = plus_logic(base)
        for n in (1, 2, 3):
            for frame in enumerate_frames(n, [R]):
                base_ok = all(frame_valid(frame, f) is None for f in base.axioms())
                expanded = expand_plus(frame, R)
                plus_ok = all(frame_valid(expanded, f) is None for f in plus.axioms())
                assert base_ok == plus_ok

    sharp = sharp_logic(base_logic("K"), 1)
    for n in (1, 2):
        for frame in enumerate_frames(n, [R]):
            expanded = expand_sharp(frame)
            assert all(frame_valid(expanded, f) is None for f in sharp.axioms())
