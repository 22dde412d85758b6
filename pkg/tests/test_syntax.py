"""Formula/index parsing, printing, closure, substitution, axiom schemas."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from filtrakit.errors import ParseError, UnknownIndexSymbol
from filtrakit.syntax import (
    Atom,
    BOT,
    Box,
    Comp,
    Implies,
    Plus,
    TOP,
    Union,
    Var,
    apply_substitution,
    compose_substitutions,
    conj,
    diamond,
    fmt_formula,
    formula_set,
    fresh_surrogates,
    instantiate_segerberg,
    neg,
    parse_formula,
    parse_index,
    pdl_axioms,
    sub_closure,
    vars_of,
)

R = Atom("r")
S = Atom("s")
P = Var("p")
Q = Var("q")


class TestParsing:
    def test_diamond_desugars(self):
        assert parse_formula("[r]p -> <r>p") == Implies(Box(R, P), neg(Box(R, neg(P))))

    def test_induction_axiom_shape(self):
        _, _, a3 = instantiate_segerberg(R, Plus(R))
        assert parse_formula("[r+](p -> [r]p) -> ([r]p -> [r+]p)") == a3

    def test_composite_index_under_closure(self):
        assert parse_formula("[(r;s)+]p") == Box(Plus(Comp(R, S)), P)

    def test_hash_sugar_unimodal(self):
        assert parse_formula("#p") == Box(Plus(R), P)
        assert parse_formula("#p", plus_atom="s") == Box(Plus(S), P)

    def test_connective_precedence(self):
        assert parse_formula("~p & q | p -> q") == Implies(
            disj := parse_formula("(~p & q) | p"), Q
        )
        assert disj == parse_formula("~p & q | p")

    def test_implication_right_associative(self):
        assert parse_formula("p -> q -> p") == Implies(P, Implies(Q, P))

    def test_index_precedence(self):
        assert parse_index("r;s|r+") == Union(Comp(R, S), Plus(R))
        assert parse_index("r;(s|r)+") == Comp(R, Plus(Union(S, R)))

    def test_top_and_bot(self):
        assert parse_formula("top") == TOP
        assert parse_formula("bot") == BOT

    def test_syntax_error_carries_position(self):
        with pytest.raises(ParseError) as err:
            parse_formula("p -> ]")
        assert err.value.position == 5

    def test_unknown_index_symbol(self):
        with pytest.raises(UnknownIndexSymbol):
            parse_formula("[t]p", alphabet=["r", "s"])
        parse_formula("[t]p")  # unrestricted signature accepts it


class TestSubClosure:
    def test_closure_modality(self):
        gamma = sub_closure([Box(Plus(R), P)])
        assert set(gamma) == {Box(Plus(R), P), P}

    def test_boxed_implication(self):
        gamma = sub_closure([Box(R, Implies(P, Q))])
        assert set(gamma) == {Box(R, Implies(P, Q)), Implies(P, Q), P, Q}

    def test_empty(self):
        assert len(sub_closure([])) == 0

    def test_idempotent_and_flagged(self):
        gamma = sub_closure([conj(P, Box(R, Q))])
        assert gamma.closed
        assert sub_closure(gamma) == gamma

    def test_monotone(self):
        small = sub_closure([P])
        large = sub_closure([P, Box(R, Q)])
        assert set(small) <= set(large)


class TestSubstitution:
    def test_into_box(self):
        assert apply_substitution(Box(R, P), {"p": conj(Q, Var("r0"))}) == Box(
            R, conj(Q, Var("r0"))
        )

    def test_to_falsum(self):
        assert apply_substitution(Implies(P, P), {"p": BOT}) == Implies(BOT, BOT)

    def test_induction_axiom_instance(self):
        _, _, a3 = instantiate_segerberg(R, Plus(R))
        phi = conj(P, Q)
        instance = apply_substitution(a3, {"p": phi})
        assert instance == Implies(
            Box(Plus(R), Implies(phi, Box(R, phi))),
            Implies(Box(R, phi), Box(Plus(R), phi)),
        )

    def test_identity(self):
        f = parse_formula("[r](p -> q) & <r>p")
        assert apply_substitution(f, {}) == f


class TestFreshSurrogates:
    def test_deterministic_naming(self):
        gamma = sub_closure([Box(Plus(R), P)])
        sigma, q_map = fresh_surrogates(gamma)
        assert q_map == {Box(Plus(R), P): "q0", P: "q1"}
        assert sigma == {"q0": Box(Plus(R), P), "q1": P}

    def test_empty(self):
        sigma, q_map = fresh_surrogates(sub_closure([]))
        assert sigma == {} and q_map == {}

    def test_skips_clashing_names(self):
        gamma = sub_closure([Var("q0")])
        sigma, q_map = fresh_surrogates(gamma)
        assert q_map == {Var("q0"): "q1"}

    def test_rejects_unclosed_sets(self):
        with pytest.raises(ValueError):
            fresh_surrogates(formula_set([Box(R, P)]))

    def test_surrogate_roundtrip(self):
        rng = random.Random(11)
        from conftest import rand_gamma

        for _ in range(50):
            gamma = rand_gamma(rng, 4)
            sigma, q_map = fresh_surrogates(gamma)
            for f in gamma:
                assert apply_substitution(Var(q_map[f]), sigma) == f


class TestAxiomSchemas:
    def test_unimodal_closure_pair(self):
        a1, a2, a3 = instantiate_segerberg(R, Plus(R))
        assert a1 == parse_formula("[r+]p -> [r]p")
        assert a2 == parse_formula("[r+]p -> [r][r+]p")
        assert a3 == parse_formula("[r+](p -> [r]p) -> ([r]p -> [r+]p)")

    def test_two_atoms(self):
        a1, _, _ = instantiate_segerberg(R, S)
        assert a1 == parse_formula("[s]p -> [r]p")

    def test_composite_index(self):
        a1, _, _ = instantiate_segerberg(Comp(R, S), Plus(Comp(R, S)))
        assert a1 == parse_formula("[(r;s)+]p -> [r;s]p")

    def test_pdl_axiom_counts(self):
        assert len(pdl_axioms(["r"])) == 5
        assert len(pdl_axioms(["r", "s"])) == 14  # 4 union + 4 composition + 6 closure
        assert len(pdl_axioms([])) == 0


# ---------------------------------------------------------------------------
# properties


def _formulas(depth=4):
    index = st.deferred(
        lambda: st.one_of(
            st.sampled_from([R, S]),
            st.builds(Comp, index, index),
            st.builds(Union, index, index),
            st.builds(Plus, index),
        )
    )
    return st.recursive(
        st.one_of(st.just(BOT), st.builds(Var, st.sampled_from(["p", "q", "x1"]))),
        lambda inner: st.one_of(
            st.builds(Implies, inner, inner), st.builds(Box, index, inner)
        ),
        max_leaves=12,
    )


def _rand_index(rng, depth):
    if depth <= 0 or rng.random() < 0.4:
        return rng.choice([R, S])
    kind = rng.randrange(3)
    if kind == 0:
        return Comp(_rand_index(rng, depth - 1), _rand_index(rng, depth - 1))
    if kind == 1:
        return Union(_rand_index(rng, depth - 1), _rand_index(rng, depth - 1))
    return Plus(_rand_index(rng, depth - 1))


def _rand_ast(rng, depth):
    if depth <= 0 or rng.random() < 0.25:
        return rng.choice([BOT, P, Q, Var("x1")])
    if rng.random() < 0.5:
        return Implies(_rand_ast(rng, depth - 1), _rand_ast(rng, depth - 1))
    return Box(_rand_index(rng, 3), _rand_ast(rng, depth - 1))


def test_print_parse_roundtrip_thousand_asts():
    rng = random.Random(2024)
    for _ in range(1000):
        f = _rand_ast(rng, 5)
        assert parse_formula(fmt_formula(f)) == f


@settings(max_examples=100, deadline=None)
@given(_formulas())
def test_print_parse_roundtrip(f):
    assert parse_formula(fmt_formula(f)) == f


@settings(max_examples=60, deadline=None)
@given(_formulas(), _formulas())
def test_sub_closure_monotone(f, g):
    assert set(sub_closure([f])) <= set(sub_closure([f, g]))


@settings(max_examples=60, deadline=None)
@given(_formulas())
def test_substitution_composition(f):
    sigma = {"p": conj(Q, BOT), "q": Box(R, P)}
    tau = {"p": neg(P), "x1": diamond(R, Q)}
    once = apply_substitution(apply_substitution(f, sigma), tau)
    composed = apply_substitution(f, compose_substitutions(tau, sigma))
    assert once == composed


@settings(max_examples=60, deadline=None)
@given(_formulas())
def test_vars_are_subformulas(f):
    assert {Var(name) for name in vars_of(f)} <= set(sub_closure([f]))
