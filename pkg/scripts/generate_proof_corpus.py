#!/usr/bin/env python3
"""Regenerate the shipped proof corpus under src/filtrakit/proofs/.

The scripts are built with ProofBuilder so every derived step (chaining,
monotonicity, contraposition, duality) is expanded into primitive lines, then
pruned to the ancestors of the final theorem.
"""

from __future__ import annotations

import json
from pathlib import Path

from filtrakit.hilbert import ProofBuilder, check_proof, proof_to_obj
from filtrakit.logics import parse_logic
from filtrakit.syntax import Atom, Box, Formula, Implies, Plus, Var, conj, diamond, neg

R = Atom("r")
PL = Plus(R)
P = Var("p")

OUT_DIR = Path(__file__).resolve().parent.parent / "src" / "filtrakit" / "proofs"


def closure_intro_rule() -> dict:
    """From the premise p -> [r]p, derive p -> [r+]p step by step."""
    b = ProofBuilder(parse_logic("K+"))
    prem = b.premise(Implies(P, Box(R, P)))
    boxed = b.nec(prem, PL)
    a3 = b.axiom("A3(r)")
    step = b.mp(a3, boxed)
    final = b.chain(prem, step)
    return proof_to_obj(b.prune(final))


def strengthened_induction_lines(b: ProofBuilder, target: Formula) -> int:
    """Derive [r]A & [r+][r]A -> [r+]A: the induction schema with its
    conditional premise strengthened to an outright box."""
    box_t = Box(R, target)
    weaken = b.taut(Implies(box_t, Implies(target, box_t)))
    mono = b.mono_box(PL, weaken)
    a3 = b.axiom("A3(r)", {"p": target})
    chained = b.chain(mono, a3)
    conclusion = Implies(conj(box_t, Box(PL, box_t)), Box(PL, target))
    shuffle = b.taut(Implies(b.lines[chained].formula, conclusion))
    return b.mp(shuffle, chained)


def strengthened_induction() -> dict:
    b = ProofBuilder(parse_logic("K+"))
    final = strengthened_induction_lines(b, P)
    return proof_to_obj(b.prune(final))


def diamond_exchange_lines(b: ProofBuilder, phi: Formula) -> int:
    """Derive <r>[r+]phi -> [r+]<r>phi in any convergent closure logic."""
    # push the diamond through the first axiom and the convergence axiom
    a1 = b.axiom("A1(r)", {"p": phi})
    da1 = b.mono_dia(R, a1)
    cr1 = b.axiom("2(r)", {"p": phi})
    a = b.chain(da1, cr1)  # <r>[r+]phi -> [r][r]... -> [r]<r>phi
    # the same for the unfolding axiom, then close
    a2 = b.axiom("A2(r)", {"p": phi})
    da2 = b.mono_dia(R, a2)
    cr2 = b.axiom("2(r)", {"p": Box(PL, phi)})
    preb = b.chain(da2, cr2)  # <r>[r+]phi -> [r]<r>[r+]phi
    rb = b.rboxplus(preb)  # <r>[r+]phi -> [r+]<r>[r+]phi
    mono = b.mono_box(PL, a)
    bb = b.chain(rb, mono)  # <r>[r+]phi -> [r+][r]<r>phi
    strengthened = strengthened_induction_lines(b, diamond(R, phi))
    pair = b.pair_under(a, bb)
    return b.chain(pair, strengthened)


def diamond_closure_exchange() -> dict:
    b = ProofBuilder(parse_logic("K.2+"))
    final = diamond_exchange_lines(b, P)
    return proof_to_obj(b.prune(final))


def dual_exchange_lines(b: ProofBuilder, phi: Formula) -> int:
    """Derive <r+>[r]phi -> [r]<r+>phi by dualizing the diamond exchange
    at ~phi (explicit contraposition; the checker has no duality rule)."""
    t1 = diamond_exchange_lines(b, neg(phi))  # <r>[r+]~phi -> [r+]<r>~phi
    e1 = b.contrapose(t1)
    dn = b.taut(Implies(phi, neg(neg(phi))))
    mono_r = b.mono_box(R, dn)
    flip = b.contrapose(mono_r)  # <r>~phi -> ~[r]phi
    mono_plus = b.mono_box(PL, flip)
    entry = b.contrapose(mono_plus)  # <r+>[r]phi -> ~[r+]<r>~phi
    joined = b.chain(entry, e1)  # <r+>[r]phi -> ~~[r]<r+>phi
    target = Box(R, diamond(PL, phi))
    undouble = b.taut(Implies(neg(neg(target)), target))
    return b.chain(joined, undouble)


def convergence_closure() -> dict:
    """The closure diamond exchanges with the closure box on convergent
    frames: <r+>[r+]p -> [r+]<r+>p, via the dualized basic exchange."""
    b = ProofBuilder(parse_logic("K.2+"))
    a1 = b.axiom("A1(r)")
    da1 = b.mono_dia(PL, a1)  # <r+>[r+]p -> <r+>[r]p
    d1 = dual_exchange_lines(b, P)
    a = b.chain(da1, d1)  # <r+>[r+]p -> [r]<r+>p
    a2 = b.axiom("A2(r)")
    da2 = b.mono_dia(PL, a2)  # <r+>[r+]p -> <r+>[r][r+]p
    d2 = dual_exchange_lines(b, Box(PL, P))
    preb = b.chain(da2, d2)  # <r+>[r+]p -> [r]<r+>[r+]p
    rb = b.rboxplus(preb)
    mono = b.mono_box(PL, a)
    bb = b.chain(rb, mono)  # <r+>[r+]p -> [r+][r]<r+>p
    strengthened = strengthened_induction_lines(b, diamond(PL, P))
    pair = b.pair_under(a, bb)
    final = b.chain(pair, strengthened)
    return proof_to_obj(b.prune(final))


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    corpus = {
        "closure_intro_rule": closure_intro_rule(),
        "strengthened_induction": strengthened_induction(),
        "diamond_closure_exchange": diamond_closure_exchange(),
        "convergence_closure": convergence_closure(),
    }
    from filtrakit.hilbert import proof_from_obj

    for name, obj in corpus.items():
        script = proof_from_obj(obj)
        result = check_proof(script)
        status = "ok" if result.ok else f"FAILED at line {result.first_failure()}"
        print(f"{name}: {len(script.lines)} lines, {status} — {script.theorem}")
        if not result.ok:
            for i, line_result in enumerate(result.line_results):
                if not line_result.ok:
                    print(f"  line {i}: {script.lines[i].formula} [{script.lines[i].rule}] -> {line_result.reason}")
            raise SystemExit(1)
        path = OUT_DIR / f"{name}.json"
        path.write_text(json.dumps(obj, indent=1, sort_keys=False) + "\n")
        print(f"  wrote {path}")


if __name__ == "__main__":
    main()
