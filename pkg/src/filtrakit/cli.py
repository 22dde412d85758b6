"""Command-line front end.

Exit status: 0 success/verified, 1 refuted or counterexample found (artifact
on stdout), 2 usage error, 3 search cap exceeded.  Identical invocations
produce byte-identical stdout; ``--json`` switches to machine-readable
output.  The environment variable FILTRAKIT_CAP overrides the enumeration
caps (adjacency bits, and two to that power for valuation counts).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from . import demo as demo_mod
from .decision import decide_sat, decide_validity
from .errors import CapExceeded, FiltrakitError, ParseError, SizeCap
from .filtration import (
    build_filtration,
    differentiate,
    fusion_strict_filtration,
    transclosure_filtration,
    verify_filtration,
    verify_filtration_lemma,
)
from .hilbert import check_proof, proof_from_obj, soundness_spotcheck
from .logics import parse_logic
from .mfp import fo_eval, is_strong_onto_hom, mfp_member, parse_fo
from .semantics import (
    Model,
    expand_plus,
    frame_from_obj,
    frame_to_obj,
    frame_valid,
    fuse_models,
    iterate_sharp,
    model_from_obj,
    model_to_obj,
    truth,
)
from .syntax import fmt_formula, parse_formula, parse_index, sub_closure

CAP_ENV = "FILTRAKIT_CAP"


def _caps() -> tuple[int, int]:
    raw = os.environ.get(CAP_ENV)
    if raw is None:
        from .semantics import DEFAULT_ENUMERATION_BITS, DEFAULT_VALUATION_CAP

        return DEFAULT_ENUMERATION_BITS, DEFAULT_VALUATION_CAP
    bits = int(raw)
    return bits, 1 << bits


def _emit(args, obj: dict, text: str) -> None:
    if args.json:
        print(json.dumps(obj, indent=2, sort_keys=True))
    else:
        print(text)


def _load_json(path: str) -> dict:
    with open(path) as handle:
        return json.load(handle)


def _gamma_from_arg(raw: str):
    formulas = [parse_formula(part.strip()) for part in raw.split(",") if part.strip()]
    return sub_closure(formulas)


def _filtered_obj(fm) -> dict:
    out = model_to_obj(fm.quotient)
    out["classes"] = [sorted(c) for c in fm.partition.classes]
    out["gamma"] = [fmt_formula(f) for f in fm.gamma]
    out["through"] = [fmt_formula(f) for f in fm.through] if fm.through is not None else None
    out["recipe"] = fm.recipe_used
    return out


# ---------------------------------------------------------------------------
# subcommands


def _cmd_parse(args) -> int:
    formula = parse_formula(args.formula, alphabet=args.alphabet.split(",") if args.alphabet else None)
    _emit(args, {"formula": fmt_formula(formula)}, fmt_formula(formula))
    return 0


def _cmd_mc(args) -> int:
    model = model_from_obj(_load_json(args.model))
    formula = parse_formula(args.formula)
    value = truth(model, args.world, formula)
    _emit(args, {"world": args.world, "truth": value}, f"{'true' if value else 'false'} at world {args.world}")
    return 0 if value else 1


def _cmd_frame_valid(args) -> int:
    frame = frame_from_obj(_load_json(args.frame))
    formula = parse_formula(args.formula)
    _, valuation_cap = _caps()
    cex = frame_valid(frame, formula, valuation_cap)
    if cex is None:
        _emit(args, {"valid": True}, "VALID on the frame")
        return 0
    obj = {
        "valid": False,
        "valuation": {p: sorted(ws) for p, ws in sorted(cex.valuation.items())},
        "world": cex.world,
    }
    _emit(args, obj, f"counterexample: valuation {obj['valuation']} fails at world {cex.world}")
    return 1


def _cmd_filtrate(args) -> int:
    model = model_from_obj(_load_json(args.model))
    gamma = _gamma_from_arg(args.gamma)
    if args.recipe:
        fm = build_filtration(model, gamma, args.recipe)
    else:
        logic = parse_logic(args.logic)
        if logic.kind == "base":
            fm = build_filtration(model, gamma, logic.recipe)
        elif logic.kind == "plus":
            fm = transclosure_filtration(model, gamma, logic.base)
        elif logic.kind == "fusion":
            fm = fusion_strict_filtration(model, gamma, logic.components)
        else:
            raise FiltrakitError(f"no filtration pipeline for {logic.name}")
    report = verify_filtration(model, gamma, fm)
    lemma = verify_filtration_lemma(model, gamma, fm)
    obj = _filtered_obj(fm)
    obj["verification"] = {
        "quotient_well_formed": report.quotient_well_formed,
        "respects_gamma": report.respects_gamma,
        "valuation_canonical": report.valuation_canonical,
        "relation_bounds": {
            str(t): [mn, mx] for t, mn, mx in report.relation_bounds
        },
        "ok": report.ok,
        "truth_transfer": lemma,
    }
    text = (
        f"filtrated into {fm.quotient.world_count} classes with recipe {fm.recipe_used}; "
        f"verification {'passed' if report.ok and lemma else 'FAILED'}"
    )
    _emit(args, obj, text + ("\n" + json.dumps(obj, indent=2, sort_keys=True) if not args.json else ""))
    return 0 if report.ok and lemma else 1


def _cmd_expand(args) -> int:
    obj = _load_json(args.frame)
    is_model = "valuation" in obj
    value = model_from_obj(obj) if is_model else frame_from_obj(obj)
    frame = value.frame if is_model else value
    if args.mode == "plus":
        frame = expand_plus(frame, parse_index(args.index))
    else:
        frame = iterate_sharp(frame, args.n)
    out = model_to_obj(Model(frame, value.valuation)) if is_model else frame_to_obj(frame)
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def _cmd_fuse(args) -> int:
    models = [model_from_obj(_load_json(path)) for path in args.files]
    fused = fuse_models(models)
    print(json.dumps(model_to_obj(fused), indent=2, sort_keys=True))
    return 0


def _cmd_decide(args) -> int:
    logic = parse_logic(args.logic)
    formula = parse_formula(args.formula)
    cap_bits, valuation_cap = _caps()
    result = decide_validity(formula, logic, args.max_size, cap_bits, valuation_cap, args.jobs)
    if result.verdict == "valid":
        tag = "complete" if result.complete else "incomplete"
        _emit(
            args,
            {"verdict": "valid", "searched_up_to": result.searched_up_to, "complete": result.complete},
            f"VALID (searched ≤{result.searched_up_to}, {tag})",
        )
        return 0
    obj = {
        "verdict": "refuted",
        "size": result.searched_up_to,
        "world": result.world,
        "countermodel": model_to_obj(result.model),
    }
    _emit(args, obj, "REFUTED\n" + json.dumps(obj, indent=2, sort_keys=True))
    return 1


def _cmd_sat(args) -> int:
    logic = parse_logic(args.logic)
    formula = parse_formula(args.formula)
    cap_bits, valuation_cap = _caps()
    result = decide_sat(formula, logic, args.max_size, cap_bits, valuation_cap, args.jobs)
    if result.verdict == "sat":
        obj = {
            "verdict": "sat",
            "size": result.searched_up_to,
            "world": result.world,
            "model": model_to_obj(result.model),
        }
        _emit(args, obj, "SATISFIABLE\n" + json.dumps(obj, indent=2, sort_keys=True))
        return 0
    tag = "complete" if result.complete else "incomplete"
    _emit(
        args,
        {"verdict": "unsat", "searched_up_to": result.searched_up_to, "complete": result.complete},
        f"UNSAT (searched ≤{result.searched_up_to}, {tag})",
    )
    return 1


def _cmd_mfp(args) -> int:
    sentence = parse_fo(args.sentence)
    if args.mode == "member":
        member = mfp_member(sentence)
        _emit(args, {"member": member}, "member" if member else "not a member")
        return 0 if member else 1
    if not args.frame:
        raise FiltrakitError("eval mode needs --frame")
    frame = frame_from_obj(_load_json(args.frame))
    value = fo_eval(frame, sentence)
    _emit(args, {"truth": value}, "true" if value else "false")
    return 0 if value else 1


def _cmd_hom_check(args) -> int:
    source = frame_from_obj(_load_json(args.source))
    target = frame_from_obj(_load_json(args.target))
    mapping = [0] * source.world_count
    for part in args.map.split(","):
        src, dst = part.split(":")
        mapping[int(src)] = int(dst)
    check = is_strong_onto_hom(source, target, mapping, parse_index(args.index))
    obj = {"ok": check.ok, "failed": check.failed, "witness": list(check.witness) if check.witness else None}
    _emit(args, obj, "strong onto homomorphism" if check.ok else f"fails {check.failed} at {check.witness}")
    return 0 if check.ok else 1


def _cmd_differentiate(args) -> int:
    model = model_from_obj(_load_json(args.model))
    result = differentiate(model)
    obj = model_to_obj(result.quotient)
    obj["classes"] = [sorted(c) for c in result.partition.classes]
    obj["separators"] = [fmt_formula(f) for f in result.separators]
    print(json.dumps(obj, indent=2, sort_keys=True))
    return 0


def _cmd_proof(args) -> int:
    script = proof_from_obj(_load_json(args.file))
    result = check_proof(script)
    lines = [{"line": i, "ok": r.ok, "reason": r.reason} for i, r in enumerate(result.line_results)]
    if args.spotcheck and result.ok:
        spot = soundness_spotcheck(script, max_frame_size=args.spotcheck)
        spot_obj = {"ok": spot.ok, "frames_checked": spot.frames_checked}
    else:
        spot_obj = None
    obj = {"ok": result.ok, "lines": lines, "spotcheck": spot_obj}
    if args.json:
        print(json.dumps(obj, indent=2, sort_keys=True))
    else:
        for entry in lines:
            status = "ok" if entry["ok"] else f"FAIL ({entry['reason']})"
            print(f"line {entry['line']}: {status}")
        print("proof checks" if result.ok else "proof REJECTED")
        if spot_obj:
            print(f"spot-check: {'ok' if spot_obj['ok'] else 'FAILED'} on {spot_obj['frames_checked']} frames")
    return 0 if result.ok else 1


def _cmd_demo(args) -> int:
    name = args.name
    if name == "segerberg-table":
        table = demo_mod.segerberg_table()
        obj = {
            "frames_checked": table.frames_checked,
            "containment": table.containment,
            "unfolding": table.unfolding,
            "exact_closure": table.exact_closure,
            "one_way_above_closure": table.one_way_above_closure,
            "one_way_below_closure": table.one_way_below_closure,
            "converse_above_witness": repr(table.converse_above_witness),
            "converse_below_witness": repr(table.converse_below_witness),
            "ok": table.ok,
        }
        text = "\n".join(
            [
                f"two-relation frames checked: {table.frames_checked}",
                f"first axiom valid iff S contains R: {table.containment}",
                f"second axiom valid iff S contains R;S: {table.unfolding}",
                f"all three valid iff S = R+: {table.exact_closure}",
                f"first two imply S above R+: {table.one_way_above_closure} "
                f"(converse fails at {table.converse_above_witness})",
                f"induction axiom implies S below R+: {table.one_way_below_closure} "
                f"(converse fails at {table.converse_below_witness})",
            ]
        )
        _emit(args, obj, text)
        return 0 if table.ok else 1
    if name == "compactness":
        witnesses = demo_mod.compactness_witnesses()
        obj = {"fragments": []}
        lines = []
        for w in witnesses:
            entry = {
                "formulas": [fmt_formula(f) for f in w.formulas],
                "model": model_to_obj(w.model),
                "world": w.world,
            }
            obj["fragments"].append(entry)
            lines.append(
                f"{{{', '.join(entry['formulas'])}}} satisfied at world {w.world} "
                f"of a {w.model.world_count}-world closure model"
            )
        _emit(args, obj, "\n".join(lines))
        return 0
    if name == "proof-corpus":
        reports = demo_mod.proof_corpus_demo()
        obj = {"proofs": []}
        lines = []
        ok = True
        for rep in reports:
            ok = ok and rep.checks and rep.spotcheck.ok
            obj["proofs"].append(
                {
                    "name": rep.name,
                    "lines": rep.lines,
                    "checks": rep.checks,
                    "spotcheck_ok": rep.spotcheck.ok,
                    "frames_checked": rep.spotcheck.frames_checked,
                    "theorem": rep.theorem,
                }
            )
            lines.append(
                f"{rep.name}: {rep.lines} lines, checks={rep.checks}, "
                f"spot-check={rep.spotcheck.ok} on {rep.spotcheck.frames_checked} frames — {rep.theorem}"
            )
        _emit(args, obj, "\n".join(lines))
        return 0 if ok else 1
    raise FiltrakitError(f"unknown demo {name!r}")


# ---------------------------------------------------------------------------
# argument parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="filtrakit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(fn=fn)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        return p

    p = add("parse", _cmd_parse, help="parse a formula and print its canonical form")
    p.add_argument("formula")
    p.add_argument("--alphabet", help="comma-separated atomic index symbols")

    p = add("mc", _cmd_mc, help="truth of a formula at a world of a model")
    p.add_argument("model")
    p.add_argument("world", type=int)
    p.add_argument("formula")

    p = add("frame-valid", _cmd_frame_valid, help="validity on a frame over all valuations")
    p.add_argument("frame")
    p.add_argument("formula")

    p = add("filtrate", _cmd_filtrate, help="filtrate a model and verify the result")
    p.add_argument("model")
    p.add_argument("--gamma", required=True, help="comma-separated formulas (closed under subformulas)")
    p.add_argument("--logic", default="K", help="logic identifier selecting the pipeline")
    p.add_argument("--recipe", choices=("minimal", "closure_of_minimal", "maximal"))

    p = add("expand", _cmd_expand, help="materialize closure or composite relations")
    p.add_argument("mode", choices=("plus", "sharp"))
    p.add_argument("frame", help="frame or model JSON file")
    p.add_argument("--index", default="r", help="index to close (plus mode)")
    p.add_argument("--n", type=int, default=1, help="expansion levels (sharp mode)")

    p = add("fuse", _cmd_fuse, help="fuse models with disjoint alphabets")
    p.add_argument("files", nargs="+")

    p = add("decide", _cmd_decide, help="bounded validity over logic frames")
    p.add_argument("formula")
    p.add_argument("--logic", required=True)
    p.add_argument("--max-size", type=int, default=4)
    p.add_argument("--jobs", type=int, default=1)

    p = add("sat", _cmd_sat, help="bounded satisfiability over logic frames")
    p.add_argument("formula")
    p.add_argument("--logic", required=True)
    p.add_argument("--max-size", type=int, default=4)
    p.add_argument("--jobs", type=int, default=1)

    p = add("mfp", _cmd_mfp, help="preserved-fragment membership / evaluation")
    p.add_argument("mode", choices=("member", "eval"))
    p.add_argument("sentence")
    p.add_argument("--frame", help="frame JSON file (eval mode)")

    p = add("hom-check", _cmd_hom_check, help="strong onto homomorphism check")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--map", required=True, help="world map as src:dst,src:dst,...")
    p.add_argument("--index", default="r")

    p = add("differentiate", _cmd_differentiate, help="quotient by modal equivalence")
    p.add_argument("model")

    p = add("proof", _cmd_proof, help="check a proof script")
    p.add_argument("action", choices=("check",))
    p.add_argument("file")
    p.add_argument("--spotcheck", type=int, default=0, help="also spot-check on frames up to this size")

    p = add("demo", _cmd_demo, help="run a shipped demonstration")
    p.add_argument("name", choices=("segerberg-table", "compactness", "proof-corpus"))

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (CapExceeded, SizeCap) as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return 3
    except (ParseError, FiltrakitError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
