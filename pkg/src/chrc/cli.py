"""Command-line front end.

Subcommands: ``run`` (drive a derivation and print the trace),
``analyze`` (divergence or termination-existence decision with a
replayable witness), ``bound`` (print the symbol-universe parameters and
the completeness cap), ``classify`` (dialect flags), ``corpus``
(differential testing against the exhaustive oracle), and the hidden
``verify`` (replay a witness file and re-check its claim).

Exit codes: 0 decided/completed, 1 usage or input error, 2 undecided
(search exhausted below the complete bound), 3 precondition violation
(wrong dialect for the requested analysis).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from . import decide, oracle
from .engine import OMEGA_O, OMEGA_T, computation_to_json, replay, run
from .forest import build_forest
from .syntax import (
    ParseError,
    classify,
    goal_to_text,
    parse_goal,
    parse_program,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_UNDECIDED = 2
EXIT_PRECONDITION = 3


def _emit(data: dict, as_json: bool, lines: list) -> None:
    if as_json:
        print(json.dumps(data, sort_keys=True, indent=2))
    else:
        for line in lines:
            print(line)


def _load(args) -> tuple:
    try:
        with open(args.program, encoding="utf-8") as handle:
            program = parse_program(handle.read())
    except OSError as exc:
        print(f"error: cannot read {args.program}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)
    except ParseError as exc:
        print(f"{args.program}:{exc.line}:{exc.col}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)
    goal = ()
    if getattr(args, "goal", None):
        try:
            goal = parse_goal(args.goal, program)
        except ParseError as exc:
            print(f"goal:{exc.line}:{exc.col}: {exc}", file=sys.stderr)
            raise SystemExit(EXIT_USAGE)
    return program, goal


def _cmd_classify(args) -> int:
    program, _ = _load(args)
    flags = classify(program)
    data = {
        "command": "classify",
        "range_restricted": flags.range_restricted,
        "single_headed": flags.single_headed,
        "propositional": flags.propositional,
    }
    _emit(
        data,
        args.json,
        [
            f"range-restricted: {flags.range_restricted}",
            f"single-headed: {flags.single_headed}",
            f"propositional: {flags.propositional}",
        ],
    )
    return EXIT_OK


def _cmd_bound(args) -> int:
    program, goal = _load(args)
    params = decide.bound_parameters(program, goal)
    cap_o = decide.effective_cap(program, goal, OMEGA_O)
    cap_t = decide.effective_cap(program, goal, OMEGA_T)
    data = {
        "command": "bound",
        "u": params.u,
        "w": params.w,
        "r": params.r,
        "L": str(decide.bound_L(params.u, params.w)),
        "cap_abstract": str(cap_o),
        "cap_theoretical": str(cap_t),
    }
    _emit(
        data,
        args.json,
        [
            f"u = {params.u}",
            f"w = {params.w}",
            f"r = {params.r}",
            f"L = {data['L']}",
            f"cap (abstract semantics) = {data['cap_abstract']}",
            f"cap (theoretical semantics) = {data['cap_theoretical']}",
        ],
    )
    return EXIT_OK


def _cmd_run(args) -> int:
    program, goal = _load(args)
    comp = run(
        program,
        goal,
        sem=args.semantics,
        strategy="random" if args.seed is not None else "first",
        max_steps=args.max_steps,
        seed=args.seed,
    )
    replay(comp)
    data = {"command": "run", "trace": computation_to_json(comp)}
    lines = [f"initial goal: {goal_to_text(goal)}"]
    for label, config in comp.steps:
        lines.append(f"  {label.kind}: {config}")
    lines.append(f"final: {comp.ends_final()}")
    if args.emit_forest and comp.ends_final():
        forest = build_forest(comp)
        data["forest"] = forest.to_json()
        lines.append(forest.to_text())
    _emit(data, args.json, lines)
    return EXIT_OK


def _cmd_analyze(args) -> int:
    program, goal = _load(args)
    if args.analysis == "divergence":
        try:
            verdict = decide.decide_divergence(program, goal)
        except decide.NotRangeRestricted as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_PRECONDITION
        data = {"command": "analyze", **decide.divergence_to_json(verdict)}
        _emit(data, args.json, [f"result: {verdict.result}"])
        return EXIT_OK
    cap: Optional[int] = args.cap
    if args.complete:
        cap = decide.effective_cap(program, goal, args.semantics)
    try:
        verdict = decide.decide_termination_existence(
            program, goal, sem=args.semantics, cap=cap
        )
    except decide.NotSingleHeaded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    data = {"command": "analyze", **decide.termination_to_json(verdict)}
    lines = [f"result: {verdict.result} (cap {verdict.cap_used})"]
    if args.emit_forest and verdict.witness is not None:
        forest = build_forest(verdict.witness)
        data["forest"] = forest.to_json()
        lines.append(forest.to_text())
    _emit(data, args.json, lines)
    return EXIT_UNDECIDED if verdict.result == "ExhaustedAtCap" else EXIT_OK


def _cmd_corpus(args) -> int:
    report = oracle.differential_corpus(args.count, seed=args.seed or 0, kind=args.kind)
    data = {"command": "corpus", **report}
    _emit(
        data,
        args.json,
        [
            f"instances: {report['instances']} (skipped {report['skipped']})",
            f"divergence checked: {report['divergence_checked']}",
            f"termination checked: {report['termination_checked']}",
            f"mismatches: {len(report['mismatches'])}",
        ],
    )
    return EXIT_OK if not report["mismatches"] else EXIT_USAGE


def _cmd_verify(args) -> int:
    program, goal = _load(args)
    try:
        with open(args.witness, encoding="utf-8") as handle:
            data = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read witness: {exc}", file=sys.stderr)
        return EXIT_USAGE
    from .engine import Computation, apply_transition, initial_configuration
    from .engine import label_from_json

    trace = data.get("witness", {}).get("trace", data.get("trace"))
    if trace is None:
        print("error: no trace in witness file", file=sys.stderr)
        return EXIT_USAGE
    sem = trace["semantics"]
    config = initial_configuration(goal, sem)
    steps = []
    try:
        for entry in trace["steps"]:
            label = label_from_json(entry)
            config = apply_transition(program, config, label, sem)
            steps.append((label, config))
    except Exception as exc:
        print(f"verify: replay failed: {exc}", file=sys.stderr)
        return EXIT_USAGE
    comp = Computation(program, sem, initial_configuration(goal, sem), steps)
    if data.get("analysis") == "divergence":
        witness = data["witness"]
        macro_idx = witness["macro_step_indices"]
        anc = witness["ancestor_index"]
        comp.truncated = True
        dw = decide.DivergenceWitness(comp, tuple(macro_idx), anc)
        ok = decide.verify_divergence_witness(program, goal, dw)
    else:
        ok = decide.verify_termination_witness(program, goal, sem, comp)
    print("verified" if ok else "NOT verified")
    return EXIT_OK if ok else EXIT_USAGE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chrc",
        description="Run and analyze constraint-handling-rule programs "
        "over constants.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, goal_required=False):
        p.add_argument("--program", required=True, help="path to a .chr file")
        p.add_argument("--goal", required=goal_required, default="", help="goal text")
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("classify", help="print dialect flags")
    p.add_argument("--program", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("bound", help="print bound parameters and caps")
    common(p)
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("run", help="drive one derivation")
    common(p, goal_required=True)
    p.add_argument("--semantics", choices=["o", "t"], default=OMEGA_O)
    p.add_argument("--max-steps", type=int, default=1000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--emit-forest", action="store_true")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("analyze", help="decide divergence or termination")
    common(p, goal_required=True)
    p.add_argument(
        "--analysis", choices=["divergence", "termination"], required=True
    )
    p.add_argument("--semantics", choices=["o", "t"], default=OMEGA_O)
    p.add_argument("--cap", type=int, default=None)
    p.add_argument("--complete", action="store_true", help="search to the full bound")
    p.add_argument("--emit-forest", action="store_true")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("corpus", help="differential testing against the oracle")
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kind", choices=["ground", "propositional"], default="ground")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_corpus)

    p = sub.add_parser("verify")  # hidden from help text by omitting help=
    common(p, goal_required=True)
    p.add_argument("--witness", required=True, help="verdict JSON file")
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
