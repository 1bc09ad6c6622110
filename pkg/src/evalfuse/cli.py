"""Command line front end: assess, rank, sensitivity, validate, serve."""

from __future__ import annotations

import argparse
import json
import sys

from . import pipeline, problemfile
from .pipeline import EvaluationError, ProblemError
from .problemfile import ParseError, canonical_json


def _load(path: str):
    try:
        return problemfile.load_problem(path)
    except (OSError, json.JSONDecodeError) as exc:
        _fail(f"cannot read problem file: {exc}")
    except ParseError as exc:
        _fail(f"invalid problem file: {exc}")


def _fail(message: str, code: int = 2):
    print(message, file=sys.stderr)
    raise SystemExit(code)


def _gate_on_errors(problem, name):
    diags = pipeline.validate(problem)
    errors = [d for d in diags if d.severity == "error"]
    if errors:
        for d in errors:
            print(f"error [{d.code}] {d.location}: {d.message}", file=sys.stderr)
        raise SystemExit(2)
    return diags


def _emit(doc, output):
    payload = canonical_json(doc)
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


def cmd_assess(args) -> int:
    problem, name = _load(args.input)
    _gate_on_errors(problem, name)
    candidates = [args.candidate] if args.candidate else None
    try:
        report = problemfile.build_report(problem, name, args.method,
                                          trace=args.trace, candidates=candidates)
    except (EvaluationError, ProblemError) as exc:
        _fail(f"evaluation failed: {exc}")
    _emit(report, args.output)
    return 0


def cmd_rank(args) -> int:
    problem, name = _load(args.input)
    _gate_on_errors(problem, name)
    method = args.method if args.method != "both" else "tbm"
    try:
        entries = pipeline.rank_candidates(problem, method)
    except (EvaluationError, ProblemError) as exc:
        _fail(f"ranking failed: {exc}")
    doc = problemfile.round_floats({
        "engine_version": problemfile.ENGINE_VERSION,
        "problem_name": name,
        "problem_hash": problemfile.problem_hash(problem, name),
        "method": method,
        "ranking": [_rank_doc(e) for e in entries],
    })
    _emit(doc, args.output)
    return 0


def _rank_doc(e: pipeline.RankEntry) -> dict:
    doc = {"candidate": e.candidate}
    if e.method == "tbm":
        doc.update(expected=e.expected, top_betp=e.top_betp)
    else:
        doc.update(nec_dominance=e.nec_dominance, poss_dominance=e.poss_dominance,
                   match_certainty=e.match_certainty,
                   match_possibility=e.match_possibility)
    return doc


def cmd_sensitivity(args) -> int:
    problem, name = _load(args.input)
    _gate_on_errors(problem, name)
    candidate = args.candidate or problem.candidates[0].name
    values = json.loads(args.values)
    if not isinstance(values, list):
        _fail("--values must be a JSON list")
    try:
        rows = pipeline.sensitivity(problem, candidate, args.target, values,
                                    args.method)
    except (EvaluationError, ProblemError) as exc:
        _fail(f"sensitivity failed: {exc}")
    doc = problemfile.round_floats({
        "engine_version": problemfile.ENGINE_VERSION,
        "problem_name": name,
        "problem_hash": problemfile.problem_hash(problem, name),
        "candidate": candidate,
        "target": args.target,
        "rows": [{"value": r.value, "deltas": list(r.deltas),
                  "changed_tables": list(r.changed_tables),
                  "decision_changed": r.decision_changed,
                  "errors": [{"method": m, "message": msg}
                             for m, msg in r.errors]} for r in rows],
    })
    _emit(doc, args.output)
    return 0


def cmd_validate(args) -> int:
    problem, name = _load(args.input)
    diags = pipeline.validate(problem)
    doc = {
        "engine_version": problemfile.ENGINE_VERSION,
        "problem_name": name,
        "problem_hash": problemfile.problem_hash(problem, name),
        "diagnostics": problemfile.diagnostics_doc(diags),
    }
    _emit(doc, args.output)
    return 2 if any(d.severity == "error" for d in diags) else 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app
    app = create_app(args.store)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="evalfuse",
        description="Fuse imprecise, confidence-weighted expert opinions into "
                    "candidate evaluations")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("assess", help="run the engines on a problem file")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-m", "--method", choices=["qpt", "tbm", "both"], default="both")
    p.add_argument("--trace", action="store_true",
                   help="include intermediate tables in the report")
    p.add_argument("--candidate", help="restrict to one candidate")
    p.add_argument("-o", "--output", help="write the report here instead of stdout")
    p.set_defaults(func=cmd_assess)

    p = sub.add_parser("rank", help="order the candidates")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-m", "--method", choices=["qpt", "tbm"], default="tbm")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("sensitivity", help="sweep one parameter and diff the outputs")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--target", required=True,
                   help="coordinate such as beta:Com or gamma:K:Dec:HR")
    p.add_argument("--values", required=True, help="JSON list of sweep values")
    p.add_argument("-m", "--method", choices=["qpt", "tbm", "both"], default="both")
    p.add_argument("--candidate")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("validate", help="check a problem file and print diagnostics")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8575)
    p.add_argument("--store", required=True, help="directory holding problem documents")
    p.set_defaults(func=cmd_serve)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
