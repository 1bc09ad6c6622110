"""Problem documents: strict JSON parsing, canonical serialization, hashing.

Documents carry every scale, map and connective table as data, so the tables
behind an assessment are auditable and overridable per problem. Levels always
serialize as their labels; indices never appear on the wire.
"""

from __future__ import annotations

import hashlib
import json
from importlib import resources
from typing import Any, Mapping, Optional

from .pipeline import (AssessmentProblem, Candidate, Criterion, Expert, Opinion,
                       Options, QptResult, TbmResult, qpt_trace_tables,
                       run_qpt, run_tbm, tbm_trace_tables)
from .scales import ConnectiveTable, OrdinalScale, ScaleError, ScaleMap

FORMAT = "evalfuse-problem/1"
ENGINE_VERSION = "0.1.0"


class ParseError(ValueError):
    """Document rejection, annotated with the JSON path of the offence."""

    def __init__(self, message: str, path: str):
        super().__init__(f"{path or '/'}: {message}")
        self.path = path or "/"


def _check_keys(obj: Mapping, allowed: set[str], required: set[str], path: str) -> None:
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise ParseError(f"unknown field {unknown[0]!r}", f"{path}/{unknown[0]}")
    missing = sorted(required - set(obj))
    if missing:
        raise ParseError(f"missing required field {missing[0]!r}", path)


def _expect(obj: Any, kind: type, what: str, path: str):
    if kind is float:
        if not isinstance(obj, (int, float)) or isinstance(obj, bool):
            raise ParseError(f"expected {what}", path)
        return float(obj)
    if not isinstance(obj, kind) or (kind is not bool and isinstance(obj, bool)):
        raise ParseError(f"expected {what}", path)
    return obj


def parse_problem(doc: Any) -> AssessmentProblem:
    """Turn a JSON document into an immutable problem, rejecting anything odd."""
    root = _expect(doc, dict, "an object", "")
    _check_keys(root, {"format", "name", "scales", "roles", "maps", "connectives",
                       "experts", "criteria", "candidates", "options"},
                {"format", "name", "scales", "roles", "maps", "connectives",
                 "experts", "criteria", "candidates"}, "")
    if root["format"] != FORMAT:
        raise ParseError(f"unsupported format {root['format']!r}", "/format")
    name = _expect(root["name"], str, "a string", "/name")

    scales: dict[str, OrdinalScale] = {}
    for i, s in enumerate(_expect(root["scales"], list, "a list", "/scales")):
        path = f"/scales/{i}"
        _expect(s, dict, "an object", path)
        _check_keys(s, {"name", "labels"}, {"name", "labels"}, path)
        sname = _expect(s["name"], str, "a string", f"{path}/name")
        labels = [_expect(lab, str, "a string", f"{path}/labels")
                  for lab in _expect(s["labels"], list, "a list", f"{path}/labels")]
        if sname in scales:
            raise ParseError(f"duplicate scale {sname!r}", path)
        try:
            scales[sname] = OrdinalScale(sname, tuple(labels))
        except ScaleError as exc:
            raise ParseError(str(exc), path) from exc

    def scale_ref(ref: Any, path: str) -> OrdinalScale:
        sname = _expect(ref, str, "a scale name", path)
        if sname not in scales:
            raise ParseError(f"unknown scale {sname!r}", path)
        return scales[sname]

    roles_obj = _expect(root["roles"], dict, "an object", "/roles")
    _check_keys(roles_obj, set(AssessmentProblem.ROLES),
                set(AssessmentProblem.ROLES), "/roles")
    roles = {}
    for role in AssessmentProblem.ROLES:
        scale_ref(roles_obj[role], f"/roles/{role}")
        roles[role] = roles_obj[role]

    maps: dict[str, ScaleMap] = {}
    for i, m in enumerate(_expect(root["maps"], list, "a list", "/maps")):
        path = f"/maps/{i}"
        _expect(m, dict, "an object", path)
        _check_keys(m, {"name", "from", "to", "table"},
                    {"name", "from", "to", "table"}, path)
        mname = _expect(m["name"], str, "a string", f"{path}/name")
        frm = scale_ref(m["from"], f"{path}/from")
        to = scale_ref(m["to"], f"{path}/to")
        table = _expect(m["table"], dict, "an object", f"{path}/table")
        try:
            maps[mname] = ScaleMap.from_labels(frm, to, table)
        except ScaleError as exc:
            raise ParseError(str(exc), f"{path}/table") from exc
    for required in AssessmentProblem.REQUIRED_MAPS:
        if required not in maps:
            raise ParseError(f"required map {required!r} is not declared", "/maps")

    conn = _expect(root["connectives"], dict, "an object", "/connectives")
    _check_keys(conn, {"otimes", "vtilde", "goodness"},
                {"otimes", "vtilde", "goodness"}, "/connectives")

    def connective(key: str) -> ConnectiveTable:
        path = f"/connectives/{key}"
        c = _expect(conn[key], dict, "an object", path)
        _check_keys(c, {"left", "right", "output", "table"},
                    {"left", "right", "output", "table"}, path)
        try:
            return ConnectiveTable.from_labels(
                key, scale_ref(c["left"], f"{path}/left"),
                scale_ref(c["right"], f"{path}/right"),
                scale_ref(c["output"], f"{path}/output"),
                _expect(c["table"], dict, "an object", f"{path}/table"))
        except ScaleError as exc:
            raise ParseError(str(exc), f"{path}/table") from exc

    otimes = connective("otimes")
    vtilde = connective("vtilde")

    score = scales[roles["score"]]
    goodness: dict[str, tuple[int, ...]] = {}
    gobj = _expect(conn["goodness"], dict, "an object", "/connectives/goodness")
    importance = scales[roles["importance"]]
    for blab, row in gobj.items():
        path = f"/connectives/goodness/{blab}"
        if blab not in importance.labels:
            raise ParseError(f"{blab!r} is not an importance label", path)
        row = _expect(row, list, "a list", path)
        if len(row) != len(score):
            raise ParseError("goodness row must cover every score", path)
        try:
            goodness[blab] = tuple(score.level(_expect(lab, str, "a label", path)).index + 1
                                   for lab in row)
        except ScaleError as exc:
            raise ParseError(str(exc), path) from exc

    reliability = scales[roles["reliability"]]
    experts = []
    for i, e in enumerate(_expect(root["experts"], list, "a list", "/experts")):
        path = f"/experts/{i}"
        _expect(e, dict, "an object", path)
        _check_keys(e, {"name", "reliability"}, {"name", "reliability"}, path)
        ename = _expect(e["name"], str, "a string", f"{path}/name")
        try:
            experts.append(Expert(ename, reliability.level(
                _expect(e["reliability"], str, "a label", f"{path}/reliability"))))
        except ScaleError as exc:
            raise ParseError(str(exc), f"{path}/reliability") from exc

    criteria = []
    for i, c in enumerate(_expect(root["criteria"], list, "a list", "/criteria")):
        path = f"/criteria/{i}"
        _expect(c, dict, "an object", path)
        _check_keys(c, {"name", "importance"}, {"name", "importance"}, path)
        cname = _expect(c["name"], str, "a string", f"{path}/name")
        try:
            criteria.append(Criterion(cname, importance.level(
                _expect(c["importance"], str, "a label", f"{path}/importance"))))
        except ScaleError as exc:
            raise ParseError(str(exc), f"{path}/importance") from exc

    confidence = scales[roles["confidence"]]
    expert_names = {e.name for e in experts}
    criterion_names = {c.name for c in criteria}
    candidates = []
    for i, k in enumerate(_expect(root["candidates"], list, "a list", "/candidates")):
        path = f"/candidates/{i}"
        _expect(k, dict, "an object", path)
        _check_keys(k, {"name", "opinions"}, {"name", "opinions"}, path)
        kname = _expect(k["name"], str, "a string", f"{path}/name")
        opinions: dict[tuple[str, str], Opinion] = {}
        for crit, row in _expect(k["opinions"], dict, "an object",
                                 f"{path}/opinions").items():
            cpath = f"{path}/opinions/{crit}"
            if crit not in criterion_names:
                raise ParseError(f"unknown criterion {crit!r}", cpath)
            for exp, cell in _expect(row, dict, "an object", cpath).items():
                epath = f"{cpath}/{exp}"
                if exp not in expert_names:
                    raise ParseError(f"unknown expert {exp!r}", epath)
                _expect(cell, dict, "an object", epath)
                _check_keys(cell, {"interval", "confidence", "note"},
                            {"interval", "confidence"}, epath)
                interval = None
                if cell["interval"] is not None:
                    pair = _expect(cell["interval"], list, "a label pair or null",
                                   f"{epath}/interval")
                    if len(pair) != 2:
                        raise ParseError("interval must hold two labels",
                                         f"{epath}/interval")
                    try:
                        lo = score.level(_expect(pair[0], str, "a label",
                                                 f"{epath}/interval")).index
                        hi = score.level(_expect(pair[1], str, "a label",
                                                 f"{epath}/interval")).index
                    except ScaleError as exc:
                        raise ParseError(str(exc), f"{epath}/interval") from exc
                    interval = (lo, hi)
                try:
                    conf = confidence.level(_expect(cell["confidence"], str,
                                                    "a label", f"{epath}/confidence"))
                except ScaleError as exc:
                    raise ParseError(str(exc), f"{epath}/confidence") from exc
                note = ""
                if "note" in cell:
                    note = _expect(cell["note"], str, "a string", f"{epath}/note")
                opinions[(crit, exp)] = Opinion(interval, conf, note)
        candidates.append(Candidate(kname, opinions))

    options = Options()
    if "options" in root:
        o = _expect(root["options"], dict, "an object", "/options")
        _check_keys(o, {"fusion", "normalization", "aggregation", "combination",
                        "kernel", "discount_coefficients", "goodness_transfer"},
                    set(), "/options")
        kwargs = {}
        for key in ("fusion", "normalization", "aggregation", "combination",
                    "goodness_transfer"):
            if key in o:
                kwargs[key] = _expect(o[key], str, "a string", f"/options/{key}")
        if "kernel" in o:
            kwargs["kernel"] = tuple(
                _expect(w, float, "a number", "/options/kernel")
                for w in _expect(o["kernel"], list, "a list", "/options/kernel"))
        if "discount_coefficients" in o:
            coeffs = [_expect(w, float, "a number", "/options/discount_coefficients")
                      for w in _expect(o["discount_coefficients"], list, "a list",
                                       "/options/discount_coefficients")]
            if len(coeffs) != 3:
                raise ParseError("three discount coefficients required",
                                 "/options/discount_coefficients")
            kwargs["discount_coefficients"] = tuple(coeffs)
        options = Options(**kwargs)

    return AssessmentProblem(
        scales=scales, roles=roles, maps=maps, otimes=otimes, vtilde=vtilde,
        goodness=goodness, experts=tuple(experts), criteria=tuple(criteria),
        candidates=tuple(candidates), options=options,
    ), name


def serialize_problem(problem: AssessmentProblem, name: str) -> dict:
    """Produce the document form; parse(serialize(p)) == p."""
    score = problem.scale("score")
    conf = problem.scale("confidence")
    return {
        "format": FORMAT,
        "name": name,
        "scales": [{"name": s.name, "labels": list(s.labels)}
                   for s in sorted(problem.scales.values(), key=lambda s: s.name)],
        "roles": dict(problem.roles),
        "maps": [{"name": mname, "from": m.source.name, "to": m.target.name,
                  "table": m.as_label_table()}
                 for mname, m in sorted(problem.maps.items())],
        "connectives": {
            "otimes": _conn_doc(problem.otimes),
            "vtilde": _conn_doc(problem.vtilde),
            "goodness": {blab: [score.labels[y - 1] for y in row]
                         for blab, row in sorted(problem.goodness.items())},
        },
        "experts": [{"name": e.name, "reliability": e.reliability.label}
                    for e in problem.experts],
        "criteria": [{"name": c.name, "importance": c.importance.label}
                     for c in problem.criteria],
        "candidates": [_candidate_doc(k, score) for k in problem.candidates],
        "options": {
            "fusion": problem.options.fusion,
            "normalization": problem.options.normalization,
            "aggregation": problem.options.aggregation,
            "combination": problem.options.combination,
            "kernel": list(problem.options.kernel),
            "discount_coefficients": list(problem.options.discount_coefficients),
            "goodness_transfer": problem.options.goodness_transfer,
        },
    }


def _conn_doc(table: ConnectiveTable) -> dict:
    return {"left": table.left.name, "right": table.right.name,
            "output": table.output.name, "table": table.as_label_table()}


def _candidate_doc(cand: Candidate, score: OrdinalScale) -> dict:
    opinions: dict[str, dict[str, dict]] = {}
    for (crit, exp), cell in sorted(cand.opinions.items()):
        doc: dict[str, Any] = {
            "interval": None if cell.interval is None else
            [score.labels[cell.interval[0]], score.labels[cell.interval[1]]],
            "confidence": cell.confidence.label,
        }
        if cell.note:
            doc["note"] = cell.note
        opinions.setdefault(crit, {})[exp] = doc
    return {"name": cand.name, "opinions": opinions}


def canonical_json(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False) + "\n"


def problem_hash(problem: AssessmentProblem, name: str) -> str:
    payload = canonical_json(serialize_problem(problem, name))
    return "sha256:" + hashlib.sha256(payload.encode("utf-8")).hexdigest()


def round_floats(obj: Any, significant: int = 6) -> Any:
    """Round every float in a report tree to a fixed number of significant digits."""
    if isinstance(obj, float):
        return float(f"{obj:.{significant}g}")
    if isinstance(obj, dict):
        return {k: round_floats(v, significant) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v, significant) for v in obj]
    return obj


def qpt_report(res: QptResult) -> dict:
    return {
        "final": list(res.final.labels()),
        "match_certainty": res.match_certainty.label,
        "match_possibility": res.match_possibility.label,
    }


def tbm_report(res: TbmResult, score: OrdinalScale) -> dict:
    # report masses with the conflict renormalized away, so they are comparable
    # across combination modes; the raw conflict level is reported alongside
    k = res.final.conflict()
    masses = [{"set": [score.labels[x - 1] for x in sorted(s)], "mass": v / (1.0 - k)}
              for s, v in sorted(res.final.masses.items(),
                                 key=lambda kv: (len(kv[0]), sorted(kv[0])))
              if s]
    return {
        "masses": masses,
        "conflict": k,
        "betp": list(res.betp),
        "expected": res.expected,
    }


def build_report(problem: AssessmentProblem, name: str, method: str = "both",
                 trace: bool = False,
                 candidates: Optional[list[str]] = None) -> dict:
    """One report document for both transports; floats at 6 significant digits."""
    methods = ["qpt", "tbm"] if method == "both" else [method]
    score = problem.scale("score")
    wanted = candidates or [k.name for k in problem.candidates]
    out_candidates: dict[str, dict] = {}
    for kname in wanted:
        entry: dict[str, Any] = {}
        traces: dict[str, Any] = {}
        if "qpt" in methods:
            res = run_qpt(problem, kname)
            entry["qpt"] = qpt_report(res)
            if trace:
                traces["qpt"] = qpt_trace_tables(res)
        if "tbm" in methods:
            res = run_tbm(problem, kname)
            entry["tbm"] = tbm_report(res, score)
            if trace:
                traces["tbm"] = tbm_trace_tables(res)
        if trace:
            entry["trace"] = traces
        out_candidates[kname] = entry
    report = {
        "engine_version": ENGINE_VERSION,
        "problem_name": name,
        "problem_hash": problem_hash(problem, name),
        "methods": methods,
        "score_labels": list(score.labels),
        "candidates": out_candidates,
    }
    return round_floats(report)


def diagnostics_doc(diags) -> list[dict]:
    return [{"severity": d.severity, "code": d.code, "message": d.message,
             "location": d.location} for d in diags]


def load_document(path: str) -> Any:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def load_problem(path: str) -> tuple[AssessmentProblem, str]:
    return parse_problem(load_document(path))


def fixture_path(name: str = "hiring_panel") -> str:
    """Filesystem path of a bundled example problem."""
    return str(resources.files("evalfuse.fixtures").joinpath(f"{name}.json"))
