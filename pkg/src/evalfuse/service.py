"""HTTP service over the assessment engines.

One engine, two transports: every payload here is exactly what the CLI emits
for the same snapshot. The store is a directory of problem documents; writes
are atomic whole-file replacements and evaluations run on immutable parses.
"""

from __future__ import annotations

import json
import os
import re
import tempfile
from typing import Any, Optional

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import pipeline, problemfile
from .pipeline import EvaluationError, ProblemError
from .problemfile import ENGINE_VERSION, ParseError

_ID = re.compile(r"^[A-Za-z0-9_-]{1,64}$")


class AssessRequest(BaseModel):
    method: str = "both"
    candidate: Optional[str] = None
    trace: bool = False


class SensitivityRequest(BaseModel):
    target: str
    values: list[Any]
    candidate: Optional[str] = None
    method: str = "both"


class Override(BaseModel):
    target: str
    value: Any = None


class WhatIfRequest(BaseModel):
    overrides: list[Override] = Field(default_factory=list)
    method: str = "both"
    candidate: Optional[str] = None
    trace: bool = False
    base_hash: Optional[str] = None


def _error(status: int, code: str, message: str, **extra) -> JSONResponse:
    body = {"error": {"code": code, "message": message, **extra}}
    return JSONResponse(status_code=status, content=body)


def report_deltas(base: Any, overlaid: Any, path: str = "") -> list[dict]:
    """Leaf-level differences between two report trees."""
    if isinstance(base, dict) and isinstance(overlaid, dict):
        out = []
        for key in sorted(set(base) | set(overlaid)):
            out.extend(report_deltas(base.get(key), overlaid.get(key),
                                     f"{path}/{key}"))
        return out
    if isinstance(base, list) and isinstance(overlaid, list) and \
            len(base) == len(overlaid):
        out = []
        for i, (b, o) in enumerate(zip(base, overlaid)):
            out.extend(report_deltas(b, o, f"{path}/{i}"))
        return out
    if base != overlaid:
        return [{"path": path, "before": base, "after": overlaid}]
    return []


class ProblemStore:
    """Directory of problem documents, one JSON file per id."""

    def __init__(self, root: str):
        self.root = root
        os.makedirs(root, exist_ok=True)

    def _path(self, pid: str) -> str:
        if not _ID.match(pid):
            raise ProblemError(f"invalid problem id {pid!r}")
        return os.path.join(self.root, f"{pid}.json")

    def ids(self) -> list[str]:
        return sorted(os.path.splitext(f)[0] for f in os.listdir(self.root)
                      if f.endswith(".json"))

    def load(self, pid: str):
        path = self._path(pid)
        if not os.path.exists(path):
            return None
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)

    def save(self, pid: str, doc: Any) -> None:
        path = self._path(pid)
        fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(problemfile.canonical_json(doc))
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


def create_app(store_root: str) -> FastAPI:
    app = FastAPI(title="evalfuse", version=ENGINE_VERSION)
    store = ProblemStore(store_root)

    def _parse(pid: str):
        doc = store.load(pid)
        if doc is None:
            return None, _error(404, "unknown-problem", f"no problem {pid!r}")
        try:
            problem, name = problemfile.parse_problem(doc)
        except ParseError as exc:
            return None, _error(422, "invalid-problem", str(exc))
        return (problem, name), None

    @app.get("/v1/problems")
    def list_problems():
        out = []
        for pid in store.ids():
            try:
                problem, name = problemfile.parse_problem(store.load(pid))
                out.append({"id": pid, "name": name,
                            "hash": problemfile.problem_hash(problem, name)})
            except ParseError:
                out.append({"id": pid, "name": None, "hash": None})
        return {"engine_version": ENGINE_VERSION, "problems": out}

    @app.get("/v1/problems/{pid}")
    def get_problem(pid: str):
        parsed, failure = _parse(pid)
        if failure:
            return failure
        problem, name = parsed
        return {"engine_version": ENGINE_VERSION,
                "problem_hash": problemfile.problem_hash(problem, name),
                "document": store.load(pid)}

    @app.put("/v1/problems/{pid}")
    def put_problem(pid: str, doc: dict):
        try:
            problem, name = problemfile.parse_problem(doc)
        except ParseError as exc:
            return _error(422, "invalid-problem", str(exc))
        diags = pipeline.validate(problem)
        if any(d.severity == "error" for d in diags):
            return _error(422, "invalid-problem", "validation failed",
                          diagnostics=problemfile.diagnostics_doc(diags))
        try:
            store.save(pid, doc)
        except ProblemError as exc:
            return _error(400, "invalid-id", str(exc))
        return {"engine_version": ENGINE_VERSION,
                "problem_hash": problemfile.problem_hash(problem, name),
                "diagnostics": problemfile.diagnostics_doc(diags)}

    @app.post("/v1/problems/{pid}/assess")
    def assess(pid: str, req: AssessRequest):
        parsed, failure = _parse(pid)
        if failure:
            return failure
        problem, name = parsed
        candidates = [req.candidate] if req.candidate else None
        try:
            return problemfile.build_report(problem, name, req.method,
                                            trace=req.trace, candidates=candidates)
        except EvaluationError as exc:
            return _error(422, "evaluation-failed", str(exc),
                          operation=exc.operation, coordinate=exc.coordinate)
        except ProblemError as exc:
            return _error(400, "bad-request", str(exc))

    @app.post("/v1/problems/{pid}/sensitivity")
    def run_sensitivity(pid: str, req: SensitivityRequest):
        parsed, failure = _parse(pid)
        if failure:
            return failure
        problem, name = parsed
        candidate = req.candidate or problem.candidates[0].name
        try:
            rows = pipeline.sensitivity(problem, candidate, req.target,
                                        req.values, req.method)
        except EvaluationError as exc:
            return _error(422, "evaluation-failed", str(exc),
                          operation=exc.operation, coordinate=exc.coordinate)
        except ProblemError as exc:
            return _error(400, "bad-coordinate", str(exc))
        return problemfile.round_floats({
            "engine_version": ENGINE_VERSION,
            "problem_hash": problemfile.problem_hash(problem, name),
            "candidate": candidate,
            "target": req.target,
            "rows": [{"value": r.value, "deltas": list(r.deltas),
                      "changed_tables": list(r.changed_tables),
                      "decision_changed": r.decision_changed,
                      "errors": [{"method": m, "message": msg}
                                     for m, msg in r.errors]} for r in rows],
        })

    @app.post("/v1/problems/{pid}/whatif")
    def whatif(pid: str, req: WhatIfRequest):
        parsed, failure = _parse(pid)
        if failure:
            return failure
        problem, name = parsed
        base_hash = problemfile.problem_hash(problem, name)
        if req.base_hash is not None and req.base_hash != base_hash:
            return _error(409, "stale-snapshot",
                          "the stored problem changed under this session",
                          problem_hash=base_hash)
        overlaid_problem = problem
        try:
            for ov in req.overrides:
                overlaid_problem = pipeline.apply_override(overlaid_problem,
                                                           ov.target, ov.value)
        except ProblemError as exc:
            return _error(400, "bad-override", str(exc))
        candidates = [req.candidate] if req.candidate else None
        try:
            base = problemfile.build_report(problem, name, req.method,
                                            trace=req.trace, candidates=candidates)
            overlaid = problemfile.build_report(overlaid_problem, name, req.method,
                                                trace=req.trace, candidates=candidates)
        except EvaluationError as exc:
            return _error(422, "evaluation-failed", str(exc),
                          operation=exc.operation, coordinate=exc.coordinate)
        deltas = report_deltas(base["candidates"], overlaid["candidates"])
        return {
            "engine_version": ENGINE_VERSION,
            "problem_hash": base_hash,
            "base": base,
            "overlaid": overlaid,
            "deltas": deltas,
        }

    @app.get("/v1/problems/{pid}/trace/{method}/{candidate}/{table}")
    def get_trace(pid: str, method: str, candidate: str, table: str):
        parsed, failure = _parse(pid)
        if failure:
            return failure
        problem, name = parsed
        try:
            if method == "qpt":
                tables = pipeline.qpt_trace_tables(pipeline.run_qpt(problem, candidate))
            elif method == "tbm":
                tables = pipeline.tbm_trace_tables(pipeline.run_tbm(problem, candidate))
            else:
                return _error(400, "bad-request", f"unknown method {method!r}")
        except EvaluationError as exc:
            return _error(422, "evaluation-failed", str(exc),
                          operation=exc.operation, coordinate=exc.coordinate)
        except ProblemError as exc:
            return _error(400, "bad-request", str(exc))
        if table not in tables:
            return _error(404, "unknown-table",
                          f"no trace table {table!r}; have {sorted(tables)}")
        return problemfile.round_floats({
            "engine_version": ENGINE_VERSION,
            "problem_hash": problemfile.problem_hash(problem, name),
            "method": method, "candidate": candidate, "table": table,
            "data": tables[table],
        })

    return app
