"""Problem model and orchestration of the two assessment engines.

An AssessmentProblem is an immutable snapshot: scales, maps and connective
tables are data, opinions are per candidate x criterion x expert, and the
options block selects engine behaviour. Evaluations never mutate the problem.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Optional, Sequence

from . import belief, possibility
from .belief import MassFunction, ObservationKernel
from .possibility import PossibilityDistribution
from .scales import ConnectiveTable, Level, OrdinalScale, ScaleMap


class ProblemError(ValueError):
    """Structurally invalid problem."""


class EvaluationError(RuntimeError):
    """Engine failure, annotated with the operation and coordinate."""

    def __init__(self, operation: str, coordinate: str, message: str):
        super().__init__(f"{operation} at {coordinate}: {message}")
        self.operation = operation
        self.coordinate = coordinate


@dataclass(frozen=True)
class Expert:
    name: str
    reliability: Level  # on the reliability scale


@dataclass(frozen=True)
class Criterion:
    name: str
    importance: Level  # on the importance scale


@dataclass(frozen=True)
class Opinion:
    """One expert's statement on one criterion: interval plus self-confidence.

    The interval holds 0-based score indices; None means no statement, which
    both engines read as the full interval. A note travels with the cell and
    is surfaced by the validator.
    """

    interval: Optional[tuple[int, int]]
    confidence: Level  # on the confidence scale
    note: str = ""


@dataclass(frozen=True)
class Candidate:
    name: str
    opinions: Mapping[tuple[str, str], Opinion]  # (criterion, expert) -> cell


@dataclass(frozen=True)
class Options:
    fusion: str = "disjunctive"              # or "conjunctive-min"
    normalization: str = "shift"             # or "preserve-bottom"
    aggregation: str = "lift"                # or "threshold"
    combination: str = "unnormalized"        # or "dempster"
    kernel: tuple[float, ...] = (1.0, 0.5)
    discount_coefficients: tuple[float, float, float] = (0.95, 0.75, 0.25)
    goodness_transfer: str = "image"         # or "hull"


@dataclass(frozen=True)
class AssessmentProblem:
    scales: Mapping[str, OrdinalScale]       # by name
    roles: Mapping[str, str]                 # role -> scale name
    maps: Mapping[str, ScaleMap]             # by name; three are required
    otimes: ConnectiveTable
    vtilde: ConnectiveTable
    goodness: Mapping[str, tuple[int, ...]]  # importance label -> 1-based scores
    experts: tuple[Expert, ...]
    criteria: tuple[Criterion, ...]
    candidates: tuple[Candidate, ...]
    options: Options = Options()

    ROLES = ("score", "possibility", "confidence", "reliability", "importance")
    REQUIRED_MAPS = ("confidence_to_possibility", "importance_to_score",
                     "score_to_possibility")

    def scale(self, role: str) -> OrdinalScale:
        return self.scales[self.roles[role]]

    def expert(self, name: str) -> Expert:
        for e in self.experts:
            if e.name == name:
                return e
        raise ProblemError(f"unknown expert {name!r}")

    def criterion(self, name: str) -> Criterion:
        for c in self.criteria:
            if c.name == name:
                return c
        raise ProblemError(f"unknown criterion {name!r}")

    def candidate(self, name: str) -> Candidate:
        for k in self.candidates:
            if k.name == name:
                return k
        raise ProblemError(f"unknown candidate {name!r}")

    def opinion(self, candidate: Candidate, criterion: str, expert: str) -> Opinion:
        cell = candidate.opinions.get((criterion, expert))
        if cell is None:
            return Opinion(None, self.scale("confidence").bottom)
        return cell


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning" | "note"
    code: str
    message: str
    location: str = ""


@dataclass(frozen=True)
class QptResult:
    candidate: str
    discounted: Mapping[str, Mapping[str, PossibilityDistribution]]
    weights: Mapping[str, Mapping[str, Level]]
    merged: Mapping[str, PossibilityDistribution]
    normalized: Mapping[str, PossibilityDistribution]
    final: PossibilityDistribution
    match_certainty: Level
    match_possibility: Level


@dataclass(frozen=True)
class TbmResult:
    candidate: str
    cell_bbas: Mapping[tuple[str, str], MassFunction]
    discount_factors: Mapping[tuple[str, str], float]
    discounted: Mapping[tuple[str, str], MassFunction]
    combined: Mapping[str, MassFunction]
    transferred: Mapping[str, MassFunction]
    final: MassFunction
    betp: tuple[float, ...]
    expected: float


def run_qpt(problem: AssessmentProblem, candidate_name: str) -> QptResult:
    """Fuse experts per criterion, normalize, then aggregate across criteria."""
    cand = problem.candidate(candidate_name)
    score = problem.scale("score")
    poss = problem.scale("possibility")
    conf_map = problem.maps["confidence_to_possibility"]
    imp_map = problem.maps["importance_to_score"]
    opts = problem.options

    discounted: dict[str, dict[str, PossibilityDistribution]] = {}
    weights: dict[str, dict[str, Level]] = {}
    merged: dict[str, PossibilityDistribution] = {}
    normalized: dict[str, PossibilityDistribution] = {}

    for crit in problem.criteria:
        drow: dict[str, PossibilityDistribution] = {}
        wrow: dict[str, Level] = {}
        sources = []
        for exp in problem.experts:
            coord = f"{candidate_name}/{crit.name}/{exp.name}"
            cell = problem.opinion(cand, crit.name, exp.name)
            try:
                if cell.interval is None:
                    pi = possibility.vacuous(score, poss)
                else:
                    pi = possibility.from_interval(score.level(cell.interval[0]),
                                                   score.level(cell.interval[1]), poss)
                pi = possibility.discount_self_confidence(pi, cell.confidence, conf_map)
                w = possibility.source_weight(cell.confidence, exp.reliability,
                                              problem.otimes)
            except ValueError as exc:
                raise EvaluationError("opinion", coord, str(exc)) from exc
            # weights live on the confidence scale; fusion needs them on the
            # possibility scale, through the same declared map
            drow[exp.name] = pi
            wrow[exp.name] = w
            sources.append((pi, conf_map.apply(w)))
        discounted[crit.name] = drow
        weights[crit.name] = wrow
        try:
            if opts.fusion == "disjunctive":
                fused = possibility.fuse_disjunctive(sources)
            elif opts.fusion == "conjunctive-min":
                fused = possibility.fuse_conjunctive_min(sources)
            else:
                raise possibility.DistributionError(
                    f"unknown fusion mode {opts.fusion!r}")
            merged[crit.name] = fused
            normalized[crit.name] = possibility.normalize(fused, opts.normalization)
        except ValueError as exc:
            raise EvaluationError("fusion", f"{candidate_name}/{crit.name}",
                                  str(exc)) from exc

    importances = [c.importance for c in problem.criteria]
    pis = [normalized[c.name] for c in problem.criteria]
    try:
        final = possibility.aggregate_extension(pis, importances, opts.aggregation,
                                                problem.vtilde, imp_map)
        profiles = [possibility.build_profile(c.importance, score, imp_map)
                    for c in problem.criteria]
        s2p = problem.maps["score_to_possibility"]
        cert = possibility.match_certainty(profiles, pis, s2p)
        poss = possibility.match_possibility(profiles, pis, s2p)
    except ValueError as exc:
        raise EvaluationError("aggregation", candidate_name, str(exc)) from exc
    return QptResult(candidate_name, discounted, weights, merged, normalized,
                     final, cert, poss)


def _discount_inputs(problem: AssessmentProblem, confidence: Level,
                     reliability: Level, coord: str) -> float:
    """Rescale the two ordinal inputs and evaluate the discount formula."""
    if len(problem.scale("confidence")) != 4 or len(problem.scale("reliability")) != 4:
        raise EvaluationError(
            "discount", coord,
            "the discount formula is calibrated for 4-level confidence and "
            "reliability scales")
    g = confidence.index
    s = reliability.index
    if g == 0 or s == 0:
        # a source with no confidence at all carries no usable rescaling
        return 1.0
    return belief.discount_factor(g, s, problem.options.discount_coefficients)


def run_tbm(problem: AssessmentProblem, candidate_name: str) -> TbmResult:
    """Kernel, consonant masses, discounting, then two combination stages."""
    cand = problem.candidate(candidate_name)
    score = problem.scale("score")
    size = len(score)
    kernel = ObservationKernel(problem.options.kernel)
    mode = problem.options.combination
    transfer_mode = problem.options.goodness_transfer

    cell_bbas: dict[tuple[str, str], MassFunction] = {}
    dfactors: dict[tuple[str, str], float] = {}
    discounted: dict[tuple[str, str], MassFunction] = {}
    combined: dict[str, MassFunction] = {}
    transferred: dict[str, MassFunction] = {}

    final = MassFunction.vacuous(size)
    for crit in problem.criteria:
        m = MassFunction.vacuous(size)
        for exp in problem.experts:
            coord = f"{candidate_name}/{crit.name}/{exp.name}"
            cell = problem.opinion(cand, crit.name, exp.name)
            lo, hi = cell.interval if cell.interval is not None else (0, size - 1)
            try:
                pi = belief.kernel_possibility(lo + 1, hi + 1, kernel, size)
                bba = belief.consonant_bba(pi)
            except belief.BeliefError as exc:
                raise EvaluationError("kernel", coord, str(exc)) from exc
            d = _discount_inputs(problem, cell.confidence, exp.reliability, coord)
            bba_d = belief.discount(bba, d)
            cell_bbas[(crit.name, exp.name)] = bba
            dfactors[(crit.name, exp.name)] = d
            discounted[(crit.name, exp.name)] = bba_d
            try:
                m = belief.combine_conjunctive(m, bba_d, mode)
            except belief.TotalConflictError as exc:
                raise EvaluationError("combination", coord, str(exc)) from exc
        combined[crit.name] = m
        row = problem.goodness.get(crit.importance.label)
        if row is None:
            raise EvaluationError(
                "goodness-transfer", f"{candidate_name}/{crit.name}",
                f"no goodness row declared for importance {crit.importance.label!r}")
        mg = belief.goodness_transfer(m, row, transfer_mode)
        transferred[crit.name] = mg
        try:
            final = belief.combine_conjunctive(final, mg, mode)
        except belief.TotalConflictError as exc:
            raise EvaluationError("combination",
                                  f"{candidate_name}/{crit.name}", str(exc)) from exc

    try:
        betp = belief.pignistic(final)
    except belief.TotalConflictError as exc:
        raise EvaluationError("pignistic", candidate_name, str(exc)) from exc
    expected = belief.expected_score(betp)
    return TbmResult(candidate_name, cell_bbas, dfactors, discounted, combined,
                     transferred, final, betp, expected)


@dataclass(frozen=True)
class RankEntry:
    candidate: str
    method: str
    # tbm metrics
    expected: Optional[float] = None
    top_betp: Optional[float] = None
    # qpt metrics
    nec_dominance: Optional[str] = None
    poss_dominance: Optional[str] = None
    match_certainty: Optional[str] = None
    match_possibility: Optional[str] = None


def rank_candidates(problem: AssessmentProblem, method: str) -> list[RankEntry]:
    """Order candidates best first under the chosen engine."""
    if not problem.candidates:
        raise ProblemError("no candidates to rank")
    if method == "tbm":
        entries = []
        for cand in problem.candidates:
            res = run_tbm(problem, cand.name)
            entries.append(RankEntry(cand.name, "tbm", expected=res.expected,
                                     top_betp=res.betp[-1]))
        entries.sort(key=lambda e: (-e.expected, -e.top_betp, e.candidate))
        return entries
    if method == "qpt":
        results = {c.name: run_qpt(problem, c.name) for c in problem.candidates}
        poss_scale = problem.scale("possibility")
        entries = []
        for cand in problem.candidates:
            mine = results[cand.name].final
            nec = poss_scale.top
            pos = poss_scale.top
            for other in problem.candidates:
                if other.name == cand.name:
                    continue
                p, n = possibility.rank(mine, results[other.name].final)
                nec = min(nec, n, key=lambda lv: lv.index)
                pos = min(pos, p, key=lambda lv: lv.index)
            entries.append(RankEntry(
                cand.name, "qpt",
                nec_dominance=nec.label, poss_dominance=pos.label,
                match_certainty=results[cand.name].match_certainty.label,
                match_possibility=results[cand.name].match_possibility.label))
        order = {lab: i for i, lab in enumerate(poss_scale.labels)}
        entries.sort(key=lambda e: (-order[e.nec_dominance],
                                    -order[e.poss_dominance], e.candidate))
        return entries
    raise ProblemError(f"unknown ranking method {method!r}")


# ---------------------------------------------------------------------------
# parameter coordinates, overrides, sensitivity


def parse_coordinate(problem: AssessmentProblem, target: str) -> tuple[str, tuple[str, ...]]:
    """Split and resolve a coordinate like gamma:K:Dec:HR against the problem."""
    parts = target.split(":")
    kind, rest = parts[0], tuple(parts[1:])
    if kind == "alpha" and len(rest) == 1:
        problem.expert(rest[0])
        return kind, rest
    if kind == "beta" and len(rest) == 1:
        problem.criterion(rest[0])
        return kind, rest
    if kind in ("gamma", "interval", "interval_lo", "interval_hi") and len(rest) == 3:
        cand = problem.candidate(rest[0])
        problem.criterion(rest[1])
        problem.expert(rest[2])
        return kind, rest
    raise ProblemError(f"unresolvable coordinate {target!r}")


def apply_override(problem: AssessmentProblem, target: str, value) -> AssessmentProblem:
    """Return a new problem with one parameter replaced; the base is untouched."""
    kind, rest = parse_coordinate(problem, target)
    score = problem.scale("score")
    if kind == "alpha":
        lvl = problem.scale("reliability").level(value)
        experts = tuple(replace(e, reliability=lvl) if e.name == rest[0] else e
                        for e in problem.experts)
        return replace(problem, experts=experts)
    if kind == "beta":
        lvl = problem.scale("importance").level(value)
        criteria = tuple(replace(c, importance=lvl) if c.name == rest[0] else c
                         for c in problem.criteria)
        return replace(problem, criteria=criteria)

    cand_name, crit, exp = rest
    cand = problem.candidate(cand_name)
    cell = problem.opinion(cand, crit, exp)
    if kind == "gamma":
        cell = replace(cell, confidence=problem.scale("confidence").level(value))
    elif kind == "interval":
        if value is None:
            cell = replace(cell, interval=None)
        else:
            lo, hi = value
            iv = (score.level(lo).index, score.level(hi).index)
            if iv[0] > iv[1]:
                raise ProblemError(f"empty interval {value!r} at {target}")
            cell = replace(cell, interval=iv)
    else:
        if cell.interval is None:
            raise ProblemError(f"{target} targets a blank opinion")
        lo, hi = cell.interval
        k = score.level(value).index
        iv = (k, hi) if kind == "interval_lo" else (lo, k)
        if iv[0] > iv[1]:
            raise ProblemError(f"override {value!r} at {target} empties the interval")
        cell = replace(cell, interval=iv)
    opinions = dict(cand.opinions)
    opinions[(crit, exp)] = cell
    candidates = tuple(replace(c, opinions=opinions) if c.name == cand_name else c
                       for c in problem.candidates)
    return replace(problem, candidates=candidates)


@dataclass(frozen=True)
class SweepRow:
    value: object
    deltas: tuple[dict, ...]          # {"output": ..., "before": ..., "after": ...}
    changed_tables: tuple[str, ...]
    decision_changed: bool
    # engines that could not evaluate this sweep point, with the reason;
    # a point that breaks one method is still a valid sweep outcome
    errors: tuple[tuple[str, str], ...] = ()


def _qpt_outputs(res: QptResult) -> dict:
    return {
        "final": res.final.labels(),
        "match_certainty": res.match_certainty.label,
        "match_possibility": res.match_possibility.label,
    }


def _tbm_outputs(res: TbmResult) -> dict:
    return {
        "masses": {"|".join(str(x) for x in sorted(s)): round(v, 9)
                   for s, v in sorted(res.final.masses.items(),
                                      key=lambda kv: (len(kv[0]), sorted(kv[0])))},
        "betp": tuple(round(p, 9) for p in res.betp),
        "expected": round(res.expected, 9),
    }


def qpt_trace_tables(res: QptResult) -> dict[str, object]:
    return {
        "discounted": {c: {e: pi.labels() for e, pi in row.items()}
                       for c, row in res.discounted.items()},
        "weights": {c: {e: w.label for e, w in row.items()}
                    for c, row in res.weights.items()},
        "merged": {c: pi.labels() for c, pi in res.merged.items()},
        "normalized": {c: pi.labels() for c, pi in res.normalized.items()},
    }


def _mass_table(m: MassFunction) -> list[dict]:
    return [{"set": sorted(s), "mass": round(v, 9)}
            for s, v in sorted(m.masses.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))]


def tbm_trace_tables(res: TbmResult) -> dict[str, object]:
    return {
        "cell_bbas": {f"{c}/{e}": _mass_table(m)
                      for (c, e), m in res.cell_bbas.items()},
        "discount_factors": {f"{c}/{e}": round(d, 9)
                             for (c, e), d in res.discount_factors.items()},
        "discounted_bbas": {f"{c}/{e}": _mass_table(m)
                            for (c, e), m in res.discounted.items()},
        "combined_bbas": {c: _mass_table(m) for c, m in res.combined.items()},
        "transferred_bbas": {c: _mass_table(m) for c, m in res.transferred.items()},
    }


def sensitivity(problem: AssessmentProblem, candidate: str, target: str,
                values: Sequence, method: str = "both") -> list[SweepRow]:
    """Re-run the selected engines per sweep value and report what changed."""
    parse_coordinate(problem, target)
    methods = ("qpt", "tbm") if method == "both" else (method,)
    base_out: dict[str, dict] = {}
    base_tables: dict[str, dict] = {}
    if "qpt" in methods:
        res = run_qpt(problem, candidate)
        base_out["qpt"] = _qpt_outputs(res)
        base_tables["qpt"] = qpt_trace_tables(res)
    if "tbm" in methods:
        res = run_tbm(problem, candidate)
        base_out["tbm"] = _tbm_outputs(res)
        base_tables["tbm"] = tbm_trace_tables(res)

    rows = []
    for value in values:
        varied = apply_override(problem, target, value)
        deltas = []
        changed_tables = []
        decision_changed = False
        errors = []
        for meth in methods:
            try:
                if meth == "qpt":
                    res = run_qpt(varied, candidate)
                    out, tables = _qpt_outputs(res), qpt_trace_tables(res)
                    if out["final"] != base_out["qpt"]["final"]:
                        decision_changed = True
                else:
                    res = run_tbm(varied, candidate)
                    out, tables = _tbm_outputs(res), tbm_trace_tables(res)
                    base_betp = base_out["tbm"]["betp"]
                    if out["betp"].index(max(out["betp"])) != \
                            base_betp.index(max(base_betp)):
                        decision_changed = True
            except EvaluationError as exc:
                errors.append((meth, str(exc)))
                continue
            for key, after in out.items():
                before = base_out[meth][key]
                if after != before:
                    deltas.append({"output": f"{meth}.{key}",
                                   "before": before, "after": after})
            for name, table in tables.items():
                if table != base_tables[meth][name]:
                    changed_tables.append(f"{meth}.{name}")
        rows.append(SweepRow(value, tuple(deltas), tuple(changed_tables),
                             decision_changed, tuple(errors)))
    return rows


def validate(problem: AssessmentProblem) -> list[Diagnostic]:
    """Structural checks; diagnostics are returned, never raised."""
    out: list[Diagnostic] = []

    def err(code, msg, loc=""):
        out.append(Diagnostic("error", code, msg, loc))

    def warn(code, msg, loc=""):
        out.append(Diagnostic("warning", code, msg, loc))

    def note(code, msg, loc=""):
        out.append(Diagnostic("note", code, msg, loc))

    if not problem.experts:
        err("no-experts", "at least one expert is required")
    if not problem.criteria:
        err("no-criteria", "at least one criterion is required")
    for role in AssessmentProblem.ROLES:
        if role not in problem.roles or problem.roles[role] not in problem.scales:
            err("missing-role", f"role {role!r} does not resolve to a scale")
    for name in AssessmentProblem.REQUIRED_MAPS:
        if name not in problem.maps:
            err("missing-map", f"required scale map {name!r} is not declared")

    try:
        ObservationKernel(problem.options.kernel)
    except belief.BeliefError as exc:
        err("bad-kernel", str(exc))

    score = problem.scale("score") if "score" in problem.roles and \
        problem.roles["score"] in problem.scales else None
    if score is not None:
        for cand in problem.candidates:
            for (crit, exp), cell in cand.opinions.items():
                loc = f"{cand.name}/{crit}/{exp}"
                if not any(c.name == crit for c in problem.criteria):
                    err("unknown-criterion", f"opinion cell names unknown criterion "
                        f"{crit!r}", loc)
                if not any(e.name == exp for e in problem.experts):
                    err("unknown-expert", f"opinion cell names unknown expert "
                        f"{exp!r}", loc)
                if cell.interval is not None:
                    lo, hi = cell.interval
                    if not (0 <= lo < len(score) and 0 <= hi < len(score)):
                        err("interval-range", f"interval outside the score scale", loc)
                    elif lo > hi:
                        err("interval-empty",
                            f"interval [{score.labels[lo]}, {score.labels[hi]}] "
                            f"is empty", loc)
                if cell.note:
                    note("cell-note", cell.note, loc)

    for crit in problem.criteria:
        if crit.importance.label not in problem.goodness:
            warn("goodness-row-missing",
                 f"no goodness row for importance {crit.importance.label!r}; "
                 f"the belief engine will reject this problem", crit.name)

    # unnormalized fused rows mean no expert is fully trusted on the criterion
    if not any(d.severity == "error" for d in out):
        for cand in problem.candidates:
            try:
                res = run_qpt(problem, cand.name)
            except EvaluationError:
                continue
            for crit in problem.criteria:
                if not res.merged[crit.name].is_normalized():
                    warn("unnormalized-fusion",
                         f"merged opinions on {crit.name!r} are subnormal before "
                         f"renormalization", f"{cand.name}/{crit.name}")
    return out
