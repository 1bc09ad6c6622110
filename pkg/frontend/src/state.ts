import type {
  Delta,
  Override,
  ProblemDocument,
  Report,
  WhatIfResponse,
} from "./types.js";

export type MethodTab = "qpt" | "tbm" | "both";

/** Everything the console shows derives from this snapshot-pinned state. */
export interface SessionState {
  problemId: string;
  baseHash: string;
  document: ProblemDocument;
  candidate: string;
  method: MethodTab;
  overrides: Override[];
  baseReport: Report;
  overlaidReport: Report;
  deltas: Delta[];
  stale: boolean;
}

export function initialState(
  problemId: string,
  baseHash: string,
  document: ProblemDocument,
  report: Report,
  candidate: string,
): SessionState {
  return {
    problemId,
    baseHash,
    document,
    candidate,
    method: "both",
    overrides: [],
    baseReport: report,
    overlaidReport: report,
    deltas: [],
    stale: false,
  };
}

/** Record one override, replacing any earlier edit of the same coordinate. */
export function upsertOverride(overrides: Override[], next: Override): Override[] {
  const kept = overrides.filter((o) => o.target !== next.target);
  return [...kept, next];
}

export function removeOverride(overrides: Override[], target: string): Override[] {
  return overrides.filter((o) => o.target !== target);
}

/** Dropping every override restores the base view without any request. */
export function clearOverrides(state: SessionState): SessionState {
  return {
    ...state,
    overrides: [],
    overlaidReport: state.baseReport,
    deltas: [],
  };
}

export function applyWhatIf(
  state: SessionState,
  response: WhatIfResponse,
): SessionState {
  if (response.problem_hash !== state.baseHash) {
    return { ...state, stale: true };
  }
  return {
    ...state,
    baseReport: response.base,
    overlaidReport: response.overlaid,
    deltas: response.deltas,
  };
}

export function markStale(state: SessionState): SessionState {
  return { ...state, stale: true };
}

function scaleLabels(doc: ProblemDocument, role: string): string[] {
  const name = doc.roles[role];
  const scale = doc.scales.find((s) => s.name === name);
  return scale ? scale.labels : [];
}

export function scoreLabels(doc: ProblemDocument): string[] {
  return scaleLabels(doc, "score");
}

export function possibilityLabels(doc: ProblemDocument): string[] {
  return scaleLabels(doc, "possibility");
}

export function gammaCoord(candidate: string, criterion: string, expert: string): string {
  return `gamma:${candidate}:${criterion}:${expert}`;
}

export function intervalCoord(candidate: string, criterion: string, expert: string): string {
  return `interval:${candidate}:${criterion}:${expert}`;
}

/** Validate an edit locally so bad values never reach the service.
 * Returns an error message, or null when the value is sendable. */
export function validateOverrideValue(
  doc: ProblemDocument,
  target: string,
  value: unknown,
): string | null {
  const [kind] = target.split(":");
  const roleOf: Record<string, string> = {
    alpha: "reliability",
    beta: "importance",
    gamma: "confidence",
  };
  if (kind in roleOf) {
    const labels = scaleLabels(doc, roleOf[kind]);
    if (typeof value !== "string" || !labels.includes(value)) {
      return `"${String(value)}" is not a level of the ${roleOf[kind]} scale`;
    }
    return null;
  }
  if (kind === "interval" || kind === "interval_lo" || kind === "interval_hi") {
    const labels = scaleLabels(doc, "score");
    if (kind === "interval" && value === null) {
      return null; // blank statement
    }
    const pair = kind === "interval" ? value : [value, value];
    if (!Array.isArray(pair) || pair.length !== 2) {
      return "an interval needs a low and a high score";
    }
    const [lo, hi] = pair;
    const loIdx = labels.indexOf(String(lo));
    const hiIdx = labels.indexOf(String(hi));
    if (loIdx < 0 || hiIdx < 0) {
      return `interval bounds must be score levels (${labels.join(", ")})`;
    }
    if (kind === "interval" && loIdx > hiIdx) {
      return `interval [${lo}, ${hi}] is empty: low bound above high bound`;
    }
    return null;
  }
  return `unknown coordinate kind "${kind}"`;
}
