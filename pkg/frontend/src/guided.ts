import type { ApiClient } from "./api.js";
import type { ProblemDocument } from "./types.js";

/** One-step perturbations of every confidence, reliability and importance
 * coordinate, ranked by how much re-asking that question could move the
 * outcome. The console only orchestrates sweeps; all effects come from the
 * sensitivity endpoint. */

export interface CoordinateSweep {
  target: string;
  values: string[];
}

export interface GuidedEntry {
  target: string;
  decisionChanged: boolean;
  changedOutputs: string[];
}

function adjacentLabels(labels: string[], current: string): string[] {
  const idx = labels.indexOf(current);
  if (idx < 0) return [];
  const out: string[] = [];
  if (idx > 0) out.push(labels[idx - 1]);
  if (idx + 1 < labels.length) out.push(labels[idx + 1]);
  return out;
}

function scale(doc: ProblemDocument, role: string): string[] {
  const name = doc.roles[role];
  return doc.scales.find((s) => s.name === name)?.labels ?? [];
}

export function oneStepSweeps(
  doc: ProblemDocument,
  candidate: string,
): CoordinateSweep[] {
  const sweeps: CoordinateSweep[] = [];
  const reliability = scale(doc, "reliability");
  const importance = scale(doc, "importance");
  const confidence = scale(doc, "confidence");

  for (const expert of doc.experts) {
    const values = adjacentLabels(reliability, expert.reliability);
    if (values.length) sweeps.push({ target: `alpha:${expert.name}`, values });
  }
  for (const criterion of doc.criteria) {
    const values = adjacentLabels(importance, criterion.importance);
    if (values.length) sweeps.push({ target: `beta:${criterion.name}`, values });
  }
  const cand = doc.candidates.find((k) => k.name === candidate);
  if (cand) {
    for (const [criterion, row] of Object.entries(cand.opinions)) {
      for (const [expert, cell] of Object.entries(row)) {
        const values = adjacentLabels(confidence, cell.confidence);
        if (values.length) {
          sweeps.push({
            target: `gamma:${candidate}:${criterion}:${expert}`,
            values,
          });
        }
      }
    }
  }
  return sweeps;
}

/** Rank coordinates: decision changes first, then any output change; silent
 * coordinates are dropped ("useless data" is exactly what not to re-ask). */
export async function guidedSensitivity(
  api: ApiClient,
  problemId: string,
  doc: ProblemDocument,
  candidate: string,
  method: string,
): Promise<GuidedEntry[]> {
  const entries: GuidedEntry[] = [];
  for (const sweep of oneStepSweeps(doc, candidate)) {
    const res = await api.sensitivity(
      problemId,
      sweep.target,
      sweep.values,
      candidate,
      method,
    );
    const decisionChanged = res.rows.some((r) => r.decision_changed);
    const changedOutputs = [
      ...new Set(res.rows.flatMap((r) => r.deltas.map((d) => d.output))),
    ].sort();
    if (decisionChanged || changedOutputs.length > 0) {
      entries.push({ target: sweep.target, decisionChanged, changedOutputs });
    }
  }
  entries.sort((a, b) => {
    if (a.decisionChanged !== b.decisionChanged) {
      return a.decisionChanged ? -1 : 1;
    }
    if (a.changedOutputs.length !== b.changedOutputs.length) {
      return b.changedOutputs.length - a.changedOutputs.length;
    }
    return a.target.localeCompare(b.target);
  });
  return entries;
}
