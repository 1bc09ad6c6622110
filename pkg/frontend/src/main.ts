import { ApiClient, ApiError } from "./api.js";
import { guidedSensitivity } from "./guided.js";
import {
  changedFinalIndices,
  escapeHtml,
  renderCandidate,
  renderDeltas,
} from "./render.js";
import {
  applyWhatIf,
  clearOverrides,
  initialState,
  markStale,
  possibilityLabels,
  scoreLabels,
  upsertOverride,
  validateOverrideValue,
  type SessionState,
} from "./state.js";
import type { Override } from "./types.js";

const api = new ApiClient("");

let state: SessionState | null = null;
let inFlight = false;
let queued: Override[] | null = null;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function setHtml(id: string, html: string): void {
  el(id).innerHTML = html;
}

function renderAll(): void {
  if (!state) return;
  const poss = possibilityLabels(state.document);
  const changed = changedFinalIndices(state.baseReport, state.overlaidReport,
    state.candidate);
  const base = renderCandidate(state.baseReport, state.candidate, poss);
  const overlaid = renderCandidate(state.overlaidReport, state.candidate, poss,
    changed);
  setHtml("base-qpt", base.qpt);
  setHtml("base-tbm", base.tbm);
  setHtml("overlay-qpt", overlaid.qpt);
  setHtml("overlay-tbm", overlaid.tbm);
  setHtml("trace-panel", overlaid.trace);
  el("trace-section").style.display = overlaid.trace ? "block" : "none";
  setHtml("deltas", renderDeltas(state.deltas));
  setHtml(
    "overrides",
    state.overrides.length === 0
      ? "<p>no overrides; showing the base snapshot</p>"
      : `<ul>${state.overrides
          .map(
            (o) =>
              `<li><code>${escapeHtml(o.target)}</code> = ` +
              `<code>${escapeHtml(JSON.stringify(o.value))}</code></li>`,
          )
          .join("")}</ul>`,
  );
  el("stale-banner").style.display = state.stale ? "block" : "none";
  el("snapshot").textContent = state.baseHash;
}

async function pushOverrides(overrides: Override[]): Promise<void> {
  if (!state) return;
  if (inFlight) {
    queued = overrides; // rapid edits coalesce to the latest overlay
    return;
  }
  inFlight = true;
  try {
    const res = await api.whatIf(state.problemId, overrides, state.baseHash);
    state = applyWhatIf({ ...state, overrides }, res);
  } catch (err) {
    if (err instanceof ApiError && err.code === "stale-snapshot") {
      state = markStale(state);
    } else {
      showEditError(err instanceof Error ? err.message : String(err));
    }
  } finally {
    inFlight = false;
  }
  renderAll();
  if (queued) {
    const next = queued;
    queued = null;
    await pushOverrides(next);
  }
}

function showEditError(message: string): void {
  setHtml("edit-error", message ? `<span>${escapeHtml(message)}</span>` : "");
}

function readEditForm(): { target: string; value: unknown } | null {
  if (!state) return null;
  const kind = el<HTMLSelectElement>("edit-kind").value;
  const criterion = el<HTMLSelectElement>("edit-criterion").value;
  const expert = el<HTMLSelectElement>("edit-expert").value;
  const raw = el<HTMLInputElement>("edit-value").value.trim();
  const cand = state.candidate;
  if (kind === "alpha") return { target: `alpha:${expert}`, value: raw };
  if (kind === "beta") return { target: `beta:${criterion}`, value: raw };
  if (kind === "gamma") {
    return { target: `gamma:${cand}:${criterion}:${expert}`, value: raw };
  }
  if (raw === "") {
    return { target: `interval:${cand}:${criterion}:${expert}`, value: null };
  }
  const bounds = raw.split(/[\s,;-]+/).filter((s) => s.length > 0);
  const pair = bounds.length === 1 ? [bounds[0], bounds[0]] : bounds;
  return { target: `interval:${cand}:${criterion}:${expert}`, value: pair };
}

async function onApplyEdit(): Promise<void> {
  if (!state) return;
  const edit = readEditForm();
  if (!edit) return;
  const problem = validateOverrideValue(state.document, edit.target, edit.value);
  if (problem) {
    showEditError(problem); // invalid values never reach the service
    return;
  }
  showEditError("");
  await pushOverrides(upsertOverride(state.overrides, edit));
}

async function onClearOverrides(): Promise<void> {
  if (!state) return;
  state = clearOverrides(state);
  renderAll();
}

async function onGuided(): Promise<void> {
  if (!state) return;
  setHtml("guided", "<p>sweeping one-step perturbations...</p>");
  const entries = await guidedSensitivity(
    api,
    state.problemId,
    state.document,
    state.candidate,
    "both",
  );
  if (entries.length === 0) {
    setHtml("guided", "<p>no single-step change moves any output</p>");
    return;
  }
  setHtml(
    "guided",
    `<ol>${entries
      .map(
        (e) =>
          `<li><code>${escapeHtml(e.target)}</code>` +
          (e.decisionChanged
            ? ` <strong>changes the decision</strong>`
            : ` moves ${e.changedOutputs.length} output(s)`) +
          `</li>`,
      )
      .join("")}</ol>`,
  );
}

function fillEditSelectors(): void {
  if (!state) return;
  el<HTMLSelectElement>("edit-criterion").innerHTML = state.document.criteria
    .map((c) => `<option>${escapeHtml(c.name)}</option>`)
    .join("");
  el<HTMLSelectElement>("edit-expert").innerHTML = state.document.experts
    .map((e) => `<option>${escapeHtml(e.name)}</option>`)
    .join("");
  el("score-hint").textContent =
    `scores: ${scoreLabels(state.document).join(" < ")}`;
}

export async function boot(): Promise<void> {
  const listing = await api.listProblems();
  if (listing.problems.length === 0) {
    setHtml("app-error", "no problems in the store; PUT one first");
    return;
  }
  const id = listing.problems[0].id;
  const [{ problem_hash, document: doc }, report] = await Promise.all([
    api.getProblem(id),
    api.assess(id, "both", true),
  ]);
  const candidate = doc.candidates[0]?.name ?? "";
  state = initialState(id, problem_hash, doc, report, candidate);
  fillEditSelectors();
  el("apply-edit").addEventListener("click", () => void onApplyEdit());
  el("clear-overrides").addEventListener("click", () => void onClearOverrides());
  el("run-guided").addEventListener("click", () => void onGuided());
  el("reload-snapshot").addEventListener("click", () => window.location.reload());
  renderAll();
}

if (typeof window !== "undefined" && typeof document !== "undefined") {
  void boot();
}
