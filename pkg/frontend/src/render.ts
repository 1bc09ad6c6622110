import type { CandidateReport, Delta, MassEntry, Report } from "./types.js";

/** All rendering is string-in, string-out: ordinal levels become discrete
 * step bars (position = order in the declared scale, nothing numeric),
 * probabilities become proportional bars. */

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** A level rendered as filled steps out of the scale's length.
 * Unknown labels render a visible error, never a guessed position. */
export function levelBar(label: string, scale: string[]): string {
  const idx = scale.indexOf(label);
  if (idx < 0) {
    return `<span class="render-error">unknown level "${escapeHtml(label)}"</span>`;
  }
  const cells = scale
    .map((lab, i) => {
      const cls = i <= idx ? "step filled" : "step";
      return `<span class="${cls}" title="${escapeHtml(lab)}"></span>`;
    })
    .join("");
  return `<span class="level-bar" data-level="${escapeHtml(label)}">${cells}` +
    `<span class="level-label">${escapeHtml(label)}</span></span>`;
}

export function distributionRow(
  values: string[],
  scoreLabels: string[],
  possibilityScale: string[],
  changed: Set<number> = new Set(),
): string {
  const cells = values
    .map((lab, i) => {
      const cls = changed.has(i) ? "dist-cell changed" : "dist-cell";
      const head = escapeHtml(scoreLabels[i] ?? `#${i}`);
      return `<td class="${cls}"><div class="score-head">${head}</div>` +
        `${levelBar(lab, possibilityScale)}</td>`;
    })
    .join("");
  return `<tr>${cells}</tr>`;
}

export function betpBars(betp: number[], scoreLabels: string[]): string {
  const rows = betp
    .map((p, i) => {
      const width = Math.round(p * 100);
      const head = escapeHtml(scoreLabels[i] ?? `#${i}`);
      return (
        `<div class="betp-row" data-score="${head}">` +
        `<span class="betp-score">${head}</span>` +
        `<span class="betp-bar"><span class="betp-fill" style="width:${width}%"></span></span>` +
        `<span class="betp-value">${p.toFixed(3)}</span></div>`
      );
    })
    .join("");
  return `<div class="betp">${rows}</div>`;
}

export function massList(masses: MassEntry[]): string {
  const items = masses
    .map(
      (m) =>
        `<li><code>{${m.set.map(escapeHtml).join(",")}}</code> ` +
        `<span class="mass">${m.mass.toFixed(4)}</span></li>`,
    )
    .join("");
  return `<ul class="masses">${items}</ul>`;
}

function traceGrid(name: string, table: unknown): string {
  let body: string;
  if (table && typeof table === "object" && !Array.isArray(table)) {
    const rows = Object.entries(table as Record<string, unknown>)
      .map(([key, value]) => {
        const cell =
          typeof value === "object"
            ? `<code>${escapeHtml(JSON.stringify(value))}</code>`
            : escapeHtml(String(value));
        return `<tr><th>${escapeHtml(key)}</th><td>${cell}</td></tr>`;
      })
      .join("");
    body = `<table class="trace-grid">${rows}</table>`;
  } else {
    body = `<code>${escapeHtml(JSON.stringify(table))}</code>`;
  }
  return (
    `<details class="trace-table"><summary>${escapeHtml(name)}</summary>` +
    `${body}</details>`
  );
}

export interface CandidateViews {
  qpt: string;
  tbm: string;
  trace: string;
}

export function renderCandidate(
  report: Report,
  candidate: string,
  possibilityScale: string[],
  changedFinal: Set<number> = new Set(),
): CandidateViews {
  const section: CandidateReport | undefined = report.candidates[candidate];
  if (!section) {
    const err = `<div class="render-error">no results for candidate ` +
      `"${escapeHtml(candidate)}"</div>`;
    return { qpt: err, tbm: err, trace: "" };
  }
  let qpt = "";
  if (section.qpt) {
    qpt =
      `<table class="distribution"><tbody>` +
      distributionRow(section.qpt.final, report.score_labels, possibilityScale,
        changedFinal) +
      `</tbody></table>` +
      `<p class="match">certainty of matching the profile: ` +
      `${levelBar(section.qpt.match_certainty, possibilityScale)} ` +
      `possibility: ${levelBar(section.qpt.match_possibility, possibilityScale)}</p>`;
  }
  let tbm = "";
  if (section.tbm) {
    tbm =
      betpBars(section.tbm.betp, report.score_labels) +
      `<p class="expected">expected goodness score ` +
      `<strong>${section.tbm.expected.toFixed(3)}</strong></p>` +
      massList(section.tbm.masses);
  }
  let trace = "";
  if (section.trace && Object.keys(section.trace).length > 0) {
    trace = Object.entries(section.trace)
      .flatMap(([method, tables]) =>
        Object.entries(tables).map(([name, table]) =>
          traceGrid(`${method}.${name}`, table),
        ),
      )
      .join("");
  }
  return { qpt, tbm, trace };
}

export function renderDeltas(deltas: Delta[]): string {
  if (deltas.length === 0) {
    return `<p class="no-deltas">no differences against the base snapshot</p>`;
  }
  const rows = deltas
    .map(
      (d) =>
        `<tr><td><code>${escapeHtml(d.path)}</code></td>` +
        `<td>${escapeHtml(JSON.stringify(d.before))}</td>` +
        `<td>${escapeHtml(JSON.stringify(d.after))}</td></tr>`,
    )
    .join("");
  return (
    `<table class="deltas"><thead><tr><th>output</th><th>base</th>` +
    `<th>what-if</th></tr></thead><tbody>${rows}</tbody></table>`
  );
}

/** Indices of final-distribution entries that differ between two reports. */
export function changedFinalIndices(
  base: Report,
  overlaid: Report,
  candidate: string,
): Set<number> {
  const a = base.candidates[candidate]?.qpt?.final ?? [];
  const b = overlaid.candidates[candidate]?.qpt?.final ?? [];
  const out = new Set<number>();
  for (let i = 0; i < Math.max(a.length, b.length); i += 1) {
    if (a[i] !== b[i]) out.add(i);
  }
  return out;
}
