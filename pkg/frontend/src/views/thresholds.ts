/** Threshold panel: per-spec parameter editors with inline validation and
 * the strictness ranking refreshed from each recompute response. */

import { specLabel, validateSpec } from "./../state.js";
import type { SpecEntry, StrictnessRow } from "./../types.js";

export interface SpecEditorRow {
  index: number;
  label: string;
  kind: number;
  threshold: number;
  team?: string;
  nMatches?: number;
  matchKind?: string;
  problem: string | null;
}

export function buildSpecEditorRows(specs: SpecEntry[]): SpecEditorRow[] {
  return specs.map((spec, index) => ({
    index,
    label: specLabel(spec),
    kind: spec.kind,
    threshold: spec.threshold,
    team: spec.team,
    nMatches: spec.n_matches,
    matchKind: spec.match_kind,
    problem: validateSpec(spec),
  }));
}

/** Checks the direction the server guarantees: for every edited attribute,
 * raising its threshold must not raise its support. Both supports are
 * server values; the panel only compares them for display. */
export function monotonicityWarnings(
  before: StrictnessRow[],
  after: StrictnessRow[],
  edits: { oldLabel: string; newLabel: string; raised: boolean }[],
): string[] {
  const supportBefore = new Map(before.map((row) => [row.label, row.support_float]));
  const supportAfter = new Map(after.map((row) => [row.label, row.support_float]));
  const warnings: string[] = [];
  for (const edit of edits) {
    if (!edit.raised) continue;
    const old = supportBefore.get(edit.oldLabel);
    const now = supportAfter.get(edit.newLabel);
    if (old !== undefined && now !== undefined && now > old) {
      warnings.push(
        `${edit.newLabel}: support rose from ${old} to ${now} despite a higher threshold`,
      );
    }
  }
  return warnings;
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderSpecEditor(rows: SpecEditorRow[]): string {
  const body = rows
    .map((row) => {
      const problem = row.problem
        ? `<span class="invalid">${escapeHtml(row.problem)}</span>`
        : "";
      const optional = [
        row.nMatches !== undefined
          ? `<input type="number" min="1" step="1" data-field="n_matches" ` +
            `data-index="${row.index}" value="${row.nMatches}"/>`
          : "",
        row.matchKind !== undefined
          ? `<span class="match-kind">${escapeHtml(row.matchKind)}</span>`
          : "",
      ].join(" ");
      return (
        `<tr data-spec-index="${row.index}">` +
        `<td class="spec-label">${escapeHtml(row.label)}</td>` +
        `<td><input type="number" min="0" step="0.1" data-field="threshold" ` +
        `data-index="${row.index}" value="${row.threshold}"/></td>` +
        `<td>${optional}</td><td>${problem}</td></tr>`
      );
    })
    .join("");
  return (
    '<table class="spec-editor"><thead><tr>' +
    "<th>attribute</th><th>threshold</th><th>window</th><th></th>" +
    "</tr></thead><tbody>" +
    body +
    "</tbody></table>"
  );
}

export function renderStrictness(ranking: StrictnessRow[]): string {
  const body = ranking
    .map(
      (row) =>
        `<tr><td>${escapeHtml(row.label)}</td>` +
        `<td class="support">${escapeHtml(row.support)}</td></tr>`,
    )
    .join("");
  return (
    '<table class="strictness"><thead><tr><th>attribute (strictest first)</th>' +
    "<th>support</th></tr></thead><tbody>" +
    body +
    "</tbody></table>"
  );
}
