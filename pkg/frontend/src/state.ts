/** Session state: the editable working copy of the attribute set plus the
 * current selection and the latest responses. The working set is validated
 * before any compute call; edits persist only by exporting the JSON, which
 * is the same format the CLI consumes. */

import type { RecomputeResponse, Selection, SpecEntry, WhatIfResponse } from "./types.js";

/** Parameters each template requires; mirrors the server-side contract. */
export const KIND_PARAMS: Record<number, string[]> = (() => {
  const table: Record<number, string[]> = {};
  for (let kind = 1; kind <= 9; kind++) table[kind] = ["team", "n_matches", "match_kind"];
  table[10] = ["n_matches", "match_kind"];
  for (let kind = 11; kind <= 16; kind++) table[kind] = ["team", "match_kind"];
  table[17] = ["team"];
  table[18] = ["team"];
  return table;
})();

export function specLabel(spec: SpecEntry): string {
  const parts = [`ID_${spec.kind}`];
  if (spec.team !== undefined) parts.push(spec.team);
  parts.push(`T_${formatThreshold(spec.threshold)}`);
  if (spec.n_matches !== undefined) parts.push(`N_${spec.n_matches}`);
  if (spec.match_kind !== undefined) parts.push(`K_${spec.match_kind}`);
  return parts.join("_");
}

function formatThreshold(value: number): string {
  return Number.isInteger(value) ? `${value}.0` : String(value);
}

export function validateSpec(spec: SpecEntry): string | null {
  const required = KIND_PARAMS[spec.kind];
  if (!required) return `unknown attribute kind ${spec.kind}`;
  if (!Number.isFinite(spec.threshold) || spec.threshold < 0) {
    return "threshold must be a number >= 0";
  }
  const given = new Set<string>();
  if (spec.team !== undefined) given.add("team");
  if (spec.n_matches !== undefined) given.add("n_matches");
  if (spec.match_kind !== undefined) given.add("match_kind");
  for (const name of required) {
    if (!given.has(name)) return `kind ${spec.kind} needs ${name}`;
  }
  for (const name of given) {
    if (!required.includes(name)) return `kind ${spec.kind} does not take ${name}`;
  }
  if (spec.n_matches !== undefined && (!Number.isInteger(spec.n_matches) || spec.n_matches < 1)) {
    return "n_matches must be an integer >= 1";
  }
  return null;
}

export function validateWorkingSet(specs: SpecEntry[]): string | null {
  const labels = new Set<string>();
  for (const spec of specs) {
    const problem = validateSpec(spec);
    if (problem) return problem;
    const label = specLabel(spec);
    if (labels.has(label)) return `duplicate attribute ${label}`;
    labels.add(label);
  }
  return null;
}

export function validateGamma(gamma: string): string | null {
  const match = /^(\d+)\s*\/\s*(\d+)$/.exec(gamma.trim());
  let value: number;
  if (match) {
    const denominator = Number(match[2]);
    if (denominator === 0) return "gamma denominator must not be 0";
    value = Number(match[1]) / denominator;
  } else {
    value = Number(gamma);
    if (!Number.isFinite(value)) return "gamma must be a number or p/q";
  }
  if (!(value > 0 && value <= 1)) return "gamma must be in (0, 1]";
  return null;
}

export interface SessionState {
  workingSet: SpecEntry[];
  selection: Selection | null;
  gamma: string;
  lookback: number;
  lastRecompute: RecomputeResponse | null;
  lastForecast: WhatIfResponse | null;
}

export function initialState(): SessionState {
  return {
    workingSet: [],
    selection: null,
    gamma: "0.7",
    lookback: 38,
    lastRecompute: null,
    lastForecast: null,
  };
}

/** The exported document is exactly the CLI attribute-set format. */
export function exportWorkingSet(specs: SpecEntry[]): string {
  return JSON.stringify(specs, null, 2) + "\n";
}
