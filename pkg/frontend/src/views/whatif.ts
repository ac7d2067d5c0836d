/** What-if forecast card: the outcome triple, the pick, and the fired-rule
 * trace. Trace rows link into the rule browser; prior-only forecasts carry
 * a visible flag. All numbers are rendered exactly as served. */

import type { WhatIfResponse } from "./../types.js";

export interface ForecastCard {
  match: string;
  triple: { "1": number; X: number; "2": number };
  pick: string;
  priorOnly: boolean;
  selectionSize: number;
  trace: { rule: string; firedConf: number; ruleAnchor: string | null }[];
}

/** Anchor id of the rule-browser row for a trace entry, if it names a rule. */
export function traceRuleAnchor(ruleText: string): string | null {
  if (ruleText.startsWith("prior(")) return null;
  const arrow = ruleText.indexOf(" => ");
  const bracket = ruleText.lastIndexOf(" [");
  if (arrow < 0 || bracket < 0) return null;
  const premise = ruleText.slice(0, arrow).trim();
  const conclusion = ruleText.slice(arrow + 4, bracket).trim();
  const normalize = (side: string) =>
    side
      .split(",")
      .map((part) => part.trim())
      .filter(Boolean)
      .join(",");
  return `rule-${normalize(premise)}=>${normalize(conclusion)}`;
}

export function buildForecastCard(response: WhatIfResponse): ForecastCard {
  return {
    match: response.match,
    triple: { "1": response.c1, X: response.cx, "2": response.c2 },
    pick: response.pick,
    priorOnly: response.prior_only,
    selectionSize: response.selection_size,
    trace: response.trace.map((row) => ({
      rule: row.rule,
      firedConf: row.fired_conf,
      ruleAnchor: traceRuleAnchor(row.rule),
    })),
  };
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderForecastCard(card: ForecastCard): string {
  const flag = card.priorOnly
    ? '<span class="flag flag-prior">prior-only</span>'
    : "";
  const cells = (["1", "X", "2"] as const)
    .map((outcome) => {
      const picked = outcome === card.pick ? ' class="picked"' : "";
      return `<td${picked}><span class="outcome">${outcome}</span> ${String(
        card.triple[outcome],
      )}</td>`;
    })
    .join("");
  const traceRows = card.trace
    .map((row) => {
      const text = escapeHtml(row.rule);
      const link = row.ruleAnchor
        ? `<a href="#${escapeHtml(row.ruleAnchor)}">${text}</a>`
        : text;
      return `<tr><td>${link}</td><td>${String(row.firedConf)}</td></tr>`;
    })
    .join("");
  return (
    `<div class="forecast-card">` +
    `<h3>${escapeHtml(card.match)} ${flag}</h3>` +
    `<table class="triple"><tr>${cells}</tr></table>` +
    `<p class="selection-size">selection: ${card.selectionSize} past matches</p>` +
    `<table class="trace"><thead><tr><th>rule</th><th>fired</th></tr></thead>` +
    `<tbody>${traceRows}</tbody></table>` +
    `</div>`
  );
}
