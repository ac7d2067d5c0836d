/** Rule browser: a table of mined rules exactly as served. */

import type { RuleEntry, RulesResponse, RecomputeResponse } from "./../types.js";

export interface RuleRow {
  id: string;
  premise: string;
  conclusion: string;
  support: string;
  confidence: string;
}

export function ruleId(rule: RuleEntry): string {
  return `${rule.premise.join(",")}=>${rule.conclusion.join(",")}`;
}

export function buildRuleRows(rules: RuleEntry[]): RuleRow[] {
  return rules.map((rule) => ({
    id: ruleId(rule),
    premise: rule.premise.join(", "),
    conclusion: rule.conclusion.join(", "),
    support: rule.support,
    confidence: rule.confidence,
  }));
}

export function displayedRuleCount(response: RulesResponse | RecomputeResponse): number {
  return response.rule_count;
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderRuleTable(rows: RuleRow[], ruleCount: number): string {
  const header =
    `<p class="rule-count">${ruleCount} rules</p>` +
    "<table class=\"rules\"><thead><tr>" +
    "<th>premise</th><th></th><th>conclusion</th><th>supp</th><th>conf</th>" +
    "</tr></thead><tbody>";
  const body = rows
    .map(
      (row) =>
        `<tr id="rule-${escapeHtml(row.id)}">` +
        `<td>${escapeHtml(row.premise)}</td><td>=&gt;</td>` +
        `<td>${escapeHtml(row.conclusion)}</td>` +
        `<td>${escapeHtml(row.support)}</td>` +
        `<td>${escapeHtml(row.confidence)}</td></tr>`,
    )
    .join("");
  return header + body + "</tbody></table>";
}
