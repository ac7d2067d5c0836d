import { describe, expect, it } from "vitest";

import { buildRuleRows, displayedRuleCount, renderRuleTable, ruleId } from "../src/views/rules";
import type { RulesResponse } from "../src/types";
import { loadFixture } from "./fixtures";

const rules = loadFixture<RulesResponse>("rules");

describe("rule browser", () => {
  it("displays the served rule count", () => {
    expect(displayedRuleCount(rules)).toBe(rules.rule_count);
    expect(rules.rules).toHaveLength(rules.rule_count);
  });

  it("displays every support and confidence verbatim", () => {
    const rows = buildRuleRows(rules.rules);
    rows.forEach((row, i) => {
      expect(row.support).toBe(rules.rules[i].support);
      expect(row.confidence).toBe(rules.rules[i].confidence);
    });
  });

  it("joins premise and conclusion labels without altering them", () => {
    const rows = buildRuleRows(rules.rules);
    rows.forEach((row, i) => {
      expect(row.premise).toBe(rules.rules[i].premise.join(", "));
      expect(row.conclusion).toBe(rules.rules[i].conclusion.join(", "));
    });
  });

  it("renders the count and one anchored row per rule", () => {
    const rows = buildRuleRows(rules.rules);
    const html = renderRuleTable(rows, displayedRuleCount(rules));
    expect(html).toContain(`${rules.rule_count} rules`);
    expect(html.match(/<tr id="rule-/g) ?? []).toHaveLength(rules.rules.length);
    for (const rule of rules.rules) {
      expect(html).toContain(rule.support);
      expect(html).toContain(rule.confidence);
    }
  });

  it("gives each rule a stable anchor id", () => {
    const ids = rules.rules.map(ruleId);
    expect(new Set(ids).size).toBe(ids.length);
  });
});
