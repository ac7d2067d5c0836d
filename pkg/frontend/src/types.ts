/** Response shapes of the serve JSON API (schema_version 1). */

export interface SummaryResponse {
  schema_version: number;
  seasons: string[];
  matches: number;
  teams: number;
  divisions: string[];
  attributes: number;
  incidence: number;
  defaults: {
    lookback: number;
    gamma: string;
    mode: string;
    home_reduction: number;
  };
}

export interface SpecEntry {
  kind: number;
  threshold: number;
  team?: string;
  n_matches?: number;
  match_kind?: string;
}

export interface AttributesResponse {
  schema_version: number;
  specs: SpecEntry[];
  labels: string[];
}

export interface ConceptEntry {
  extent: string[];
  intent: string[];
  extent_size: number;
  intent_size: number;
  rank: number;
  attribute_labels: string[];
  object_labels: string[];
  outcome_overlap?: Record<string, number>;
}

export interface LatticeResponse {
  schema_version: number;
  context_fingerprint: string;
  objects: string[];
  attributes: string[];
  concepts: ConceptEntry[];
  covering: number[][];
}

export interface RuleEntry {
  premise: string[];
  conclusion: string[];
  support: string;
  confidence: string;
}

export interface RulesResponse {
  schema_version: number;
  rule_count: number;
  min_confidence: string;
  min_support: string;
  rules: RuleEntry[];
}

export interface StrictnessRow {
  label: string;
  support: string;
  support_float: number;
}

export interface StrictnessResponse {
  schema_version: number;
  ranking: StrictnessRow[];
}

export interface RecomputeResponse {
  schema_version: number;
  rule_count: number;
  rules: RuleEntry[];
  strictness: StrictnessRow[];
}

export interface TraceRow {
  rule: string;
  fired_conf: number;
}

export interface WhatIfResponse {
  schema_version: number;
  match: string;
  c1: number;
  cx: number;
  c2: number;
  pick: string;
  prior_only: boolean;
  trace: TraceRow[];
  degenerate: boolean;
  selection_size: number;
}

export interface FixtureEntry {
  match: string;
  home: string;
  away: string;
  home_goals: number;
  away_goals: number;
  outcome: string;
}

export interface MatchesResponse {
  schema_version: number;
  fixtures: FixtureEntry[];
}

export interface Selection {
  season: string;
  week: number;
  home: string;
  away: string;
  lookback?: number;
  gamma?: string;
}
