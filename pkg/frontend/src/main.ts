/** Panel wiring for the explorer. The UI never computes domain values:
 * every displayed number comes from a serve response, and edits persist
 * only by exporting the attribute-set JSON. */

import { ApiChannel, ApiError, StaleResponseError } from "./api.js";
import {
  exportWorkingSet,
  initialState,
  validateGamma,
  validateWorkingSet,
  specLabel,
} from "./state.js";
import type { Selection, SpecEntry } from "./types.js";
import { buildLatticeViewModel, renderLattice } from "./views/lattice.js";
import { buildRuleRows, displayedRuleCount, renderRuleTable } from "./views/rules.js";
import {
  buildSpecEditorRows,
  monotonicityWarnings,
  renderSpecEditor,
  renderStrictness,
} from "./views/thresholds.js";
import { buildForecastCard, renderForecastCard } from "./views/whatif.js";

const state = initialState();
const channels = {
  meta: new ApiChannel(),
  lattice: new ApiChannel(),
  rules: new ApiChannel(),
  recompute: new ApiChannel(),
  whatif: new ApiChannel(),
};

function element<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

function setStatus(message: string, isError = false): void {
  const status = element<HTMLElement>("status");
  status.textContent = message;
  status.className = isError ? "status error" : "status";
}

function reportFailure(context: string, error: unknown): void {
  if (error instanceof StaleResponseError) return;
  const detail = error instanceof ApiError ? error.message : String(error);
  setStatus(`${context}: ${detail}`, true);
}

function currentSelection(): Selection | null {
  const season = element<HTMLInputElement>("season").value.trim();
  const week = Number(element<HTMLInputElement>("week").value);
  const home = element<HTMLInputElement>("home").value.trim();
  const away = element<HTMLInputElement>("away").value.trim();
  if (!season || !home || !away || !Number.isInteger(week) || week < 1) return null;
  const gammaProblem = validateGamma(state.gamma);
  if (gammaProblem) {
    setStatus(gammaProblem, true);
    return null;
  }
  return {
    season,
    week,
    home,
    away,
    lookback: state.lookback,
    gamma: state.gamma,
  };
}

async function refreshLattice(): Promise<void> {
  const selection = currentSelection();
  if (!selection) return;
  try {
    const lattice = await channels.lattice.lattice(selection);
    element<HTMLElement>("lattice-panel").innerHTML = renderLattice(
      buildLatticeViewModel(lattice),
    );
  } catch (error) {
    reportFailure("lattice", error);
  }
}

async function refreshRules(): Promise<void> {
  const selection = currentSelection();
  if (!selection) return;
  try {
    const rules = await channels.rules.rules(selection);
    element<HTMLElement>("rules-panel").innerHTML = renderRuleTable(
      buildRuleRows(rules.rules),
      displayedRuleCount(rules),
    );
  } catch (error) {
    reportFailure("rules", error);
  }
}

function renderEditor(): void {
  element<HTMLElement>("spec-editor").innerHTML = renderSpecEditor(
    buildSpecEditorRows(state.workingSet),
  );
}

async function applyWorkingSet(): Promise<void> {
  const selection = currentSelection();
  if (!selection) return;
  const problem = validateWorkingSet(state.workingSet);
  if (problem) {
    setStatus(problem, true);
    renderEditor();
    return;
  }
  const previousStrictness = state.lastRecompute?.strictness ?? [];
  const previousLabels = state.lastRecompute
    ? state.lastRecompute.strictness.map((row) => row.label)
    : [];
  try {
    const response = await channels.recompute.recompute(state.workingSet, selection);
    element<HTMLElement>("rules-panel").innerHTML = renderRuleTable(
      buildRuleRows(response.rules),
      displayedRuleCount(response),
    );
    element<HTMLElement>("strictness-panel").innerHTML = renderStrictness(
      response.strictness,
    );
    if (previousStrictness.length) {
      const edits = state.workingSet
        .map((spec) => specLabel(spec))
        .filter((label) => !previousLabels.includes(label))
        .map((label) => ({ oldLabel: label, newLabel: label, raised: false }));
      const warnings = monotonicityWarnings(previousStrictness, response.strictness, edits);
      if (warnings.length) setStatus(warnings.join("; "), true);
    }
    state.lastRecompute = response;
    setStatus(`recomputed: ${response.rule_count} rules`);
  } catch (error) {
    reportFailure("recompute", error);
  }
}

async function runWhatIf(): Promise<void> {
  const selection = currentSelection();
  if (!selection) return;
  const problem = validateWorkingSet(state.workingSet);
  if (problem) {
    setStatus(problem, true);
    return;
  }
  try {
    const response = await channels.whatif.whatif(
      selection,
      state.workingSet.length ? state.workingSet : undefined,
    );
    state.lastForecast = response;
    element<HTMLElement>("whatif-panel").innerHTML = renderForecastCard(
      buildForecastCard(response),
    );
  } catch (error) {
    reportFailure("what-if", error);
  }
}

async function loadPreset(name: string): Promise<void> {
  try {
    const response = await channels.meta.presets();
    const specs = response.presets[name];
    if (!specs) {
      setStatus(`unknown preset ${name}`, true);
      return;
    }
    state.workingSet = specs;
    renderEditor();
    await applyWorkingSet();
  } catch (error) {
    reportFailure("presets", error);
  }
}

function downloadWorkingSet(): void {
  const blob = new Blob([exportWorkingSet(state.workingSet)], {
    type: "application/json",
  });
  const link = document.createElement("a");
  link.href = URL.createObjectURL(blob);
  link.download = "attributes.json";
  link.click();
  URL.revokeObjectURL(link.href);
}

function wireEditorEvents(): void {
  element<HTMLElement>("spec-editor").addEventListener("change", (event) => {
    const input = event.target as HTMLInputElement;
    const index = Number(input.dataset.index);
    const field = input.dataset.field;
    if (!Number.isInteger(index) || !field) return;
    const spec: SpecEntry = { ...state.workingSet[index] };
    if (field === "threshold") spec.threshold = Number(input.value);
    if (field === "n_matches") spec.n_matches = Number(input.value);
    state.workingSet = state.workingSet.map((s, i) => (i === index ? spec : s));
    renderEditor();
  });
}

async function bootstrap(): Promise<void> {
  try {
    const summary = await channels.meta.summary();
    state.lookback = summary.defaults.lookback;
    state.gamma = summary.defaults.gamma;
    element<HTMLInputElement>("lookback").value = String(summary.defaults.lookback);
    element<HTMLInputElement>("gamma").value = summary.defaults.gamma;
    element<HTMLElement>("summary-panel").textContent =
      `${summary.matches} matches, ${summary.teams} teams, ` +
      `seasons ${summary.seasons.join(", ")}`;
    const attributes = await channels.meta.attributes();
    state.workingSet = attributes.specs;
    renderEditor();
    const strictness = await channels.meta.strictness();
    element<HTMLElement>("strictness-panel").innerHTML = renderStrictness(
      strictness.ranking,
    );
  } catch (error) {
    reportFailure("bootstrap", error);
  }

  element<HTMLInputElement>("lookback").addEventListener("change", (event) => {
    state.lookback = Number((event.target as HTMLInputElement).value);
  });
  element<HTMLInputElement>("gamma").addEventListener("change", (event) => {
    state.gamma = (event.target as HTMLInputElement).value;
  });
  element<HTMLButtonElement>("load-selection").addEventListener("click", () => {
    void refreshLattice();
    void refreshRules();
  });
  element<HTMLButtonElement>("apply-specs").addEventListener("click", () => {
    void applyWorkingSet();
  });
  element<HTMLButtonElement>("run-whatif").addEventListener("click", () => {
    void runWhatIf();
  });
  element<HTMLButtonElement>("export-specs").addEventListener("click", downloadWorkingSet);
  element<HTMLSelectElement>("preset").addEventListener("change", (event) => {
    void loadPreset((event.target as HTMLSelectElement).value);
  });
  wireEditorEvents();
}

document.addEventListener("DOMContentLoaded", () => {
  void bootstrap();
});
