/** Thin fetch client for the serve API.
 *
 * Every panel owns one ApiChannel; a channel allows a single in-flight
 * compute request and discards responses that arrive after a newer
 * request was issued (request-token staleness guard).
 */

import type {
  AttributesResponse,
  LatticeResponse,
  MatchesResponse,
  RecomputeResponse,
  RulesResponse,
  Selection,
  SpecEntry,
  StrictnessResponse,
  SummaryResponse,
  WhatIfResponse,
} from "./types.js";

export class StaleResponseError extends Error {
  constructor() {
    super("response superseded by a newer request");
  }
}

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
  }
}

async function parseOrThrow<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = await response.json();
      if (body && typeof body.detail === "string") detail = body.detail;
    } catch {
      // keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

function selectionQuery(selection: Selection): string {
  const params = new URLSearchParams({
    season: selection.season,
    week: String(selection.week),
    home: selection.home,
    away: selection.away,
  });
  if (selection.lookback !== undefined) params.set("lookback", String(selection.lookback));
  if (selection.gamma !== undefined) params.set("gamma", selection.gamma);
  return params.toString();
}

export class ApiChannel {
  private token = 0;

  constructor(private base: string = "") {}

  /** Wraps a fetch so only the most recently issued request may resolve. */
  private async guarded<T>(run: () => Promise<T>): Promise<T> {
    const mine = ++this.token;
    const result = await run();
    if (mine !== this.token) throw new StaleResponseError();
    return result;
  }

  summary(): Promise<SummaryResponse> {
    return this.guarded(() =>
      fetch(`${this.base}/api/v1/summary`).then((r) => parseOrThrow<SummaryResponse>(r)),
    );
  }

  attributes(): Promise<AttributesResponse> {
    return this.guarded(() =>
      fetch(`${this.base}/api/v1/attributes`).then((r) => parseOrThrow<AttributesResponse>(r)),
    );
  }

  presets(): Promise<{ presets: Record<string, SpecEntry[]> }> {
    return this.guarded(() =>
      fetch(`${this.base}/api/v1/presets`).then((r) => parseOrThrow(r)),
    );
  }

  matches(season: string, week: number): Promise<MatchesResponse> {
    const params = new URLSearchParams({ season, week: String(week) });
    return this.guarded(() =>
      fetch(`${this.base}/api/v1/matches?${params}`).then((r) =>
        parseOrThrow<MatchesResponse>(r),
      ),
    );
  }

  strictness(): Promise<StrictnessResponse> {
    return this.guarded(() =>
      fetch(`${this.base}/api/v1/strictness`).then((r) => parseOrThrow<StrictnessResponse>(r)),
    );
  }

  lattice(selection: Selection): Promise<LatticeResponse> {
    return this.guarded(() =>
      fetch(`${this.base}/api/v1/lattice?${selectionQuery(selection)}`).then((r) =>
        parseOrThrow<LatticeResponse>(r),
      ),
    );
  }

  rules(selection: Selection): Promise<RulesResponse> {
    return this.guarded(() =>
      fetch(`${this.base}/api/v1/rules?${selectionQuery(selection)}`).then((r) =>
        parseOrThrow<RulesResponse>(r),
      ),
    );
  }

  recompute(specs: SpecEntry[], selection: Selection): Promise<RecomputeResponse> {
    return this.guarded(() =>
      fetch(`${this.base}/api/v1/recompute`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ specs, selection }),
      }).then((r) => parseOrThrow<RecomputeResponse>(r)),
    );
  }

  whatif(
    selection: Selection,
    specs?: SpecEntry[],
    mode?: string,
    homeReduction?: number,
  ): Promise<WhatIfResponse> {
    const body: Record<string, unknown> = { selection };
    if (specs) body.specs = specs;
    if (mode) body.mode = mode;
    if (homeReduction !== undefined) body.home_reduction = homeReduction;
    return this.guarded(() =>
      fetch(`${this.base}/api/v1/whatif`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
      }).then((r) => parseOrThrow<WhatIfResponse>(r)),
    );
  }
}
