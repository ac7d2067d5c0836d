/** Hasse diagram view: layout by concept rank, hover details per node.
 *
 * Every number shown comes verbatim from the lattice response; coverage
 * readouts are displayed as "overlap/extent" pairs of served counts, not
 * recomputed ratios.
 */

import type { LatticeResponse } from "./../types.js";

export interface LatticeNode {
  id: number;
  x: number;
  y: number;
  rank: number;
  attributeLabels: string[];
  objectLabels: string[];
  extentSize: number;
  intentSize: number;
  /** outcome label -> "overlap/extent_size", straight from served counts */
  coverage: Record<string, string>;
}

export interface LatticeEdge {
  from: number;
  to: number;
}

export interface LatticeViewModel {
  degenerate: boolean;
  nodes: LatticeNode[];
  edges: LatticeEdge[];
  width: number;
  height: number;
}

const COLUMN_GAP = 130;
const ROW_GAP = 90;
const MARGIN = 60;

export function buildLatticeViewModel(lattice: LatticeResponse): LatticeViewModel {
  const degenerate = lattice.objects.length === 0;
  const byRank = new Map<number, number[]>();
  lattice.concepts.forEach((concept, index) => {
    const bucket = byRank.get(concept.rank) ?? [];
    bucket.push(index);
    byRank.set(concept.rank, bucket);
  });
  const maxRank = Math.max(0, ...lattice.concepts.map((c) => c.rank));
  const widest = Math.max(1, ...[...byRank.values()].map((bucket) => bucket.length));
  const width = 2 * MARGIN + (widest - 1) * COLUMN_GAP;

  const nodes: LatticeNode[] = lattice.concepts.map((concept, index) => {
    const bucket = byRank.get(concept.rank)!;
    const position = bucket.indexOf(index);
    const rowWidth = (bucket.length - 1) * COLUMN_GAP;
    const coverage: Record<string, string> = {};
    for (const [outcome, overlap] of Object.entries(concept.outcome_overlap ?? {})) {
      coverage[outcome] = `${overlap}/${concept.extent_size}`;
    }
    return {
      id: index,
      x: MARGIN + (width - 2 * MARGIN - rowWidth) / 2 + position * COLUMN_GAP,
      y: MARGIN + concept.rank * ROW_GAP,
      rank: concept.rank,
      attributeLabels: concept.attribute_labels,
      objectLabels: concept.object_labels,
      extentSize: concept.extent_size,
      intentSize: concept.intent_size,
      coverage,
    };
  });

  const edges: LatticeEdge[] = [];
  lattice.covering.forEach((lows, upper) => {
    for (const lower of lows) edges.push({ from: lower, to: upper });
  });

  return {
    degenerate,
    nodes,
    edges,
    width,
    height: 2 * MARGIN + maxRank * ROW_GAP,
  };
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderLattice(model: LatticeViewModel): string {
  if (model.degenerate) {
    return '<div class="banner banner-warning">degenerate context: the selection is empty,' +
      " forecasts fall back to priors</div>";
  }
  const parts: string[] = [
    `<svg viewBox="0 0 ${model.width} ${model.height}" class="lattice">`,
  ];
  for (const edge of model.edges) {
    const a = model.nodes[edge.from];
    const b = model.nodes[edge.to];
    parts.push(
      `<line x1="${a.x}" y1="${a.y}" x2="${b.x}" y2="${b.y}" class="lattice-edge"/>`,
    );
  }
  for (const node of model.nodes) {
    const coverage = Object.entries(node.coverage)
      .map(([outcome, ratio]) => `${outcome}: ${ratio}`)
      .join(", ");
    const hover = [
      `extent ${node.extentSize}, intent ${node.intentSize}`,
      coverage ? `coverage ${coverage}` : "",
    ]
      .filter(Boolean)
      .join("; ");
    const label = node.attributeLabels.join(", ");
    parts.push(
      `<g class="lattice-node" data-concept="${node.id}">` +
        `<circle cx="${node.x}" cy="${node.y}" r="14"/>` +
        `<title>${escapeXml(hover)}</title>` +
        (label
          ? `<text x="${node.x}" y="${node.y - 20}" text-anchor="middle">${escapeXml(label)}</text>`
          : "") +
        `</g>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}
