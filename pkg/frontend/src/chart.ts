import { scaleLinear } from "d3-scale";
import { line } from "d3-shape";
import type { SweepRow } from "./csv.js";

export interface PlotSpec {
  input: string;
  output: string;
  /** Column whose distinct values become panels (default gamma). */
  facet: string;
  /** Column whose distinct values become lines within a panel (default model). */
  series: string;
  /** Draw the dashed fair-share reference y = alpha. */
  reference: boolean;
}

export const DEFAULT_FACET = "gamma";
export const DEFAULT_SERIES = "model";

// d3 category10; series are sorted, so colors are a pure function of the data.
const PALETTE = [
  "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

const PANEL = { width: 240, height: 200, gap: 28 };
const MARGIN = { top: 48, right: 16, bottom: 44, left: 52 };

/** Round to 1/100 px so the output never depends on float formatting noise. */
const px = (v: number): string => String(Math.round(v * 100) / 100);

function distinctValues(rows: SweepRow[], column: string): string[] {
  const seen = [...new Set(rows.map((r) => r.values[column] ?? ""))];
  const numeric = seen.every((s) => Number.isFinite(Number(s)));
  seen.sort(numeric ? (a, b) => Number(a) - Number(b) : undefined);
  return seen;
}

export function render(rows: SweepRow[], spec: Pick<PlotSpec, "facet" | "series" | "reference">): string {
  const facets = distinctValues(rows, spec.facet);
  const seriesNames = distinctValues(rows, spec.series);

  const x = scaleLinear().domain([0, 0.5]).range([0, PANEL.width]);
  const ymax = Math.max(
    spec.reference ? 0.5 : 0,
    ...rows.map((r) => r.revenue),
  );
  const y = scaleLinear().domain([0, ymax]).nice(5).range([PANEL.height, 0]);

  const width = MARGIN.left + facets.length * PANEL.width
    + (facets.length - 1) * PANEL.gap + MARGIN.right;
  const height = MARGIN.top + PANEL.height + MARGIN.bottom;

  const out: string[] = [];
  out.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="10">`,
  );
  out.push(`<rect width="${width}" height="${height}" fill="white"/>`);

  // Legend: one swatch per series, top left.
  for (let j = 0; j < seriesNames.length; j++) {
    const lx = MARGIN.left + j * 120;
    out.push(`<rect x="${lx}" y="10" width="10" height="10" fill="${PALETTE[j % PALETTE.length]}"/>`);
    out.push(`<text x="${lx + 14}" y="19">${escapeXml(seriesNames[j])}</text>`);
  }

  facets.forEach((facetValue, k) => {
    const tx = MARGIN.left + k * (PANEL.width + PANEL.gap);
    out.push(`<g class="facet" transform="translate(${tx},${MARGIN.top})">`);
    out.push(
      `<text x="${PANEL.width / 2}" y="-10" text-anchor="middle" font-size="11">` +
      `${escapeXml(spec.facet)} = ${escapeXml(facetValue)}</text>`,
    );

    for (const t of y.ticks(5)) {
      const ty = px(y(t));
      out.push(`<line x1="0" y1="${ty}" x2="${PANEL.width}" y2="${ty}" stroke="#e0e0e0"/>`);
      if (k === 0) {
        out.push(`<text x="-6" y="${px(y(t) + 3)}" text-anchor="end">${y.tickFormat(5)(t)}</text>`);
      }
    }
    for (const t of x.ticks(5)) {
      out.push(
        `<text x="${px(x(t))}" y="${PANEL.height + 14}" text-anchor="middle">` +
        `${x.tickFormat(5)(t)}</text>`,
      );
    }
    out.push(`<line x1="0" y1="${PANEL.height}" x2="${PANEL.width}" y2="${PANEL.height}" stroke="#333"/>`);
    out.push(`<line x1="0" y1="0" x2="0" y2="${PANEL.height}" stroke="#333"/>`);
    out.push(
      `<text x="${PANEL.width / 2}" y="${PANEL.height + 30}" text-anchor="middle">alpha</text>`,
    );
    if (k === 0) {
      out.push(
        `<text transform="translate(-38,${PANEL.height / 2}) rotate(-90)" ` +
        `text-anchor="middle">revenue</text>`,
      );
    }

    if (spec.reference) {
      out.push(
        `<line x1="${px(x(0))}" y1="${px(y(0))}" x2="${px(x(0.5))}" y2="${px(y(0.5))}" ` +
        `stroke="#888" stroke-dasharray="4 3"/>`,
      );
    }

    const inFacet = rows.filter((r) => (r.values[spec.facet] ?? "") === facetValue);
    seriesNames.forEach((name, j) => {
      const pts = inFacet
        .filter((r) => (r.values[spec.series] ?? "") === name)
        .sort((a, b) => a.alpha - b.alpha)
        .map((r) => [Number(px(x(r.alpha))), Number(px(y(r.revenue)))] as [number, number]);
      if (pts.length === 0) {
        return;
      }
      const color = PALETTE[j % PALETTE.length];
      if (pts.length > 1) {
        const d = line()(pts);
        out.push(`<path d="${d}" fill="none" stroke="${color}" stroke-width="1.5"/>`);
      }
      for (const [cx, cy] of pts) {
        out.push(`<circle cx="${cx}" cy="${cy}" r="2.5" fill="${color}"/>`);
      }
    });

    out.push("</g>");
  });

  out.push("</svg>");
  return out.join("\n") + "\n";
}

function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
