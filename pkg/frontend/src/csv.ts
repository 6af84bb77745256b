import Papa from "papaparse";

// Columns every sweep CSV must carry; facet/series columns may add to these.
export const REQUIRED_COLUMNS = ["alpha", "gamma", "model", "revenue"];

export interface SweepRow {
  alpha: number;
  revenue: number;
  /** Every cell as text, keyed by column name; used for grouping. */
  values: Record<string, string>;
}

export function parseSweepCsv(text: string, groupColumns: string[] = []): SweepRow[] {
  if (text.trim() === "") {
    throw new Error("empty CSV: no rows");
  }
  const result = Papa.parse<Record<string, string>>(text, {
    header: true,
    skipEmptyLines: true,
  });
  if (result.errors.length > 0) {
    const e = result.errors[0];
    const where = e.row === undefined ? "" : ` (row ${e.row + 2})`;
    throw new Error(`malformed CSV: ${e.message}${where}`);
  }
  const fields = result.meta.fields ?? [];
  for (const column of [...REQUIRED_COLUMNS, ...groupColumns]) {
    if (!fields.includes(column)) {
      throw new Error(`missing column: ${column}`);
    }
  }
  if (result.data.length === 0) {
    throw new Error("empty CSV: no data rows");
  }
  return result.data.map((values, i) => ({
    alpha: toNumber(values, "alpha", i),
    revenue: toNumber(values, "revenue", i),
    values,
  }));
}

function toNumber(values: Record<string, string>, column: string, i: number): number {
  const raw = values[column];
  if (raw === undefined || raw.trim() === "") {
    throw new Error(`column ${column}, row ${i + 2}: empty cell`);
  }
  const v = Number(raw);
  if (!Number.isFinite(v)) {
    throw new Error(`column ${column}, row ${i + 2}: not a number: ${raw}`);
  }
  return v;
}
