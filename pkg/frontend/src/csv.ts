/**
 * Readers for the sweep diagnostics CSVs.
 *
 * Two schemas exist: per-case diagnostics (one row per sample time) and the
 * rate table. Both are plain comma-separated files with a fixed header; an
 * aborted case ends with a `# aborted ...` marker line. Validation failures
 * always name the row and column.
 */

export const CASE_COLUMNS = [
  "case_id",
  "eps",
  "t",
  "E_total",
  "D_cum",
  "slack",
  "w2",
  "Z2",
  "pi2",
  "mod_total",
  "uncorrected_w2",
  "uncorrected_pi2",
  "lq2_rho",
  "l2_Zh",
  "l2_Pu",
  "divH_rel",
  "grad_u_inf",
] as const;

export const RATE_COLUMNS = [
  "eps",
  "sup_mod_total",
  "pair_slope",
  "fitted_slope",
  "sigma_theory",
] as const;

export type CaseRow = { case_id: string } & {
  [K in Exclude<(typeof CASE_COLUMNS)[number], "case_id">]: number;
};

export interface RateRow {
  eps: number;
  sup_mod_total: number;
  pair_slope: number | null;
  fitted_slope: number;
  sigma_theory: number;
}

export class CsvError extends Error {}

const ABORT_PREFIX = "# aborted";

function splitLines(text: string): string[] {
  return text.split(/\r?\n/).filter((ln) => ln.length > 0);
}

function checkHeader(line: string, expected: readonly string[], path: string): void {
  const got = line.split(",");
  if (got.length !== expected.length) {
    throw new CsvError(
      `${path}: header has ${got.length} columns, expected ${expected.length}`
    );
  }
  for (let j = 0; j < expected.length; j++) {
    if (got[j] !== expected[j]) {
      throw new CsvError(
        `${path}: header column ${j + 1} is "${got[j]}", expected "${expected[j]}"`
      );
    }
  }
}

function parseNumber(
  raw: string,
  path: string,
  row: number,
  column: string
): number {
  const v = Number(raw);
  if (raw.trim() === "" || !Number.isFinite(v)) {
    throw new CsvError(
      `${path}: row ${row}, column "${column}": not a finite number (got "${raw}")`
    );
  }
  return v;
}

export interface CaseFile {
  rows: CaseRow[];
  abortReason: string | null;
}

export function parseCaseCsv(text: string, path = "<case csv>"): CaseFile {
  const lines = splitLines(text);
  if (lines.length === 0) throw new CsvError(`${path}: empty file`);
  checkHeader(lines[0], CASE_COLUMNS, path);
  const rows: CaseRow[] = [];
  let abortReason: string | null = null;
  for (let i = 1; i < lines.length; i++) {
    const ln = lines[i];
    if (ln.startsWith("#")) {
      if (ln.startsWith(ABORT_PREFIX)) {
        abortReason = ln.slice(ABORT_PREFIX.length).trim();
        const m = abortReason.match(/^reason="(.*)"$/);
        if (m) abortReason = m[1];
      }
      continue;
    }
    const parts = ln.split(",");
    if (parts.length !== CASE_COLUMNS.length) {
      throw new CsvError(
        `${path}: row ${i + 1} has ${parts.length} fields, expected ${CASE_COLUMNS.length}`
      );
    }
    const row = { case_id: parts[0] } as CaseRow;
    for (let j = 1; j < CASE_COLUMNS.length; j++) {
      (row as Record<string, unknown>)[CASE_COLUMNS[j]] = parseNumber(
        parts[j],
        path,
        i + 1,
        CASE_COLUMNS[j]
      );
    }
    rows.push(row);
  }
  if (rows.length === 0 && abortReason === null) {
    throw new CsvError(`${path}: no data rows`);
  }
  return { rows, abortReason };
}

export function parseRateCsv(text: string, path = "<rate csv>"): RateRow[] {
  const lines = splitLines(text);
  if (lines.length === 0) throw new CsvError(`${path}: empty file`);
  checkHeader(lines[0], RATE_COLUMNS, path);
  const rows: RateRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    if (lines[i].startsWith("#")) continue;
    const parts = lines[i].split(",");
    if (parts.length !== RATE_COLUMNS.length) {
      throw new CsvError(
        `${path}: row ${i + 1} has ${parts.length} fields, expected ${RATE_COLUMNS.length}`
      );
    }
    rows.push({
      eps: parseNumber(parts[0], path, i + 1, "eps"),
      sup_mod_total: parseNumber(parts[1], path, i + 1, "sup_mod_total"),
      // the first row carries no adjacent-pair slope
      pair_slope: parts[2].trim() === "" ? null : parseNumber(parts[2], path, i + 1, "pair_slope"),
      fitted_slope: parseNumber(parts[3], path, i + 1, "fitted_slope"),
      sigma_theory: parseNumber(parts[4], path, i + 1, "sigma_theory"),
    });
  }
  if (rows.length === 0) throw new CsvError(`${path}: no data rows`);
  for (const [i, r] of rows.entries()) {
    if (!(r.eps > 0) || !(r.sup_mod_total > 0)) {
      throw new CsvError(
        `${path}: row ${i + 2}: eps and sup_mod_total must be positive for a log-log plot`
      );
    }
  }
  return rows;
}
