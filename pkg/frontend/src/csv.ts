import { readFileSync } from 'node:fs'
import Papa from 'papaparse'
import { SchemaError } from './errors.js'

export type Row = Record<string, string | number | boolean | null>

/**
 * Load a study CSV and check it carries the columns a figure needs.
 * Throws SchemaError naming the first missing column, or on an empty file.
 */
export function loadCsv(path: string, required: string[]): Row[] {
  const text = readFileSync(path, 'utf8')
  const parsed = Papa.parse<Row>(text.trim(), {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  })
  const fields = parsed.meta.fields ?? []
  for (const col of required) {
    if (!fields.includes(col)) {
      throw new SchemaError(`${path}: missing column "${col}"`)
    }
  }
  if (parsed.data.length === 0) {
    throw new SchemaError(`${path}: no data rows`)
  }
  return parsed.data
}

/** Numeric cell value, or null for blanks and non-numbers. */
export function num(row: Row, col: string): number | null {
  const v = row[col]
  return typeof v === 'number' && Number.isFinite(v) ? v : null
}
