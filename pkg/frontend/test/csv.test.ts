import { mkdtempSync, writeFileSync } from 'node:fs'
import { tmpdir } from 'node:os'
import { join } from 'node:path'
import { fileURLToPath } from 'node:url'
import { describe, expect, it } from 'vitest'
import { loadCsv, num } from '../src/csv.js'
import { SchemaError } from '../src/errors.js'

const fix = (name: string) => fileURLToPath(new URL(`./fixtures/${name}`, import.meta.url))
const tmp = mkdtempSync(join(tmpdir(), 'csv-'))

const CONV = 'convergence_time_p1_nonlinear_1d_sep_ts4.csv'

describe('loadCsv', () => {
  it('reads the convergence fixture with numeric typing', () => {
    const rows = loadCsv(fix(CONV), ['problem', 'scheme', 'eps', 'dt', 'err_linf'])
    expect(rows.length).toBe(9)
    expect(rows[0].problem).toBe('p1_nonlinear_1d')
    expect(typeof rows[0].dt).toBe('number')
    expect(num(rows[0], 'err_linf')).toBeGreaterThan(0)
  })

  it('names a missing required column', () => {
    expect(() => loadCsv(fix(CONV), ['no_such_col'])).toThrowError(SchemaError)
    expect(() => loadCsv(fix(CONV), ['no_such_col'])).toThrowError(/"no_such_col"/)
  })

  it('rejects a header-only file', () => {
    const p = join(tmp, 'empty.csv')
    writeFileSync(p, 'a,b,c\n')
    expect(() => loadCsv(p, ['a'])).toThrowError(SchemaError)
    expect(() => loadCsv(p, ['a'])).toThrowError(/no data rows/)
  })

  it('returns null from num() for non-numeric cells', () => {
    const rows = loadCsv(fix(CONV), ['status'])
    expect(num(rows[0], 'status')).toBeNull()
  })
})
