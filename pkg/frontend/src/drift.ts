import { writeFileSync } from 'node:fs'
import { loadCsv, num, Row } from './csv.js'
import { SchemaError } from './errors.js'
import {
  axisBottom, axisLeft, LINE_COLORS, linScale, linTicks, logScale, logTicks,
  Panel, polyline, svgDoc, text,
} from './svg.js'

const REQUIRED = ['problem', 'scheme', 'eps', 'dt', 't', 'err_h', 'err_m']
const KNOWN_SCHEMES = ['sep_ts4', 'eep_ts4', 'strang_ref']
const FLOOR = 1e-17 // log axis clip for exactly conserved series

interface Group {
  scheme: string
  eps: number
  rows: Row[]
}

/**
 * Invariant-drift figure from one or more conservation series CSVs: one
 * panel column per (scheme, eps), energy drift on the top row, mass drift
 * on the bottom row; time linear, drift logarithmic with a 1e-17 floor.
 */
export function renderDriftFigure(csvPaths: string | string[], outPath: string) {
  const paths = Array.isArray(csvPaths) ? csvPaths : [csvPaths]
  const rows: Row[] = paths.flatMap((p) => loadCsv(p, REQUIRED))

  const schemes = [...new Set(rows.map((r) => String(r.scheme)))]
  for (const s of schemes) {
    if (!KNOWN_SCHEMES.includes(s)) {
      throw new SchemaError(`unknown scheme label "${s}" (expected one of ${KNOWN_SCHEMES.join(', ')})`)
    }
  }
  const problems = [...new Set(rows.map((r) => String(r.problem)))]
  if (problems.length > 1) {
    throw new SchemaError(`mismatched problem labels ${JSON.stringify(problems)} in one figure`)
  }

  const byKey = new Map<string, Group>()
  for (const r of rows) {
    const key = `${r.scheme}|${r.eps}`
    if (!byKey.has(key)) byKey.set(key, { scheme: String(r.scheme), eps: num(r, 'eps') ?? NaN, rows: [] })
    byKey.get(key)!.rows.push(r)
  }
  const groups = [...byKey.values()].sort(
    (a, b) => KNOWN_SCHEMES.indexOf(a.scheme) - KNOWN_SCHEMES.indexOf(b.scheme) || b.eps - a.eps,
  )

  const clip = (v: number | null) => Math.max(Math.abs(v ?? 0), FLOOR)
  const allT = rows.map((r) => num(r, 't') ?? 0)
  const allD = rows.flatMap((r) => [clip(num(r, 'err_h')), clip(num(r, 'err_m'))])
  const tMax = Math.max(...allT)
  const dMin = Math.min(...allD)
  const dMax = Math.max(...allD)

  const pw = 210
  const ph = 160
  const body: string[] = []
  groups.forEach((g, col) => {
    const sorted = [...g.rows].sort((a, b) => (num(a, 't') ?? 0) - (num(b, 't') ?? 0))
    const color = LINE_COLORS[col % LINE_COLORS.length]
    ;(['err_h', 'err_m'] as const).forEach((colName, rowIdx) => {
      const panel: Panel = { x: 70 + col * (pw + 30), y: 40 + rowIdx * (ph + 55), w: pw, h: ph }
      const sx = linScale(0, tMax, panel.x, panel.x + panel.w)
      const sy = logScale(dMin / 3, dMax * 3, panel.y + panel.h, panel.y)
      body.push(axisBottom(panel, sx, linTicks(0, tMax, 5), 'time'))
      body.push(axisLeft(panel, sy, logTicks(dMin, dMax),
        colName === 'err_h' ? 'energy drift' : 'mass drift'))
      const pts = sorted.map((r): [number, number] => [sx(num(r, 't') ?? 0), sy(clip(num(r, colName)))])
      body.push(polyline(pts, color, 'class="drift-line"'))
      if (rowIdx === 0) {
        body.push(text(panel.x + panel.w / 2, panel.y - 8, `${g.scheme}  eps = ${g.eps}`,
          'font-size="12" text-anchor="middle" class="panel-title"'))
      }
    })
  })

  const width = 70 + groups.length * (pw + 30) + 10
  writeFileSync(outPath, svgDoc(width, 40 + 2 * (ph + 55) + 10, body))
  return { panels: 2 * groups.length, groups: groups.length }
}
