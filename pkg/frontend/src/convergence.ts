import { writeFileSync } from 'node:fs'
import { loadCsv, num, Row } from './csv.js'
import { SchemaError } from './errors.js'
import {
  axisBottom, axisLeft, circle, LINE_COLORS, logScale, logTicks,
  Panel, polyline, svgDoc, text,
} from './svg.js'

const REQUIRED = ['problem', 'scheme', 'kind', 'eps', 'dt', 'nx', 'ntau', 'err_linf', 'status']
const X_COL: Record<string, string> = { time: 'dt', space: 'nx', tau: 'ntau' }

interface Series {
  eps: number
  pts: Array<[number, number]> // (x, err) sorted by x
}

function leastSquaresSlope(pts: Array<[number, number]>): number {
  const lx = pts.map(([x]) => Math.log(x))
  const ly = pts.map(([, y]) => Math.log(y))
  const n = lx.length
  const mx = lx.reduce((a, b) => a + b, 0) / n
  const my = ly.reduce((a, b) => a + b, 0) / n
  let sxy = 0
  let sxx = 0
  for (let i = 0; i < n; i++) {
    sxy += (lx[i] - mx) * (ly[i] - my)
    sxx += (lx[i] - mx) * (lx[i] - mx)
  }
  return sxy / sxx
}

/**
 * Log-log error plot from a convergence study CSV: one line per eps plus a
 * slope-4 guide (exponent -4 for resolution sweeps, where error falls as the
 * point count grows). Returns what was drawn so callers can sanity-check.
 */
export function renderConvergenceFigure(csvPath: string, outPath: string) {
  const rows = loadCsv(csvPath, REQUIRED)
  const kinds = [...new Set(rows.map((r) => String(r.kind)))]
  if (kinds.length > 1) {
    throw new SchemaError(`${csvPath}: mixed sweep kinds ${JSON.stringify(kinds)}`)
  }
  const xcol = X_COL[kinds[0]]
  if (!xcol) throw new SchemaError(`${csvPath}: unknown sweep kind "${kinds[0]}"`)

  const usable = rows.filter((r) => r.status === 'ok' && num(r, 'err_linf') !== null && num(r, xcol) !== null)
  if (usable.length === 0) {
    throw new SchemaError(`${csvPath}: no rows with status ok and numeric err_linf`)
  }

  const byEps = new Map<number, Row[]>()
  for (const r of usable) {
    const e = num(r, 'eps')!
    if (!byEps.has(e)) byEps.set(e, [])
    byEps.get(e)!.push(r)
  }
  const series: Series[] = [...byEps.keys()].sort((a, b) => b - a).map((eps) => ({
    eps,
    pts: byEps.get(eps)!
      .map((r): [number, number] => [num(r, xcol)!, num(r, 'err_linf')!])
      .sort((a, b) => a[0] - b[0]),
  }))

  const xs = usable.map((r) => num(r, xcol)!)
  const ys = usable.map((r) => num(r, 'err_linf')!)
  const panel: Panel = { x: 70, y: 30, w: 430, h: 330 }
  const sx = logScale(Math.min(...xs) / 1.15, Math.max(...xs) * 1.15, panel.x, panel.x + panel.w)
  const ymin = Math.max(Math.min(...ys), 1e-17)
  const ymax = Math.max(...ys)
  const sy = logScale(ymin / 3, ymax * 3, panel.y + panel.h, panel.y)

  const body: string[] = []
  body.push(axisBottom(panel, sx, logTicks(Math.min(...xs), Math.max(...xs)), xcol))
  body.push(axisLeft(panel, sy, logTicks(ymin, ymax), 'relative error (max norm)'))

  series.forEach((s, i) => {
    const color = LINE_COLORS[i % LINE_COLORS.length]
    const px = s.pts.map(([x, y]): [number, number] => [sx(x), sy(Math.max(y, 1e-17))])
    if (px.length > 1) body.push(polyline(px, color, 'class="eps-line"'))
    for (const [x, y] of px) body.push(circle(x, y, 3, color, px.length > 1 ? '' : 'class="eps-line"'))
    const slope = s.pts.length > 1 ? ` (slope ${leastSquaresSlope(s.pts).toFixed(2)})` : ''
    body.push(text(panel.x + 10, panel.y + 16 + 14 * i, `eps = ${s.eps}${slope}`,
      `font-size="11" fill="${color}"`))
  })

  // slope-4 guide anchored at the best-resolved end of the longest line
  const longest = series.reduce((a, b) => (b.pts.length > a.pts.length ? b : a))
  let guide = false
  if (longest.pts.length > 1) {
    guide = true
    const expo = xcol === 'dt' ? 4 : -4
    const [xa, ya] = expo > 0 ? longest.pts[0] : longest.pts[longest.pts.length - 1]
    const pts = [Math.min(...xs), Math.max(...xs)].map((x): [number, number] => [
      sx(x), sy(Math.max(0.5 * ya * Math.pow(x / xa, expo), 1e-17)),
    ])
    body.push(polyline(pts, '#888', 'stroke-dasharray="6 4" class="guide"'))
    body.push(text(pts[1][0] - 60, pts[1][1] - 6, `slope ${expo}`, 'font-size="10" fill="#666"'))
  }

  const title = `${usable[0].problem} ${usable[0].scheme}: error vs ${xcol}`
  body.push(text(panel.x + panel.w / 2, 18, title, 'font-size="13" text-anchor="middle"'))
  writeFileSync(outPath, svgDoc(560, 410, body))
  return { lines: series.length, points: usable.length, guide }
}
