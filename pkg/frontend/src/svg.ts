/** Shared SVG plumbing: scales, ticks, axes, colors. No DOM, just strings. */

export interface Panel {
  x: number
  y: number
  w: number
  h: number
}

export type Scale = (v: number) => number

/** Categorical line colors (one per eps value). */
export const LINE_COLORS = ['#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#ff7f0e', '#8c564b']

// standard viridis stops
const VIRIDIS = [
  '#440154', '#482878', '#3e4989', '#31688e', '#26828e',
  '#1f9e89', '#35b779', '#6ece58', '#b5de2b', '#fde725',
]

function hexToRgb(hex: string): [number, number, number] {
  const n = parseInt(hex.slice(1), 16)
  return [(n >> 16) & 255, (n >> 8) & 255, n & 255]
}

/** Sample the viridis ramp at t in [0, 1]. */
export function viridis(t: number): string {
  const s = Math.max(0, Math.min(1, t)) * (VIRIDIS.length - 1)
  const k = Math.min(VIRIDIS.length - 2, Math.floor(s))
  const f = s - k
  const a = hexToRgb(VIRIDIS[k])
  const b = hexToRgb(VIRIDIS[k + 1])
  const mix = a.map((v, i) => Math.round(v + (b[i] - v) * f))
  return `rgb(${mix[0]},${mix[1]},${mix[2]})`
}

export function linScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0 || 1
  return (v) => r0 + ((v - d0) / span) * (r1 - r0)
}

export function logScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const l0 = Math.log10(d0)
  const span = Math.log10(d1) - l0 || 1
  return (v) => r0 + ((Math.log10(v) - l0) / span) * (r1 - r0)
}

/** Round ticks at a 1/2/5 step covering [lo, hi]. */
export function linTicks(lo: number, hi: number, n = 6): number[] {
  if (!(hi > lo)) return [lo]
  const raw = (hi - lo) / n
  const mag = Math.pow(10, Math.floor(Math.log10(raw)))
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => s >= raw) ?? 10 * mag
  const out: number[] = []
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-12 * step; v += step) out.push(v)
  return out
}

/** Powers of ten inside [lo, hi], thinned to at most ~8 labels. */
export function logTicks(lo: number, hi: number): number[] {
  const e0 = Math.ceil(Math.log10(lo) - 1e-12)
  const e1 = Math.floor(Math.log10(hi) + 1e-12)
  const every = Math.max(1, Math.ceil((e1 - e0 + 1) / 8))
  const out: number[] = []
  for (let e = e0; e <= e1; e += every) out.push(Math.pow(10, e))
  return out.length ? out : [lo]
}

export function fmtTick(v: number): string {
  if (v === 0) return '0'
  const e = Math.floor(Math.log10(Math.abs(v)))
  if (e < -3 || e > 3) {
    const m = v / Math.pow(10, e)
    return (Math.abs(m - 1) < 1e-9 ? '' : `${m.toPrecision(2)}x`) + `1e${e}`
  }
  return String(parseFloat(v.toPrecision(6)))
}

const esc = (s: string) => s.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;')

export function text(x: number, y: number, s: string, attrs = ''): string {
  return `<text x="${x.toFixed(1)}" y="${y.toFixed(1)}" font-family="sans-serif" ${attrs}>${esc(s)}</text>`
}

export function polyline(pts: Array<[number, number]>, stroke: string, attrs = ''): string {
  const p = pts.map(([x, y]) => `${x.toFixed(2)},${y.toFixed(2)}`).join(' ')
  return `<polyline points="${p}" fill="none" stroke="${stroke}" stroke-width="1.5" ${attrs}/>`
}

export function circle(x: number, y: number, r: number, fill: string, attrs = ''): string {
  return `<circle cx="${x.toFixed(2)}" cy="${y.toFixed(2)}" r="${r}" fill="${fill}" ${attrs}/>`
}

export function rect(x: number, y: number, w: number, h: number, fill: string, attrs = ''): string {
  return `<rect x="${x.toFixed(2)}" y="${y.toFixed(2)}" width="${w.toFixed(2)}" height="${h.toFixed(2)}" fill="${fill}" ${attrs}/>`
}

/** Axis line + ticks + labels along the bottom edge of a panel. */
export function axisBottom(p: Panel, scale: Scale, ticks: number[], label: string): string {
  const parts = [`<line x1="${p.x}" y1="${p.y + p.h}" x2="${p.x + p.w}" y2="${p.y + p.h}" stroke="black"/>`]
  for (const v of ticks) {
    const x = scale(v)
    if (x < p.x - 0.5 || x > p.x + p.w + 0.5) continue
    parts.push(`<line x1="${x.toFixed(1)}" y1="${p.y + p.h}" x2="${x.toFixed(1)}" y2="${p.y + p.h + 4}" stroke="black"/>`)
    parts.push(text(x, p.y + p.h + 15, fmtTick(v), 'font-size="10" text-anchor="middle"'))
  }
  parts.push(text(p.x + p.w / 2, p.y + p.h + 30, label, 'font-size="11" text-anchor="middle"'))
  return parts.join('\n')
}

/** Axis line + ticks + labels along the left edge of a panel. */
export function axisLeft(p: Panel, scale: Scale, ticks: number[], label: string): string {
  const parts = [`<line x1="${p.x}" y1="${p.y}" x2="${p.x}" y2="${p.y + p.h}" stroke="black"/>`]
  for (const v of ticks) {
    const y = scale(v)
    if (y < p.y - 0.5 || y > p.y + p.h + 0.5) continue
    parts.push(`<line x1="${p.x - 4}" y1="${y.toFixed(1)}" x2="${p.x}" y2="${y.toFixed(1)}" stroke="black"/>`)
    parts.push(text(p.x - 6, y + 3, fmtTick(v), 'font-size="10" text-anchor="end"'))
  }
  parts.push(
    `<text x="${p.x - 44}" y="${p.y + p.h / 2}" font-family="sans-serif" font-size="11" text-anchor="middle" transform="rotate(-90 ${p.x - 44} ${p.y + p.h / 2})">${esc(label)}</text>`,
  )
  return parts.join('\n')
}

export function svgDoc(width: number, height: number, body: string[]): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    rect(0, 0, width, height, 'white'),
    ...body,
    '</svg>',
    '',
  ].join('\n')
}
