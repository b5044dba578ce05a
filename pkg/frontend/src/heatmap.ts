import { writeFileSync } from 'node:fs'
import { FormatError } from './errors.js'
import { readSnapshot, Snapshot } from './snapshot.js'
import { axisBottom, axisLeft, linScale, linTicks, Panel, rect, svgDoc, text, viridis } from './svg.js'

/**
 * Density figure from snapshot files. 2D snapshots become a panel grid,
 * rho1 and rho2 side by side with one row per time; 1D snapshots become a
 * pair of space-time carpets (x horizontal, time vertical). The color
 * scale is shared across every panel.
 */
export function renderDensityHeatmap(snapPaths: string | string[], outPath: string) {
  const paths = Array.isArray(snapPaths) ? snapPaths : [snapPaths]
  if (paths.length === 0) throw new FormatError('no snapshot files given')
  const snaps = paths.map(readSnapshot).sort((a, b) => a.time - b.time)

  const first = snaps[0]
  for (const s of snaps.slice(1)) {
    if (s.ndim !== first.ndim || s.shape.join() !== first.shape.join()) {
      throw new FormatError(`snapshots disagree in field "shape": ${first.shape} vs ${s.shape}`)
    }
  }

  let vmax = 0
  for (const s of snaps) {
    for (const rho of [s.rho1, s.rho2]) {
      for (let i = 0; i < rho.length; i++) if (rho[i] > vmax) vmax = rho[i]
    }
  }
  if (vmax <= 0) vmax = 1

  return first.ndim === 2
    ? panelGrid(snaps, vmax, outPath)
    : carpets(snaps, vmax, outPath)
}

function cells2d(panel: Panel, s: Snapshot, rho: Float64Array, vmax: number): string[] {
  const [n1, n2] = s.shape
  const cw = panel.w / n1
  const ch = panel.h / n2
  const out: string[] = [`<g class="cells" shape-rendering="crispEdges">`]
  for (let i = 0; i < n1; i++) {
    for (let j = 0; j < n2; j++) {
      // axis 0 runs horizontally, axis 1 vertically with the origin at the bottom
      out.push(rect(panel.x + i * cw, panel.y + panel.h - (j + 1) * ch, cw + 0.1, ch + 0.1,
        viridis(rho[i * n2 + j] / vmax)))
    }
  }
  out.push('</g>')
  return out
}

function colorbar(x: number, y: number, h: number, vmax: number): string[] {
  const out: string[] = []
  const n = 40
  for (let i = 0; i < n; i++) {
    out.push(rect(x, y + h - ((i + 1) * h) / n, 14, h / n + 0.1, viridis((i + 0.5) / n)))
  }
  out.push(text(x + 18, y + 8, vmax.toPrecision(3), 'font-size="10"'))
  out.push(text(x + 18, y + h, '0', 'font-size="10"'))
  return out
}

function panelGrid(snaps: Snapshot[], vmax: number, outPath: string) {
  const pw = 190
  const ph = 190
  const body: string[] = []
  snaps.forEach((s, row) => {
    ;[s.rho1, s.rho2].forEach((rho, col) => {
      const panel: Panel = { x: 70 + col * (pw + 45), y: 40 + row * (ph + 60), w: pw, h: ph }
      body.push(...cells2d(panel, s, rho, vmax))
      const sx = linScale(s.lo[0], s.hi[0], panel.x, panel.x + panel.w)
      const sy = linScale(s.lo[1], s.hi[1], panel.y + panel.h, panel.y)
      body.push(axisBottom(panel, sx, linTicks(s.lo[0], s.hi[0], 4), 'x1'))
      body.push(axisLeft(panel, sy, linTicks(s.lo[1], s.hi[1], 4), 'x2'))
      body.push(text(panel.x + panel.w / 2, panel.y - 8,
        `rho${col + 1}  t = ${s.time}`, 'font-size="12" text-anchor="middle" class="panel-title"'))
    })
  })
  body.push(...colorbar(70 + 2 * (pw + 45), 40, ph, vmax))
  const width = 70 + 2 * (pw + 45) + 60
  writeFileSync(outPath, svgDoc(width, 40 + snaps.length * (ph + 60) + 5, body))
  return { panels: 2 * snaps.length, carpet: false }
}

function carpets(snaps: Snapshot[], vmax: number, outPath: string) {
  const s0 = snaps[0]
  const n = s0.shape[0]
  const pw = 260
  const ph = Math.max(120, Math.min(260, snaps.length * 24))
  const rowH = ph / snaps.length
  const body: string[] = []
  const times = snaps.map((s) => s.time)

  ;(['rho1', 'rho2'] as const).forEach((field, col) => {
    const panel: Panel = { x: 70 + col * (pw + 50), y: 40, w: pw, h: ph }
    body.push(`<g class="cells" shape-rendering="crispEdges">`)
    snaps.forEach((s, k) => {
      const rho = s[field]
      const cw = panel.w / n
      for (let i = 0; i < n; i++) {
        // latest time on top
        body.push(rect(panel.x + i * cw, panel.y + panel.h - (k + 1) * rowH, cw + 0.1, rowH + 0.1,
          viridis(rho[i] / vmax)))
      }
    })
    body.push('</g>')
    const sx = linScale(s0.lo[0], s0.hi[0], panel.x, panel.x + panel.w)
    const sy = linScale(Math.min(...times), Math.max(...times), panel.y + panel.h - rowH / 2, panel.y + rowH / 2)
    body.push(axisBottom(panel, sx, linTicks(s0.lo[0], s0.hi[0], 5), 'x'))
    body.push(axisLeft(panel, sy, linTicks(Math.min(...times), Math.max(...times), 4), 'time'))
    body.push(text(panel.x + panel.w / 2, panel.y - 8, field,
      'font-size="12" text-anchor="middle" class="panel-title"'))
  })

  body.push(...colorbar(70 + 2 * (pw + 50), 40, ph, vmax))
  writeFileSync(outPath, svgDoc(70 + 2 * (pw + 50) + 60, 40 + ph + 50, body))
  return { panels: 2, carpet: true }
}
