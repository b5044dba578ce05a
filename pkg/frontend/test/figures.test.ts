import { existsSync, mkdtempSync, readFileSync, writeFileSync } from 'node:fs'
import { tmpdir } from 'node:os'
import { join } from 'node:path'
import { fileURLToPath } from 'node:url'
import { describe, expect, it } from 'vitest'
import { run } from '../src/cli.js'
import { renderConvergenceFigure } from '../src/convergence.js'
import { renderDriftFigure } from '../src/drift.js'
import { FormatError, SchemaError } from '../src/errors.js'
import { renderDensityHeatmap } from '../src/heatmap.js'

const fix = (name: string) => fileURLToPath(new URL(`./fixtures/${name}`, import.meta.url))
const tmp = mkdtempSync(join(tmpdir(), 'figs-'))
const out = (name: string) => join(tmp, name)

const CONV = fix('convergence_time_p1_nonlinear_1d_sep_ts4.csv')
const SEP_SERIES = fix('conservation_p1_nonlinear_1d_sep_ts4_series.csv')
const EEP_SERIES = fix('conservation_p1_nonlinear_1d_eep_ts4_series.csv')
const SNAPS_1D = [
  't00000.000000', 't00000.250000', 't00000.500000', 't00000.750000', 't00001.000000',
].map((t) => fix(`dyn_p2_soliton_sep_ts4_eps1_${t}.snap`))
const SNAPS_2D = ['t00000.100000', 't00000.200000'].map(
  (t) => fix(`dyn_p4_nonlinear_2d_sep_ts4_eps1_${t}.snap`),
)

const count = (s: string, needle: string) => s.split(needle).length - 1

describe('convergence figure', () => {
  it('draws one line per eps plus a slope guide', () => {
    const p = out('conv.svg')
    const r = renderConvergenceFigure(CONV, p)
    expect(r).toEqual({ lines: 3, points: 9, guide: true })
    const svg = readFileSync(p, 'utf8')
    expect(svg.startsWith('<svg')).toBe(true)
    expect(count(svg, 'class="eps-line"')).toBe(3)
    expect(count(svg, 'class="guide"')).toBe(1)
    expect(svg).toContain('slope 4')
    expect(svg).not.toContain('NaN')
  })

  it('degrades to a marker for a single-row study', () => {
    const lines = readFileSync(CONV, 'utf8').trim().split('\n')
    const p = join(tmp, 'one-row.csv')
    writeFileSync(p, `${lines[0]}\n${lines[1]}\n`)
    const r = renderConvergenceFigure(p, out('one.svg'))
    expect(r).toEqual({ lines: 1, points: 1, guide: false })
    const svg = readFileSync(out('one.svg'), 'utf8')
    expect(count(svg, 'class="eps-line"')).toBe(1) // the marker, no polyline
    expect(svg).not.toContain('class="guide"')
    expect(svg).not.toContain('slope') // no fit legend, no guide label
  })

  it('rejects a header-only study', () => {
    const header = readFileSync(CONV, 'utf8').trim().split('\n')[0]
    const p = join(tmp, 'header-only.csv')
    writeFileSync(p, header + '\n')
    expect(() => renderConvergenceFigure(p, out('x.svg'))).toThrowError(SchemaError)
  })

  it('rejects a study where every row failed', () => {
    const lines = readFileSync(CONV, 'utf8').trim().split('\n')
    // the study CSVs use \r\n line endings, so keep any trailing \r intact
    const bad = [lines[0], ...lines.slice(1).map((l) => l.replace(/,ok(\r?)$/, ',blowup$1'))]
    const p = join(tmp, 'failed.csv')
    writeFileSync(p, bad.join('\n') + '\n')
    expect(() => renderConvergenceFigure(p, out('failed.svg'))).toThrowError(SchemaError)
    expect(() => renderConvergenceFigure(p, out('failed.svg'))).toThrowError(/status ok/)
  })
})

describe('drift figure', () => {
  it('lays out energy and mass rows per (scheme, eps) column', () => {
    const p = out('drift.svg')
    const r = renderDriftFigure([SEP_SERIES, EEP_SERIES], p)
    expect(r).toEqual({ panels: 8, groups: 4 })
    const svg = readFileSync(p, 'utf8')
    expect(count(svg, 'class="drift-line"')).toBe(8)
    expect(count(svg, 'class="panel-title"')).toBe(4)
    expect(count(svg, 'energy drift')).toBe(4)
    expect(count(svg, 'mass drift')).toBe(4)
    expect(svg).not.toContain('NaN')
  })

  it('rejects an unknown scheme label', () => {
    const text = readFileSync(SEP_SERIES, 'utf8').replaceAll('sep_ts4', 'mystery9')
    const p = join(tmp, 'scheme.csv')
    writeFileSync(p, text)
    expect(() => renderDriftFigure(p, out('x.svg'))).toThrowError(SchemaError)
    expect(() => renderDriftFigure(p, out('x.svg'))).toThrowError(/"mystery9"/)
  })

  it('rejects series from different problems in one figure', () => {
    const text = readFileSync(SEP_SERIES, 'utf8').replaceAll('p1_nonlinear_1d', 'p2_soliton')
    const p = join(tmp, 'problem.csv')
    writeFileSync(p, text)
    expect(() => renderDriftFigure([SEP_SERIES, p], out('x.svg'))).toThrowError(/mismatched problem/)
  })

  it('clips exactly conserved series to the log floor instead of failing', () => {
    const p = join(tmp, 'zero.csv')
    writeFileSync(p, [
      'problem,scheme,eps,dt,t,err_h,err_m',
      'p1_nonlinear_1d,strang_ref,1,0.1,0,0,0',
      'p1_nonlinear_1d,strang_ref,1,0.1,0.5,0,0',
      'p1_nonlinear_1d,strang_ref,1,0.1,1,0,0',
      '',
    ].join('\n'))
    const r = renderDriftFigure(p, out('zero.svg'))
    expect(r).toEqual({ panels: 2, groups: 1 })
    const svg = readFileSync(out('zero.svg'), 'utf8')
    expect(svg).not.toContain('NaN')
    expect(svg).not.toContain('Infinity')
  })
})

describe('density heatmap', () => {
  it('renders a panel grid for 2d snapshots', () => {
    const p = out('heat2d.svg')
    const r = renderDensityHeatmap(SNAPS_2D, p)
    expect(r).toEqual({ panels: 4, carpet: false })
    const svg = readFileSync(p, 'utf8')
    expect(count(svg, 'class="cells"')).toBe(4)
    expect(count(svg, 'class="panel-title"')).toBe(4)
    expect(svg).not.toContain('NaN')
  })

  it('renders space-time carpets for 1d snapshots', () => {
    const p = out('heat1d.svg')
    const r = renderDensityHeatmap(SNAPS_1D, p)
    expect(r).toEqual({ panels: 2, carpet: true })
    const svg = readFileSync(p, 'utf8')
    expect(count(svg, 'class="cells"')).toBe(2)
    expect(svg).not.toContain('NaN')
  })

  it('rejects snapshots with mismatched grids', () => {
    expect(() => renderDensityHeatmap([SNAPS_1D[0], SNAPS_2D[0]], out('x.svg')))
      .toThrowError(FormatError)
    expect(() => renderDensityHeatmap([SNAPS_1D[0], SNAPS_2D[0]], out('x.svg')))
      .toThrowError(/"shape"/)
  })
})

describe('cli', () => {
  it('exits 0 on a good convergence figure', () => {
    expect(run(['convergence', CONV, '--out', out('cli-conv.svg')])).toBe(0)
    expect(existsSync(out('cli-conv.svg'))).toBe(true)
  })

  it('exits 0 on drift and heatmap figures', () => {
    expect(run(['drift', SEP_SERIES, EEP_SERIES, '-o', out('cli-drift.svg')])).toBe(0)
    expect(run(['heatmap', ...SNAPS_1D, '-o', out('cli-heat.svg')])).toBe(0)
  })

  it('exits 2 on usage errors', () => {
    expect(run([])).toBe(2)
    expect(run(['sketch', CONV, '--out', out('x.svg')])).toBe(2)
    expect(run(['convergence', CONV])).toBe(2)
    expect(run(['convergence', CONV, SEP_SERIES, '--out', out('x.svg')])).toBe(2)
  })

  it('exits 2 on malformed inputs', () => {
    expect(run(['drift', CONV, '--out', out('x.svg')])).toBe(2)
    const p = join(tmp, 'not-a-snap.snap')
    writeFileSync(p, 'plain text\n')
    expect(run(['heatmap', p, '--out', out('x.svg')])).toBe(2)
  })
})
