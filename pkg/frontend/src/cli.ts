#!/usr/bin/env node
// Figure scripts over study outputs. Pure readers: no physics is recomputed.
//
//   tsdirac-figures convergence <study.csv>       --out fig.svg
//   tsdirac-figures drift       <series.csv ...>  --out fig.svg
//   tsdirac-figures heatmap     <snap ...>        --out fig.svg
//
// Exit codes: 0 success, 2 bad input (schema or format error).

import { parseArgs } from 'node:util'
import { pathToFileURL } from 'node:url'
import { renderConvergenceFigure } from './convergence.js'
import { renderDriftFigure } from './drift.js'
import { renderDensityHeatmap } from './heatmap.js'
import { FormatError, SchemaError } from './errors.js'

const USAGE = `usage: tsdirac-figures <convergence|drift|heatmap> <input ...> --out <fig.svg>`

export function run(argv: string[]): number {
  let parsed
  try {
    parsed = parseArgs({
      args: argv,
      options: { out: { type: 'string', short: 'o' } },
      allowPositionals: true,
    })
  } catch (e) {
    console.error(String(e instanceof Error ? e.message : e))
    console.error(USAGE)
    return 2
  }
  const [command, ...inputs] = parsed.positionals
  const out = parsed.values.out
  if (!command || inputs.length === 0 || !out) {
    console.error(USAGE)
    return 2
  }

  try {
    if (command === 'convergence') {
      if (inputs.length !== 1) throw new SchemaError('convergence takes exactly one CSV')
      const r = renderConvergenceFigure(inputs[0], out)
      console.log(`wrote ${out}: ${r.lines} eps line(s), ${r.points} points${r.guide ? ', slope guide' : ''}`)
    } else if (command === 'drift') {
      const r = renderDriftFigure(inputs, out)
      console.log(`wrote ${out}: ${r.panels} panels over ${r.groups} (scheme, eps) group(s)`)
    } else if (command === 'heatmap') {
      const r = renderDensityHeatmap(inputs, out)
      console.log(`wrote ${out}: ${r.carpet ? 'space-time carpets' : `${r.panels} density panels`}`)
    } else {
      console.error(`unknown command "${command}"`)
      console.error(USAGE)
      return 2
    }
  } catch (e) {
    if (e instanceof SchemaError || e instanceof FormatError) {
      console.error(`${e.name}: ${e.message}`)
      return 2
    }
    throw e
  }
  return 0
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(run(process.argv.slice(2)))
}
