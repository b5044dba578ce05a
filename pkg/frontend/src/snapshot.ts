import { readFileSync } from 'node:fs'
import { FormatError } from './errors.js'

const MAGIC = 'tsdirac-snapshot 1'
const HEADER_FIELDS = ['ndim', 'shape', 'domain', 'time', 'fields'] as const

export interface Snapshot {
  ndim: number
  shape: number[]
  lo: number[]
  hi: number[]
  time: number
  /** C row-major densities of the stated shape. */
  rho1: Float64Array
  rho2: Float64Array
}

/**
 * Parse a density snapshot: ASCII header lines up to "end", then the binary
 * payload (rho1 then rho2 as little-endian float64, C row-major).
 * Throws FormatError naming the offending header field.
 */
export function readSnapshot(path: string): Snapshot {
  const buf = readFileSync(path)

  const lines: string[] = []
  let pos = 0
  while (true) {
    const nl = buf.indexOf(0x0a, pos)
    if (nl < 0 || lines.length > 16) {
      throw new FormatError(`${path}: header has no "end" line`)
    }
    const line = buf.subarray(pos, nl).toString('ascii')
    pos = nl + 1
    lines.push(line)
    if (line === 'end') break
  }

  if (lines[0] !== MAGIC) {
    throw new FormatError(`${path}: bad magic line, expected "${MAGIC}"`)
  }
  const fields = new Map<string, string[]>()
  for (const line of lines.slice(1, -1)) {
    const sp = line.indexOf(' ')
    if (sp < 0) throw new FormatError(`${path}: malformed header line "${line}"`)
    fields.set(line.slice(0, sp), line.slice(sp + 1).split(/\s+/))
  }
  for (const key of HEADER_FIELDS) {
    if (!fields.has(key)) throw new FormatError(`${path}: missing header field "${key}"`)
  }

  const ndim = Number(fields.get('ndim')![0])
  if (!(ndim === 1 || ndim === 2)) {
    throw new FormatError(`${path}: field "ndim" must be 1 or 2, got "${fields.get('ndim')![0]}"`)
  }
  const shape = fields.get('shape')!.map(Number)
  if (shape.length !== ndim || shape.some((n) => !Number.isInteger(n) || n < 1)) {
    throw new FormatError(`${path}: field "shape" must hold ${ndim} positive integer(s)`)
  }
  const dom = fields.get('domain')!.map(Number)
  if (dom.length !== 2 * ndim || dom.some((v) => !Number.isFinite(v))) {
    throw new FormatError(`${path}: field "domain" must hold ${2 * ndim} numbers`)
  }
  const time = Number(fields.get('time')![0])
  if (!Number.isFinite(time)) {
    throw new FormatError(`${path}: field "time" is not a number`)
  }
  if (fields.get('fields')!.join(' ') !== 'rho1 rho2') {
    throw new FormatError(`${path}: field "fields" must be "rho1 rho2"`)
  }

  const count = shape.reduce((a, b) => a * b, 1)
  if (buf.length - pos !== 16 * count) {
    throw new FormatError(
      `${path}: payload holds ${(buf.length - pos) / 8} float64 values, expected ${2 * count}`,
    )
  }
  // copy instead of aliasing: the payload offset is rarely 8-byte aligned
  const rho1 = new Float64Array(count)
  const rho2 = new Float64Array(count)
  for (let i = 0; i < count; i++) rho1[i] = buf.readDoubleLE(pos + 8 * i)
  pos += 8 * count
  for (let i = 0; i < count; i++) rho2[i] = buf.readDoubleLE(pos + 8 * i)

  return {
    ndim,
    shape,
    lo: dom.filter((_, i) => i % 2 === 0),
    hi: dom.filter((_, i) => i % 2 === 1),
    time,
    rho1,
    rho2,
  }
}
