import { mkdtempSync, readFileSync, writeFileSync } from 'fs'
import { tmpdir } from 'os'
import { join } from 'path'
import { describe, expect, it } from 'vitest'

import { embedFolder } from '../src/embed.js'
import { ENCODERS, getEncoder } from '../src/encoder.js'
import { decodePng, decodePpm } from '../src/image.js'

const FIXTURES = join(__dirname, '..', 'fixtures', 'images')

function tmpOut(name: string): string {
  return join(mkdtempSync(join(tmpdir(), 'embed-')), name)
}

function parseTable(path: string) {
  const lines = readFileSync(path, 'utf-8').trim().split('\n')
  const header = lines[0].split(',')
  const rows = new Map<string, number[]>()
  for (const line of lines.slice(1)) {
    const cells = line.split(',')
    rows.set(cells[0], cells.slice(1).map(Number))
  }
  return { header, rows }
}

function cosineDistance(a: number[], b: number[]): number {
  let dot = 0
  let na = 0
  let nb = 0
  for (let i = 0; i < a.length; i++) {
    dot += a[i] * b[i]
    na += a[i] * a[i]
    nb += b[i] * b[i]
  }
  return 1 - dot / Math.sqrt(na * nb)
}

describe('image decoding', () => {
  it('reads P6 and rejects truncation', () => {
    const img = decodePpm(readFileSync(join(FIXTURES, 'g0.ppm')))
    expect(img.width).toBe(32)
    expect(img.height).toBe(24)
    expect(img.pixels.length).toBe(32 * 24 * 3)
    expect(() => decodePpm(readFileSync(join(FIXTURES, 'broken.ppm')))).toThrow(/truncated/)
  })

  it('reads P3 text images', () => {
    const buf = Buffer.from('P3\n# comment\n2 1\n255\n255 0 0 0 255 0\n', 'ascii')
    const img = decodePpm(buf)
    expect(img.width).toBe(2)
    expect(img.pixels[0]).toBe(1)
    expect(img.pixels[4]).toBe(1)
  })

  it('reads PNG via pngjs', () => {
    // tiny 1x1 red PNG
    const png = Buffer.from(
      'iVBORw0KGgoAAAANSUhEUgAAAAEAAAABCAYAAAAfFcSJAAAADUlEQVR42mP8z8BQDwAEhQGAhKmMIQAAAABJRU5ErkJggg==',
      'base64',
    )
    const img = decodePng(png)
    expect(img.width).toBe(1)
    expect(img.height).toBe(1)
  })
})

describe('encoder', () => {
  it('produces unit-normalized vectors of fixed dimension', () => {
    const encoder = getEncoder('patch-stats-v1')
    const img = decodePpm(readFileSync(join(FIXTURES, 'noise.ppm')))
    const vec = encoder.encode(img)
    expect(vec.length).toBe(encoder.dim)
    let norm = 0
    for (const v of vec) norm += v * v
    expect(Math.abs(Math.sqrt(norm) - 1)).toBeLessThan(1e-12)
  })

  it('distinguishes distinct images', () => {
    const encoder = getEncoder('patch-stats-v1')
    const a = encoder.encode(decodePpm(readFileSync(join(FIXTURES, 'g0.ppm'))))
    const b = encoder.encode(decodePpm(readFileSync(join(FIXTURES, 'noise.ppm'))))
    expect(cosineDistance(Array.from(a), Array.from(b))).toBeGreaterThan(1e-3)
  })

  it('rejects unknown model names but lists known ones', () => {
    expect(() => getEncoder('clip-vit')).toThrow(/available/)
    expect(Object.keys(ENCODERS)).toContain('patch-stats-v1')
  })
})

describe('embedFolder', () => {
  it('writes one sorted row per decodable image and counts skips', () => {
    const warnings: string[] = []
    const out = tmpOut('table.csv')
    const summary = embedFolder({
      inputDir: FIXTURES,
      outputPath: out,
      model: 'patch-stats-v1',
      batchSize: 2,
      warn: m => warnings.push(m),
    })
    // 6 decodable images; broken.ppm skipped; notes.txt never considered
    expect(summary.rows).toBe(6)
    expect(summary.skipped).toBe(1)
    expect(warnings.some(w => w.includes('broken.ppm'))).toBe(true)

    const { header, rows } = parseTable(out)
    expect(header[0]).toBe('id')
    expect(header.length).toBe(summary.dim + 1)
    expect([...rows.keys()]).toEqual([...rows.keys()].sort())
    for (const vec of rows.values()) {
      expect(vec.length).toBe(summary.dim)
      const norm = Math.sqrt(vec.reduce((s, v) => s + v * v, 0))
      expect(Math.abs(norm - 1)).toBeLessThan(1e-4)
    }
  })

  it('gives duplicate images near-zero cosine distance', () => {
    const out = tmpOut('table.csv')
    embedFolder({ inputDir: FIXTURES, outputPath: out, model: 'patch-stats-v1', batchSize: 16 })
    const { rows } = parseTable(out)
    const dist = cosineDistance(rows.get('dup_a')!, rows.get('dup_b')!)
    expect(dist).toBeLessThanOrEqual(1e-5)
  })

  it('is deterministic: identical inputs give byte-identical tables', () => {
    const out1 = tmpOut('a.csv')
    const out2 = tmpOut('b.csv')
    embedFolder({ inputDir: FIXTURES, outputPath: out1, model: 'patch-stats-v1', batchSize: 3 })
    embedFolder({ inputDir: FIXTURES, outputPath: out2, model: 'patch-stats-v1', batchSize: 16 })
    expect(readFileSync(out1)).toEqual(readFileSync(out2))
  })

  it('fails hard on a folder without decodable images', () => {
    const dir = mkdtempSync(join(tmpdir(), 'empty-'))
    writeFileSync(join(dir, 'readme.txt'), 'nothing here')
    expect(() =>
      embedFolder({ inputDir: dir, outputPath: join(dir, 'out.csv'), model: 'patch-stats-v1', batchSize: 4 }),
    ).toThrow(/no decodable/)
  })

  it('validates batch size', () => {
    expect(() =>
      embedFolder({ inputDir: FIXTURES, outputPath: tmpOut('x.csv'), model: 'patch-stats-v1', batchSize: 0 }),
    ).toThrow(/batch size/)
  })
})
