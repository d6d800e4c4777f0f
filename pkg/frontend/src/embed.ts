import { readFileSync, readdirSync, writeFileSync } from 'fs'
import { basename, extname, join } from 'path'

import { getEncoder } from './encoder.js'
import { decodeImage, hasImageExtension } from './image.js'

export interface EmbedOptions {
  inputDir: string
  outputPath: string
  model: string
  batchSize: number
  /** defaults to console.warn; injectable for tests */
  warn?: (message: string) => void
}

export interface EmbedSummary {
  rows: number
  skipped: number
  dim: number
  model: string
}

interface Row {
  id: string
  vector: Float64Array
}

/** Render the embeddings table: header id,f0..f{D-1}, rows sorted by id. */
export function formatTable(rows: Row[], dim: number): string {
  const header = ['id']
  for (let i = 0; i < dim; i++) header.push(`f${i}`)
  const lines = [header.join(',')]
  for (const row of rows) {
    const cells = [row.id]
    for (const v of row.vector) cells.push(v.toString())
    lines.push(cells.join(','))
  }
  return lines.join('\n') + '\n'
}

/**
 * Embed every decodable image in a folder and write the table.
 *
 * Ids are the image file stems; vectors are unit-normalized.  Undecodable
 * image files are skipped with a warning and counted in the summary; a
 * folder with no decodable image at all is a hard error.
 */
export function embedFolder(options: EmbedOptions): EmbedSummary {
  const warn = options.warn ?? ((m: string) => console.warn(m))
  if (options.batchSize < 1) throw new Error('batch size must be at least 1')
  const encoder = getEncoder(options.model)

  const names = readdirSync(options.inputDir)
    .filter(hasImageExtension)
    .sort()
  const rows: Row[] = []
  let skipped = 0
  for (let start = 0; start < names.length; start += options.batchSize) {
    const batch = names.slice(start, start + options.batchSize)
    for (const name of batch) {
      const path = join(options.inputDir, name)
      let vector: Float64Array
      try {
        vector = encoder.encode(decodeImage(name, readFileSync(path)))
      } catch (err) {
        warn(`skipping ${name}: ${err instanceof Error ? err.message : err}`)
        skipped++
        continue
      }
      const id = basename(name, extname(name))
      if (rows.some(r => r.id === id)) {
        throw new Error(`duplicate image id ${id} (same stem, different extension?)`)
      }
      rows.push({ id, vector })
    }
  }
  if (rows.length === 0) {
    throw new Error(`no decodable images in ${options.inputDir}`)
  }

  rows.sort((a, b) => (a.id < b.id ? -1 : a.id > b.id ? 1 : 0))
  writeFileSync(options.outputPath, formatTable(rows, encoder.dim), 'utf-8')
  return { rows: rows.length, skipped, dim: encoder.dim, model: encoder.name }
}
