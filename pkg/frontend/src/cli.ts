#!/usr/bin/env node
import { DEFAULT_ENCODER } from './encoder.js'
import { embedFolder } from './embed.js'

const USAGE = `usage: viewplan-embed --input DIR --output PATH [--model NAME] [--batch-size N]

Converts a folder of images (.ppm, .png) into the embeddings table consumed
by the viewplan planner: header id,f0..f{D-1}, one unit-normalized row per
image, sorted by id.`

function parseArgs(argv: string[]) {
  const args = {
    input: '',
    output: '',
    model: DEFAULT_ENCODER,
    batchSize: 16,
  }
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i]
    const value = argv[i + 1]
    switch (flag) {
      case '--input':
        args.input = value
        i++
        break
      case '--output':
        args.output = value
        i++
        break
      case '--model':
        args.model = value
        i++
        break
      case '--batch-size':
        args.batchSize = parseInt(value, 10)
        i++
        break
      case '--help':
      case '-h':
        console.log(USAGE)
        process.exit(0)
        break
      default:
        throw new Error(`unknown flag ${flag}`)
    }
  }
  if (!args.input || !args.output) throw new Error('--input and --output are required')
  if (!Number.isFinite(args.batchSize)) throw new Error('--batch-size must be an integer')
  return args
}

try {
  const args = parseArgs(process.argv.slice(2))
  const summary = embedFolder({
    inputDir: args.input,
    outputPath: args.output,
    model: args.model,
    batchSize: args.batchSize,
  })
  console.log(
    `model ${summary.model}: dim ${summary.dim}, wrote ${summary.rows} rows` +
      (summary.skipped > 0 ? ` (skipped ${summary.skipped})` : ''),
  )
} catch (err) {
  console.error(`error: ${err instanceof Error ? err.message : err}`)
  console.error(USAGE)
  process.exit(1)
}
