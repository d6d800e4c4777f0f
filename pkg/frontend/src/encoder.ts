import { RgbImage } from './image.js'

/** Maps a decoded image to a unit-normalized feature vector. */
export interface Encoder {
  name: string
  dim: number
  encode(image: RgbImage): Float64Array
}

const GRID = 16 // resample resolution
const CELLS = 4 // statistics blocks per axis
const OUTPUT_DIM = 64
const PROJECTION_SEED = 0x5eed

/** Deterministic 32-bit PRNG (mulberry32). */
function mulberry32(seed: number): () => number {
  let a = seed >>> 0
  return () => {
    a = (a + 0x6d2b79f5) >>> 0
    let t = a
    t = Math.imul(t ^ (t >>> 15), t | 1)
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61)
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296
  }
}

function gaussianMatrix(rows: number, cols: number, seed: number): Float64Array {
  const rand = mulberry32(seed)
  const out = new Float64Array(rows * cols)
  // Box-Muller, pairs consumed in order
  for (let i = 0; i < out.length; i += 2) {
    const u1 = Math.max(rand(), 1e-12)
    const u2 = rand()
    const r = Math.sqrt(-2 * Math.log(u1))
    out[i] = r * Math.cos(2 * Math.PI * u2)
    if (i + 1 < out.length) out[i + 1] = r * Math.sin(2 * Math.PI * u2)
  }
  return out
}

/** Box-average the image onto a GRID x GRID x 3 raster. */
function resample(image: RgbImage): Float64Array {
  const { width, height, pixels } = image
  const out = new Float64Array(GRID * GRID * 3)
  for (let gy = 0; gy < GRID; gy++) {
    const y0 = Math.floor((gy * height) / GRID)
    const y1 = Math.max(y0 + 1, Math.floor(((gy + 1) * height) / GRID))
    for (let gx = 0; gx < GRID; gx++) {
      const x0 = Math.floor((gx * width) / GRID)
      const x1 = Math.max(x0 + 1, Math.floor(((gx + 1) * width) / GRID))
      let r = 0
      let g = 0
      let b = 0
      const count = (y1 - y0) * (x1 - x0)
      for (let y = y0; y < y1; y++) {
        for (let x = x0; x < x1; x++) {
          const p = (y * width + x) * 3
          r += pixels[p]
          g += pixels[p + 1]
          b += pixels[p + 2]
        }
      }
      const q = (gy * GRID + gx) * 3
      out[q] = r / count
      out[q + 1] = g / count
      out[q + 2] = b / count
    }
  }
  return out
}

/** Visual-statistics descriptor: cell color means, cell luminance spread,
 * global channel moments, plus a bias term so the vector is never zero. */
function statsVector(grid: Float64Array): Float64Array {
  const block = GRID / CELLS
  const stats: number[] = []

  // per-cell RGB means, centered
  for (let cy = 0; cy < CELLS; cy++) {
    for (let cx = 0; cx < CELLS; cx++) {
      let r = 0
      let g = 0
      let b = 0
      for (let y = cy * block; y < (cy + 1) * block; y++) {
        for (let x = cx * block; x < (cx + 1) * block; x++) {
          const p = (y * GRID + x) * 3
          r += grid[p]
          g += grid[p + 1]
          b += grid[p + 2]
        }
      }
      const n = block * block
      stats.push(r / n - 0.5, g / n - 0.5, b / n - 0.5)
    }
  }

  // per-cell luminance standard deviation, scaled to a comparable range
  for (let cy = 0; cy < CELLS; cy++) {
    for (let cx = 0; cx < CELLS; cx++) {
      let sum = 0
      let sumSq = 0
      for (let y = cy * block; y < (cy + 1) * block; y++) {
        for (let x = cx * block; x < (cx + 1) * block; x++) {
          const p = (y * GRID + x) * 3
          const lum = 0.2126 * grid[p] + 0.7152 * grid[p + 1] + 0.0722 * grid[p + 2]
          sum += lum
          sumSq += lum * lum
        }
      }
      const n = block * block
      const variance = Math.max(0, sumSq / n - (sum / n) ** 2)
      stats.push(2 * Math.sqrt(variance))
    }
  }

  // global channel means and spreads
  for (let c = 0; c < 3; c++) {
    let sum = 0
    let sumSq = 0
    for (let i = c; i < grid.length; i += 3) {
      sum += grid[i]
      sumSq += grid[i] * grid[i]
    }
    const n = grid.length / 3
    const mean = sum / n
    stats.push(mean - 0.5)
    stats.push(2 * Math.sqrt(Math.max(0, sumSq / n - mean * mean)))
  }

  stats.push(1.0)
  return Float64Array.from(stats)
}

const STATS_DIM = CELLS * CELLS * 3 + CELLS * CELLS + 6 + 1
const PROJECTION = gaussianMatrix(OUTPUT_DIM, STATS_DIM, PROJECTION_SEED)

function patchStatsEncode(image: RgbImage): Float64Array {
  const stats = statsVector(resample(image))
  const out = new Float64Array(OUTPUT_DIM)
  for (let row = 0; row < OUTPUT_DIM; row++) {
    let acc = 0
    for (let col = 0; col < STATS_DIM; col++) {
      acc += PROJECTION[row * STATS_DIM + col] * stats[col]
    }
    out[row] = acc
  }
  let norm = 0
  for (const v of out) norm += v * v
  norm = Math.sqrt(norm)
  if (norm === 0) throw new Error('degenerate feature vector')
  for (let i = 0; i < out.length; i++) out[i] /= norm
  return out
}

/**
 * Encoder registry.  `patch-stats-v1` is a deterministic offline descriptor
 * (block color statistics pushed through a fixed seeded projection); it
 * stands in for a pretrained image encoder in environments where model
 * weights cannot be fetched, and it satisfies the same output contract.
 */
export const ENCODERS: Record<string, Encoder> = {
  'patch-stats-v1': {
    name: 'patch-stats-v1',
    dim: OUTPUT_DIM,
    encode: patchStatsEncode,
  },
}

export const DEFAULT_ENCODER = 'patch-stats-v1'

export function getEncoder(name: string): Encoder {
  const encoder = ENCODERS[name]
  if (!encoder) {
    const known = Object.keys(ENCODERS).join(', ')
    throw new Error(`unknown model ${name}; available: ${known}`)
  }
  return encoder
}
