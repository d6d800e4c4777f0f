import { PNG } from 'pngjs'

/** Decoded RGB image with components in [0, 1], row-major. */
export interface RgbImage {
  width: number
  height: number
  /** length = width * height * 3 */
  pixels: Float64Array
}

const IMAGE_EXTENSIONS = ['.ppm', '.png']

export function hasImageExtension(name: string): boolean {
  const lower = name.toLowerCase()
  return IMAGE_EXTENSIONS.some(ext => lower.endsWith(ext))
}

function isSpace(byte: number): boolean {
  return byte === 0x20 || byte === 0x09 || byte === 0x0a || byte === 0x0d || byte === 0x0b || byte === 0x0c
}

/** Read the next whitespace-delimited token, skipping # comments. */
function nextToken(data: Buffer, pos: number): { token: string; pos: number } {
  const n = data.length
  while (pos < n) {
    if (data[pos] === 0x23) {
      while (pos < n && data[pos] !== 0x0a) pos++
    } else if (isSpace(data[pos])) {
      pos++
    } else {
      break
    }
  }
  if (pos >= n) throw new Error('truncated header')
  const start = pos
  while (pos < n && !isSpace(data[pos])) pos++
  return { token: data.subarray(start, pos).toString('ascii'), pos }
}

export function decodePpm(data: Buffer): RgbImage {
  let t = nextToken(data, 0)
  const magic = t.token
  if (magic !== 'P3' && magic !== 'P6') throw new Error(`unsupported magic ${magic}`)
  t = nextToken(data, t.pos)
  const width = parseInt(t.token, 10)
  t = nextToken(data, t.pos)
  const height = parseInt(t.token, 10)
  t = nextToken(data, t.pos)
  const maxval = parseInt(t.token, 10)
  if (!(width >= 1 && height >= 1)) throw new Error('bad dimensions')
  if (maxval !== 255) throw new Error(`unsupported maxval ${maxval}`)

  const count = width * height * 3
  const pixels = new Float64Array(count)
  if (magic === 'P6') {
    const start = t.pos + 1 // single whitespace after maxval
    if (data.length - start < count) throw new Error('truncated payload')
    for (let i = 0; i < count; i++) pixels[i] = data[start + i] / 255
  } else {
    let pos = t.pos
    for (let i = 0; i < count; i++) {
      const tok = nextToken(data, pos)
      const v = parseInt(tok.token, 10)
      if (!(v >= 0 && v <= 255)) throw new Error('sample out of range')
      pixels[i] = v / 255
      pos = tok.pos
    }
  }
  return { width, height, pixels }
}

export function decodePng(data: Buffer): RgbImage {
  const png = PNG.sync.read(data)
  const { width, height } = png
  const pixels = new Float64Array(width * height * 3)
  for (let i = 0; i < width * height; i++) {
    pixels[i * 3] = png.data[i * 4] / 255
    pixels[i * 3 + 1] = png.data[i * 4 + 1] / 255
    pixels[i * 3 + 2] = png.data[i * 4 + 2] / 255
  }
  return { width, height, pixels }
}

/** Decode by extension; throws on undecodable content. */
export function decodeImage(name: string, data: Buffer): RgbImage {
  const lower = name.toLowerCase()
  if (lower.endsWith('.ppm')) return decodePpm(data)
  if (lower.endsWith('.png')) return decodePng(data)
  throw new Error(`no decoder for ${name}`)
}
