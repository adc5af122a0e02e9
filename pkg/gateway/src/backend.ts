import { createHash } from 'crypto';
import * as fs from 'fs';
import * as path from 'path';

import { RgbImage, decodePng, encodePng } from './png';

/**
 * Model backends behind the wire protocol.  Which models serve the two
 * endpoints is configuration, not code: this default backend captions by
 * fixture-corpus lookup (falling back to an image-statistics description)
 * and generates images procedurally from a seeded PRNG, so every response
 * is deterministic and self-contained.  Swap in heavier model-backed
 * implementations by satisfying the same two methods.
 */
export interface InferenceBackend {
  caption(image: RgbImage, prompt: string | null): Promise<string>;
  generate(prompt: string, seed: bigint, steps: number): Promise<RgbImage>;
  ready(): boolean;
}

/** Hash of decoded pixel content; matches the simulator's corpus hashing. */
export function contentHash(image: RgbImage): string {
  const h = createHash('sha256');
  h.update(`${image.width}x${image.height}:`, 'ascii');
  h.update(image.pixels);
  return h.digest('hex');
}

interface CorpusEntry {
  name: string;
  caption: string;
}

function loadCorpus(dir: string): Map<string, CorpusEntry> {
  const corpus = new Map<string, CorpusEntry>();
  for (const file of fs.readdirSync(dir).sort()) {
    if (!file.endsWith('.png')) continue;
    const captionFile = path.join(dir, file.replace(/\.png$/, '.txt'));
    if (!fs.existsSync(captionFile)) continue;
    const caption = fs.readFileSync(captionFile, 'utf-8').replace(/\n+$/, '');
    const image = decodePng(fs.readFileSync(path.join(dir, file)));
    corpus.set(contentHash(image), { name: file.replace(/\.png$/, ''), caption });
  }
  return corpus;
}

const COLOR_NAMES: Array<[string, [number, number, number]]> = [
  ['black', [0, 0, 0]],
  ['white', [255, 255, 255]],
  ['gray', [128, 128, 128]],
  ['red', [200, 40, 40]],
  ['green', [60, 160, 60]],
  ['blue', [50, 90, 200]],
  ['sky blue', [140, 195, 235]],
  ['yellow', [230, 220, 80]],
  ['brown', [130, 90, 50]],
];

function dominantColorName(image: RgbImage): string {
  let r = 0;
  let g = 0;
  let b = 0;
  const n = image.width * image.height;
  for (let i = 0; i < image.pixels.length; i += 3) {
    r += image.pixels[i];
    g += image.pixels[i + 1];
    b += image.pixels[i + 2];
  }
  r /= n;
  g /= n;
  b /= n;
  let best = COLOR_NAMES[0][0];
  let bestDist = Infinity;
  for (const [name, [cr, cg, cb]] of COLOR_NAMES) {
    const dist = (r - cr) ** 2 + (g - cg) ** 2 + (b - cb) ** 2;
    if (dist < bestDist) {
      bestDist = dist;
      best = name;
    }
  }
  return best;
}

/** 64-bit FNV-1a, used to fold the prompt into the generation seed. */
function fnv1a64(text: string): bigint {
  let hash = 0xcbf29ce484222325n;
  const data = Buffer.from(text, 'utf-8');
  for (const byte of data) {
    hash ^= BigInt(byte);
    hash = (hash * 0x100000001b3n) & 0xffffffffffffffffn;
  }
  return hash;
}

/** splitmix64: tiny, well-distributed, fully deterministic PRNG. */
class SplitMix64 {
  private state: bigint;

  constructor(seed: bigint) {
    this.state = seed & 0xffffffffffffffffn;
  }

  next(): bigint {
    this.state = (this.state + 0x9e3779b97f4a7c15n) & 0xffffffffffffffffn;
    let z = this.state;
    z = ((z ^ (z >> 30n)) * 0xbf58476d1ce4e5b9n) & 0xffffffffffffffffn;
    z = ((z ^ (z >> 27n)) * 0x94d049bb133111ebn) & 0xffffffffffffffffn;
    return z ^ (z >> 31n);
  }

  /** Uniform float in [0, 1). */
  uniform(): number {
    return Number(this.next() >> 11n) / 2 ** 53;
  }

  int(bound: number): number {
    return Math.floor(this.uniform() * bound);
  }
}

export interface ProceduralBackendOptions {
  corpusDir?: string;
  outputSize?: number;
}

export class ProceduralBackend implements InferenceBackend {
  private corpus: Map<string, CorpusEntry>;
  private outputSize: number;

  constructor(options: ProceduralBackendOptions = {}) {
    this.corpus = options.corpusDir ? loadCorpus(options.corpusDir) : new Map();
    this.outputSize = options.outputSize ?? 512;
  }

  ready(): boolean {
    return true;
  }

  corpusSize(): number {
    return this.corpus.size;
  }

  async caption(image: RgbImage, _prompt: string | null): Promise<string> {
    const known = this.corpus.get(contentHash(image));
    if (known) return known.caption;
    return `An image of ${image.width}x${image.height} pixels dominated by ${dominantColorName(image)}.`;
  }

  async generate(prompt: string, seed: bigint, steps: number): Promise<RgbImage> {
    const size = this.outputSize;
    const rng = new SplitMix64(fnv1a64(prompt) ^ seed ^ (BigInt(steps) << 32n));
    const pixels = Buffer.alloc(size * size * 3);

    // layered composition: gradient wash plus seeded soft blobs, so
    // different prompts/seeds give visibly different but repeatable images
    const top = [rng.int(256), rng.int(256), rng.int(256)];
    const bottom = [rng.int(256), rng.int(256), rng.int(256)];
    for (let y = 0; y < size; y++) {
      const t = y / (size - 1);
      for (let x = 0; x < size; x++) {
        const o = (y * size + x) * 3;
        pixels[o] = Math.round(top[0] * (1 - t) + bottom[0] * t);
        pixels[o + 1] = Math.round(top[1] * (1 - t) + bottom[1] * t);
        pixels[o + 2] = Math.round(top[2] * (1 - t) + bottom[2] * t);
      }
    }
    const blobs = 4 + rng.int(Math.min(steps, 12));
    for (let b = 0; b < blobs; b++) {
      const cx = rng.int(size);
      const cy = rng.int(size);
      const radius = 20 + rng.int(size / 3);
      const color = [rng.int(256), rng.int(256), rng.int(256)];
      const r2 = radius * radius;
      const x0 = Math.max(0, cx - radius);
      const x1 = Math.min(size - 1, cx + radius);
      const y0 = Math.max(0, cy - radius);
      const y1 = Math.min(size - 1, cy + radius);
      for (let y = y0; y <= y1; y++) {
        for (let x = x0; x <= x1; x++) {
          const d2 = (x - cx) ** 2 + (y - cy) ** 2;
          if (d2 > r2) continue;
          const w = 1 - d2 / r2;
          const o = (y * size + x) * 3;
          pixels[o] = Math.round(pixels[o] * (1 - w) + color[0] * w);
          pixels[o + 1] = Math.round(pixels[o + 1] * (1 - w) + color[1] * w);
          pixels[o + 2] = Math.round(pixels[o + 2] * (1 - w) + color[2] * w);
        }
      }
    }
    return { width: size, height: size, pixels };
  }
}

export { encodePng, decodePng };
