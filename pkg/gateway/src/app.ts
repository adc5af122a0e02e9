import express, { Express, Request, Response } from 'express';
import { z } from 'zod';

import { InferenceBackend } from './backend';
import { decodePng, encodePng } from './png';

const CaptionRequest = z.object({
  image_b64: z.string(),
  prompt: z.string().nullable().optional(),
});

const GenerateRequest = z.object({
  prompt: z.string(),
  seed: z.number().int().nonnegative(),
  steps: z.number().int().min(1),
});

export interface AppOptions {
  backend: InferenceBackend;
  /** Hard per-request deadline; the client sees 504 when exceeded. */
  requestTimeoutMs?: number;
  /** Generation requests queue serially; beyond this depth they get 503. */
  maxQueueDepth?: number;
}

function strictBase64(text: string): Buffer {
  if (!/^[A-Za-z0-9+/]*={0,2}$/.test(text) || text.length % 4 !== 0 || text.length === 0) {
    throw new Error('invalid base64');
  }
  return Buffer.from(text, 'base64');
}

export function createApp(options: AppOptions): Express {
  const backend = options.backend;
  const timeoutMs = options.requestTimeoutMs ?? 120_000;
  const maxQueueDepth = options.maxQueueDepth ?? 8;

  // generation runs one request at a time; the chain is the queue
  let generateChain: Promise<unknown> = Promise.resolve();
  let queueDepth = 0;

  const app = express();
  app.use(express.json({ limit: '32mb' }));

  function withDeadline<T>(work: Promise<T>, res: Response): Promise<T | undefined> {
    return new Promise((resolve) => {
      const timer = setTimeout(() => {
        if (!res.headersSent) res.status(504).json({ error: 'request timed out' });
        resolve(undefined);
      }, timeoutMs);
      work.then(
        (value) => {
          clearTimeout(timer);
          resolve(value);
        },
        (err) => {
          clearTimeout(timer);
          if (!res.headersSent) res.status(500).json({ error: String(err) });
          resolve(undefined);
        },
      );
    });
  }

  app.get('/healthz', (_req: Request, res: Response) => {
    const ok = backend.ready();
    res.status(200).json({
      status: ok ? 'ok' : 'loading',
      models: { caption: ok, generate: ok },
    });
  });

  app.post('/v1/caption', async (req: Request, res: Response) => {
    if (!backend.ready()) {
      res.status(503).json({ error: 'model not loaded' });
      return;
    }
    const parsed = CaptionRequest.safeParse(req.body);
    if (!parsed.success) {
      res.status(400).json({ error: 'malformed request: image_b64 required' });
      return;
    }
    let image;
    try {
      image = decodePng(strictBase64(parsed.data.image_b64));
    } catch {
      res.status(400).json({ error: 'image_b64 is not a decodable PNG' });
      return;
    }
    const text = await withDeadline(
      backend.caption(image, parsed.data.prompt ?? null),
      res,
    );
    if (text !== undefined && !res.headersSent) res.status(200).json({ text });
  });

  app.post('/v1/generate', async (req: Request, res: Response) => {
    if (!backend.ready()) {
      res.status(503).json({ error: 'model not loaded' });
      return;
    }
    const parsed = GenerateRequest.safeParse(req.body);
    if (!parsed.success || parsed.data.prompt.length === 0) {
      res.status(400).json({ error: 'malformed request: non-empty prompt, seed, steps required' });
      return;
    }
    if (queueDepth >= maxQueueDepth) {
      res.status(503).json({ error: 'generation queue is full' });
      return;
    }
    queueDepth += 1;
    const { prompt, seed, steps } = parsed.data;
    const job = generateChain.then(() => backend.generate(prompt, BigInt(seed), steps));
    generateChain = job.catch(() => undefined);
    const image = await withDeadline(job, res);
    queueDepth -= 1;
    if (image !== undefined && !res.headersSent) {
      res.status(200).json({ image_b64: encodePng(image).toString('base64') });
    }
  });

  return app;
}
