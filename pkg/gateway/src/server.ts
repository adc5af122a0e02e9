import { createApp } from './app';
import { ProceduralBackend } from './backend';

function argValue(flag: string): string | undefined {
  const index = process.argv.indexOf(flag);
  return index >= 0 ? process.argv[index + 1] : undefined;
}

const port = Number(argValue('--port') ?? process.env.GATEWAY_PORT ?? 8080);
const corpusDir = argValue('--corpus') ?? process.env.GATEWAY_CORPUS;
const outputSize = Number(argValue('--size') ?? process.env.GATEWAY_OUTPUT_SIZE ?? 512);
const timeoutMs = Number(process.env.GATEWAY_TIMEOUT_MS ?? 120_000);
const queueDepth = Number(process.env.GATEWAY_QUEUE_DEPTH ?? 8);

const backend = new ProceduralBackend({ corpusDir, outputSize });
const app = createApp({
  backend,
  requestTimeoutMs: timeoutMs,
  maxQueueDepth: queueDepth,
});

app.listen(port, () => {
  const corpusNote = corpusDir
    ? `corpus ${corpusDir} (${backend.corpusSize()} entries)`
    : 'no corpus (procedural captions only)';
  console.log(`gateway listening on :${port}, ${corpusNote}, ${outputSize}px output`);
});
