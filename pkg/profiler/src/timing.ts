/**
 * Per-block wall-clock timing: warmup runs, then the median over repetitions,
 * measured separately for every batch size (batch scaling is not linear, so
 * nothing is extrapolated). Measurement is sequential on purpose; running
 * blocks or batches concurrently would contaminate the numbers.
 */

import { performance } from "perf_hooks";

import * as tf from "@tensorflow/tfjs";

import { BlockDef, ModelDef } from "./models";

export interface TimingOptions {
  repetitions: number;
  warmup: number;
  /** relative (max-min)/median spread above which a warning is recorded */
  varianceThreshold?: number;
}

export interface BlockTiming {
  name: string;
  /** batch key -> median milliseconds */
  ms: Record<string, number>;
}

export function median(values: number[]): number {
  if (values.length === 0) throw new Error("median of empty list");
  const sorted = [...values].sort((a, b) => a - b);
  const mid = Math.floor(sorted.length / 2);
  return sorted.length % 2 === 1 ? sorted[mid] : (sorted[mid - 1] + sorted[mid]) / 2;
}

function applyBlock(block: BlockDef, x: tf.Tensor): tf.Tensor {
  let out = x;
  for (const layer of block.layers) {
    out = layer.apply(out) as tf.Tensor;
  }
  return out;
}

async function timeBlock(
  block: BlockDef,
  input: tf.Tensor,
  opts: TimingOptions
): Promise<{ samples: number[]; output: tf.Tensor }> {
  for (let i = 0; i < opts.warmup; i++) {
    const out = tf.tidy(() => applyBlock(block, input));
    await out.data();
    out.dispose();
  }
  const samples: number[] = [];
  for (let i = 0; i < opts.repetitions; i++) {
    const t0 = performance.now();
    const out = tf.tidy(() => applyBlock(block, input));
    await out.data(); // forces completion before the clock stops
    samples.push(performance.now() - t0);
    if (i < opts.repetitions - 1) out.dispose();
    else return { samples, output: out };
  }
  throw new Error("unreachable: repetitions must be >= 1");
}

export async function measureTimings(
  model: ModelDef,
  batches: number[],
  opts: TimingOptions
): Promise<{ timings: BlockTiming[]; warnings: string[] }> {
  if (opts.repetitions < 3) throw new Error("repetitions must be >= 3");
  if (opts.warmup < 0) throw new Error("warmup must be >= 0");
  if (batches.length === 0 || batches.some((b) => !Number.isInteger(b) || b < 1)) {
    throw new Error("batches must be positive integers");
  }
  const sorted = [...batches].sort((a, b) => a - b);
  if (new Set(sorted).size !== sorted.length) throw new Error("batches must be unique");

  const threshold = opts.varianceThreshold ?? 0.5;
  const timings: BlockTiming[] = model.blocks.map((b) => ({ name: b.name, ms: {} }));
  const warnings: string[] = [];

  for (const batch of sorted) {
    let current: tf.Tensor = tf.zeros([batch, ...model.inputShape]);
    for (let i = 0; i < model.blocks.length; i++) {
      const { samples, output } = await timeBlock(model.blocks[i], current, opts);
      current.dispose();
      current = output;
      const m = median(samples);
      timings[i].ms[String(batch)] = m;
      if (m > 0 && (Math.max(...samples) - Math.min(...samples)) / m > threshold) {
        warnings.push(
          `block ${model.blocks[i].name} batch ${batch}: timing spread ` +
            `${(Math.max(...samples) - Math.min(...samples)).toFixed(3)}ms exceeds ` +
            `${threshold} of the median ${m.toFixed(3)}ms`
        );
      }
    }
    current.dispose();
  }
  return { timings, warnings };
}
