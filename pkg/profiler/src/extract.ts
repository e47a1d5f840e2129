/**
 * Shape-derived intermediate sizes: one symbolic forward pass, no compute,
 * so extraction is deterministic by construction.
 */

import * as tf from "@tensorflow/tfjs";

import { ModelDef } from "./models";

export interface BlockSize {
  name: string;
  /** elements per sample at the block output (batch dim excluded) */
  elements: number;
  outputBytesPerSample: number;
}

export function inputBytesPerSample(
  inputShape: [number, number, number],
  bytesPerElement: number
): number {
  const [h, w, c] = inputShape;
  return h * w * c * bytesPerElement;
}

export function extractSizes(model: ModelDef, activationBytesPerElement: number): BlockSize[] {
  if (activationBytesPerElement < 1) {
    throw new Error("bytes per element must be >= 1");
  }
  let x: tf.SymbolicTensor = tf.input({ shape: model.inputShape });
  const out: BlockSize[] = [];
  for (const block of model.blocks) {
    for (const layer of block.layers) {
      x = layer.apply(x) as tf.SymbolicTensor;
    }
    const dims = x.shape.slice(1); // drop the batch dimension
    if (dims.some((d) => d === null || d === undefined || d <= 0)) {
      throw new Error(
        `block ${block.name}: unresolved output shape ${JSON.stringify(x.shape)} at the probe input`
      );
    }
    const elements = (dims as number[]).reduce((a, b) => a * b, 1);
    out.push({
      name: block.name,
      elements,
      outputBytesPerSample: elements * activationBytesPerElement,
    });
  }
  return out;
}
