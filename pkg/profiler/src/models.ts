/**
 * Built-in model registry. Models are described as ordered blocks, the
 * granularity at which sizes are extracted and timings measured: splitting
 * inside a block is never considered, matching how compound architectures
 * are deployed in practice.
 */

import * as tf from "@tensorflow/tfjs";

export interface BlockDef {
  name: string;
  layers: tf.layers.Layer[];
}

export interface ModelDef {
  id: string;
  inputShape: [number, number, number]; // [H, W, C]
  blocks: BlockDef[];
}

export type Shape3 = [number, number, number];

function convBnAct(
  prefix: string,
  filters: number,
  kernel: number,
  strides: number
): tf.layers.Layer[] {
  return [
    tf.layers.conv2d({
      name: `${prefix}_conv`,
      filters,
      kernelSize: kernel,
      strides,
      padding: "same",
      useBias: false,
    }),
    tf.layers.batchNormalization({ name: `${prefix}_bn` }),
    tf.layers.activation({ name: `${prefix}_act`, activation: "swish" }),
  ];
}

/** Inverted-residual block: 1x1 expand, depthwise (optionally strided), 1x1 project. */
function mbconv(
  prefix: string,
  inChannels: number,
  expandRatio: number,
  filters: number,
  strides: number
): tf.layers.Layer[] {
  const layers: tf.layers.Layer[] = [];
  if (expandRatio > 1) {
    layers.push(
      tf.layers.conv2d({
        name: `${prefix}_expand`,
        filters: inChannels * expandRatio,
        kernelSize: 1,
        padding: "same",
        useBias: false,
      }),
      tf.layers.batchNormalization({ name: `${prefix}_expand_bn` }),
      tf.layers.activation({ name: `${prefix}_expand_act`, activation: "swish" })
    );
  }
  layers.push(
    tf.layers.depthwiseConv2d({
      name: `${prefix}_dw`,
      kernelSize: 3,
      strides,
      padding: "same",
      useBias: false,
    }),
    tf.layers.batchNormalization({ name: `${prefix}_dw_bn` }),
    tf.layers.activation({ name: `${prefix}_dw_act`, activation: "swish" }),
    tf.layers.conv2d({
      name: `${prefix}_project`,
      filters,
      kernelSize: 1,
      padding: "same",
      useBias: false,
    }),
    tf.layers.batchNormalization({ name: `${prefix}_project_bn` })
  );
  return layers;
}

function identityModel(inputShape: Shape3): ModelDef {
  return {
    id: "identity",
    inputShape,
    blocks: [
      { name: "passthrough", layers: [tf.layers.activation({ activation: "linear" })] },
    ],
  };
}

/** Small conv stack with two stride-2 poolings: halves spatial dims twice. */
function toyConvModel(inputShape: Shape3): ModelDef {
  return {
    id: "toy-conv",
    inputShape,
    blocks: [
      {
        name: "conv1",
        layers: [
          tf.layers.conv2d({ filters: 16, kernelSize: 3, padding: "same", activation: "relu" }),
        ],
      },
      { name: "pool1", layers: [tf.layers.maxPooling2d({ poolSize: 2 })] },
      {
        name: "conv2",
        layers: [
          tf.layers.conv2d({ filters: 32, kernelSize: 3, padding: "same", activation: "relu" }),
        ],
      },
      { name: "pool2", layers: [tf.layers.maxPooling2d({ poolSize: 2 })] },
      {
        name: "conv3",
        layers: [
          tf.layers.conv2d({ filters: 64, kernelSize: 3, padding: "same", activation: "relu" }),
        ],
      },
      { name: "gap", layers: [tf.layers.globalAveragePooling2d({})] },
      { name: "head", layers: [tf.layers.dense({ units: 10 })] },
    ],
  };
}

// (expandRatio, filters, repeats, stride of the first repeat) per stage, B0 widths
const EFFNET_B0_STAGES: Array<[number, number, number, number]> = [
  [1, 16, 1, 1],
  [6, 24, 2, 2],
  [6, 40, 2, 2],
  [6, 80, 3, 2],
  [6, 112, 3, 1],
  [6, 192, 4, 2],
  [6, 320, 1, 1],
];

/**
 * EfficientNetV1-B0-style architecture at block granularity: stem, 16
 * inverted-residual blocks, 1x1 head conv, global pool, classifier.
 * Squeeze-excite and residual adds are omitted; they do not change block
 * output shapes, which is what size extraction depends on.
 */
function efficientNetB0Model(inputShape: Shape3): ModelDef {
  const blocks: BlockDef[] = [{ name: "stem", layers: convBnAct("stem", 32, 3, 2) }];
  let channels = 32;
  let index = 0;
  for (const [expand, filters, repeats, firstStride] of EFFNET_B0_STAGES) {
    for (let r = 0; r < repeats; r++) {
      index += 1;
      const strides = r === 0 ? firstStride : 1;
      const name = `block${index}_e${expand}_f${filters}_s${strides}`;
      blocks.push({ name, layers: mbconv(name, channels, expand, filters, strides) });
      channels = filters;
    }
  }
  blocks.push({ name: "head_conv", layers: convBnAct("head", 1280, 1, 1) });
  blocks.push({ name: "avg_pool", layers: [tf.layers.globalAveragePooling2d({})] });
  blocks.push({ name: "classifier", layers: [tf.layers.dense({ units: 1000 })] });
  return { id: "efficientnetv1-b0", inputShape, blocks };
}

const REGISTRY: Record<string, { build: (shape: Shape3) => ModelDef; defaultShape: Shape3 }> = {
  identity: { build: identityModel, defaultShape: [16, 16, 3] },
  "toy-conv": { build: toyConvModel, defaultShape: [32, 32, 3] },
  "efficientnetv1-b0": { build: efficientNetB0Model, defaultShape: [224, 224, 3] },
};

export function modelIds(): string[] {
  return Object.keys(REGISTRY);
}

export function buildModel(id: string, inputShape?: Shape3): ModelDef {
  const entry = REGISTRY[id];
  if (!entry) {
    throw new Error(`unknown model ${JSON.stringify(id)}; available: ${modelIds().join(", ")}`);
  }
  return entry.build(inputShape ?? entry.defaultShape);
}
