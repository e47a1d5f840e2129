/**
 * Profile assembly. A single-role run fills its own timing column and
 * zero-fills the other (schema-valid placeholder); real device+server
 * profiles come from two runs on the respective machines merged by layer
 * name. --role both measures both columns on one host for desk-scale work,
 * recorded as such in meta.
 */

import * as tf from "@tensorflow/tfjs";

import { extractSizes, inputBytesPerSample } from "./extract";
import { buildModel, Shape3 } from "./models";
import { ProfileFile, validateProfile } from "./schema";
import { measureTimings, TimingOptions } from "./timing";

export type Role = "device" | "server" | "both";

export interface ProfilingSpec {
  modelId: string;
  inputShape?: Shape3;
  batches: number[];
  role: Role;
  repetitions: number;
  warmup: number;
  inputBytesPerElement: number; // 1 for 8-bit inputs
  activationBytesPerElement: number; // 4 for float32 activations
}

export const DEFAULT_SPEC = {
  repetitions: 5,
  warmup: 2,
  inputBytesPerElement: 1,
  activationBytesPerElement: 4,
} as const;

function zeroFill(batches: number[]): Record<string, number> {
  const out: Record<string, number> = {};
  for (const b of batches) out[String(b)] = 0.0;
  return out;
}

export async function buildProfile(spec: ProfilingSpec): Promise<ProfileFile> {
  const model = buildModel(spec.modelId, spec.inputShape);
  const sizes = extractSizes(model, spec.activationBytesPerElement);
  const timingOpts: TimingOptions = { repetitions: spec.repetitions, warmup: spec.warmup };

  const warnings: string[] = [];
  let deviceCols: Record<string, number>[];
  let serverCols: Record<string, number>[];
  if (spec.role === "device") {
    const run = await measureTimings(model, spec.batches, timingOpts);
    warnings.push(...run.warnings);
    deviceCols = run.timings.map((t) => t.ms);
    serverCols = model.blocks.map(() => zeroFill(spec.batches));
  } else if (spec.role === "server") {
    const run = await measureTimings(model, spec.batches, timingOpts);
    warnings.push(...run.warnings);
    serverCols = run.timings.map((t) => t.ms);
    deviceCols = model.blocks.map(() => zeroFill(spec.batches));
  } else {
    const deviceRun = await measureTimings(model, spec.batches, timingOpts);
    const serverRun = await measureTimings(model, spec.batches, timingOpts);
    warnings.push(...deviceRun.warnings, ...serverRun.warnings);
    deviceCols = deviceRun.timings.map((t) => t.ms);
    serverCols = serverRun.timings.map((t) => t.ms);
  }

  const profile: ProfileFile = {
    name: model.id,
    input_bytes_per_sample: inputBytesPerSample(model.inputShape, spec.inputBytesPerElement),
    layers: model.blocks.map((block, i) => ({
      name: block.name,
      output_bytes_per_sample: sizes[i].outputBytesPerSample,
      device_ms: deviceCols[i],
      server_ms: serverCols[i],
    })),
    meta: {
      generator: "splitwise-profiler",
      model: model.id,
      input_shape: model.inputShape,
      role: spec.role,
      same_host: spec.role === "both",
      backend: tf.getBackend(),
      repetitions: spec.repetitions,
      warmup: spec.warmup,
      bytes_per_element: {
        input: spec.inputBytesPerElement,
        activation: spec.activationBytesPerElement,
      },
      timing_warnings: warnings,
    },
  };
  return validateProfile(profile);
}

/** Combine a device-role run and a server-role run of the same model. */
export function mergeProfiles(device: ProfileFile, server: ProfileFile): ProfileFile {
  const deviceNames = device.layers.map((l) => l.name).join("|");
  const serverNames = server.layers.map((l) => l.name).join("|");
  if (deviceNames !== serverNames) {
    throw new Error(
      `layer set mismatch: device run has [${deviceNames}], server run has [${serverNames}]`
    );
  }
  if (device.input_bytes_per_sample !== server.input_bytes_per_sample) {
    throw new Error("input size mismatch between device and server runs");
  }
  const merged: ProfileFile = {
    name: device.name,
    input_bytes_per_sample: device.input_bytes_per_sample,
    layers: device.layers.map((dl, i) => {
      const sl = server.layers[i];
      if (dl.output_bytes_per_sample !== sl.output_bytes_per_sample) {
        throw new Error(`layer ${dl.name}: output size differs between runs`);
      }
      return {
        name: dl.name,
        output_bytes_per_sample: dl.output_bytes_per_sample,
        device_ms: { ...dl.device_ms },
        server_ms: { ...sl.server_ms },
      };
    }),
    meta: {
      generator: "splitwise-profiler",
      merged_from: { device: device.meta ?? null, server: server.meta ?? null },
    },
  };
  return validateProfile(merged);
}
