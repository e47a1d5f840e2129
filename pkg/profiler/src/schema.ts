/**
 * The profile JSON contract consumed by the splitwise toolkit.
 *
 * A profile records, per network block: the intermediate size in bytes for
 * one sample, and device/server compute times per measured batch size. Batch
 * keys are base-10 integer strings and must be identical across every timing
 * map in the file. The optional "meta" object is ignored by consumers.
 */

export interface LayerEntry {
  name: string;
  output_bytes_per_sample: number;
  device_ms: Record<string, number>;
  server_ms: Record<string, number>;
}

export interface ProfileFile {
  name: string;
  input_bytes_per_sample: number;
  layers: LayerEntry[];
  meta?: Record<string, unknown>;
}

export class SchemaError extends Error {}

function fail(message: string): never {
  throw new SchemaError(message);
}

function isPlainObject(x: unknown): x is Record<string, unknown> {
  return typeof x === "object" && x !== null && !Array.isArray(x);
}

function checkTimingMap(raw: unknown, layer: string, field: string): Record<string, number> {
  if (!isPlainObject(raw)) fail(`layer ${layer}: ${field} must be an object`);
  const out: Record<string, number> = {};
  for (const [key, value] of Object.entries(raw)) {
    if (!/^[0-9]+$/.test(key) || parseInt(key, 10) < 1) {
      fail(`layer ${layer}: ${field} key ${JSON.stringify(key)} is not a positive base-10 integer`);
    }
    if (typeof value !== "number" || !Number.isFinite(value) || value < 0) {
      fail(`layer ${layer}: ${field}[${key}] must be a finite number >= 0`);
    }
    out[key] = value;
  }
  return out;
}

function sameKeys(a: Record<string, number>, b: Record<string, number>): boolean {
  const ka = Object.keys(a).sort();
  const kb = Object.keys(b).sort();
  return ka.length === kb.length && ka.every((k, i) => k === kb[i]);
}

/** Validate an arbitrary parsed JSON value against the profile contract. */
export function validateProfile(obj: unknown): ProfileFile {
  if (!isPlainObject(obj)) fail("profile must be a JSON object");
  if (typeof obj.name !== "string" || obj.name === "") fail("profile: missing name");
  const input = obj.input_bytes_per_sample;
  if (typeof input !== "number" || !Number.isInteger(input) || input < 1) {
    fail("profile: input_bytes_per_sample must be an integer >= 1");
  }
  if (!Array.isArray(obj.layers) || obj.layers.length < 1) fail("profile: layers nonempty");

  const layers: LayerEntry[] = obj.layers.map((raw, i) => {
    if (!isPlainObject(raw)) fail(`layer #${i + 1}: must be an object`);
    const name = raw.name;
    if (typeof name !== "string" || name === "") fail(`layer #${i + 1}: missing name`);
    const size = raw.output_bytes_per_sample;
    if (typeof size !== "number" || !Number.isInteger(size) || size < 1) {
      fail(`layer ${name}: output_bytes_per_sample must be an integer >= 1`);
    }
    const device = checkTimingMap(raw.device_ms, name, "device_ms");
    const server = checkTimingMap(raw.server_ms, name, "server_ms");
    if (!sameKeys(device, server)) {
      fail(`layer ${name}: inconsistent batch keys between device_ms and server_ms`);
    }
    return { name, output_bytes_per_sample: size, device_ms: device, server_ms: server };
  });

  const reference = Object.keys(layers[0].device_ms).sort().join(",");
  for (const layer of layers) {
    if (Object.keys(layer.device_ms).sort().join(",") !== reference) {
      fail(`layer ${layer.name}: inconsistent batch keys across layers`);
    }
  }

  const out: ProfileFile = {
    name: obj.name,
    input_bytes_per_sample: input,
    layers,
  };
  if (isPlainObject(obj.meta)) out.meta = obj.meta;
  return out;
}

export function compressionRatios(profile: ProfileFile): number[] {
  return profile.layers.map((l) => l.output_bytes_per_sample / profile.input_bytes_per_sample);
}

/** 1-based indices of layers whose intermediate is strictly smaller than the input. */
export function naturalBottlenecks(ratios: number[]): number[] {
  const out: number[] = [];
  ratios.forEach((c, i) => {
    if (c < 1.0) out.push(i + 1);
  });
  return out;
}

/** Natural bottlenecks that beat every earlier layer's ratio (running strict minimum). */
export function compressiveSet(ratios: number[]): number[] {
  const out: number[] = [];
  let runningMin = Infinity;
  ratios.forEach((c, i) => {
    if (c < 1.0 && c < runningMin) out.push(i + 1);
    runningMin = Math.min(runningMin, c);
  });
  return out;
}
