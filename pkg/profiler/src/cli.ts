/**
 * profiler extract --model <id> --input WxHxC --batches 1,2,... \
 *                  --role device|server|both --reps 5 --warmup 2 --out profile.json
 * profiler merge --device dev.json --server srv.json --out profile.json
 * profiler models
 *
 * Exit codes: 0 ok, 2 usage or validation error.
 */

import * as fs from "fs";
import * as path from "path";

import { buildProfile, DEFAULT_SPEC, mergeProfiles, ProfilingSpec, Role } from "./emit";
import { modelIds } from "./models";
import { Shape3 } from "./models";
import { validateProfile } from "./schema";

class UsageError extends Error {}

function parseFlags(argv: string[]): Map<string, string> {
  const flags = new Map<string, string>();
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (!arg.startsWith("--")) throw new UsageError(`unexpected argument ${arg}`);
    const value = argv[i + 1];
    if (value === undefined || value.startsWith("--")) {
      throw new UsageError(`flag ${arg} needs a value`);
    }
    flags.set(arg.slice(2), value);
    i++;
  }
  return flags;
}

function need(flags: Map<string, string>, name: string): string {
  const value = flags.get(name);
  if (value === undefined) throw new UsageError(`missing --${name}`);
  return value;
}

function parseInput(text: string): Shape3 {
  const parts = text.toLowerCase().split("x").map((p) => parseInt(p, 10));
  if (parts.length !== 3 || parts.some((p) => !Number.isInteger(p) || p < 1)) {
    throw new UsageError(`--input must be WxHxC, e.g. 224x224x3; got ${text}`);
  }
  const [w, h, c] = parts;
  return [h, w, c];
}

function parseBatches(text: string): number[] {
  const parts = text.split(",").map((p) => parseInt(p.trim(), 10));
  if (parts.length === 0 || parts.some((p) => !Number.isInteger(p) || p < 1)) {
    throw new UsageError(`--batches must be a comma list of positive integers; got ${text}`);
  }
  return parts;
}

function writeJson(outPath: string, obj: unknown): void {
  fs.mkdirSync(path.dirname(path.resolve(outPath)), { recursive: true });
  fs.writeFileSync(outPath, JSON.stringify(obj, null, 2) + "\n");
}

async function cmdExtract(flags: Map<string, string>): Promise<void> {
  const role = (flags.get("role") ?? "both") as Role;
  if (!["device", "server", "both"].includes(role)) {
    throw new UsageError(`--role must be device, server, or both; got ${role}`);
  }
  const spec: ProfilingSpec = {
    modelId: need(flags, "model"),
    inputShape: flags.has("input") ? parseInput(flags.get("input")!) : undefined,
    batches: parseBatches(need(flags, "batches")),
    role,
    repetitions: parseInt(flags.get("reps") ?? String(DEFAULT_SPEC.repetitions), 10),
    warmup: parseInt(flags.get("warmup") ?? String(DEFAULT_SPEC.warmup), 10),
    inputBytesPerElement: parseInt(
      flags.get("bytes-in") ?? String(DEFAULT_SPEC.inputBytesPerElement), 10),
    activationBytesPerElement: parseInt(
      flags.get("bytes-act") ?? String(DEFAULT_SPEC.activationBytesPerElement), 10),
  };
  const out = need(flags, "out");
  const profile = await buildProfile(spec);
  writeJson(out, profile);
  const warnings = (profile.meta?.timing_warnings as string[]) ?? [];
  console.log(
    `wrote ${out}: ${profile.layers.length} blocks, batches [${spec.batches.join(",")}], ` +
      `role ${role}${warnings.length ? `, ${warnings.length} timing warning(s)` : ""}`
  );
}

function cmdMerge(flags: Map<string, string>): void {
  const device = validateProfile(JSON.parse(fs.readFileSync(need(flags, "device"), "utf-8")));
  const server = validateProfile(JSON.parse(fs.readFileSync(need(flags, "server"), "utf-8")));
  const out = need(flags, "out");
  writeJson(out, mergeProfiles(device, server));
  console.log(`wrote ${out}: merged ${device.layers.length} layers`);
}

export async function main(argv: string[]): Promise<number> {
  try {
    const [command, ...rest] = argv;
    if (command === "extract") {
      await cmdExtract(parseFlags(rest));
    } else if (command === "merge") {
      cmdMerge(parseFlags(rest));
    } else if (command === "models") {
      console.log(modelIds().join("\n"));
    } else {
      throw new UsageError("usage: profiler <extract|merge|models> [flags]");
    }
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : String(err)}`);
    return 2;
  }
}

if (require.main === module) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
