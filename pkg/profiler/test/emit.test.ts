import { describe, expect, it } from "vitest";

import { buildProfile, mergeProfiles } from "../src/emit";
import { compressionRatios, naturalBottlenecks, validateProfile } from "../src/schema";

const SPEC = {
  modelId: "toy-conv",
  inputShape: [32, 32, 3] as [number, number, number],
  batches: [1, 2],
  repetitions: 3,
  warmup: 1,
  inputBytesPerElement: 1,
  activationBytesPerElement: 4,
};

describe("buildProfile", () => {
  it("emits a schema-valid profile with a natural bottleneck", async () => {
    const profile = await buildProfile({ ...SPEC, role: "both" });
    expect(() => validateProfile(profile)).not.toThrow();
    expect(profile.input_bytes_per_sample).toBe(32 * 32 * 3);
    const natural = naturalBottlenecks(compressionRatios(profile));
    expect(natural.length).toBeGreaterThanOrEqual(1);
  }, 60_000);

  it("zero-fills the unmeasured role", async () => {
    const profile = await buildProfile({ ...SPEC, role: "device" });
    for (const layer of profile.layers) {
      expect(Object.values(layer.server_ms).every((v) => v === 0)).toBe(true);
    }
    expect(profile.meta?.role).toBe("device");
  }, 60_000);
});

describe("mergeProfiles", () => {
  it("takes each column from its role run", async () => {
    const device = await buildProfile({ ...SPEC, role: "device" });
    const server = await buildProfile({ ...SPEC, role: "server" });
    const merged = mergeProfiles(device, server);
    expect(() => validateProfile(merged)).not.toThrow();
    merged.layers.forEach((layer, i) => {
      expect(layer.device_ms).toEqual(device.layers[i].device_ms);
      expect(layer.server_ms).toEqual(server.layers[i].server_ms);
    });
  }, 120_000);

  it("rejects mismatched layer lists", async () => {
    const device = await buildProfile({ ...SPEC, role: "device" });
    const other = await buildProfile({ ...SPEC, modelId: "identity", role: "server" });
    expect(() => mergeProfiles(device, other)).toThrow(/layer set mismatch/);
  }, 60_000);
});
