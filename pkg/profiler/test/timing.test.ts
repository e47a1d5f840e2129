import { describe, expect, it } from "vitest";

import { buildModel } from "../src/models";
import { measureTimings, median } from "../src/timing";

describe("median", () => {
  it("odd count takes the middle", () => {
    expect(median([3, 1, 2])).toBe(2);
  });

  it("even count averages the middles", () => {
    expect(median([4, 1, 3, 2])).toBe(2.5);
  });

  it("rejects empty input", () => {
    expect(() => median([])).toThrow();
  });
});

describe("measureTimings", () => {
  it("produces exactly the requested batch keys", async () => {
    const model = buildModel("toy-conv", [16, 16, 3]);
    const { timings } = await measureTimings(model, [2, 1], { repetitions: 3, warmup: 1 });
    expect(timings).toHaveLength(model.blocks.length);
    for (const t of timings) {
      expect(Object.keys(t.ms).sort()).toEqual(["1", "2"]);
      for (const v of Object.values(t.ms)) {
        expect(v).toBeGreaterThanOrEqual(0);
        expect(Number.isFinite(v)).toBe(true);
      }
    }
  }, 30_000);

  it("enforces at least three repetitions", async () => {
    const model = buildModel("identity");
    await expect(measureTimings(model, [1], { repetitions: 2, warmup: 0 })).rejects.toThrow(
      /repetitions/
    );
  });

  it("rejects bad batch lists", async () => {
    const model = buildModel("identity");
    await expect(measureTimings(model, [], { repetitions: 3, warmup: 0 })).rejects.toThrow();
    await expect(measureTimings(model, [0], { repetitions: 3, warmup: 0 })).rejects.toThrow();
    await expect(measureTimings(model, [1, 1], { repetitions: 3, warmup: 0 })).rejects.toThrow();
  });
});
