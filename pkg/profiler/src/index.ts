export { buildModel, modelIds, ModelDef, BlockDef, Shape3 } from "./models";
export { extractSizes, inputBytesPerSample, BlockSize } from "./extract";
export { measureTimings, median, TimingOptions, BlockTiming } from "./timing";
export { buildProfile, mergeProfiles, ProfilingSpec, Role, DEFAULT_SPEC } from "./emit";
export {
  compressionRatios,
  compressiveSet,
  naturalBottlenecks,
  validateProfile,
  LayerEntry,
  ProfileFile,
  SchemaError,
} from "./schema";
