export {
  analyze,
  binomialCascade,
  type AlgorithmRecord,
  type AnalyzeOptions,
  type BoundResult,
  type Coverage,
  type SpectrumArrays,
  type SpectrumParams,
} from "./analyze.js";
