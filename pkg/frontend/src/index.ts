export * from "./types.js";
export { ApiClient, ApiError } from "./client.js";
export {
  buildLayout,
  measureLayoutFromDom,
  pixelLength,
  renderDocument,
  MeasurementError,
} from "./measureLayout.js";
export type { WordMeasurer, WordRect } from "./measureLayout.js";
export {
  GazeStreamer,
  MouseGazeSource,
  replayGazeLog,
  FLUSH_INTERVAL_MS,
  SAMPLE_INTERVAL_MS,
} from "./gazeStream.js";
export type { GazeSink } from "./gazeStream.js";
export { MarkState } from "./marks.js";
export { applyReplacements, createView, undoAll, undoLast } from "./replacements.js";
export type { ViewState } from "./replacements.js";
