/** Wire types shared with the reading service HTTP API. */

export interface WordBox {
  text: string;
  x: number;
  y: number;
  w: number;
  h: number;
  sentence_index: number;
}

export interface SentenceSpan {
  index: number;
  text: string;
  first_word: number;
  last_word: number;
  pixel_length: number;
}

export interface LayoutDocument {
  doc_id: string;
  sentences: SentenceSpan[];
  words: WordBox[];
}

export interface GazeSamplePayload {
  timestamp_ms: number;
  x_px: number;
  y_px: number;
  valid: boolean;
}

export interface ScoreResponse {
  scores: number[];
  flagged: number[];
}

export interface SimplifyResult {
  sentence_index: number;
  original: string;
  simplified: string;
  client_id: string;
}

export interface SimplifyResponse {
  results: SimplifyResult[];
  errors: { sentence_index: number; error: string }[];
}

export interface ChangeRecord {
  sentence_index: number;
  before: string;
  after: string;
}

export interface DocumentResponse {
  session_id: string;
  user_id: string;
  state: "reading" | "scored" | "simplified";
  sentences: string[];
  scores: number[] | null;
  flagged: number[] | null;
  changes: ChangeRecord[];
}

export interface TrainReport {
  weighted_recall: number;
  weighted_precision: number;
  weighted_f1: number;
  confusion: { tp: number; fp: number; fn: number; tn: number };
  selected_features: number[] | null;
}
