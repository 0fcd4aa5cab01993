import { buildLayout } from "../src/measureLayout.js";
import type { WordRect } from "../src/measureLayout.js";
import type { GazeSamplePayload, LayoutDocument } from "../src/types.js";

export const CHAR_W = 9;
export const WORD_H = 20;
export const GAP = 6;
export const LINE_H = 32;
export const PAGE_W = 1400;

export const SAMPLE_PERIOD_MS = 1000 / 60;

/** Monospace-ish word rects: words flow left to right, wrapping at pageWidth. */
export function gridRects(sentences: string[], pageWidth: number = PAGE_W): WordRect[][] {
  let x = 10;
  let y = 10;
  const out: WordRect[][] = [];
  for (const sentence of sentences) {
    const row: WordRect[] = [];
    for (const token of sentence.split(/\s+/).filter((t) => t.length > 0)) {
      const w = Math.max(token.length * CHAR_W, CHAR_W);
      if (x + w > pageWidth) {
        x = 10;
        y += LINE_H;
      }
      row.push({ x, y, w, h: WORD_H });
      x += w + GAP;
    }
    out.push(row);
  }
  return out;
}

export function makeLayout(docId: string, sentences: string[], pageWidth: number = PAGE_W): LayoutDocument {
  const rects = gridRects(sentences, pageWidth);
  return buildLayout(docId, sentences, (si, wi) => rects[si][wi]);
}

export function wordCenter(layout: LayoutDocument, wordIndex: number): { x: number; y: number } {
  const b = layout.words[wordIndex];
  return { x: b.x + b.w / 2, y: b.y + b.h / 2 };
}

/**
 * 60 Hz samples dwelling on each [wordIndex, durationMs] visit in turn; the
 * jump between consecutive dwells is a single fast transition, so a
 * velocity-threshold detector separates them.
 */
export function dwellStream(
  layout: LayoutDocument,
  visits: Array<[number, number]>,
  startMs: number = 0,
): GazeSamplePayload[] {
  const samples: GazeSamplePayload[] = [];
  let t = startMs;
  for (const [wordIndex, duration] of visits) {
    const { x, y } = wordCenter(layout, wordIndex);
    const n = Math.max(Math.round(duration / SAMPLE_PERIOD_MS) + 1, 2);
    for (let i = 0; i < n; i++) {
      samples.push({ timestamp_ms: t, x_px: x, y_px: y, valid: true });
      t += SAMPLE_PERIOD_MS;
    }
  }
  return samples;
}

/**
 * Visit plan for reading every sentence once: fluent sentences get one short
 * dwell per word, the slow sentence gets three long dwells per word plus a
 * regression back to the previous word after the first repeat.
 */
export function readingVisits(layout: LayoutDocument, slowSentence: number): Array<[number, number]> {
  const visits: Array<[number, number]> = [];
  for (const span of layout.sentences) {
    const [perWord, dur] = span.index === slowSentence ? [3, 300.0] : [1, 150.0];
    for (let w = span.first_word; w <= span.last_word; w++) {
      for (let rep = 0; rep < perWord; rep++) {
        visits.push([w, dur]);
        if (perWord > 1 && rep === 0 && w > span.first_word) {
          visits.push([w - 1, dur / 2]);
        }
      }
    }
  }
  return visits;
}
