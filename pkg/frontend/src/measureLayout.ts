import type { LayoutDocument, SentenceSpan, WordBox } from "./types.js";

export interface WordRect {
  x: number;
  y: number;
  w: number;
  h: number;
}

/** Produces the on-screen rect for one rendered word. */
export type WordMeasurer = (sentenceIndex: number, wordIndex: number, word: string) => WordRect;

export class MeasurementError extends Error {}

const LINE_TOLERANCE = 1.0;

/** Sum of per-line horizontal extents; a wrapped sentence contributes one extent per line. */
export function pixelLength(boxes: WordRect[]): number {
  if (boxes.length === 0) throw new MeasurementError("no word boxes");
  const lines = new Map<number, { min: number; max: number }>();
  const keys: number[] = [];
  for (const b of boxes) {
    let key = keys.find((k) => Math.abs(k - b.y) <= LINE_TOLERANCE);
    if (key === undefined) {
      key = b.y;
      keys.push(key);
      lines.set(key, { min: b.x, max: b.x + b.w });
    } else {
      const line = lines.get(key)!;
      line.min = Math.min(line.min, b.x);
      line.max = Math.max(line.max, b.x + b.w);
    }
  }
  let total = 0;
  for (const line of lines.values()) total += line.max - line.min;
  return total;
}

function splitWords(sentence: string): string[] {
  return sentence.split(/\s+/).filter((w) => w.length > 0);
}

/**
 * Build the layout document from measured word geometry.
 *
 * Zero-size boxes trigger one re-measure of the offending word; a second
 * zero-size result fails the measurement.
 */
export function buildLayout(
  docId: string,
  sentences: string[],
  measure: WordMeasurer,
): LayoutDocument {
  if (sentences.length === 0) throw new MeasurementError("no sentences to measure");
  const words: WordBox[] = [];
  const spans: SentenceSpan[] = [];
  for (let si = 0; si < sentences.length; si++) {
    const tokens = splitWords(sentences[si]);
    if (tokens.length === 0) throw new MeasurementError(`sentence ${si} has no words`);
    const firstWord = words.length;
    const rects: WordRect[] = [];
    for (let wi = 0; wi < tokens.length; wi++) {
      let rect = measure(si, wi, tokens[wi]);
      if (rect.w <= 0 || rect.h <= 0) {
        rect = measure(si, wi, tokens[wi]); // retry once before giving up
      }
      if (rect.w <= 0 || rect.h <= 0) {
        throw new MeasurementError(
          `word ${wi} of sentence ${si} (${JSON.stringify(tokens[wi])}) measured with zero size`,
        );
      }
      rects.push(rect);
      words.push({ text: tokens[wi], ...rect, sentence_index: si });
    }
    spans.push({
      index: si,
      text: sentences[si],
      first_word: firstWord,
      last_word: words.length - 1,
      pixel_length: pixelLength(rects),
    });
  }
  return { doc_id: docId, sentences: spans, words };
}

/**
 * Measure a layout from live DOM nodes: every word must be wrapped in an
 * element carrying `data-word` (see renderDocument), positioned inside `root`.
 */
export function measureLayoutFromDom(docId: string, root: HTMLElement, sentences: string[]): LayoutDocument {
  const nodes = root.querySelectorAll<HTMLElement>("[data-word]");
  const bySlot = new Map<string, HTMLElement>();
  nodes.forEach((el) => {
    bySlot.set(`${el.dataset.sentence}:${el.dataset.word}`, el);
  });
  const origin = root.getBoundingClientRect();
  return buildLayout(docId, sentences, (si, wi) => {
    const el = bySlot.get(`${si}:${wi}`);
    if (!el) throw new MeasurementError(`no rendered node for word ${wi} of sentence ${si}`);
    const r = el.getBoundingClientRect();
    return { x: r.left - origin.left, y: r.top - origin.top, w: r.width, h: r.height };
  });
}

/** Render sentences as word spans the measurer above can find. */
export function renderDocument(root: HTMLElement, sentences: string[]): void {
  root.textContent = "";
  sentences.forEach((sentence, si) => {
    const sentEl = root.ownerDocument.createElement("span");
    sentEl.dataset.sentenceSlot = String(si);
    splitWords(sentence).forEach((word, wi) => {
      const el = root.ownerDocument.createElement("span");
      el.dataset.sentence = String(si);
      el.dataset.word = String(wi);
      el.textContent = word;
      sentEl.appendChild(el);
      sentEl.appendChild(root.ownerDocument.createTextNode(" "));
    });
    root.appendChild(sentEl);
  });
}
