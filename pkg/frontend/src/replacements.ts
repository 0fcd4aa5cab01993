import type { ChangeRecord, SimplifyResult } from "./types.js";

/** Renderable sentence slots plus the change history needed to undo swaps. */
export interface ViewState {
  slots: string[];
  changes: ChangeRecord[];
}

export function createView(sentences: string[]): ViewState {
  return { slots: [...sentences], changes: [] };
}

/**
 * Swap in simplified text for exactly the slots the service returned.
 * Returns the change records appended for this call (empty input → no-op).
 */
export function applyReplacements(view: ViewState, results: SimplifyResult[]): ChangeRecord[] {
  const applied: ChangeRecord[] = [];
  for (const r of results) {
    if (r.sentence_index < 0 || r.sentence_index >= view.slots.length) {
      throw new Error(`replacement targets unknown sentence ${r.sentence_index}`);
    }
    const record: ChangeRecord = {
      sentence_index: r.sentence_index,
      before: view.slots[r.sentence_index],
      after: r.simplified,
    };
    view.slots[r.sentence_index] = r.simplified;
    view.changes.push(record);
    applied.push(record);
  }
  return applied;
}

/** Undo the most recent change; returns it, or null when nothing is left. */
export function undoLast(view: ViewState): ChangeRecord | null {
  const record = view.changes.pop();
  if (!record) return null;
  view.slots[record.sentence_index] = record.before;
  return record;
}

/** Undo every recorded change, newest first. */
export function undoAll(view: ViewState): void {
  while (undoLast(view) !== null) {
    // keep unwinding
  }
}
