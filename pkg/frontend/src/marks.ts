/** Per-sentence reader marks: click a sentence to toggle "this felt hard". */
export class MarkState {
  private readonly marked = new Set<number>();

  constructor(private readonly sentenceCount: number) {
    if (!Number.isInteger(sentenceCount) || sentenceCount < 0) {
      throw new Error("sentenceCount must be a non-negative integer");
    }
  }

  toggle(sentenceIndex: number): boolean {
    if (!Number.isInteger(sentenceIndex) || sentenceIndex < 0 || sentenceIndex >= this.sentenceCount) {
      throw new Error(`sentence index ${sentenceIndex} out of range`);
    }
    if (this.marked.has(sentenceIndex)) {
      this.marked.delete(sentenceIndex);
      return false;
    }
    this.marked.add(sentenceIndex);
    return true;
  }

  isMarked(sentenceIndex: number): boolean {
    return this.marked.has(sentenceIndex);
  }

  /** Full boolean vector, one slot per sentence, always the document's length. */
  vector(): boolean[] {
    return Array.from({ length: this.sentenceCount }, (_, i) => this.marked.has(i));
  }
}
