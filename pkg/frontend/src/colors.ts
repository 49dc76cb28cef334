// Per-word legend colors, stable for the lifetime of the page: a word
// keeps its color even when other words come and go.

const PALETTE = [
  "#2563eb", // blue
  "#dc2626", // red
  "#16a34a", // green
  "#9333ea", // purple
  "#ea580c", // orange
  "#0891b2", // cyan
  "#ca8a04", // amber
  "#db2777", // pink
];

export class ColorAssigner {
  private assigned = new Map<string, string>();

  color(word: string): string {
    let c = this.assigned.get(word);
    if (c === undefined) {
      c = PALETTE[this.assigned.size % PALETTE.length];
      this.assigned.set(word, c);
    }
    return c;
  }
}
