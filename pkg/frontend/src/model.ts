/** Task state and score arithmetic for the annotation UI.
 *
 * Pure data layer: no DOM, no network. The provisional score shown here must
 * equal the score the server stores on submission, so the formula and the
 * level/category table mirror the backend exactly.
 */

export type Level = 0 | 1 | 2 | 3;

export interface TaskPair {
  index: number;
  ref_words: string[];
  hyp_words: string[];
  op: string;
  k: number;
  locked: boolean;
}

export interface Task {
  id: string;
  lang: string;
  ref_text: string;
  hyp_text: string;
  n_ref: number;
  status: string;
  pairs: TaskPair[];
}

export interface Label {
  pair_index: number;
  level: Level;
  category: string;
  reason: string;
}

export const LEVEL_NAMES: Record<Level, string> = {
  0: "identical",
  1: "no penalty",
  2: "minor",
  3: "major",
};

/** Categories allowed per level; the input layer never offers anything else. */
export const LEVEL_CATEGORIES: Record<Level, string[]> = {
  0: ["other"],
  1: [
    "numerical",
    "abbreviation",
    "compound",
    "transliteration-native",
    "transliteration-actual",
    "alternate-spelling",
    "proper-noun",
    "colloquial",
    "other",
  ],
  2: ["small-spelling", "small-grammar", "other"],
  3: ["meaning-altering-spelling", "substitution", "omission-addition", "reordering", "other"],
};

/** Preselected category when a level key is pressed (still changeable). */
export const DEFAULT_CATEGORY: Record<Level, string> = {
  0: "other",
  1: "alternate-spelling",
  2: "small-spelling",
  3: "substitution",
};

export function categoriesFor(level: Level): string[] {
  return LEVEL_CATEGORIES[level];
}

export function isConsistent(level: Level, category: string): boolean {
  return LEVEL_CATEGORIES[level].includes(category);
}

export interface Totals {
  noPenalty: number;
  minor: number;
  major: number;
  labeled: number;
  labelable: number;
  penalty: number;
  /** Provisional sentence score: 1 - (major + 0.5 * minor) / N, clamped at 0. */
  score: number;
}

export class TaskState {
  readonly task: Task;
  private labels = new Map<number, Label>();

  constructor(task: Task) {
    this.task = task;
  }

  labelablePairs(): TaskPair[] {
    return this.task.pairs.filter((p) => !p.locked);
  }

  labelFor(index: number): Label | undefined {
    return this.labels.get(index);
  }

  /** Assign or replace a label; rejects locked pairs and bad categories. */
  setLabel(index: number, level: Level, category?: string, reason = ""): void {
    const pair = this.task.pairs.find((p) => p.index === index);
    if (!pair) throw new Error(`no pair with index ${index}`);
    if (pair.locked) throw new Error(`pair ${index} is locked`);
    const cat = category ?? DEFAULT_CATEGORY[level];
    if (!isConsistent(level, cat)) {
      throw new Error(`category ${cat} is not valid for level ${level}`);
    }
    this.labels.set(index, { pair_index: index, level, category: cat, reason });
  }

  setReason(index: number, reason: string): void {
    const existing = this.labels.get(index);
    if (existing) this.labels.set(index, { ...existing, reason });
  }

  isComplete(): boolean {
    return this.labelablePairs().every((p) => this.labels.has(p.index));
  }

  missingCount(): number {
    return this.labelablePairs().filter((p) => !this.labels.has(p.index)).length;
  }

  totals(): Totals {
    let noPenalty = 0;
    let minor = 0;
    let major = 0;
    for (const label of this.labels.values()) {
      if (label.level === 1) noPenalty += 1;
      else if (label.level === 2) minor += 1;
      else if (label.level === 3) major += 1;
    }
    const penalty = major * 1.0 + minor * 0.5;
    const raw = 1 - penalty / this.task.n_ref;
    return {
      noPenalty,
      minor,
      major,
      labeled: this.labels.size,
      labelable: this.labelablePairs().length,
      penalty,
      score: Math.max(0, raw),
    };
  }

  toSubmitLabels(): Label[] {
    return [...this.labels.values()].sort((a, b) => a.pair_index - b.pair_index);
  }
}
