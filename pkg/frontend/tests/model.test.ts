import { describe, expect, it } from "vitest";

import {
  categoriesFor,
  DEFAULT_CATEGORY,
  isConsistent,
  Level,
  TaskState,
  type Task,
} from "../src/model";

// the worked twelve-word task as the server serializes it
export const WORKED_TASK: Task = {
  id: "a1",
  lang: "hi",
  ref_text: "vo bhajansangraha ke paas walaa A.T.M. das times sundar hai skool se",
  hyp_text: "vaha bhajan sangraha komal paaswala aytiem 10 par taims sundar hain skul se",
  n_ref: 12,
  status: "in-progress",
  pairs: [
    { index: 0, ref_words: ["vo"], hyp_words: ["vaha"], op: "substitute", k: 1, locked: false },
    { index: 1, ref_words: ["bhajansangraha"], hyp_words: ["bhajan", "sangraha"], op: "join", k: 2, locked: false },
    { index: 2, ref_words: ["ke"], hyp_words: ["komal"], op: "substitute", k: 1, locked: false },
    { index: 3, ref_words: ["paas", "walaa"], hyp_words: ["paaswala"], op: "split", k: 2, locked: false },
    { index: 4, ref_words: ["atm"], hyp_words: ["aytiem"], op: "substitute", k: 1, locked: false },
    { index: 5, ref_words: ["das"], hyp_words: ["10"], op: "substitute", k: 1, locked: false },
    { index: 6, ref_words: [], hyp_words: ["par"], op: "insert", k: 1, locked: false },
    { index: 7, ref_words: ["times"], hyp_words: ["taims"], op: "substitute", k: 1, locked: false },
    { index: 8, ref_words: ["sundar"], hyp_words: ["sundar"], op: "match", k: 1, locked: true },
    { index: 9, ref_words: ["hai"], hyp_words: ["hain"], op: "substitute", k: 1, locked: false },
    { index: 10, ref_words: ["skool"], hyp_words: ["skul"], op: "substitute", k: 1, locked: false },
    { index: 11, ref_words: ["se"], hyp_words: ["se"], op: "match", k: 1, locked: true },
  ],
};

export const GOLD: Array<[number, Level, string]> = [
  [0, 1, "colloquial"],
  [1, 1, "compound"],
  [2, 3, "substitution"],
  [3, 1, "compound"],
  [4, 1, "abbreviation"],
  [5, 1, "numerical"],
  [6, 3, "omission-addition"],
  [7, 1, "transliteration-native"],
  [9, 2, "small-grammar"],
  [10, 1, "transliteration-native"],
];

describe("level/category table", () => {
  it("only offers categories consistent with the level", () => {
    expect(categoriesFor(2)).toEqual(["small-spelling", "small-grammar", "other"]);
    expect(isConsistent(2, "substitution")).toBe(false);
    expect(isConsistent(3, "substitution")).toBe(true);
    for (const level of [0, 1, 2, 3] as Level[]) {
      expect(isConsistent(level, DEFAULT_CATEGORY[level])).toBe(true);
      for (const category of categoriesFor(level)) {
        expect(isConsistent(level, category)).toBe(true);
      }
    }
  });
});

describe("TaskState", () => {
  it("flags ten labelable pairs and two locked matches", () => {
    const state = new TaskState(WORKED_TASK);
    expect(state.labelablePairs()).toHaveLength(10);
    expect(WORKED_TASK.pairs.filter((p) => p.locked)).toHaveLength(2);
  });

  it("computes the provisional score like the server (gold = 0.7917)", () => {
    const state = new TaskState(WORKED_TASK);
    for (const [index, level, category] of GOLD) {
      state.setLabel(index, level, category);
    }
    const totals = state.totals();
    expect(totals.noPenalty).toBe(7);
    expect(totals.minor).toBe(1);
    expect(totals.major).toBe(2);
    expect(totals.penalty).toBeCloseTo(2.5, 10);
    expect(totals.score).toBeCloseTo(1 - 2.5 / 12, 10);
    expect(totals.score.toFixed(4)).toBe("0.7917");
    expect(state.isComplete()).toBe(true);
  });

  it("updates score incrementally by the class weight", () => {
    const state = new TaskState(WORKED_TASK);
    state.setLabel(9, 2, "small-grammar");
    expect(state.totals().score).toBeCloseTo(1 - 0.5 / 12, 10);
    expect(state.totals().minor).toBe(1);
  });

  it("replaces labels instead of stacking them", () => {
    const state = new TaskState(WORKED_TASK);
    state.setLabel(9, 2, "small-grammar");
    state.setLabel(9, 3, "substitution");
    const totals = state.totals();
    expect(totals.minor).toBe(0);
    expect(totals.major).toBe(1);
    expect(state.labelFor(9)?.category).toBe("substitution");
  });

  it("rejects locked pairs and inconsistent categories", () => {
    const state = new TaskState(WORKED_TASK);
    expect(() => state.setLabel(8, 1)).toThrow(/locked/);
    expect(() => state.setLabel(0, 2, "substitution")).toThrow(/not valid/);
  });

  it("clamps the provisional score at zero", () => {
    const tiny: Task = {
      ...WORKED_TASK,
      id: "tiny",
      n_ref: 1,
      pairs: [
        { index: 0, ref_words: ["a"], hyp_words: ["x"], op: "substitute", k: 1, locked: false },
        { index: 1, ref_words: [], hyp_words: ["y"], op: "insert", k: 1, locked: false },
      ],
    };
    const state = new TaskState(tiny);
    state.setLabel(0, 3);
    state.setLabel(1, 3);
    expect(state.totals().score).toBe(0);
  });

  it("reports missing labels until complete", () => {
    const state = new TaskState(WORKED_TASK);
    expect(state.missingCount()).toBe(10);
    state.setLabel(0, 1, "colloquial");
    expect(state.missingCount()).toBe(9);
    expect(state.isComplete()).toBe(false);
  });

  it("serializes labels sorted by pair index", () => {
    const state = new TaskState(WORKED_TASK);
    state.setLabel(9, 2, "small-grammar");
    state.setLabel(0, 1, "colloquial");
    expect(state.toSubmitLabels().map((l) => l.pair_index)).toEqual([0, 9]);
  });
});
