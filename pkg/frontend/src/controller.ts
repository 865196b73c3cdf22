/** UI-independent session flow: load task, label pairs, submit, advance.
 *
 * The double-submit guard lives here: while a POST is in flight every
 * further submit() call is ignored, and a 409 on an already-submitted task
 * advances to the next one instead of erroring.
 */

import { ApiClient } from "./api.js";
import { DEFAULT_CATEGORY, Level, TaskState } from "./model.js";

export type Phase = "loading" | "labeling" | "submitting" | "done" | "error";

export interface ControllerView {
  phase: Phase;
  state: TaskState | null;
  selected: number | null;
  message: string;
  lastScore: number | null;
}

export class TaskController {
  phase: Phase = "loading";
  state: TaskState | null = null;
  selected: number | null = null;
  message = "";
  lastScore: number | null = null;
  private submitting = false;
  private listeners: Array<() => void> = [];

  constructor(
    private readonly api: ApiClient,
    private readonly annotator: string,
  ) {}

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  view(): ControllerView {
    return {
      phase: this.phase,
      state: this.state,
      selected: this.selected,
      message: this.message,
      lastScore: this.lastScore,
    };
  }

  async loadNext(): Promise<void> {
    this.phase = "loading";
    this.message = "";
    this.notify();
    try {
      const task = await this.api.nextTask(this.annotator);
      if (task === null) {
        this.phase = "done";
        this.state = null;
        this.selected = null;
      } else {
        this.state = new TaskState(task);
        const first = this.state.labelablePairs()[0];
        this.selected = first ? first.index : null;
        this.phase = "labeling";
      }
    } catch (err) {
      this.phase = "error";
      this.message = String(err);
    }
    this.notify();
  }

  /** Move the selection to the next/previous labelable pair. */
  move(delta: 1 | -1): void {
    if (!this.state) return;
    const pairs = this.state.labelablePairs();
    if (!pairs.length) return;
    const indexes = pairs.map((p) => p.index);
    const at = this.selected === null ? -1 : indexes.indexOf(this.selected);
    const next = Math.min(Math.max(at + delta, 0), indexes.length - 1);
    this.selected = indexes[next];
    this.notify();
  }

  select(index: number): void {
    if (!this.state) return;
    if (this.state.labelablePairs().some((p) => p.index === index)) {
      this.selected = index;
      this.notify();
    }
  }

  /** Label the selected pair; keyboard path uses the level's default category. */
  labelSelected(level: Level, category?: string, reason?: string): void {
    if (!this.state || this.selected === null) return;
    const existing = this.state.labelFor(this.selected);
    this.state.setLabel(
      this.selected,
      level,
      category ?? (existing && existing.level === level ? existing.category : DEFAULT_CATEGORY[level]),
      reason ?? existing?.reason ?? "",
    );
    this.notify();
  }

  setReason(reason: string): void {
    if (!this.state || this.selected === null) return;
    this.state.setReason(this.selected, reason);
    this.notify();
  }

  canSubmit(): boolean {
    return this.phase === "labeling" && !!this.state && this.state.isComplete();
  }

  async submit(): Promise<void> {
    if (!this.state || this.submitting) return; // double-click guard
    if (!this.state.isComplete()) {
      this.message = `${this.state.missingCount()} pair(s) still unlabeled`;
      this.notify();
      return;
    }
    this.submitting = true;
    this.phase = "submitting";
    this.notify();
    try {
      const result = await this.api.submitLabels(
        this.state.task.id,
        this.annotator,
        this.state.toSubmitLabels(),
      );
      if (result.ok) {
        this.lastScore = result.humanScore ?? null;
        await this.loadNext();
      } else if (result.status === 409) {
        // stale or duplicate submission: the work is stored, move on
        this.message = result.error ?? "already submitted";
        await this.loadNext();
      } else {
        this.phase = "labeling";
        this.message = result.error ?? `HTTP ${result.status}`;
      }
    } catch (err) {
      // network failure: keep all local labels for retry
      this.phase = "labeling";
      this.message = `submit failed, labels kept: ${String(err)}`;
    } finally {
      this.submitting = false;
      this.notify();
    }
  }
}
