/** Typed client for the annotation server HTTP API. */

import type { Label, Task } from "./model.js";

export interface SubmitResult {
  ok: boolean;
  status: number;
  humanScore?: number;
  error?: string;
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: typeof fetch = fetch.bind(globalThis),
  ) {}

  /** Next pending task for this annotator, or null when the queue is empty. */
  async nextTask(annotator: string): Promise<Task | null> {
    const resp = await this.fetchFn(
      `${this.baseUrl}/api/tasks/next?annotator=${encodeURIComponent(annotator)}`,
    );
    if (resp.status === 204) return null;
    if (!resp.ok) throw new Error(`next task failed: HTTP ${resp.status}`);
    return (await resp.json()) as Task;
  }

  async getTask(id: string): Promise<Task> {
    const resp = await this.fetchFn(`${this.baseUrl}/api/tasks/${encodeURIComponent(id)}`);
    if (!resp.ok) throw new Error(`task ${id} failed: HTTP ${resp.status}`);
    return (await resp.json()) as Task;
  }

  /** Submit labels; 400/409 come back as structured results, not throws. */
  async submitLabels(taskId: string, annotator: string, labels: Label[]): Promise<SubmitResult> {
    const resp = await this.fetchFn(
      `${this.baseUrl}/api/tasks/${encodeURIComponent(taskId)}/labels`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ annotator, labels }),
      },
    );
    if (resp.ok) {
      const body = (await resp.json()) as { human_score: number };
      return { ok: true, status: resp.status, humanScore: body.human_score };
    }
    let message = `HTTP ${resp.status}`;
    try {
      const body = (await resp.json()) as { error?: string; detail?: unknown };
      message = body.error ?? JSON.stringify(body.detail ?? body);
    } catch {
      // non-JSON error body; keep the status text
    }
    return { ok: false, status: resp.status, error: message };
  }

  async progress(): Promise<Record<string, number>> {
    const resp = await this.fetchFn(`${this.baseUrl}/api/progress`);
    if (!resp.ok) throw new Error(`progress failed: HTTP ${resp.status}`);
    return (await resp.json()) as Record<string, number>;
  }
}
