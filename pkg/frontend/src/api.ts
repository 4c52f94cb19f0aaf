/** Typed client for the rating service; the UI's only network surface. */

import type { BatchResponse, Instructions, Progress, RatingAck, TaskBatch } from "./types.js";

export type SubmitResult =
  | { ok: true; ack: RatingAck }
  | { ok: false; status: number; detail: string };

export class ApiClient {
  constructor(private readonly base: string = "") {}

  async nextBatch(raterId: string): Promise<TaskBatch | null> {
    const resp = await fetch(
      `${this.base}/api/tasks/next?rater_id=${encodeURIComponent(raterId)}`,
    );
    if (!resp.ok) {
      throw new Error(`task fetch failed with status ${resp.status}`);
    }
    const body = (await resp.json()) as BatchResponse;
    return body.batch;
  }

  async submitRating(raterId: string, exampleId: string, score: number): Promise<SubmitResult> {
    const resp = await fetch(`${this.base}/api/ratings`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ rater_id: raterId, example_id: exampleId, score }),
    });
    if (resp.ok) {
      return { ok: true, ack: (await resp.json()) as RatingAck };
    }
    let detail = resp.statusText;
    try {
      const body = (await resp.json()) as { detail?: unknown };
      if (typeof body.detail === "string") detail = body.detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    return { ok: false, status: resp.status, detail };
  }

  async instructions(): Promise<Instructions> {
    const resp = await fetch(`${this.base}/api/instructions`);
    if (!resp.ok) throw new Error(`instructions fetch failed with status ${resp.status}`);
    return (await resp.json()) as Instructions;
  }

  async progress(): Promise<Progress> {
    const resp = await fetch(`${this.base}/api/progress`);
    if (!resp.ok) throw new Error(`progress fetch failed with status ${resp.status}`);
    return (await resp.json()) as Progress;
  }
}
