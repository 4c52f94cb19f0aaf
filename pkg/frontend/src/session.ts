/** Pure state machine for one rater's pass through task batches.
 *
 * The cursor advances only on server acknowledgment; a selection plus an
 * explicit confirm is required before anything is sent.  All transitions
 * are pure so the flow is testable without a DOM or a network.
 */

import type { AnnotationTask, TaskBatch } from "./types.js";

export type SessionState =
  | { kind: "loading"; raterId: string; submitted: number }
  | {
      kind: "rating";
      raterId: string;
      batch: TaskBatch;
      cursor: number;
      submitted: number;
      selected: number | null;
      notice: string | null;
    }
  | { kind: "complete"; raterId: string; submitted: number };

export function startSession(raterId: string): SessionState {
  return { kind: "loading", raterId, submitted: 0 };
}

export function currentTask(state: SessionState): AnnotationTask | null {
  if (state.kind !== "rating") return null;
  return state.batch.tasks[state.cursor] ?? null;
}

/** Progress label for the active batch, e.g. "3 of 25". */
export function progressLabel(state: SessionState): string {
  if (state.kind !== "rating") return "";
  return `${state.cursor + 1} of ${state.batch.tasks.length}`;
}

/** A batch arrived (or the pool is exhausted). */
export function batchLoaded(state: SessionState, batch: TaskBatch | null): SessionState {
  if (batch === null || batch.tasks.length === 0) {
    return { kind: "complete", raterId: state.raterId, submitted: state.submitted };
  }
  return {
    kind: "rating",
    raterId: state.raterId,
    batch,
    cursor: 0,
    submitted: state.submitted,
    selected: null,
    notice: null,
  };
}

/** Pick one of the six choices; out-of-range scores are ignored. */
export function select(state: SessionState, score: number): SessionState {
  if (state.kind !== "rating" || !Number.isInteger(score) || score < 0 || score > 5) {
    return state;
  }
  return { ...state, selected: score, notice: null };
}

/** Only a selected choice may be confirmed and sent. */
export function canConfirm(state: SessionState): boolean {
  return state.kind === "rating" && state.selected !== null;
}

function advance(state: Extract<SessionState, { kind: "rating" }>, submitted: number): SessionState {
  const next = state.cursor + 1;
  if (next >= state.batch.tasks.length) {
    // batch finished: the caller fetches the next batch
    return { kind: "loading", raterId: state.raterId, submitted };
  }
  return { ...state, cursor: next, submitted, selected: null, notice: null };
}

/** The server acknowledged the rating: count it and move on. */
export function acknowledged(state: SessionState): SessionState {
  if (state.kind !== "rating") return state;
  return advance(state, state.submitted + 1);
}

/** 409 duplicate: the rating already exists, so skip forward with a notice. */
export function duplicateSkipped(state: SessionState): SessionState {
  if (state.kind !== "rating") return state;
  const moved = advance(state, state.submitted);
  if (moved.kind === "rating") {
    return { ...moved, notice: "Already rated; skipped ahead." };
  }
  return moved;
}

/** Rejection or network failure: stay on the task and surface the message. */
export function submissionFailed(state: SessionState, message: string): SessionState {
  if (state.kind !== "rating") return state;
  return { ...state, notice: message };
}
