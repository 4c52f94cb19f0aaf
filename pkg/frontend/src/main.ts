/** DOM wiring: render the session into #app and translate UI events into
 * state transitions.  Keyboard digits 0-5 select a choice; submission
 * always requires the explicit confirm action. */

import { ApiClient } from "./api.js";
import { render } from "./render.js";
import {
  acknowledged,
  batchLoaded,
  canConfirm,
  currentTask,
  duplicateSkipped,
  select,
  startSession,
  submissionFailed,
  type SessionState,
} from "./session.js";

const api = new ApiClient();

function raterIdFromUrl(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("rater_id");
  if (fromQuery) return fromQuery;
  const stored = window.localStorage.getItem("rater_id");
  if (stored) return stored;
  const generated = `rater-${Math.random().toString(36).slice(2, 10)}`;
  window.localStorage.setItem("rater_id", generated);
  return generated;
}

async function main(): Promise<void> {
  const app = document.getElementById("app");
  const instructionsEl = document.getElementById("instructions");
  if (!app) throw new Error("missing #app container");

  api
    .instructions()
    .then((ins) => {
      if (instructionsEl) instructionsEl.textContent = ins.text;
    })
    .catch(() => {
      /* instructions are decorative; rating still works without them */
    });

  let state: SessionState = startSession(raterIdFromUrl());

  async function transition(next: SessionState): Promise<void> {
    state = next;
    if (state.kind === "loading") {
      if (!app) return;
      app.innerHTML = render(state);
      try {
        const batch = await api.nextBatch(state.raterId);
        return transition(batchLoaded(state, batch));
      } catch {
        return transition({ ...state, kind: "loading" });
      }
    }
    if (!app) return;
    app.innerHTML = render(state);
  }

  async function confirm(): Promise<void> {
    if (!canConfirm(state) || state.kind !== "rating" || state.selected === null) return;
    const task = currentTask(state);
    if (!task) return;
    try {
      const result = await api.submitRating(state.raterId, task.example_id, state.selected);
      if (result.ok) {
        return transition(acknowledged(state));
      }
      if (result.status === 409) {
        return transition(duplicateSkipped(state));
      }
      return transition(submissionFailed(state, result.detail));
    } catch {
      return transition(submissionFailed(state, "Network failure - your rating was not sent. Try again."));
    }
  }

  app.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const choice = target.closest<HTMLElement>(".choice");
    if (choice?.dataset.score !== undefined) {
      void transition(select(state, Number(choice.dataset.score)));
      return;
    }
    if (target.closest("#confirm")) {
      void confirm();
    }
  });

  window.addEventListener("keydown", (event) => {
    if (/^[0-5]$/.test(event.key)) {
      void transition(select(state, Number(event.key)));
    } else if (event.key === "Enter") {
      void confirm();
    }
  });

  await transition(state);
}

void main();
