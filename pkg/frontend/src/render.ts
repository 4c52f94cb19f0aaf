/** Pure HTML renderers for the rating flow.
 *
 * Everything returns a string so the markup is testable without a DOM;
 * the thin layer in main.ts assigns the result and wires events.
 */

import { progressLabel, type SessionState } from "./session.js";
import { RATING_CHOICES, type AnnotationTask } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

const UNK_NOTE = "Treat this as a rare, but appropriate word for the context.";

/** Escape the sentence, marking UNK placeholders with a tooltip note. */
export function renderSentence(text: string): string {
  const pieces = text.split(/(<UNK>|\bUNK\b)/g);
  return pieces
    .map((piece) =>
      piece === "<UNK>" || piece === "UNK"
        ? `<span class="unk" title="${UNK_NOTE}">${escapeHtml(piece)}</span>`
        : escapeHtml(piece),
    )
    .join("");
}

export function renderChoices(selected: number | null): string {
  const buttons = RATING_CHOICES.map(({ score, label }) => {
    const pressed = selected === score ? ' aria-pressed="true" data-selected="1"' : "";
    return (
      `<button class="choice" data-score="${score}"${pressed}>` +
      `<span class="score">${score}</span> ${escapeHtml(label)}</button>`
    );
  }).join("\n");
  return `<div class="choices" role="group" aria-label="typicality score">\n${buttons}\n</div>`;
}

export function renderTask(task: AnnotationTask, progress: string, selected: number | null, notice: string | null): string {
  // an empty context (unconditional generation) hides the panel entirely
  const contextPanel = task.context.trim()
    ? `<section class="context"><h2>Context</h2><p>${escapeHtml(task.context)}</p></section>`
    : "";
  const noticeHtml = notice ? `<p class="notice" role="alert">${escapeHtml(notice)}</p>` : "";
  return `
${contextPanel}
<section class="sentence"><h2>Sentence</h2><p>${renderSentence(task.output_text)}</p></section>
${renderChoices(selected)}
<div class="actions">
  <button id="confirm" class="confirm"${selected === null ? " disabled" : ""}>Submit rating</button>
  <span class="progress">${progress}</span>
</div>
${noticeHtml}`;
}

export function renderComplete(submitted: number): string {
  return `
<section class="complete">
  <h2>All done</h2>
  <p>You have rated every available sentence. Ratings submitted: ${submitted}.</p>
</section>`;
}

export function renderLoading(): string {
  return '<p class="loading">Loading the next batch…</p>';
}

export function render(state: SessionState): string {
  switch (state.kind) {
    case "loading":
      return renderLoading();
    case "complete":
      return renderComplete(state.submitted);
    case "rating": {
      const task = state.batch.tasks[state.cursor];
      return renderTask(task, progressLabel(state), state.selected, state.notice);
    }
  }
}
