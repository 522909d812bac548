/** Question console: free-text retrieval over the guideline store, with
 * lexical/numeric score breakdown and matched-constraint chips. */
import { AskResponse, RankedAnswerPayload } from "../api.js";
import { banner, esc, formatInterval } from "../html.js";

export function renderAnswer(answer: RankedAnswerPayload, rank: number): string {
  const chips = answer.matched_constraints
    .map(
      (pair) =>
        `<span class="chip">${esc(pair.question.quantity)}: ${formatInterval(
          pair.question.interval,
        )} ⊆ ${formatInterval(pair.answer.interval)}</span>`,
    )
    .join(" ");
  return (
    `<article class="answer-card" data-rec="${esc(answer.rec_id)}">` +
    `<h4>#${rank} · ${esc(answer.rec_id)}</h4>` +
    `<blockquote>${esc(answer.answer_text)}</blockquote>` +
    `<p class="scores">total ${esc(answer.total)} = lexical ${esc(
      answer.lexical_score,
    )} + numeric ${esc(answer.numeric_bonus)}</p>` +
    (chips ? `<p class="chips">${chips}</p>` : "") +
    `</article>`
  );
}

export function renderConsole(
  suggested: string[],
  result: AskResponse | null,
): string {
  const suggestions = suggested
    .map(
      (q) =>
        `<li><button class="suggested-question" data-question="${esc(q)}">${esc(q)}</button></li>`,
    )
    .join("");

  let results = `<p class="empty-state">Ask a question to search the guideline recommendations.</p>`;
  if (result !== null) {
    const positive = result.answers.filter((a) => a.total > 0);
    results =
      positive.length === 0
        ? `<p class="empty-state">No relevant recommendation found.</p>`
        : positive.map((a, i) => renderAnswer(a, i + 1)).join("");
  }

  return `
<section class="view view-console">
  <h2>Question console</h2>
  <form class="ask-form">
    <input type="text" name="question" class="question-input"
           placeholder="e.g. What should be done if A1C levels are greater than 10?" />
    <button type="submit" class="ask-submit" disabled>Ask</button>
  </form>
  <div class="panel">
    <h3>Suggested questions</h3>
    <ul class="suggested">${suggestions}</ul>
  </div>
  <div class="panel results">${results}</div>
</section>`;
}

export function renderConsoleError(status: number, message: string): string {
  if (status === 409) {
    return banner("warning", `Guideline index not built yet: ${message}. Run the ingest job.`);
  }
  return banner("error", `Service unavailable: ${message}`, true);
}
