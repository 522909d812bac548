/** Patient detail: risk, signed attribution chart with presence markers,
 * condition groups, and the one-click question flow whose answers append
 * to the session history with provenance footnotes. */
import {
  AnswerBundlePayload,
  AnswerPartPayload,
  CohortStatsResponse,
  ExplanationResponse,
  RiskResponse,
} from "../api.js";
import { HistoryEntry } from "../state.js";
import { banner, barChart, esc, formatInterval } from "../html.js";

export const QUESTION_BUTTONS = ["Q2", "Q3", "Q3a", "Q4", "Q5", "Q6"] as const;

export interface PatientData {
  risk: RiskResponse;
  explanation: ExplanationResponse | null;
  importanceEntries: { feature: string; phi: number; present: boolean }[];
  conditionGroups: { label: string; count: number; frequency: number }[];
  history: readonly HistoryEntry[];
}

function renderPart(part: AnswerPartPayload, index: number): string {
  const payload = part.payload as Record<string, unknown>;
  let body: string;
  switch (part.kind) {
    case "RiskScore":
      body = `Predicted CKD risk: <strong>${esc(payload.risk_display)}</strong>`;
      break;
    case "GuidelineText": {
      const chips = (payload.matched_constraints as
        | { question: never; answer: never }[]
        | undefined) ?? [];
      const chipHtml = (chips as { question: any; answer: any }[])
        .map(
          (pair) =>
            `<span class="chip">${esc(pair.question.quantity)}: ${formatInterval(
              pair.question.interval,
            )} ⊆ ${formatInterval(pair.answer.interval)}</span>`,
        )
        .join(" ");
      body =
        `<blockquote>${esc(payload.text)}</blockquote>` +
        `<span class="grade">Grade ${esc(payload.grade)}</span> ${chipHtml}`;
      break;
    }
    case "FeatureImportance": {
      const entries = payload.entries as { feature: string; phi: number; present: boolean }[];
      const rows = entries
        .map(
          (e) =>
            `<li>${esc(e.feature)}: ${esc(e.phi)} (${e.present ? "present" : "absent"})</li>`,
        )
        .join("");
      body = `<ul class="importance-list">${rows}</ul>`;
      break;
    }
    case "CohortStat": {
      const groups = payload.groups as { label: string; count: number }[];
      body = `<ul class="group-list">${groups
        .map((g) => `<li>${esc(g.label)} (${esc(g.count)})</li>`)
        .join("")}</ul>`;
      break;
    }
    case "PrototypeSummary":
      body = `<em>Prototype summary of n=${esc(payload.n)} patients (see population view).</em>`;
      break;
    default:
      body = `<p>${esc(payload.text ?? "")}</p>`;
  }
  const provenance = `${esc(part.provenance.module)}`;
  return (
    `<div class="part part-${part.kind.toLowerCase()}">${body}` +
    `<sup class="footnote" title="source module">[${index + 1}: ${provenance}]</sup></div>`
  );
}

export function renderBundleCard(entry: HistoryEntry): string {
  const { bundle } = entry;
  const parts = bundle.parts.map(renderPart).join("");
  const ann = bundle.annotation;
  return (
    `<article class="answer-card">` +
    `<h4>${esc(entry.question)}</h4>` +
    `<p class="annotation">Source: ${esc(ann.source)} · Relevance: ${esc(
      ann.relevance,
    )} · Contextualization: ${ann.dimensions.map(esc).join(", ")}</p>` +
    `${parts}</article>`
  );
}

export function renderPatientDetail(patientId: string, data: PatientData): string {
  const chart =
    data.importanceEntries.length === 0
      ? `<p class="empty-state">No attributions computed for this patient yet.</p>`
      : barChart(
          data.importanceEntries.map((e) => ({
            label: e.feature,
            value: e.phi,
            magnitude: e.phi,
            signed: true,
            marker: e.present,
          })),
          "chart-phi",
        );

  const groups = data.conditionGroups
    .map((g) => `<li>${esc(g.label)} — ${esc(g.count)} in cohort</li>`)
    .join("");

  const buttons = QUESTION_BUTTONS.map(
    (key) => `<button class="ask-question" data-kind="${key}">${key}</button>`,
  ).join(" ");

  const history = data.history.map(renderBundleCard).join("");
  const method =
    data.explanation === null
      ? ""
      : `<p class="method">Attribution method: ${esc(data.explanation.method)}</p>`;

  return `
<section class="view view-patient" data-patient="${esc(patientId)}">
  <h2>Patient ${esc(patientId)}</h2>
  <p class="risk">Predicted CKD risk: <strong>${esc(data.risk.risk_display)}</strong></p>
  <div class="panel">
    <h3>Feature attributions (signed, with presence markers)</h3>
    ${chart}
    ${method}
  </div>
  <div class="panel">
    <h3>Condition groups</h3>
    <ul class="condition-groups">${groups}</ul>
  </div>
  <div class="panel">
    <h3>Question flow</h3>
    ${buttons}
    <div class="history">${history}</div>
  </div>
</section>`;
}

export function renderPatientError(status: number, message: string): string {
  if (status === 404) {
    return banner("warning", `Unknown patient: ${message}`);
  }
  if (status === 409) {
    return banner("warning", `Pipeline not built: ${message}`);
  }
  return banner("error", `Service unavailable: ${message}`, true);
}
