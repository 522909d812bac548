/** Population overview: prototypical-patient summary table plus the
 * aggregate importance chart. Clicking a prototype row navigates to the
 * patient detail view. */
import {
  AggregateResponse,
  PrototypeSummaryResponse,
  PrototypesResponse,
} from "../api.js";
import { banner, barChart, esc } from "../html.js";

export interface PopulationData {
  prototypes: PrototypesResponse;
  summary: PrototypeSummaryResponse;
  aggregate: AggregateResponse;
}

export function renderPopulation(data: PopulationData): string {
  const { prototypes, summary, aggregate } = data;
  if (prototypes.prototypes.length === 0) {
    return (
      `<section class="view view-population"><h2>Population overview</h2>` +
      `<p class="empty-state">The prototype pool is empty. Run the prototypes job, ` +
      `or lower the risk cutoff, to populate this view.</p></section>`
    );
  }

  const summaryRows = summary.rows
    .map((row) => {
      const cls = row.high_prevalence ? ' class="high-prevalence"' : "";
      return `<tr${cls}><td>${esc(row.label)}</td><td>${esc(row.count)} (${esc(
        row.percentage.toFixed(1),
      )})</td></tr>`;
    })
    .join("");

  const prototypeRows = prototypes.prototypes
    .map(
      (p) =>
        `<tr class="prototype-row" data-patient="${esc(p.patient_id)}">` +
        `<td><a href="#/patient/${esc(p.patient_id)}">${esc(p.patient_id)}</a></td>` +
        `<td>${esc(p.risk_display)}</td><td>${esc(p.weight)}</td></tr>`,
    )
    .join("");

  const chart = barChart(
    aggregate.importances.map((entry) => ({
      label: entry.feature,
      value: entry.mean_abs_phi,
      magnitude: entry.mean_abs_phi,
    })),
    "chart-aggregate",
  );

  return `
<section class="view view-population">
  <h2>Population overview</h2>
  <div class="panel">
    <h3>Prototypical patients (n=${esc(summary.n)}, pool ${esc(prototypes.pool_size)})</h3>
    <table class="summary-table">
      <thead><tr><th>Feature</th><th>Count (%)</th></tr></thead>
      <tbody><tr><td>n</td><td>${esc(summary.n)}</td></tr>${summaryRows}</tbody>
    </table>
  </div>
  <div class="panel">
    <h3>Prototype list</h3>
    <table class="prototype-table">
      <thead><tr><th>Patient</th><th>Risk</th><th>Weight</th></tr></thead>
      <tbody>${prototypeRows}</tbody>
    </table>
  </div>
  <div class="panel">
    <h3>Aggregate feature importances (mean absolute importance)</h3>
    ${chart}
  </div>
</section>`;
}

export function renderPopulationError(status: number, message: string): string {
  if (status === 409) {
    return banner("warning", `Pipeline not built: ${message}`);
  }
  return banner("error", `Service unavailable: ${message}`, true);
}
