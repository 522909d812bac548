import { describe, expect, test } from "vitest";

import { ViewState } from "../src/state.js";
import {
  QUESTION_BUTTONS,
  renderBundleCard,
  renderPatientDetail,
  renderPatientError,
} from "../src/views/patient.js";
import { loadRecording, mockClient } from "./helpers.js";

const recording = loadRecording();
const pid = recording.meta.patient_id;

async function patientData(historyKinds: string[] = []) {
  const api = mockClient(recording);
  const state = new ViewState();
  state.navigate("PatientDetail", pid);
  const [risk, explanation, stats, q2] = await Promise.all([
    api.risk(pid),
    api.explanation(pid),
    api.cohortStats(),
    api.contextAnswer("Q2", pid),
  ]);
  for (const kind of historyKinds) {
    const bundle = await api.contextAnswer(kind, pid);
    state.appendHistory({ question: bundle.question, bundle });
  }
  const part = q2.parts.find((p) => p.kind === "FeatureImportance")!;
  return {
    risk,
    explanation,
    importanceEntries: part.payload.entries as {
      feature: string;
      phi: number;
      present: boolean;
    }[],
    conditionGroups: stats.condition_groups.slice(0, 8),
    history: state.history,
  };
}

describe("patient detail view", () => {
  test("renders offline from recorded fixtures", async () => {
    const html = renderPatientDetail(pid, await patientData());
    expect(html).toMatchSnapshot();
  });

  test("shows the two-decimal risk from the API verbatim", async () => {
    const data = await patientData();
    const html = renderPatientDetail(pid, data);
    expect(html).toContain(`<strong>${data.risk.risk_display}</strong>`);
    expect(data.risk.risk_display).toMatch(/^\d\.\d{2}$/);
  });

  test("signed attribution chart carries presence markers", async () => {
    const data = await patientData();
    const html = renderPatientDetail(pid, data);
    expect(html).toContain("marker-present");
    expect(html).toContain('class="bar bar-');
    for (const entry of data.importanceEntries.slice(0, 3)) {
      expect(html).toContain(entry.feature);
    }
  });

  test("renders one button per named question", async () => {
    const html = renderPatientDetail(pid, await patientData());
    for (const key of QUESTION_BUTTONS) {
      expect(html).toContain(`data-kind="${key}"`);
    }
  });

  test("Q4 answer card displays the interpolated risk", async () => {
    const data = await patientData(["Q4"]);
    const html = renderPatientDetail(pid, data);
    expect(html).toContain(`risk is found to be ${data.risk.risk_display}`);
  });

  test("Q3a answer card quotes the recommendation and its grade", async () => {
    const api = mockClient(recording);
    const bundle = await api.contextAnswer("Q3a", pid);
    const card = renderBundleCard({ question: bundle.question, bundle });
    expect(card).toContain("early introduction of insulin");
    expect(card).toContain("Grade E");
  });

  test("question history is append-only across the flow", async () => {
    const data = await patientData(["Q2", "Q3a", "Q4"]);
    expect(data.history.length).toBe(3);
    const html = renderPatientDetail(pid, data);
    expect(html.indexOf("Why does the model state")).toBeLessThan(
      html.indexOf("viability of GLP-1 RA"),
    );
  });

  test("answer cards carry provenance footnotes", async () => {
    const data = await patientData(["Q3a"]);
    const html = renderPatientDetail(pid, data);
    expect(html).toContain('class="footnote"');
    expect(html).toContain("qa");
  });

  test("empty attributions render the chart empty state", async () => {
    const data = await patientData();
    const html = renderPatientDetail(pid, { ...data, importanceEntries: [] });
    expect(html).toContain("No attributions computed");
  });

  test("404 renders a navigate-back notice", () => {
    expect(renderPatientError(404, "unknown patient 'X'")).toContain("Unknown patient");
  });
});
