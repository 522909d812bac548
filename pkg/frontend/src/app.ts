/** Browser bootstrap: hash routing, data loading, and event wiring.
 * `?mock=1` renders entirely from the recorded fixtures. */
import { AnswerBundlePayload, ApiClient, ApiError } from "./api.js";
import { HttpTransport, MockTransport, Recording } from "./transport.js";
import { ViewState } from "./state.js";
import { renderPopulation, renderPopulationError } from "./views/population.js";
import {
  renderPatientDetail,
  renderPatientError,
  PatientData,
} from "./views/patient.js";
import { renderConsole, renderConsoleError } from "./views/console.js";

const NAV = `
<nav class="topnav">
  <a href="#/population">Population</a>
  <a href="#/console">Question console</a>
</nav>`;

function errorParts(error: unknown): { status: number; message: string } {
  if (error instanceof ApiError) return { status: error.status, message: error.message };
  return { status: 0, message: String(error) };
}

export class App {
  private state = new ViewState();
  private suggested: string[] = [];
  private lastAsk: Awaited<ReturnType<ApiClient["ask"]>> | null = null;

  constructor(
    private api: ApiClient,
    private root: HTMLElement,
  ) {}

  async start(): Promise<void> {
    window.addEventListener("hashchange", () => void this.route());
    this.root.addEventListener("click", (event) => void this.onClick(event));
    this.root.addEventListener("submit", (event) => void this.onSubmit(event));
    this.root.addEventListener("input", (event) => this.onInput(event));
    await this.route();
  }

  private setBody(html: string): void {
    this.root.innerHTML = NAV + html;
  }

  private async route(): Promise<void> {
    const hash = window.location.hash || "#/population";
    const patientMatch = hash.match(/^#\/patient\/(.+)$/);
    try {
      if (patientMatch) {
        this.state.navigate("PatientDetail", decodeURIComponent(patientMatch[1]));
        await this.showPatient();
      } else if (hash.startsWith("#/console")) {
        this.state.navigate("QuestionConsole");
        this.setBody(renderConsole(this.suggested, this.lastAsk));
      } else {
        this.state.navigate("Population");
        await this.showPopulation();
      }
    } catch (error) {
      const { status, message } = errorParts(error);
      this.setBody(renderPopulationError(status, message));
    }
  }

  private async showPopulation(): Promise<void> {
    try {
      const [prototypes, summary, aggregate] = await Promise.all([
        this.api.prototypes(20),
        this.api.prototypeSummary(),
        this.api.aggregate(20),
      ]);
      this.setBody(renderPopulation({ prototypes, summary, aggregate }));
    } catch (error) {
      const { status, message } = errorParts(error);
      this.setBody(renderPopulationError(status, message));
    }
  }

  private async patientData(patientId: string): Promise<PatientData> {
    const [risk, explanation, stats, q2] = await Promise.all([
      this.api.risk(patientId),
      this.api.explanation(patientId).catch(() => null),
      this.api.cohortStats(),
      this.api.contextAnswer("Q2", patientId).catch(() => null),
    ]);
    const importancePart = q2?.parts.find((p) => p.kind === "FeatureImportance");
    const entries =
      (importancePart?.payload.entries as PatientData["importanceEntries"]) ?? [];
    const statPart = q2?.parts.find((p) => p.kind === "CohortStat");
    const groups = stats.condition_groups.slice(0, 8);
    return {
      risk,
      explanation,
      importanceEntries: entries,
      conditionGroups: groups,
      history: this.state.history,
    };
  }

  private async showPatient(): Promise<void> {
    const patientId = this.state.selectedPatient;
    if (!patientId) return;
    try {
      this.setBody(renderPatientDetail(patientId, await this.patientData(patientId)));
    } catch (error) {
      const { status, message } = errorParts(error);
      this.setBody(renderPatientError(status, message) + NAV);
      if (status === 404) window.location.hash = "#/population";
    }
  }

  private async onClick(event: Event): Promise<void> {
    const target = event.target as HTMLElement;
    if (target.matches("button.ask-question")) {
      const kind = target.dataset.kind!;
      const patientId = this.state.selectedPatient!;
      try {
        const bundle: AnswerBundlePayload = await this.api.contextAnswer(kind, patientId);
        this.state.appendHistory({ question: bundle.question, bundle });
        await this.showPatient();
      } catch (error) {
        const { status, message } = errorParts(error);
        this.setBody(renderPatientError(status, message));
      }
    } else if (target.matches("button.suggested-question")) {
      await this.ask(target.dataset.question!);
    } else if (target.matches("button.retry")) {
      await this.route();
    }
  }

  private onInput(event: Event): void {
    const target = event.target as HTMLInputElement;
    if (target.matches("input.question-input")) {
      const submit = this.root.querySelector<HTMLButtonElement>("button.ask-submit");
      if (submit) submit.disabled = target.value.trim().length === 0;
    }
  }

  private async onSubmit(event: Event): Promise<void> {
    const form = event.target as HTMLFormElement;
    if (!form.matches("form.ask-form")) return;
    event.preventDefault();
    const input = form.querySelector<HTMLInputElement>("input.question-input");
    if (input && input.value.trim()) await this.ask(input.value.trim());
  }

  private async ask(question: string): Promise<void> {
    try {
      this.lastAsk = await this.api.ask(question, 3);
      this.setBody(renderConsole(this.suggested, this.lastAsk));
    } catch (error) {
      const { status, message } = errorParts(error);
      this.setBody(renderConsoleError(status, message));
    }
  }

  setSuggested(questions: string[]): void {
    this.suggested = questions;
  }
}

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) return;
  const params = new URLSearchParams(window.location.search);
  let api: ApiClient;
  let suggested = [
    "What should be done if A1C levels are greater than 10?",
    "What is typically done for patients like this who are not meeting treatment goals?",
  ];
  if (params.get("mock") === "1") {
    const recording = (await (await fetch("./fixtures/recorded.json")).json()) as Recording;
    api = new ApiClient(new MockTransport(recording));
    suggested = recording.meta.suggested_questions;
  } else {
    api = new ApiClient(new HttpTransport(""));
  }
  const app = new App(api, root);
  app.setSuggested(suggested);
  await app.start();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  void boot();
}
