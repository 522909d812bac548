/** Typed client for the riskcontext /v1 API.
 *
 * The dashboard holds no domain logic: every payload field is rendered
 * verbatim. In-flight requests are de-duplicated per key, and a response
 * that lost the race to a newer request for the same key is discarded.
 */
import { ApiError, Transport } from "./transport.js";

export interface PrototypeEntry {
  patient_id: string;
  weight: number;
  risk: number;
  risk_display: string;
}

export interface PrototypesResponse {
  prototypes: PrototypeEntry[];
  pool_size: number;
}

export interface SummaryRow {
  label: string;
  count: number;
  percentage: number;
  high_prevalence: boolean;
}

export interface PrototypeSummaryResponse {
  n: number;
  rows: SummaryRow[];
}

export interface ImportanceEntry {
  feature: string;
  mean_abs_phi: number;
  spread: [number, boolean][];
}

export interface AggregateResponse {
  importances: ImportanceEntry[];
}

export interface RiskResponse {
  patient_id: string;
  risk: number;
  risk_display: string;
}

export interface ExplanationResponse {
  patient_id: string;
  baseline_value: number;
  phi: number[];
  method: string;
  feature_names: string[];
  n_samples?: number;
  seed?: number | null;
  standard_errors?: number[];
}

export interface ConditionGroupStat {
  label: string;
  count: number;
  frequency: number;
}

export interface CohortStatsResponse {
  cohort_size: number;
  exclusions: Record<string, number>;
  positive_rate: number;
  condition_groups: ConditionGroupStat[];
}

export interface IntervalPayload {
  lower: number | null;
  upper: number | null;
  lower_open: boolean;
  upper_open: boolean;
}

export interface ConstraintPayload {
  quantity: string;
  interval: IntervalPayload;
  unit: string | null;
  source_span: number[];
  alternates: { interval: IntervalPayload; unit: string | null }[];
}

export interface RankedAnswerPayload {
  rec_id: string;
  answer_text: string;
  lexical_score: number;
  numeric_bonus: number;
  total: number;
  matched_constraints: { question: ConstraintPayload; answer: ConstraintPayload }[];
}

export interface AskResponse {
  question: string;
  answers: RankedAnswerPayload[];
}

export interface AnswerPartPayload {
  kind: string;
  payload: Record<string, unknown>;
  provenance: { module: string; identifiers: Record<string, unknown> };
}

export interface AnswerBundlePayload {
  question: string;
  annotation: { source: string; relevance: string; dimensions: string[] };
  parts: AnswerPartPayload[];
  rendered_text?: string;
}

class StaleResponse extends Error {
  constructor(key: string) {
    super(`stale response discarded for ${key}`);
  }
}

export class ApiClient {
  private inflight = new Map<string, Promise<unknown>>();
  private latest = new Map<string, number>();
  private counter = 0;

  constructor(private transport: Transport) {}

  private run<T>(key: string, exec: () => Promise<unknown>): Promise<T> {
    const existing = this.inflight.get(key);
    if (existing) return existing as Promise<T>;
    const seq = ++this.counter;
    this.latest.set(key, seq);
    const promise = (async () => {
      try {
        const result = await exec();
        if (this.latest.get(key) !== seq) throw new StaleResponse(key);
        return result;
      } finally {
        if (this.latest.get(key) === seq) this.inflight.delete(key);
      }
    })();
    this.inflight.set(key, promise);
    return promise as Promise<T>;
  }

  prototypes(k = 20): Promise<PrototypesResponse> {
    const path = `/v1/prototypes?k=${k}`;
    return this.run(path, () => this.transport.get(path));
  }

  prototypeSummary(): Promise<PrototypeSummaryResponse> {
    const path = "/v1/prototypes/summary";
    return this.run(path, () => this.transport.get(path));
  }

  aggregate(top = 20): Promise<AggregateResponse> {
    const path = `/v1/explanations/aggregate?top=${top}`;
    return this.run(path, () => this.transport.get(path));
  }

  cohortStats(): Promise<CohortStatsResponse> {
    const path = "/v1/cohort/stats";
    return this.run(path, () => this.transport.get(path));
  }

  risk(patientId: string): Promise<RiskResponse> {
    const path = `/v1/patients/${patientId}/risk`;
    return this.run(path, () => this.transport.get(path));
  }

  explanation(patientId: string): Promise<ExplanationResponse> {
    const path = `/v1/patients/${patientId}/explanation`;
    return this.run(path, () => this.transport.get(path));
  }

  ask(question: string, k = 3): Promise<AskResponse> {
    const body = { k, question };
    return this.run(`ask:${question}:${k}`, () =>
      this.transport.post("/v1/qa/ask", body),
    );
  }

  contextAnswer(kind: string, patientId?: string): Promise<AnswerBundlePayload> {
    const body: Record<string, unknown> = { kind };
    if (patientId !== undefined) body.patient_id = patientId;
    return this.run(`context:${kind}:${patientId ?? ""}`, () =>
      this.transport.post("/v1/context/answer", body),
    );
  }
}

export { ApiError };
