import { describe, expect, test } from "vitest";

import { ApiClient } from "../src/api.js";
import { MockTransport, stableStringify, Transport } from "../src/transport.js";
import { ViewState } from "../src/state.js";
import { loadRecording } from "./helpers.js";

describe("view state", () => {
  test("patient detail requires a selected patient", () => {
    const state = new ViewState();
    expect(() => state.navigate("PatientDetail")).toThrow(/selected patient/);
    state.navigate("PatientDetail", "P1");
    expect(state.view).toBe("PatientDetail");
    expect(state.selectedPatient).toBe("P1");
  });

  test("history is append-only", () => {
    const state = new ViewState();
    const bundle = {
      question: "q",
      annotation: { source: "Guidelines", relevance: "Both", dimensions: ["Patient"] },
      parts: [],
    };
    state.appendHistory({ question: "q1", bundle });
    const snapshot = state.history;
    state.appendHistory({ question: "q2", bundle });
    expect(snapshot.length).toBe(1); // earlier reference unchanged
    expect(state.history.length).toBe(2);
    expect(state.history[0].question).toBe("q1");
  });
});

describe("mock transport", () => {
  test("stableStringify sorts keys to match the recorder", () => {
    expect(stableStringify({ question: "x", k: 3 })).toBe('{"k":3,"question":"x"}');
    expect(stableStringify({ b: [1, { z: 1, a: 2 }], a: null })).toBe(
      '{"a":null,"b":[1,{"a":2,"z":1}]}',
    );
  });

  test("replays recorded responses and rejects unknown calls", async () => {
    const recording = loadRecording();
    const transport = new MockTransport(recording);
    const summary = await transport.get("/v1/prototypes/summary");
    expect((summary as { n: number }).n).toBeGreaterThan(0);
    await expect(transport.get("/v1/nope")).rejects.toThrow(/no recording/);
  });
});

describe("api client request handling", () => {
  test("concurrent identical requests are de-duplicated", async () => {
    let calls = 0;
    const transport: Transport = {
      get: async () => {
        calls += 1;
        return { prototypes: [], pool_size: 0 };
      },
      post: async () => ({}),
    };
    const api = new ApiClient(transport);
    await Promise.all([api.prototypes(20), api.prototypes(20), api.prototypes(20)]);
    expect(calls).toBe(1);
  });

  test("a superseded response is discarded as stale", async () => {
    const resolvers: ((value: unknown) => void)[] = [];
    const transport: Transport = {
      get: () => new Promise((resolve) => resolvers.push(resolve)),
      post: async () => ({}),
    };
    const api = new ApiClient(transport);
    const first = api.prototypeSummary();
    // First request is still in flight when a newer one for the same key starts.
    (api as unknown as { inflight: Map<string, unknown> }).inflight.clear();
    const second = api.prototypeSummary();
    resolvers[1]({ n: 2, rows: [] });
    await expect(second).resolves.toEqual({ n: 2, rows: [] });
    resolvers[0]({ n: 1, rows: [] });
    await expect(first).rejects.toThrow(/stale/);
  });
});
