/** Live integration: exercises the Q4 button flow against a running
 * fixture service. Skipped unless SERVICE_URL is set, e.g.
 *   SERVICE_URL=http://127.0.0.1:8000 npx vitest run test/live.test.ts
 */
import { describe, expect, test } from "vitest";

import { ApiClient } from "../src/api.js";
import { HttpTransport } from "../src/transport.js";
import { renderBundleCard } from "../src/views/patient.js";

const base = process.env.SERVICE_URL;

describe.skipIf(!base)("live service Q4 flow", () => {
  test("Q4 answer card displays the interpolated risk", async () => {
    const api = new ApiClient(new HttpTransport(base!));
    const prototypes = await api.prototypes(20);
    expect(prototypes.prototypes.length).toBeGreaterThan(0);
    const pid = prototypes.prototypes[0].patient_id;
    const risk = await api.risk(pid);
    const bundle = await api.contextAnswer("Q4", pid);
    const card = renderBundleCard({ question: bundle.question, bundle });
    expect(card).toContain(`risk is found to be ${risk.risk_display}`);
    expect(risk.risk_display).toMatch(/^\d\.\d{2}$/);
  });
});
