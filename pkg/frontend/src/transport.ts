/** Transport layer: real HTTP against the service, or recorded fixtures
 * for offline rendering and tests. */

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

export interface Transport {
  get(path: string): Promise<unknown>;
  post(path: string, body: unknown): Promise<unknown>;
}

async function parseResponse(response: Response): Promise<unknown> {
  const body = await response.json().catch(() => ({}));
  if (!response.ok) {
    const err = body as { code?: string; message?: string };
    throw new ApiError(
      response.status,
      err.code ?? "error",
      err.message ?? `request failed with ${response.status}`,
    );
  }
  return body;
}

export class HttpTransport implements Transport {
  constructor(private base: string = "") {}

  async get(path: string): Promise<unknown> {
    return parseResponse(await fetch(this.base + path));
  }

  async post(path: string, body: unknown): Promise<unknown> {
    return parseResponse(
      await fetch(this.base + path, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(body),
      }),
    );
  }
}

/** Recursively sort object keys so mock keys match the recorder's. */
export function stableStringify(value: unknown): string {
  if (Array.isArray(value)) {
    return `[${value.map(stableStringify).join(",")}]`;
  }
  if (value !== null && typeof value === "object") {
    const entries = Object.entries(value as Record<string, unknown>)
      .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
      .map(([k, v]) => `${JSON.stringify(k)}:${stableStringify(v)}`);
    return `{${entries.join(",")}}`;
  }
  return JSON.stringify(value);
}

export interface Recording {
  meta: { patient_id: string; suggested_questions: string[] };
  recordings: Record<string, unknown>;
}

export class MockTransport implements Transport {
  constructor(private recording: Recording) {}

  private lookup(key: string): Promise<unknown> {
    const hit = this.recording.recordings[key];
    if (hit === undefined) {
      return Promise.reject(new ApiError(404, "not_recorded", `no recording for ${key}`));
    }
    // Clone so view code can never mutate the fixture.
    return Promise.resolve(JSON.parse(JSON.stringify(hit)));
  }

  get(path: string): Promise<unknown> {
    return this.lookup(`GET ${path}`);
  }

  post(path: string, body: unknown): Promise<unknown> {
    return this.lookup(`POST ${path} ${stableStringify(body)}`);
  }
}
