import { readFileSync } from "node:fs";
import path from "node:path";

import { ApiClient } from "../src/api.js";
import { MockTransport, Recording } from "../src/transport.js";

const fixturePath = path.join(__dirname, "..", "fixtures", "recorded.json");

export function loadRecording(): Recording {
  return JSON.parse(readFileSync(fixturePath, "utf-8")) as Recording;
}

export function mockClient(recording = loadRecording()): ApiClient {
  return new ApiClient(new MockTransport(recording));
}

/** Every number that the API source could have put on screen: JSON numbers
 * plus numeric tokens inside JSON strings. */
export function harvestNumbers(value: unknown, into = new Set<number>()): Set<number> {
  if (typeof value === "number") {
    into.add(value);
  } else if (typeof value === "string") {
    for (const token of value.match(/-?\d+(?:\.\d+)?/g) ?? []) {
      into.add(Number.parseFloat(token));
    }
  } else if (Array.isArray(value)) {
    for (const item of value) harvestNumbers(item, into);
  } else if (value !== null && typeof value === "object") {
    for (const item of Object.values(value)) harvestNumbers(item, into);
  }
  return into;
}

/** Numeric tokens from the *text* of rendered HTML (tags stripped). */
export function displayedNumbers(html: string): number[] {
  const text = html
    .replace(/<[^>]*>/g, " ")
    .replaceAll("&amp;", "&")
    .replaceAll("&lt;", "<")
    .replaceAll("&gt;", ">")
    .replaceAll("&quot;", '"');
  return (text.match(/-?\d+(?:\.\d+)?/g) ?? []).map((t) => Number.parseFloat(t));
}
