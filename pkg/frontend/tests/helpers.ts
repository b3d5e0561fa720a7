import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";

import type { StreamRecord } from "../src/records.js";

export function loadStream(name: string): StreamRecord[] {
  const path = fileURLToPath(new URL(`./fixtures/${name}`, import.meta.url));
  return JSON.parse(readFileSync(path, "utf-8")) as StreamRecord[];
}

export function loadJson(name: string): any {
  const path = fileURLToPath(new URL(`./fixtures/${name}`, import.meta.url));
  return JSON.parse(readFileSync(path, "utf-8"));
}

// Recursively freeze so any in-place mutation inside applyRecord throws.
export function deepFreeze<T>(value: T): T {
  if (value && typeof value === "object" && !Object.isFrozen(value)) {
    Object.freeze(value);
    for (const key of Object.keys(value as object)) {
      deepFreeze((value as Record<string, unknown>)[key]);
    }
  }
  return value;
}
