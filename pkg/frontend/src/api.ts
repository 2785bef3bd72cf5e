/** Thin typed client over the scoring API; the only data source used. */

import type { Patient, ScoreNode } from "./types.js";
import { validateRange } from "./validate.js";

export interface ScoreQuery {
  from?: string;
  to?: string;
  ward?: string;
  patient?: string;
  stage?: string;
}

export class InvalidFilter extends Error {}

type FetchLike = (url: string) => Promise<{
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}>;

export function buildScoresUrl(base: string, query: ScoreQuery = {}): string {
  const problem = validateRange(query.from, query.to);
  if (problem !== null) {
    throw new InvalidFilter(problem);
  }
  const params = new URLSearchParams();
  for (const key of ["from", "to", "ward", "patient", "stage"] as const) {
    const value = query[key];
    if (value !== undefined && value !== "") params.set(key, value);
  }
  const suffix = params.size > 0 ? `?${params.toString()}` : "";
  return `${base}/api/scores${suffix}`;
}

async function getJson<T>(fetchImpl: FetchLike, url: string): Promise<T> {
  const response = await fetchImpl(url);
  if (!response.ok) {
    const body = (await response.json()) as { detail?: string };
    throw new Error(`HTTP ${response.status}: ${body.detail ?? "request failed"}`);
  }
  return (await response.json()) as T;
}

/** Fetch the group-level tree; rejects with InvalidFilter before any request when the range is bad. */
export async function fetchScores(
  base: string,
  query: ScoreQuery = {},
  fetchImpl: FetchLike = fetch,
): Promise<ScoreNode> {
  return getJson<ScoreNode>(fetchImpl, buildScoresUrl(base, query));
}

export function fetchPatientTree(
  base: string,
  patientId: string,
  fetchImpl: FetchLike = fetch,
): Promise<ScoreNode> {
  return getJson<ScoreNode>(fetchImpl, `${base}/api/scores/${encodeURIComponent(patientId)}/tree`);
}

export function fetchPatients(base: string, fetchImpl: FetchLike = fetch): Promise<Patient[]> {
  return getJson<Patient[]>(fetchImpl, `${base}/api/patients`);
}
