/** JSON shapes returned by the scoring API. */

export interface ScoreWindow {
  from: string;
  to: string;
}

export interface ScoreNode {
  kind: "group" | "protocol" | "stage" | "action" | "component";
  label: string;
  weight: number;
  /** Fraction in [0, 1], or null when the score is Undefined (not applicable). */
  value: number | null;
  /** Server-computed integer percent (round half up), or null when Undefined. */
  display_percent: number | null;
  children: ScoreNode[];
  window?: ScoreWindow;
  population?: string[];
  reason?: string;
}

export interface Patient {
  patient_id: string;
  ward: string;
  admission: string;
  discharge: string;
}

export interface ApiError {
  error: string;
  path: string;
  detail: string;
}
