/** Typed client for the winstream service API (v1). The dashboard is a pure
 * client: every displayed number comes from these responses. */

export interface GameMeta {
  event_id: string;
  game_id: string;
  map: string;
  date: string;
  team1: string;
  team2: string;
  rank1: number;
  rank2: number;
  score_h1: [number, number];
  final_score: [number, number];
}

export interface PredictionInfo {
  label: number;
  winner: string;
  confidence: number;
  scores: number[];
  true_label: number;
}

export interface PredictionRecord {
  kept_index: number;
  stream_index: number;
  game: GameMeta;
  prediction: PredictionInfo;
  skills_panel: Record<string, Record<string, number>>;
  explanation_id: string;
  n_active_features: number;
}

export interface TopFeature {
  feature: number;
  count: number;
  name: string;
  phrase: string;
}

export interface ExplanationPayload {
  explanation_id: string;
  game_key: string[];
  prediction: PredictionInfo;
  top_features: TopFeature[];
  description: string;
  n_agreeing_paths: number;
  no_paths_reason: string | null;
  performance: { accuracy: number; n_evaluated: number; macro_f: number } | null;
}

export interface PathStep {
  feature: number;
  name: string;
  phrase: string;
  threshold: number;
  branch: "<=" | ">";
}

export interface PathPayload {
  n_agreeing_paths: number;
  estimator: number | null;
  path: { estimator: number; steps: PathStep[]; leaf_label: number; leaf_scores: number[] } | null;
  emphasised_features?: number[];
  no_paths_reason?: string | null;
}

export interface SessionInfo {
  session_id: string;
  scenario: string;
  model: string;
  paused: boolean;
  finished: boolean;
  position: number;
  n_predictions: number;
  metrics: MetricsDoc | null;
}

export interface MetricsDoc {
  n_evaluated: number;
  accuracy: number;
  precision: { macro: number; team1: number; team2: number };
  recall: { macro: number; team1: number; team2: number };
  f_measure: { macro: number; team1: number; team2: number };
  samples_per_second: number;
}

export interface RatingAggregate {
  n_rated: number;
  n_accepted: number;
  n_rejected: number;
  acceptance_rate: number;
  mean_likert: number | null;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class WinstreamApi {
  constructor(private base: string) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(`${this.base}/api/v1${path}`, {
      headers: { "content-type": "application/json" },
      ...init,
    });
    if (!response.ok) {
      const body = await response.text();
      throw new ApiError(response.status, body || response.statusText);
    }
    return (await response.json()) as T;
  }

  createSession(body: Record<string, unknown> = {}): Promise<SessionInfo> {
    return this.request("/sessions", { method: "POST", body: JSON.stringify(body) });
  }

  sessionInfo(sessionId: string): Promise<SessionInfo> {
    return this.request(`/sessions/${sessionId}`);
  }

  resume(sessionId: string): Promise<SessionInfo> {
    return this.request(`/sessions/${sessionId}/resume`, { method: "POST" });
  }

  pause(sessionId: string): Promise<SessionInfo> {
    return this.request(`/sessions/${sessionId}/pause`, { method: "POST" });
  }

  step(sessionId: string, n = 1): Promise<SessionInfo & { advanced: number }> {
    return this.request(`/sessions/${sessionId}/step?n=${n}`, { method: "POST" });
  }

  predictions(sessionId: string, since = 0, limit = 200):
      Promise<{ total: number; items: PredictionRecord[] }> {
    return this.request(`/sessions/${sessionId}/predictions?since=${since}&limit=${limit}`);
  }

  explanation(sessionId: string, explanationId: string): Promise<ExplanationPayload> {
    return this.request(`/sessions/${sessionId}/explanations/${explanationId}`);
  }

  path(sessionId: string, explanationId: string, estimator: number): Promise<PathPayload> {
    return this.request(`/sessions/${sessionId}/paths/${explanationId}?estimator=${estimator}`);
  }

  metrics(sessionId: string): Promise<MetricsDoc> {
    return this.request(`/sessions/${sessionId}/metrics`);
  }

  manifest(): Promise<{ total: number; features: unknown[] }> {
    return this.request("/manifest");
  }

  submitRating(body: {
    explanation_id: string;
    verdict: "accepted" | "rejected";
    likert?: number;
    rater_id?: string;
  }): Promise<unknown> {
    return this.request("/ratings", { method: "POST", body: JSON.stringify(body) });
  }

  ratingAggregate(): Promise<RatingAggregate> {
    return this.request("/ratings/aggregate");
  }

  streamUrl(sessionId: string): string {
    return `${this.base}/api/v1/sessions/${sessionId}/stream`;
  }
}
