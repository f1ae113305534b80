/** Dashboard view-model: one state store, all mutations serialized through
 * its methods. The store never recomputes predictions or statistics; it only
 * arranges what the service returned. */

import type {
  ExplanationPayload,
  MetricsDoc,
  PathPayload,
  PredictionRecord,
  WinstreamApi,
} from "./api.js";

export type RatingPhase = "disabled" | "idle" | "choosing-likert" | "submitted";

export interface PathViewerState {
  estimator: number;
  count: number;
  payload: PathPayload | null;
}

export interface DashboardState {
  records: PredictionRecord[];
  current: PredictionRecord | null;
  explanation: ExplanationPayload | null;
  pathViewer: PathViewerState;
  rating: { phase: RatingPhase; verdict?: "accepted" | "rejected"; likert?: number };
  metrics: MetricsDoc | null;
  lastError: string | null;
}

type Listener = (state: DashboardState) => void;

export class DashboardStore {
  private state: DashboardState = {
    records: [],
    current: null,
    explanation: null,
    pathViewer: { estimator: 0, count: 0, payload: null },
    rating: { phase: "disabled" },
    metrics: null,
    lastError: null,
  };
  private listeners: Listener[] = [];

  constructor(private api: WinstreamApi, private sessionId: string,
              private raterId: string = "dashboard-user") {}

  getState(): DashboardState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private commit(patch: Partial<DashboardState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
  }

  /** Feed ingestion: records must arrive in stream order; out-of-order or
   * duplicate frames are dropped rather than reordered locally. */
  ingest(record: PredictionRecord): boolean {
    const expected = this.state.records.length;
    if (record.kept_index !== expected) {
      return false;
    }
    this.commit({ records: [...this.state.records, record] });
    return true;
  }

  /** Focus a prediction: loads its explanation, resets path viewer + rating. */
  async focus(keptIndex: number): Promise<void> {
    const record = this.state.records[keptIndex];
    if (!record) throw new Error(`no record at kept index ${keptIndex}`);
    this.commit({ current: record, explanation: null,
                  pathViewer: { estimator: 0, count: 0, payload: null },
                  rating: { phase: "disabled" } });
    try {
      const explanation = await this.api.explanation(this.sessionId, record.explanation_id);
      const count = explanation.n_agreeing_paths;
      let payload: PathPayload | null = null;
      if (count > 0) {
        payload = await this.api.path(this.sessionId, record.explanation_id, 0);
      }
      this.commit({
        explanation,
        pathViewer: { estimator: 0, count, payload },
        rating: { phase: "idle" },
      });
    } catch (err) {
      this.commit({ lastError: String(err) });
      throw err;
    }
  }

  /** Left/right arrows: estimator index stays inside the service-declared
   * bounds; navigation at an edge is a no-op. */
  canNavigate(direction: -1 | 1): boolean {
    const { estimator, count } = this.state.pathViewer;
    const next = estimator + direction;
    return count > 0 && next >= 0 && next < count;
  }

  async navigatePath(direction: -1 | 1): Promise<boolean> {
    if (!this.canNavigate(direction) || !this.state.current) return false;
    const next = this.state.pathViewer.estimator + direction;
    const payload = await this.api.path(
      this.sessionId, this.state.current.explanation_id, next);
    this.commit({ pathViewer: { estimator: next, count: this.state.pathViewer.count, payload } });
    return true;
  }

  /** Red cross: explanation judged inadequate; posts immediately. */
  async rateCross(): Promise<void> {
    if (this.state.rating.phase === "disabled" || !this.state.current) {
      throw new Error("no explanation loaded");
    }
    await this.api.submitRating({
      explanation_id: this.state.current.explanation_id,
      verdict: "rejected",
      rater_id: this.raterId,
    });
    this.commit({ rating: { phase: "submitted", verdict: "rejected" } });
  }

  /** Green tick: reveals the 5-level Likert selector; nothing is posted yet. */
  rateTick(): void {
    if (this.state.rating.phase === "disabled") {
      throw new Error("no explanation loaded");
    }
    this.commit({ rating: { phase: "choosing-likert" } });
  }

  async rateLikert(score: number): Promise<void> {
    if (this.state.rating.phase !== "choosing-likert" || !this.state.current) {
      throw new Error("likert selector is not open");
    }
    if (!Number.isInteger(score) || score < 1 || score > 5) {
      throw new Error("likert score must be an integer in 1..5");
    }
    await this.api.submitRating({
      explanation_id: this.state.current.explanation_id,
      verdict: "accepted",
      likert: score,
      rater_id: this.raterId,
    });
    this.commit({ rating: { phase: "submitted", verdict: "accepted", likert: score } });
  }

  /** Re-rating after submission is an update, not a duplicate: the service
   * keeps history and flags the newest verdict current. */
  reopenRating(): void {
    if (this.state.rating.phase === "submitted") {
      this.commit({ rating: { phase: "idle" } });
    }
  }

  async refreshMetrics(): Promise<void> {
    const metrics = await this.api.metrics(this.sessionId);
    this.commit({ metrics });
  }
}
