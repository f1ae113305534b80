/** End-to-end: a real winstream service replays a 200-game fixture and the
 * dashboard client drives it over HTTP — stream-ordered prediction feed,
 * bounded path navigation, visited-node rendering with emphasis, and both
 * rating flows persisted through the aggregates endpoint. */

import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { existsSync } from "node:fs";
import { createServer } from "node:net";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { WinstreamApi } from "../src/api.js";
import { subscribeFeed } from "../src/feed.js";
import { renderPathView } from "../src/pathview.js";
import { DashboardStore } from "../src/store.js";

const FIXTURE = "/tmp/winstream_e2e_fixture";
const PYTHON = process.env.WINSTREAM_PYTHON ?? "python3";

let service: ChildProcess;
let api: WinstreamApi;
let base: string;

async function freePort(): Promise<number> {
  return await new Promise((resolve, reject) => {
    const probe = createServer();
    probe.listen(0, "127.0.0.1", () => {
      const address = probe.address();
      if (address && typeof address === "object") {
        const port = address.port;
        probe.close(() => resolve(port));
      } else {
        reject(new Error("no port"));
      }
    });
  });
}

async function waitForService(url: string, timeoutMs = 60_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${url}/api/v1/manifest`);
      if (response.ok) return;
    } catch (err) {
      lastError = err;
    }
    await new Promise((r) => setTimeout(r, 250));
  }
  throw new Error(`service did not come up: ${lastError}`);
}

beforeAll(async () => {
  if (!existsSync(`${FIXTURE}/results.csv`)) {
    execFileSync(PYTHON, [
      "-m", "winstream.cli", "synthesize",
      "--out", FIXTURE, "--games", "200", "--seed", "9",
    ], { stdio: "ignore", timeout: 120_000 });
  }
  const port = await freePort();
  base = `http://127.0.0.1:${port}`;
  service = spawn(PYTHON, [
    "-m", "winstream.cli", "serve",
    "--players", `${FIXTURE}/players.csv`,
    "--results", `${FIXTURE}/results.csv`,
    "--target-matches", "200",
    "--scenario", "B", "--model", "arfc", "--seed", "5",
    "--port", String(port),
  ], { stdio: "ignore" });
  await waitForService(base);
  api = new WinstreamApi(base);
}, 120_000);

afterAll(() => {
  service?.kill("SIGTERM");
});

describe("live service", () => {
  it("feeds predictions in stream order into the card", async () => {
    const session = await api.createSession({ max_games: 8 });
    const store = new DashboardStore(api, session.session_id);
    const seen: number[] = [];
    const feed = subscribeFeed(api, session.session_id, (record) => {
      if (store.ingest(record)) seen.push(record.kept_index);
    }, { forcePoll: true, pollIntervalMs: 100 });
    expect(feed.mode).toBe("poll");

    await api.resume(session.session_id);
    const deadline = Date.now() + 30_000;
    while (seen.length < 8 && Date.now() < deadline) {
      await new Promise((r) => setTimeout(r, 100));
    }
    feed.close();
    expect(seen).toEqual([0, 1, 2, 3, 4, 5, 6, 7]);

    await store.focus(7);
    const state = store.getState();
    expect(state.current?.kept_index).toBe(7);
    expect(state.current?.prediction.winner).toMatch(/Team[12]/);
    expect(state.current?.prediction.confidence).toBeGreaterThanOrEqual(0);
    const indices = store.getState().records.map((r) => r.stream_index);
    expect([...indices].sort((a, b) => a - b)).toEqual(indices);
  }, 60_000);

  it("renders only visited nodes and emphasises NL-named features", async () => {
    const session = await api.createSession({ max_games: 6 });
    await api.step(session.session_id, 6);
    const store = new DashboardStore(api, session.session_id);
    const page = await api.predictions(session.session_id);
    for (const record of page.items) store.ingest(record);
    await store.focus(5);

    const state = store.getState();
    expect(state.explanation).not.toBeNull();
    const payload = state.pathViewer.payload;
    expect(payload).not.toBeNull();
    const rendered = renderPathView(payload!);
    // the fragment holds exactly the visited chain
    expect(rendered.nodeCount).toBe(payload!.path!.steps.length + 1);
    expect(rendered.edgeCount).toBe(payload!.path!.steps.length);
    for (const step of payload!.path!.steps) {
      expect(rendered.html).toContain(step.branch === "<=" ? "&le;" : "&gt;");
    }
    // features named in the description are bold in the fragment
    const emphasised = new Set(payload!.emphasised_features ?? []);
    for (const step of payload!.path!.steps) {
      if (emphasised.has(step.feature)) {
        expect(rendered.html).toContain(`<strong>${step.phrase}</strong>`);
        expect(state.explanation!.description).toContain(`**${step.phrase}**`);
      }
    }
  }, 60_000);

  it("clamps path navigation to the declared bounds", async () => {
    const session = await api.createSession({ max_games: 5 });
    await api.step(session.session_id, 5);
    const store = new DashboardStore(api, session.session_id);
    const page = await api.predictions(session.session_id);
    for (const record of page.items) store.ingest(record);
    await store.focus(4);

    const count = store.getState().pathViewer.count;
    expect(count).toBeGreaterThanOrEqual(1);
    expect(await store.navigatePath(-1)).toBe(false);
    let steps = 0;
    while (await store.navigatePath(1)) steps += 1;
    expect(steps).toBe(count - 1);
    expect(store.getState().pathViewer.estimator).toBe(count - 1);
    expect(await store.navigatePath(1)).toBe(false);
    // the service enforces the same bound
    await expect(
      api.path(session.session_id, page.items[4].explanation_id, count),
    ).rejects.toThrow();
  }, 60_000);

  it("persists cross and tick-likert ratings through the aggregates endpoint", async () => {
    const session = await api.createSession({ max_games: 4 });
    await api.step(session.session_id, 4);
    const store = new DashboardStore(api, session.session_id);
    const page = await api.predictions(session.session_id);
    for (const record of page.items) store.ingest(record);

    const before = await api.ratingAggregate();

    await store.focus(0);
    await store.rateCross();
    expect(store.getState().rating.phase).toBe("submitted");

    await store.focus(1);
    store.rateTick();
    expect(store.getState().rating.phase).toBe("choosing-likert");
    await store.rateLikert(4);

    const after = await api.ratingAggregate();
    expect(after.n_rated).toBe(before.n_rated + 2);
    expect(after.n_accepted).toBeGreaterThanOrEqual(1);
    expect(after.mean_likert).not.toBeNull();

    // double-submit on the same explanation updates rather than duplicates
    await store.focus(0);
    store.rateTick();
    await store.rateLikert(5);
    const updated = await api.ratingAggregate();
    expect(updated.n_rated).toBe(after.n_rated); // same explanations, latest verdicts
    expect(updated.n_accepted).toBe(after.n_accepted + 1);
  }, 60_000);

  it("keeps the metrics strip traceable to the service", async () => {
    const session = await api.createSession({ max_games: 6 });
    await api.step(session.session_id, 6);
    const store = new DashboardStore(api, session.session_id);
    await store.refreshMetrics();
    const metrics = store.getState().metrics!;
    const direct = await api.metrics(session.session_id);
    expect(metrics.accuracy).toBe(direct.accuracy);
    expect(metrics.n_evaluated).toBe(direct.n_evaluated);
  }, 60_000);
});
