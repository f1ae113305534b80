/** Live prediction feed: server-sent events when the environment provides
 * an EventSource, otherwise interval polling over the same records. */

import type { PredictionRecord, WinstreamApi } from "./api.js";

export interface FeedHandle {
  close(): void;
  readonly mode: "sse" | "poll";
}

export function subscribeFeed(
  api: WinstreamApi,
  sessionId: string,
  onRecord: (record: PredictionRecord) => void,
  options: { pollIntervalMs?: number; forcePoll?: boolean } = {},
): FeedHandle {
  const pollInterval = options.pollIntervalMs ?? 500;
  const hasEventSource =
    !options.forcePoll && typeof (globalThis as { EventSource?: unknown }).EventSource === "function";

  if (hasEventSource) {
    const EventSourceCtor = (globalThis as unknown as { EventSource: new (url: string) => EventSource })
      .EventSource;
    const source = new EventSourceCtor(api.streamUrl(sessionId));
    source.onmessage = (event: MessageEvent) => {
      try {
        onRecord(JSON.parse(event.data as string) as PredictionRecord);
      } catch {
        // malformed frame: skip, the poll fallback below is not engaged
      }
    };
    return { close: () => source.close(), mode: "sse" };
  }

  let seen = 0;
  let stopped = false;
  const tick = async () => {
    if (stopped) return;
    try {
      const page = await api.predictions(sessionId, seen, 100);
      for (const item of page.items) {
        seen += 1;
        onRecord(item);
      }
    } catch {
      // transient failures: keep polling
    }
    if (!stopped) timer = setTimeout(tick, pollInterval);
  };
  let timer = setTimeout(tick, 0);
  return {
    close: () => {
      stopped = true;
      clearTimeout(timer);
    },
    mode: "poll",
  };
}
