/** Decision-path rendering: only the visited chain of nodes is shown, edges
 * carry their comparison labels, and features named in the explanation text
 * are emphasised. */

import type { PathPayload } from "./api.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export interface RenderedPath {
  html: string;
  nodeCount: number;
  edgeCount: number;
}

export function renderPathView(payload: PathPayload): RenderedPath {
  if (!payload.path) {
    const reason = payload.no_paths_reason
      ? escapeHtml(payload.no_paths_reason)
      : "no agreeing paths";
    return {
      html: `<div class="path-view path-empty">${reason}</div>`,
      nodeCount: 0,
      edgeCount: 0,
    };
  }
  const emphasised = new Set(payload.emphasised_features ?? []);
  const steps = payload.path.steps;
  const pieces: string[] = ['<div class="path-view">'];
  for (const step of steps) {
    const label = escapeHtml(step.phrase);
    const name = emphasised.has(step.feature) ? `<strong>${label}</strong>` : label;
    pieces.push(`<div class="path-node" data-feature="${step.feature}">${name}</div>`);
    const symbol = step.branch === "<=" ? "&le;" : "&gt;";
    pieces.push(
      `<div class="path-edge">${symbol} ${escapeHtml(step.threshold.toFixed(3))}</div>`,
    );
  }
  const vote = payload.path.leaf_label === 0 ? "Team1" : "Team2";
  const [s0, s1] = payload.path.leaf_scores;
  pieces.push(
    `<div class="path-leaf">leaf vote: ${vote} (${(Math.max(s0, s1) * 100).toFixed(1)}%)</div>`,
  );
  pieces.push("</div>");
  return {
    html: pieces.join("\n"),
    nodeCount: steps.length + 1, // visited internal nodes plus the leaf
    edgeCount: steps.length,
  };
}
