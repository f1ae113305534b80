/** HTML renderers for the dashboard panels; pure functions of state. */

import type { MetricsDoc, PredictionRecord } from "./api.js";
import type { DashboardState } from "./store.js";
import { escapeHtml } from "./pathview.js";

export function renderGameHeader(record: PredictionRecord): string {
  const g = record.game;
  return [
    '<div class="game-header">',
    `<span class="teams">${escapeHtml(g.team1)} vs ${escapeHtml(g.team2)}</span>`,
    `<span class="map">${escapeHtml(g.map)}</span>`,
    `<span class="date">${escapeHtml(g.date)}</span>`,
    `<span class="scoreboard">first half ${g.score_h1[0]}:${g.score_h1[1]}</span>`,
    `<span class="ranks">ranks #${g.rank1} / #${g.rank2}</span>`,
    "</div>",
  ].join("");
}

export function renderPredictionCard(record: PredictionRecord): string {
  const p = record.prediction;
  const pct = (p.confidence * 100).toFixed(1);
  return [
    '<div class="prediction-card">',
    `<div class="winner">${escapeHtml(p.winner)}</div>`,
    `<div class="gauge" role="meter" aria-valuenow="${pct}">`,
    `<div class="gauge-fill" style="width: ${pct}%"></div>`,
    `</div>`,
    `<div class="confidence">${pct}% confidence</div>`,
    "</div>",
  ].join("");
}

export function renderSkillsPanel(record: PredictionRecord): string {
  const rows: string[] = ['<table class="skills-panel"><thead><tr><th>skill</th>'];
  rows.push("<th>team 1</th><th>team 2</th></tr></thead><tbody>");
  const team1 = record.skills_panel.team1 ?? {};
  const team2 = record.skills_panel.team2 ?? {};
  for (const skill of Object.keys(team1)) {
    rows.push(
      `<tr><td>${escapeHtml(skill)}</td><td>${team1[skill]}</td><td>${team2[skill] ?? ""}</td></tr>`,
    );
  }
  rows.push("</tbody></table>");
  return rows.join("");
}

/** Emphasis markers from the service (double asterisks) become <strong>
 * spans; everything else is escaped. */
export function renderExplanationText(description: string): string {
  const escaped = escapeHtml(description);
  const emphasised = escaped.replace(/\*\*(.+?)\*\*/g, "<strong>$1</strong>");
  return `<div class="explanation">${emphasised.replace(/\n/g, "<br>")}</div>`;
}

export function renderMetricsStrip(metrics: MetricsDoc | null): string {
  if (!metrics || !metrics.n_evaluated) {
    return '<div class="metrics-strip">no evaluated samples yet</div>';
  }
  return [
    '<div class="metrics-strip">',
    `<span>accuracy ${(metrics.accuracy * 100).toFixed(2)}%</span>`,
    `<span>macro F ${(metrics.f_measure.macro * 100).toFixed(2)}%</span>`,
    `<span>${metrics.n_evaluated} games</span>`,
    `<span>${metrics.samples_per_second.toFixed(1)} samples/s</span>`,
    "</div>",
  ].join("");
}

export function renderRatingWidget(state: DashboardState): string {
  const { phase, verdict, likert } = state.rating;
  if (phase === "disabled") {
    return '<div class="rating-widget" data-phase="disabled"></div>';
  }
  if (phase === "idle") {
    return [
      '<div class="rating-widget" data-phase="idle">',
      '<button class="rate-cross" aria-label="inadequate">✗</button>',
      '<button class="rate-tick" aria-label="adequate">✓</button>',
      "</div>",
    ].join("");
  }
  if (phase === "choosing-likert") {
    const stars = [1, 2, 3, 4, 5]
      .map((s) => `<button class="likert" data-score="${s}">${s}</button>`)
      .join("");
    return `<div class="rating-widget" data-phase="choosing-likert">${stars}</div>`;
  }
  const summary = verdict === "accepted" ? `accepted (${likert}/5)` : "rejected";
  return `<div class="rating-widget" data-phase="submitted">${summary}</div>`;
}

export function renderPathNav(state: DashboardState): string {
  const { estimator, count } = state.pathViewer;
  const leftDisabled = !(count > 0 && estimator > 0);
  const rightDisabled = !(count > 0 && estimator < count - 1);
  return [
    '<div class="path-nav">',
    `<button class="nav-left" ${leftDisabled ? "disabled" : ""}>&#8592;</button>`,
    `<span>${count === 0 ? "0 / 0" : `${estimator + 1} / ${count}`}</span>`,
    `<button class="nav-right" ${rightDisabled ? "disabled" : ""}>&#8594;</button>`,
    "</div>",
  ].join("");
}
