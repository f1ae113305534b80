/** Browser entry point: wires the store, feed and renderers to the page. */

import { WinstreamApi } from "./api.js";
import { subscribeFeed } from "./feed.js";
import { renderPathView } from "./pathview.js";
import { DashboardStore } from "./store.js";
import {
  renderExplanationText,
  renderGameHeader,
  renderMetricsStrip,
  renderPathNav,
  renderPredictionCard,
  renderRatingWidget,
  renderSkillsPanel,
} from "./views.js";

function mount(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing mount point #${id}`);
  return el;
}

export async function bootstrap(base: string = ""): Promise<void> {
  const api = new WinstreamApi(base || window.location.origin);
  const session = await api.createSession({ replay_speed: 1.0 });
  const store = new DashboardStore(api, session.session_id);

  const header = mount("game-header");
  const card = mount("prediction-card");
  const skills = mount("skills-panel");
  const explanation = mount("explanation");
  const pathBox = mount("path-view");
  const pathNav = mount("path-nav");
  const rating = mount("rating-widget");
  const metrics = mount("metrics-strip");
  const mapPanel = mount("map-panel");

  store.subscribe((state) => {
    if (state.current) {
      header.innerHTML = renderGameHeader(state.current);
      card.innerHTML = renderPredictionCard(state.current);
      skills.innerHTML = renderSkillsPanel(state.current);
      // static map identity artwork only; the dataset carries no positions
      mapPanel.textContent = state.current.game.map;
      mapPanel.dataset.map = state.current.game.map;
    }
    explanation.innerHTML = state.explanation
      ? renderExplanationText(state.explanation.description)
      : "";
    pathBox.innerHTML = state.pathViewer.payload
      ? renderPathView(state.pathViewer.payload).html
      : "";
    pathNav.innerHTML = renderPathNav(state);
    rating.innerHTML = renderRatingWidget(state);
    metrics.innerHTML = renderMetricsStrip(state.metrics);
  });

  pathNav.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    if (target.classList.contains("nav-left")) void store.navigatePath(-1);
    if (target.classList.contains("nav-right")) void store.navigatePath(1);
  });
  rating.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    if (target.classList.contains("rate-cross")) void store.rateCross();
    if (target.classList.contains("rate-tick")) store.rateTick();
    if (target.classList.contains("likert")) {
      void store.rateLikert(Number(target.dataset.score));
    }
  });

  subscribeFeed(api, session.session_id, (record) => {
    if (store.ingest(record)) {
      void store.focus(record.kept_index);
      void store.refreshMetrics();
    }
  });
  await api.resume(session.session_id);
}

declare global {
  interface Window {
    winstreamBootstrap: typeof bootstrap;
  }
}

if (typeof window !== "undefined") {
  window.winstreamBootstrap = bootstrap;
}
