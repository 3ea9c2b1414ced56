/** DOM wiring: thin rendering layer over the view models. Everything shown
 * here is a field from a service response; no scores or probabilities are
 * computed in the browser. */

import { ApiClient } from "./api";
import { CompareController, CompareState, ComparePanelView } from "./compare";
import { renderOverlay, Viewport } from "./curve";
import { buildEvidencePanel, EvidencePanel } from "./evidence";
import { LineupState, LineupTray } from "./lineup";
import type { PlayerRecord } from "./types";

const VIEWPORT: Viewport = { width: 640, height: 260, padding: 24 };

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function badgeHtml(panel: ComparePanelView): string {
  return panel.badges
    .map(
      (b) =>
        `<span class="badge badge-${b.tone}" title="${b.state}">` +
        `${b.state} ${(b.probability * 100).toFixed(0)}%</span>`,
    )
    .join(" ");
}

function markerHtml(x: number | null, label: string): string {
  if (x === null) return "";
  return (
    `<line x1="${x}" y1="${VIEWPORT.padding}" x2="${x}" ` +
    `y2="${VIEWPORT.height - VIEWPORT.padding}" class="marker" />` +
    `<text x="${x}" y="${VIEWPORT.padding - 6}" class="marker-label">${label}</text>`
  );
}

export function compareSvg(state: CompareState): string {
  const view = state.view;
  if (view === null) return "";
  const { a, b } = renderOverlay(view.a, view.b, VIEWPORT);
  return (
    `<svg viewBox="0 0 ${VIEWPORT.width} ${VIEWPORT.height}" class="compare-chart">` +
    `<path d="${a.path}" class="curve curve-a" fill="none" />` +
    `<path d="${b.path}" class="curve curve-b" fill="none" />` +
    markerHtml(a.markers.p15, "p15") +
    markerHtml(a.markers.p85, "p85") +
    markerHtml(b.markers.p15, "p15") +
    markerHtml(b.markers.p85, "p85") +
    `</svg>`
  );
}

export function compareHtml(state: CompareState): string {
  if (state.status === "error") {
    return `<div class="error-panel">${escapeHtml(state.error ?? "request failed")}</div>`;
  }
  if (state.view === null) return `<div class="placeholder">Pick two players to compare.</div>`;
  const banner = state.refreshBanner
    ? `<div class="refresh-banner">A newer snapshot is available — refresh to update.</div>`
    : "";
  const panel = (side: ComparePanelView) =>
    `<div class="panel">` +
    `<h3>${escapeHtml(side.name)} <small>${escapeHtml(side.position)}</small></h3>` +
    `<div class="badges">${badgeHtml(side)}</div>` +
    `<div class="projection">projected ${side.combinedProjection.toFixed(2)}</div>` +
    `</div>`;
  return (
    banner +
    `<div class="compare-panels">${panel(state.view.a)}${panel(state.view.b)}</div>` +
    compareSvg(state)
  );
}

export function evidenceHtml(panel: EvidencePanel): string {
  if (panel.empty) return `<div class="empty-state">${escapeHtml(panel.emptyMessage ?? "")}</div>`;
  const row = (r: EvidencePanel["rows"][number]) =>
    `<li class="evidence-row stance-${r.stance}" data-doc="${escapeHtml(r.docId)}">` +
    `<span class="stance">${r.stance}</span> ` +
    `<span class="title">${escapeHtml(r.title)}</span> ` +
    `<span class="kind">${escapeHtml(r.sourceKind)}</span></li>`;
  return `<ol class="evidence">${panel.rows.map(row).join("")}</ol>`;
}

export function lineupHtml(tray: LineupTray, state: LineupState): string {
  const slot = (name: string) => {
    const player = state.slots[name];
    const label = player ? `${escapeHtml(player.name)} (${escapeHtml(player.position)})` : "empty";
    const points =
      player && state.breakdown[player.playerId] !== undefined
        ? ` — ${state.breakdown[player.playerId]!.toFixed(2)}`
        : "";
    return `<li><strong>${name}</strong>: ${label}${points}</li>`;
  };
  const total = state.total === null ? "—" : state.total.toFixed(2);
  const message = state.message ? `<div class="inline-message">${escapeHtml(state.message)}</div>` : "";
  return (
    `<ul class="lineup">${tray.specs.map((s) => slot(s.name)).join("")}</ul>` +
    `<div class="lineup-total">total ${total}</div>` +
    message
  );
}

/** Mount the app under `root`. Fetches the roster, then wires the compare
 * selectors, evidence panel, and lineup tray together. */
export async function mountApp(root: HTMLElement, api: ApiClient): Promise<void> {
  const roster = (await api.players()).players;
  root.innerHTML = `
    <header><h1>gridiron compare</h1></header>
    <section class="controls">
      <select id="pick-a"></select>
      <select id="pick-b"></select>
      <input id="pick-week" type="number" min="1" value="1" />
      <button id="go-compare">Compare</button>
      <button id="undo-swap">Undo swap</button>
    </section>
    <section id="compare-root"></section>
    <section id="evidence-root"></section>
    <section id="lineup-root"></section>
  `;
  const pickA = root.querySelector("#pick-a") as HTMLSelectElement;
  const pickB = root.querySelector("#pick-b") as HTMLSelectElement;
  const pickWeek = root.querySelector("#pick-week") as HTMLInputElement;
  const compareRoot = root.querySelector("#compare-root") as HTMLElement;
  const evidenceRoot = root.querySelector("#evidence-root") as HTMLElement;
  const lineupRoot = root.querySelector("#lineup-root") as HTMLElement;

  const option = (p: PlayerRecord) =>
    `<option value="${escapeHtml(p.player_id)}">${escapeHtml(p.name)} (${escapeHtml(p.position)})</option>`;
  pickA.innerHTML = roster.map(option).join("");
  pickB.innerHTML = roster.map(option).join("");

  const controller = new CompareController(api, (state) => {
    compareRoot.innerHTML = compareHtml(state);
  });
  const week = () => Number(pickWeek.value) || 1;
  const tray = new LineupTray(api, week(), undefined, (state) => {
    lineupRoot.innerHTML = lineupHtml(tray, state);
  });

  const loadEvidence = async (playerId: string) => {
    try {
      const payload = await api.evidence(playerId, week());
      evidenceRoot.innerHTML = evidenceHtml(buildEvidencePanel(payload.evidence));
    } catch (err) {
      evidenceRoot.innerHTML = `<div class="error-panel">${escapeHtml(String(err))}</div>`;
    }
  };

  (root.querySelector("#go-compare") as HTMLButtonElement).addEventListener("click", () => {
    void controller.load(pickA.value, pickB.value, week());
    void loadEvidence(pickA.value);
  });
  (root.querySelector("#undo-swap") as HTMLButtonElement).addEventListener("click", () => {
    tray.undo();
  });
}
