/** A static in-process stand-in for the /v1 service. It mirrors the real
 * endpoints' payload shapes and arithmetic so the UI can be exercised with
 * no live pipeline. */

import type { FetchLike, ResponseLike } from "../src/api";
import type {
  ComparePanelPayload,
  EvidenceItemPayload,
  InsightPayload,
  PlayerRecord,
} from "../src/types";

export interface FixturePlayer extends PlayerRecord {
  /** combined projection per week */
  projections: Record<number, number>;
  mean: number;
  std: number;
}

export const CURVE_POINTS = 200;

function normalPdf(x: number, mean: number, std: number): number {
  const z = (x - mean) / std;
  return Math.exp(-0.5 * z * z) / (std * Math.sqrt(2 * Math.PI));
}

export function fixtureCurve(
  mean: number,
  std: number,
  lo: number,
  hi: number,
): [number, number][] {
  const points: [number, number][] = [];
  for (let i = 0; i < CURVE_POINTS; i++) {
    const x = lo + ((hi - lo) * i) / (CURVE_POINTS - 1);
    points.push([x, normalPdf(x, mean, std)]);
  }
  return points;
}

export function makePlayer(
  id: string,
  name: string,
  position: string,
  projection: number,
  weeks: number[] = [1, 2],
): FixturePlayer {
  const projections: Record<number, number> = {};
  for (const w of weeks) projections[w] = projection + (w - 1) * 0.5;
  return {
    player_id: id,
    name,
    team: "Gridville",
    position,
    age: 26,
    seasons_pro: 4,
    height_cm: 185,
    weight_kg: 98,
    projections,
    mean: projection,
    std: 2.0,
  };
}

export function makeEvidence(n: number, stances?: ("support" | "refute")[]): EvidenceItemPayload[] {
  const items: EvidenceItemPayload[] = [];
  for (let i = 0; i < n; i++) {
    items.push({
      doc_id: `doc-${i}`,
      title: `Report ${i}`,
      source_kind: "article",
      relevance: 0.9 - i * 0.05,
      stance: stances?.[i] ?? (i % 3 === 0 ? "refute" : "support"),
      neutral_tone: false,
    });
  }
  return items;
}

function json(status: number, body: unknown): ResponseLike {
  return { ok: status < 400, status, json: async () => body };
}

export class FixtureServer {
  version = "fixture000001";
  requests: string[] = [];
  evidenceByPlayer = new Map<string, EvidenceItemPayload[]>();

  constructor(readonly players: FixturePlayer[]) {}

  private player(id: string): FixturePlayer | undefined {
    return this.players.find((p) => p.player_id === id);
  }

  insightPayload(player: FixturePlayer, week: number): InsightPayload {
    const projection = player.projections[week]!;
    return {
      player_id: player.player_id,
      week,
      probabilities: { boom: 0.2, bust: 0.3, injury: 0.1, meaningful: 0.8 },
      combined_projection: projection,
      fit: { family: "normal", params: [player.mean, player.std], loss: 1.0, converged: true, n: 1000 },
      p15: player.mean - player.std,
      p85: player.mean + player.std,
      evidence: this.evidenceByPlayer.get(player.player_id) ?? makeEvidence(3),
      doc_count: 12,
      document_free: false,
      donors: [],
      sample_min: player.mean - 3 * player.std,
      sample_max: player.mean + 3 * player.std,
      sample_std: player.std,
    };
  }

  comparePanel(player: FixturePlayer, week: number, lo: number, hi: number): ComparePanelPayload {
    const insight = this.insightPayload(player, week);
    return {
      snapshot_version: this.version,
      insight,
      curve: fixtureCurve(player.mean, player.std, lo, hi),
      p15: insight.p15,
      p85: insight.p85,
    };
  }

  /** FetchLike entry point; bind it when constructing an ApiClient. */
  fetch: FetchLike = async (rawUrl, init) => {
    this.requests.push(rawUrl);
    const url = new URL(rawUrl, "http://fixture");
    const path = url.pathname;

    if (path === "/v1/health") {
      return json(200, { status: "ok", snapshot_version: this.version });
    }
    if (path === "/v1/players") {
      const players = [...this.players]
        .sort((a, b) => (a.player_id < b.player_id ? -1 : 1))
        .map(({ projections: _p, mean: _m, std: _s, ...bio }) => bio);
      return json(200, { snapshot_version: this.version, players });
    }

    const insightMatch = path.match(/^\/v1\/players\/([^/]+)\/(insight|evidence)$/);
    if (insightMatch) {
      const player = this.player(decodeURIComponent(insightMatch[1]!));
      const week = Number(url.searchParams.get("week"));
      if (!url.searchParams.get("week")) return json(400, { error: "week query parameter is required" });
      if (player === undefined) return json(404, { error: `unknown player` });
      if (player.projections[week] === undefined) {
        return json(404, { error: `no insight for week ${week}` });
      }
      const insight = this.insightPayload(player, week);
      if (insightMatch[2] === "insight") {
        return json(200, { snapshot_version: this.version, insight });
      }
      return json(200, {
        snapshot_version: this.version,
        player_id: player.player_id,
        week,
        evidence: insight.evidence,
      });
    }

    if (path === "/v1/compare") {
      const a = this.player(url.searchParams.get("a") ?? "");
      const b = this.player(url.searchParams.get("b") ?? "");
      const week = Number(url.searchParams.get("week"));
      if (a === undefined || b === undefined) return json(404, { error: "unknown player" });
      if (a.projections[week] === undefined || b.projections[week] === undefined) {
        return json(404, { error: `no insight for week ${week}` });
      }
      const lo = Math.min(a.mean - 4 * a.std, b.mean - 4 * b.std);
      const hi = Math.max(a.mean + 4 * a.std, b.mean + 4 * b.std);
      return json(200, {
        snapshot_version: this.version,
        week,
        a: this.comparePanel(a, week, lo, hi),
        b: this.comparePanel(b, week, lo, hi),
      });
    }

    if (path === "/v1/lineup/project" && init?.method === "POST") {
      const body = JSON.parse(init.body ?? "{}") as { player_ids?: string[]; week?: number };
      const ids = body.player_ids;
      const week = body.week ?? 0;
      if (!Array.isArray(ids) || ids.length === 0) {
        return json(400, { error: "body must contain a non-empty player_ids list" });
      }
      const breakdown: { player_id: string; combined_projection: number }[] = [];
      for (const id of ids) {
        const player = this.player(id);
        if (player === undefined) return json(404, { error: `unknown player ${id}` });
        const projection = player.projections[week];
        if (projection === undefined) return json(404, { error: `no insight for week ${week}` });
        breakdown.push({ player_id: id, combined_projection: projection });
      }
      const total = breakdown.reduce((acc, p) => acc + p.combined_projection, 0);
      return json(200, { snapshot_version: this.version, week, total, players: breakdown });
    }

    return json(404, { error: `no route for ${path}` });
  };
}

export function defaultServer(): FixtureServer {
  return new FixtureServer([
    makePlayer("p001", "Arlen Kelbeck", "QB", 18.0),
    makePlayer("p002", "Rono Dravets", "RB", 12.0),
    makePlayer("p003", "Tobin Marsk", "RB", 15.0), // exactly +3.0 over p002
    makePlayer("p004", "Chesley Vint", "WR", 11.0),
    makePlayer("p005", "Dax Orvell", "WR", 9.5),
    makePlayer("p006", "Ferro Quill", "TE", 8.0),
    makePlayer("p007", "Sandor Bleeth", "RB", 10.0),
    makePlayer("p008", "Milo Trask", "WR", 13.5),
  ]);
}
