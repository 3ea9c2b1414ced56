import { ApiClient, ApiError } from "./api";
import type { ComparePanelPayload, ComparePayload, PlayerRecord } from "./types";

export type BadgeTone = "positive" | "negative";

export interface Badge {
  state: "boom" | "bust" | "injury" | "meaningful";
  probability: number;
  tone: BadgeTone;
}

/** boom/meaningful are good news for a lineup; bust/injury are bad. */
export function badgeTone(state: Badge["state"]): BadgeTone {
  return state === "boom" || state === "meaningful" ? "positive" : "negative";
}

export function buildBadges(panel: ComparePanelPayload): Badge[] {
  const probs = panel.insight.probabilities;
  if (probs === null) return [];
  const states: Badge["state"][] = ["boom", "bust", "injury", "meaningful"];
  return states.map((state) => ({
    state,
    probability: probs[state],
    tone: badgeTone(state),
  }));
}

export interface ComparePanelView {
  playerId: string;
  name: string;
  position: string;
  badges: Badge[];
  combinedProjection: number;
  curve: [number, number][];
  p15: number | null;
  p85: number | null;
  snapshotVersion: string;
}

export interface CompareView {
  week: number;
  snapshotVersion: string;
  a: ComparePanelView;
  b: ComparePanelView;
}

export interface CompareState {
  status: "idle" | "loading" | "ready" | "error";
  view: CompareView | null;
  /** Inline error message; the rest of the app stays usable. */
  error: string | null;
  /** Set when a response arrives under a newer snapshot version than the
   * one currently on screen elsewhere. */
  refreshBanner: boolean;
}

function panelView(
  payload: ComparePanelPayload,
  roster: Map<string, PlayerRecord>,
): ComparePanelView {
  const bio = roster.get(payload.insight.player_id);
  return {
    playerId: payload.insight.player_id,
    name: bio?.name ?? payload.insight.player_id,
    position: bio?.position ?? "?",
    badges: buildBadges(payload),
    combinedProjection: payload.insight.combined_projection,
    curve: payload.curve,
    p15: payload.p15,
    p85: payload.p85,
    snapshotVersion: payload.snapshot_version,
  };
}

/** Fetches comparisons and applies responses in request order: a response
 * is dropped unless it belongs to the most recent load() call, so two
 * in-flight requests can never interleave on screen. */
export class CompareController {
  state: CompareState = { status: "idle", view: null, error: null, refreshBanner: false };

  private seq = 0;
  private roster: Map<string, PlayerRecord> | null = null;
  private lastSeenVersion: string | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly onChange: (state: CompareState) => void = () => {},
  ) {}

  private set(partial: Partial<CompareState>): void {
    this.state = { ...this.state, ...partial };
    this.onChange(this.state);
  }

  private async ensureRoster(): Promise<Map<string, PlayerRecord>> {
    if (this.roster === null) {
      const payload = await this.api.players();
      this.roster = new Map(payload.players.map((p) => [p.player_id, p]));
    }
    return this.roster;
  }

  async load(a: string, b: string, week: number): Promise<void> {
    const ticket = ++this.seq;
    this.set({ status: "loading", error: null });
    let payload: ComparePayload;
    let roster: Map<string, PlayerRecord>;
    try {
      roster = await this.ensureRoster();
      payload = await this.api.compare(a, b, week);
    } catch (err) {
      if (ticket !== this.seq) return; // superseded; keep the newer state
      const message = err instanceof ApiError ? err.message : String(err);
      this.set({ status: "error", error: message });
      return;
    }
    if (ticket !== this.seq) return; // stale response, discard

    const refreshBanner =
      this.lastSeenVersion !== null && this.lastSeenVersion !== payload.snapshot_version;
    this.lastSeenVersion = payload.snapshot_version;
    this.set({
      status: "ready",
      error: null,
      refreshBanner,
      view: {
        week: payload.week,
        snapshotVersion: payload.snapshot_version,
        a: panelView(payload.a, roster),
        b: panelView(payload.b, roster),
      },
    });
  }

  dismissRefreshBanner(): void {
    this.set({ refreshBanner: false });
  }
}
