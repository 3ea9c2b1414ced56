import { ApiClient, ApiError } from "./api";

export interface SlotSpec {
  name: string;
  /** Positions eligible for this slot, e.g. FLEX = RB/WR/TE. */
  positions: string[];
}

export const DEFAULT_SLOTS: SlotSpec[] = [
  { name: "QB", positions: ["QB"] },
  { name: "RB1", positions: ["RB"] },
  { name: "RB2", positions: ["RB"] },
  { name: "WR1", positions: ["WR"] },
  { name: "WR2", positions: ["WR"] },
  { name: "TE", positions: ["TE"] },
  { name: "FLEX", positions: ["RB", "WR", "TE"] },
];

export interface DraftPlayer {
  playerId: string;
  name: string;
  position: string;
}

export interface LineupState {
  slots: Record<string, DraftPlayer | null>;
  /** Σ of server-provided combined projections; never accumulated
   * client-side. Null until the first successful projection. */
  total: number | null;
  breakdown: Record<string, number>;
  snapshotVersion: string | null;
  message: string | null;
}

function cloneState(state: LineupState): LineupState {
  return {
    slots: { ...state.slots },
    total: state.total,
    breakdown: { ...state.breakdown },
    snapshotVersion: state.snapshotVersion,
    message: state.message,
  };
}

/** What-if lineup builder: every swap re-posts the full lineup to
 * /v1/lineup/project and takes the total from the response, so the running
 * total cannot drift from the server's arithmetic. */
export class LineupTray {
  state: LineupState;

  private history: LineupState[] = [];

  constructor(
    private readonly api: ApiClient,
    private readonly week: number,
    readonly specs: SlotSpec[] = DEFAULT_SLOTS,
    private readonly onChange: (state: LineupState) => void = () => {},
  ) {
    const slots: Record<string, DraftPlayer | null> = {};
    for (const spec of specs) slots[spec.name] = null;
    this.state = { slots, total: null, breakdown: {}, snapshotVersion: null, message: null };
  }

  private set(state: LineupState): void {
    this.state = state;
    this.onChange(state);
  }

  private filledIds(slots: Record<string, DraftPlayer | null>): string[] {
    return this.specs
      .map((spec) => slots[spec.name])
      .filter((p): p is DraftPlayer => p !== null)
      .map((p) => p.playerId);
  }

  async swap(slotName: string, player: DraftPlayer): Promise<void> {
    const spec = this.specs.find((s) => s.name === slotName);
    if (spec === undefined) {
      this.set({ ...cloneState(this.state), message: `no slot named ${slotName}` });
      return;
    }
    if (!spec.positions.includes(player.position)) {
      // rejected inline; draft unchanged
      this.set({
        ...cloneState(this.state),
        message: `${player.position} is not eligible for ${slotName}`,
      });
      return;
    }
    const incumbent = this.state.slots[slotName];
    if (incumbent !== null && incumbent !== undefined && incumbent.playerId === player.playerId) {
      return; // swapping a player for themselves is a no-op
    }

    const previous = cloneState(this.state);
    const next = cloneState(this.state);
    next.slots[slotName] = player;
    next.message = null;
    try {
      const payload = await this.api.projectLineup(this.filledIds(next.slots), this.week);
      next.total = payload.total;
      next.breakdown = Object.fromEntries(
        payload.players.map((p) => [p.player_id, p.combined_projection]),
      );
      next.snapshotVersion = payload.snapshot_version;
    } catch (err) {
      const message = err instanceof ApiError ? err.message : String(err);
      this.set({ ...previous, message });
      return;
    }
    this.history.push(previous);
    this.set(next);
  }

  /** Restore the previous draft field-for-field. */
  undo(): boolean {
    const previous = this.history.pop();
    if (previous === undefined) return false;
    this.set(previous);
    return true;
  }

  get undoDepth(): number {
    return this.history.length;
  }
}
