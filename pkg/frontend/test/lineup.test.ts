import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { DraftPlayer, LineupTray } from "../src/lineup";
import { defaultServer, FixtureServer } from "./fixtures";

function draftPlayer(server: FixtureServer, id: string): DraftPlayer {
  const p = server.players.find((pl) => pl.player_id === id)!;
  return { playerId: p.player_id, name: p.name, position: p.position };
}

function makeTray(server = defaultServer()) {
  const api = new ApiClient("", server.fetch);
  return { tray: new LineupTray(api, 1), server };
}

describe("LineupTray", () => {
  it("takes totals from the server, never from client arithmetic", async () => {
    const { tray, server } = makeTray();
    await tray.swap("QB", draftPlayer(server, "p001"));
    expect(tray.state.total).toBe(18.0);
    await tray.swap("RB1", draftPlayer(server, "p002"));
    expect(tray.state.total).toBe(18.0 + 12.0);
    expect(tray.state.breakdown).toEqual({ p001: 18.0, p002: 12.0 });
    expect(tray.state.snapshotVersion).toBe(server.version);
  });

  it("a +3.0 swap moves the total by exactly 3.0", async () => {
    const { tray, server } = makeTray();
    await tray.swap("QB", draftPlayer(server, "p001"));
    await tray.swap("RB1", draftPlayer(server, "p002")); // 12.0
    const before = tray.state.total!;
    await tray.swap("RB1", draftPlayer(server, "p003")); // 15.0
    expect(tray.state.total! - before).toBe(3.0);
  });

  it("swapping a player for themselves is a no-op", async () => {
    const { tray, server } = makeTray();
    await tray.swap("QB", draftPlayer(server, "p001"));
    const requestsBefore = server.requests.length;
    const stateBefore = tray.state;
    await tray.swap("QB", draftPlayer(server, "p001"));
    expect(tray.state).toBe(stateBefore);
    expect(server.requests.length).toBe(requestsBefore);
    expect(tray.undoDepth).toBe(1);
  });

  it("rejects an ineligible position inline without touching the draft", async () => {
    const { tray, server } = makeTray();
    await tray.swap("QB", draftPlayer(server, "p001"));
    const slotsBefore = { ...tray.state.slots };
    const totalBefore = tray.state.total;
    await tray.swap("QB", draftPlayer(server, "p002")); // RB into QB
    expect(tray.state.message).toContain("not eligible");
    expect(tray.state.slots).toEqual(slotsBefore);
    expect(tray.state.total).toBe(totalBefore);
    expect(tray.undoDepth).toBe(1);
  });

  it("undo restores the prior draft field-for-field", async () => {
    const { tray, server } = makeTray();
    await tray.swap("QB", draftPlayer(server, "p001"));
    await tray.swap("RB1", draftPlayer(server, "p002"));
    const snapshot = JSON.parse(JSON.stringify(tray.state));
    await tray.swap("RB1", draftPlayer(server, "p003"));
    expect(tray.state.total).not.toBe(snapshot.total);
    expect(tray.undo()).toBe(true);
    expect(JSON.parse(JSON.stringify(tray.state))).toEqual(snapshot);
    expect(tray.undo()).toBe(true);
    expect(tray.undo()).toBe(true);
    expect(tray.undo()).toBe(false); // history exhausted
  });

  it("a server rejection rolls the draft back with an inline message", async () => {
    const { tray, server } = makeTray();
    await tray.swap("QB", draftPlayer(server, "p001"));
    const before = JSON.parse(JSON.stringify({ ...tray.state, message: null }));
    await tray.swap("RB1", { playerId: "ghost", name: "Ghost", position: "RB" });
    expect(tray.state.message).toContain("unknown player");
    expect(JSON.parse(JSON.stringify({ ...tray.state, message: null }))).toEqual(before);
  });

  it("tracks the server re-sum exactly across 100 scripted swaps", async () => {
    const { tray, server } = makeTray();
    const bySlot: Record<string, string[]> = {
      RB1: ["p002", "p003", "p007"],
      RB2: ["p003", "p007", "p002"],
      WR1: ["p004", "p005", "p008"],
      WR2: ["p005", "p008", "p004"],
      TE: ["p006"],
      FLEX: ["p002", "p004", "p006", "p008"],
    };
    await tray.swap("QB", draftPlayer(server, "p001"));

    // deterministic scripted sequence (linear congruential generator)
    let seed = 12345;
    const next = (n: number) => {
      seed = (seed * 1103515245 + 12345) % 2147483648;
      return seed % n;
    };
    const slotNames = Object.keys(bySlot);
    for (let i = 0; i < 100; i++) {
      const slot = slotNames[next(slotNames.length)]!;
      const candidates = bySlot[slot]!;
      await tray.swap(slot, draftPlayer(server, candidates[next(candidates.length)]!));

      // independent expected total straight from the fixture tables
      let expected = 0;
      for (const player of Object.values(tray.state.slots)) {
        if (player === null) continue;
        expected += server.players.find((p) => p.player_id === player.playerId)!.projections[1]!;
      }
      expect(tray.state.total).toBe(expected);
    }
  });
});
