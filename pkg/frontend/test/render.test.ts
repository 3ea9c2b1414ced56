import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { compareHtml, compareSvg, escapeHtml, evidenceHtml, lineupHtml } from "../src/app";
import { CompareController } from "../src/compare";
import { buildEvidencePanel } from "../src/evidence";
import { LineupTray } from "../src/lineup";
import { defaultServer, makeEvidence } from "./fixtures";

async function readyState(a: string, b: string) {
  const server = defaultServer();
  const controller = new CompareController(new ApiClient("", server.fetch));
  await controller.load(a, b, 1);
  return { state: controller.state, server, controller };
}

describe("compareHtml", () => {
  it("renders both panels with projections straight from the payload", async () => {
    const { state } = await readyState("p001", "p002");
    const html = compareHtml(state);
    expect(html).toContain("Arlen Kelbeck");
    expect(html).toContain("Rono Dravets");
    expect(html).toContain("projected 18.00");
    expect(html).toContain("projected 12.00");
    expect(html).not.toContain("refresh-banner");
  });

  it("renders an inline error panel on failure", async () => {
    const { state } = await readyState("p001", "ghost");
    const html = compareHtml(state);
    expect(html).toContain("error-panel");
    expect(html).toContain("unknown player");
  });

  it("shows the refresh banner after a snapshot swap", async () => {
    const { server, controller } = await readyState("p001", "p002");
    server.version = "fixture000002";
    await controller.load("p001", "p002", 1);
    expect(compareHtml(controller.state)).toContain("refresh-banner");
  });

  it("self-compare draws two overlapping curve paths", async () => {
    const { state } = await readyState("p001", "p001");
    const svg = compareSvg(state);
    const paths = [...svg.matchAll(/<path d="([^"]+)"/g)].map((m) => m[1]);
    expect(paths).toHaveLength(2);
    expect(paths[0]).toBe(paths[1]);
  });
});

describe("evidenceHtml", () => {
  it("renders one row per item in served order", () => {
    const html = evidenceHtml(buildEvidencePanel(makeEvidence(10)));
    const ids = [...html.matchAll(/data-doc="([^"]+)"/g)].map((m) => m[1]);
    expect(ids).toEqual(Array.from({ length: 10 }, (_, i) => `doc-${i}`));
  });

  it("marks stances with distinguishable classes", () => {
    const html = evidenceHtml(
      buildEvidencePanel(makeEvidence(2, ["support", "refute"])),
    );
    expect(html).toContain("stance-support");
    expect(html).toContain("stance-refute");
  });

  it("renders the empty state", () => {
    expect(evidenceHtml(buildEvidencePanel([]))).toContain("empty-state");
  });
});

describe("lineupHtml", () => {
  it("shows the server total and per-slot breakdown", async () => {
    const server = defaultServer();
    const tray = new LineupTray(new ApiClient("", server.fetch), 1);
    await tray.swap("QB", { playerId: "p001", name: "Arlen Kelbeck", position: "QB" });
    const html = lineupHtml(tray, tray.state);
    expect(html).toContain("total 18.00");
    expect(html).toContain("Arlen Kelbeck");
    expect(html).toContain("empty"); // unfilled slots stay visible
  });
});

describe("escapeHtml", () => {
  it("neutralizes markup in server strings", () => {
    expect(escapeHtml(`<img src=x onerror="pwn()">`)).toBe(
      "&lt;img src=x onerror=&quot;pwn()&quot;&gt;",
    );
  });
});
