import { describe, expect, it } from "vitest";

import { ViewState } from "../src/state.js";
import type { HistoryEntryDoc, LayoutDoc, ReportDoc } from "../src/types.js";

const layout: LayoutDoc = {
  room_type: "bedroom",
  floor: { vertices: [[0, 0], [4, 0], [4, 3], [0, 3]] },
  objects: [],
};

const report: ReportDoc = {
  oor: 0,
  pair_overlaps: [],
  boundary_violations: [],
  count_match: true,
  usable: true,
};

const entry = (index: number, instruction: string | null): HistoryEntryDoc => ({
  index,
  instruction,
  layout,
  report,
  timestamp: 1000 + index,
});

describe("history cursor", () => {
  it("is -1 with no history and viewed() is null", () => {
    const state = new ViewState();
    expect(state.historyCursor).toBe(-1);
    expect(state.viewed()).toBeNull();
  });

  it("snaps to the newest entry on setHistory", () => {
    const state = new ViewState();
    state.setHistory([entry(0, null), entry(1, "remove the wardrobe")]);
    expect(state.historyCursor).toBe(1);
    expect(state.atLive).toBe(true);
  });

  it("clamps browsing to the bounds", () => {
    const state = new ViewState();
    state.setHistory([entry(0, null), entry(1, "a"), entry(2, "b")]);
    state.browse(-5);
    expect(state.historyCursor).toBe(0);
    state.browse(99);
    expect(state.historyCursor).toBe(2);
    state.browse(1);
    expect(state.historyCursor).toBe(1);
    expect(state.atLive).toBe(false);
  });

  it("browsing never mutates the entries", () => {
    const state = new ViewState();
    state.setHistory([entry(0, null), entry(1, "a")]);
    const before = JSON.stringify(state.history());
    state.browse(0);
    state.browse(1);
    state.browse(-3);
    expect(JSON.stringify(state.history())).toBe(before);
  });

  it("appendEntry moves the cursor to the new entry", () => {
    const state = new ViewState();
    state.setHistory([entry(0, null)]);
    state.browse(0);
    state.appendEntry(entry(1, "add a lamp"));
    expect(state.historyCursor).toBe(1);
    expect(state.viewed()?.layout).toBe(layout);
  });

  it("startSession resets history and selection", () => {
    const state = new ViewState();
    state.setHistory([entry(0, null)]);
    state.select("bed_1");
    state.startSession("abc123");
    expect(state.sessionId).toBe("abc123");
    expect(state.selectedId).toBeNull();
    expect(state.historyLength).toBe(0);
    expect(state.historyCursor).toBe(-1);
  });
});

describe("single active request", () => {
  it("refuses a second request while one is pending", () => {
    const state = new ViewState();
    expect(state.beginRequest()).toBe(true);
    expect(state.beginRequest()).toBe(false);
    expect(state.isPending).toBe(true);
    state.endRequest();
    expect(state.beginRequest()).toBe(true);
  });
});

describe("overlay toggle", () => {
  it("defaults on and flips", () => {
    const state = new ViewState();
    expect(state.overlayOn).toBe(true);
    state.toggleOverlay();
    expect(state.overlayOn).toBe(false);
    state.toggleOverlay();
    expect(state.overlayOn).toBe(true);
  });
});
