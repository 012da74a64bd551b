/** Client-side view state for one studio tab.
 *
 * Two invariants the UI leans on:
 *  - the history cursor always points at a real entry (or -1 when there is
 *    no history yet), so the canvas can render state.viewed() blindly;
 *  - at most one request per session is in flight: beginRequest() refuses
 *    a second one, which is what keeps the edit button disabled while an
 *    edit is pending instead of queueing retries.
 *
 * Browsing the cursor is read-only — it picks which snapshot the canvas
 * shows and never talks to the service.
 */

import type { HistoryEntryDoc, LayoutAndReport } from "./types.js";

export class ViewState {
  sessionId: string | null = null;
  selectedId: string | null = null;
  overlayOn = true; // highlights on by default; the human is the inspector
  private entries: HistoryEntryDoc[] = [];
  private cursor = -1;
  private pending = false;

  get historyLength(): number {
    return this.entries.length;
  }

  get historyCursor(): number {
    return this.cursor;
  }

  get isPending(): boolean {
    return this.pending;
  }

  /** True when the cursor sits on the newest entry (or there is none). */
  get atLive(): boolean {
    return this.cursor === this.entries.length - 1;
  }

  history(): readonly HistoryEntryDoc[] {
    return this.entries;
  }

  /** The snapshot the canvas should draw, per the cursor; null before any generation. */
  viewed(): LayoutAndReport | null {
    const entry = this.entries[this.cursor];
    return entry ? { layout: entry.layout, report: entry.report } : null;
  }

  startSession(sessionId: string): void {
    this.sessionId = sessionId;
    this.selectedId = null;
    this.entries = [];
    this.cursor = -1;
  }

  /** Replace the whole history (initial load / refresh); cursor snaps to live. */
  setHistory(entries: HistoryEntryDoc[]): void {
    this.entries = entries.slice();
    this.cursor = this.entries.length - 1;
  }

  /** Append a fresh generate/edit result; cursor follows to the new entry. */
  appendEntry(entry: HistoryEntryDoc): void {
    this.entries.push(entry);
    this.cursor = this.entries.length - 1;
  }

  /** Move the read-only cursor; out-of-range values clamp to the bounds. */
  browse(index: number): void {
    if (this.entries.length === 0) {
      this.cursor = -1;
      return;
    }
    this.cursor = Math.max(0, Math.min(this.entries.length - 1, Math.trunc(index)));
  }

  toggleOverlay(): void {
    this.overlayOn = !this.overlayOn;
  }

  select(instanceId: string | null): void {
    this.selectedId = instanceId;
  }

  /** Claim the single request slot; false means one is already running. */
  beginRequest(): boolean {
    if (this.pending) return false;
    this.pending = true;
    return true;
  }

  endRequest(): void {
    this.pending = false;
  }
}
