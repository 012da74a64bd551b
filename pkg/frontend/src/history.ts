/** Rendering of the session history list.
 *
 * Pure string -> DOM-free so it can be unit tested; the live page injects
 * the result and wires click events by data-index.  The list itself never
 * mutates anything — clicking only moves the view cursor.
 */

import type { HistoryEntryDoc } from "./types.js";

const escapeHtml = (s: string): string =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");

export function entryLabel(entry: HistoryEntryDoc): string {
  return entry.instruction === null ? "initial generation" : entry.instruction;
}

export function renderHistoryList(entries: readonly HistoryEntryDoc[], cursor: number): string {
  if (entries.length === 0) {
    return `<p class="history-empty">No layouts yet — generate one.</p>`;
  }
  const items = entries.map((entry, i) => {
    const classes = ["history-entry"];
    if (i === cursor) classes.push("active");
    if (!entry.report.usable) classes.push("unusable");
    const marker = entry.report.usable ? "ok" : "flagged";
    return (
      `<li class="${classes.join(" ")}" data-index="${i}">` +
      `<span class="step">${i}</span> ` +
      `<span class="label">${escapeHtml(entryLabel(entry))}</span> ` +
      `<span class="verdict ${marker}">${marker}</span>` +
      `</li>`
    );
  });
  return `<ol class="history-list">${items.join("")}</ol>`;
}
