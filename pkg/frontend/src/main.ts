/** Browser wiring: DOM events in, module calls out.
 *
 * All rendering goes through the pure helpers in canvas.ts / history.ts,
 * and every mutation refetches history from the service afterwards, so
 * what the page shows is always the service's account of the session —
 * not the client's bookkeeping.
 */

import { ServiceError, StudioApi } from "./api.js";
import { CanvasError, errorPanelHtml, renderCanvas } from "./canvas.js";
import { buildTask, canSubmit, validateForm, type ObjectRow, type RoomForm } from "./form.js";
import { renderHistoryList } from "./history.js";
import { ViewState } from "./state.js";
import type { RoomType } from "./types.js";

const state = new ViewState();
let api = new StudioApi("http://127.0.0.1:8000");

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

function setStatus(text: string, isError = false): void {
  const el = $("status");
  el.textContent = text;
  el.className = isError ? "status error" : "status";
}

function readObjectRows(): ObjectRow[] {
  const rows: ObjectRow[] = [];
  document.querySelectorAll<HTMLElement>("#object-rows .object-row").forEach((row) => {
    const num = (cls: string): number =>
      Number(row.querySelector<HTMLInputElement>(`.${cls}`)?.value);
    rows.push({
      description: row.querySelector<HTMLInputElement>(".obj-description")?.value ?? "",
      quantity: num("obj-quantity"),
      width: num("obj-width"),
      depth: num("obj-depth"),
      height: num("obj-height"),
    });
  });
  return rows;
}

function readForm(): RoomForm {
  return {
    roomType: $<HTMLSelectElement>("room-type").value as RoomType | "",
    floorWidth: Number($<HTMLInputElement>("floor-width").value),
    floorDepth: Number($<HTMLInputElement>("floor-depth").value),
    objects: readObjectRows(),
  };
}

function showFormErrors(form: RoomForm): void {
  const errors = validateForm(form);
  $("form-errors").innerHTML = errors
    .map((e) => `<li><code>${e.field}</code>: ${e.message}</li>`)
    .join("");
  $<HTMLButtonElement>("create-session").disabled = !canSubmit(form);
}

function addObjectRow(preset?: Partial<ObjectRow>): void {
  const row = document.createElement("div");
  row.className = "object-row";
  row.innerHTML =
    `<input class="obj-description" placeholder="description" value="${preset?.description ?? ""}">` +
    `<input class="obj-quantity" type="number" min="1" step="1" value="${preset?.quantity ?? 1}">` +
    `<input class="obj-width" type="number" step="0.05" value="${preset?.width ?? 0.5}">` +
    `<input class="obj-depth" type="number" step="0.05" value="${preset?.depth ?? 0.5}">` +
    `<input class="obj-height" type="number" step="0.05" value="${preset?.height ?? 0.5}">` +
    `<button type="button" class="remove-row">×</button>`;
  row.querySelector(".remove-row")!.addEventListener("click", () => {
    row.remove();
    showFormErrors(readForm());
  });
  row.querySelectorAll("input").forEach((input) =>
    input.addEventListener("input", () => showFormErrors(readForm())),
  );
  $("object-rows").appendChild(row);
  showFormErrors(readForm());
}

function redraw(): void {
  const snapshot = state.viewed();
  const canvasHost = $("canvas-host");
  if (!snapshot) {
    canvasHost.innerHTML = `<p class="placeholder">No layout yet.</p>`;
  } else {
    try {
      canvasHost.innerHTML = renderCanvas(snapshot.layout, snapshot.report, {
        overlay: state.overlayOn,
        selectedId: state.selectedId,
      });
      canvasHost.querySelectorAll<SVGGElement>("g.object").forEach((g) => {
        g.addEventListener("click", () => {
          const id = g.dataset.id ?? null;
          state.select(state.selectedId === id ? null : id);
          redraw();
        });
      });
    } catch (err) {
      if (err instanceof CanvasError) canvasHost.innerHTML = errorPanelHtml(err.message);
      else throw err;
    }
  }
  $("history-host").innerHTML = renderHistoryList(state.history(), state.historyCursor);
  $("history-host")
    .querySelectorAll<HTMLElement>(".history-entry")
    .forEach((li) => {
      li.addEventListener("click", () => {
        state.browse(Number(li.dataset.index));
        redraw();
      });
    });
  const haveSession = state.sessionId !== null;
  $<HTMLButtonElement>("btn-generate").disabled = !haveSession || state.isPending;
  $<HTMLButtonElement>("btn-edit").disabled =
    !haveSession || state.isPending || state.historyLength === 0 || !state.atLive;
  const pill = $("session-pill");
  pill.textContent = haveSession ? `session ${state.sessionId!.slice(0, 8)}…` : "no session";
}

/** Run one service call while holding the single request slot. */
async function withRequestSlot(label: string, run: () => Promise<void>): Promise<void> {
  if (!state.beginRequest()) {
    setStatus("a request is already running", true);
    return;
  }
  redraw();
  setStatus(`${label}…`);
  try {
    await run();
    setStatus(`${label}: done`);
  } catch (err) {
    if (err instanceof ServiceError) setStatus(`${label}: ${err.code} — ${err.message}`, true);
    else setStatus(`${label}: ${String(err)}`, true);
  } finally {
    state.endRequest();
    redraw();
  }
}

async function refreshHistory(): Promise<void> {
  if (!state.sessionId) return;
  state.setHistory(await api.history(state.sessionId));
}

export function boot(): void {
  $<HTMLInputElement>("base-url").value = api.baseUrl;
  $("base-url").addEventListener("change", () => {
    api = new StudioApi($<HTMLInputElement>("base-url").value);
    setStatus(`service base URL set to ${api.baseUrl}`);
  });

  $("add-object").addEventListener("click", () => addObjectRow());
  ["room-type", "floor-width", "floor-depth"].forEach((id) =>
    $(id).addEventListener("input", () => showFormErrors(readForm())),
  );

  $("create-session").addEventListener("click", () =>
    withRequestSlot("create session", async () => {
      const form = readForm();
      const sessionId = await api.createSession(buildTask(form));
      state.startSession(sessionId);
    }),
  );

  $("btn-generate").addEventListener("click", () =>
    withRequestSlot("generate", async () => {
      await api.generate(state.sessionId!);
      await refreshHistory();
    }),
  );

  $("btn-edit").addEventListener("click", () => {
    const instruction = $<HTMLInputElement>("edit-instruction").value.trim();
    if (!instruction) {
      setStatus("type an edit instruction first", true);
      return;
    }
    // one POST per click; a failed edit is reported, never resent
    void withRequestSlot("edit", async () => {
      await api.edit(state.sessionId!, instruction);
      await refreshHistory();
      $<HTMLInputElement>("edit-instruction").value = "";
    });
  });

  $<HTMLInputElement>("overlay-toggle").checked = state.overlayOn;
  $("overlay-toggle").addEventListener("change", () => {
    state.toggleOverlay();
    redraw();
  });

  addObjectRow({ description: "double bed", quantity: 1, width: 1.8, depth: 2.0, height: 0.5 });
  showFormErrors(readForm());
  redraw();
  setStatus("ready");
}

boot();
