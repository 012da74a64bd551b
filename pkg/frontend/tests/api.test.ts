import { afterEach, describe, expect, it, vi } from "vitest";

import { ServiceError, StudioApi } from "../src/api.js";

type FetchArgs = { url: string; method?: string; body?: string };

function mockFetch(status: number, payload: unknown): { calls: FetchArgs[] } {
  const calls: FetchArgs[] = [];
  vi.stubGlobal(
    "fetch",
    vi.fn(async (url: string, init?: RequestInit) => {
      calls.push({ url, method: init?.method, body: init?.body as string });
      return new Response(JSON.stringify(payload), {
        status,
        headers: { "Content-Type": "application/json" },
      });
    }),
  );
  return { calls };
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("StudioApi", () => {
  it("normalizes the base URL and posts task documents", async () => {
    const { calls } = mockFetch(200, { session_id: "abc" });
    const api = new StudioApi("http://localhost:8000///");
    const task = {
      instruction: "",
      room_type: "bedroom" as const,
      floor: { vertices: [[0, 0], [1, 0], [1, 1]] as [number, number][] },
      objects: [],
    };
    const sid = await api.createSession(task);
    expect(sid).toBe("abc");
    expect(calls[0]!.url).toBe("http://localhost:8000/sessions");
    expect(calls[0]!.method).toBe("POST");
    expect(JSON.parse(calls[0]!.body!)).toEqual({ task });
  });

  it("decodes the error envelope into a ServiceError", async () => {
    mockFetch(422, { code: "unsupported_edit", message: "cannot paint things" });
    const api = new StudioApi("http://x");
    const err = await api.edit("s1", "paint it blue").catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ServiceError);
    expect((err as ServiceError).status).toBe(422);
    expect((err as ServiceError).code).toBe("unsupported_edit");
    expect((err as ServiceError).message).toBe("cannot paint things");
  });

  it("falls back gracefully on a non-JSON error body", async () => {
    const calls: FetchArgs[] = [];
    vi.stubGlobal(
      "fetch",
      vi.fn(async (url: string, init?: RequestInit) => {
        calls.push({ url, method: init?.method });
        return new Response("<html>bad gateway</html>", { status: 502 });
      }),
    );
    const api = new StudioApi("http://x");
    const err = await api.generate("s1").catch((e: unknown) => e);
    expect((err as ServiceError).code).toBe("unknown");
    expect((err as ServiceError).message).toBe("HTTP 502");
  });

  it("sends a failing edit exactly once — no client-side retries", async () => {
    const { calls } = mockFetch(502, { code: "gateway_error", message: "backend down" });
    const api = new StudioApi("http://x");
    await expect(api.edit("s1", "remove the wardrobe")).rejects.toThrow("backend down");
    expect(calls).toHaveLength(1);
    expect(JSON.parse(calls[0]!.body!)).toEqual({ instruction: "remove the wardrobe" });
  });

  it("sends a network-failing edit exactly once as well", async () => {
    const fetchSpy = vi.fn(async () => {
      throw new TypeError("fetch failed");
    });
    vi.stubGlobal("fetch", fetchSpy);
    const api = new StudioApi("http://x");
    await expect(api.edit("s1", "add a lamp")).rejects.toThrow("fetch failed");
    expect(fetchSpy).toHaveBeenCalledTimes(1);
  });

  it("unwraps history and layout payloads", async () => {
    mockFetch(200, { history: [{ index: 0, instruction: null }] });
    const api = new StudioApi("http://x");
    const history = await api.history("s1");
    expect(history).toHaveLength(1);
    expect(history[0]!.instruction).toBeNull();
  });

  it("builds the service-side render URL", () => {
    const api = new StudioApi("http://host:9/");
    expect(api.renderUrl("abc")).toBe("http://host:9/sessions/abc/render.svg");
  });
});
