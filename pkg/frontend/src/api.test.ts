import { describe, expect, it } from "vitest";

import { ApiError, SessionClient } from "./api.js";

interface Recorded {
  url: string;
  init?: RequestInit;
}

function stubFetch(status: number, body: unknown) {
  const calls: Recorded[] = [];
  const impl = (async (url: string | URL | Request, init?: RequestInit) => {
    calls.push({ url: String(url), init });
    return new Response(JSON.stringify(body), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  }) as typeof fetch;
  return { impl, calls };
}

describe("SessionClient", () => {
  it("opens sessions with the document text", async () => {
    const { impl, calls } = stubFetch(200, { session_id: "s1", version: 1 });
    const client = new SessionClient("http://svc", impl);
    const opened = await client.openSession("<p>hi</p>");
    expect(opened.session_id).toBe("s1");
    expect(calls[0].url).toBe("http://svc/sessions");
    expect(calls[0].init?.method).toBe("POST");
    expect(JSON.parse(String(calls[0].init?.body))).toEqual({ text: "<p>hi</p>" });
  });

  it("puts full-text edits and returns the new version", async () => {
    const { impl, calls } = stubFetch(200, { version: 4 });
    const client = new SessionClient("", impl);
    expect(await client.replaceText("s1", "<p></p>")).toBe(4);
    expect(calls[0].url).toBe("/sessions/s1/text");
    expect(calls[0].init?.method).toBe("PUT");
  });

  it("encodes completion coordinates in the query string", async () => {
    const { impl, calls } = stubFetch(200, {
      version: 1,
      target_kind: null,
      items: [],
      current_pattern: null,
    });
    const client = new SessionClient("", impl);
    await client.completions("s1", 12, 7);
    expect(calls[0].url).toBe("/sessions/s1/completions?line=12&col=7");
  });

  it("sends votes to the pattern endpoint", async () => {
    const { impl, calls } = stubFetch(200, { state: "blacklisted" });
    const client = new SessionClient("", impl);
    expect(await client.vote("s1", "abcd", "down")).toBe("blacklisted");
    expect(calls[0].url).toBe("/sessions/s1/patterns/abcd/vote");
    expect(JSON.parse(String(calls[0].init?.body))).toEqual({ direction: "down" });
  });

  it("surfaces service errors with status and detail", async () => {
    const { impl } = stubFetch(422, { detail: "at least one condition" });
    const client = new SessionClient("", impl);
    await expect(client.addPattern("s1", "tag", [], "x")).rejects.toMatchObject({
      status: 422,
      message: "at least one condition",
    });
    await expect(client.addPattern("s1", "tag", [], "x")).rejects.toBeInstanceOf(
      ApiError,
    );
  });

  it("posts imported pattern files unchanged", async () => {
    const { impl, calls } = stubFetch(200, { ok: true, version: 1 });
    const client = new SessionClient("", impl);
    const payload = { format_version: 1, prioritized: [], blacklisted: [] };
    await client.importPatterns("s1", payload);
    expect(JSON.parse(String(calls[0].init?.body))).toEqual(payload);
  });
});
