/**
 * Typed client for the session service HTTP/JSON protocol.
 *
 * Every call maps 1:1 to an endpoint; no client-side reordering or caching
 * beyond the in-flight completion guard in the editor itself.
 */

export type TargetKind = "tag" | "attribute" | "value";

export interface WireSpan {
  start_line: number;
  start_col: number;
  end_line: number;
  end_col: number;
}

export interface WireCondition {
  key: "parent_tag" | "parent_attr" | "current_tag" | "preceding_attribute";
  attr_name?: string | null;
  value: string;
}

export interface WirePattern {
  id: string;
  kind: TargetKind;
  conditions: WireCondition[];
  target: string;
  state: "standard" | "prioritized" | "blacklisted";
  source: "learned" | "custom";
  support: number;
  confidence: number;
  description: string;
}

export interface CompletionItem {
  label: string;
  confidence: number;
  origin: "prioritized" | "learned";
  pattern_id: string | null;
}

export interface CompletionsResponse {
  version: number;
  target_kind: TargetKind | null;
  items: CompletionItem[];
  current_pattern: WirePattern | null;
}

export interface PatternGroup {
  conditions: WireCondition[];
  members: WirePattern[];
}

export interface PatternListing {
  version: number;
  kind: TargetKind;
  prioritized: WirePattern[];
  standard_groups: PatternGroup[];
  blacklisted: WirePattern[];
}

export interface InspectionSite {
  span: WireSpan;
  classification: "positive" | "similar" | "violation";
  pattern_id: string;
  witness: string;
}

export interface InspectionResponse {
  version: number;
  pattern_id: string;
  sites: InspectionSite[];
}

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
  }
}

async function expectJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = await response.json();
      if (body && typeof body.detail === "string") detail = body.detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return response.json() as Promise<T>;
}

export class SessionClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: typeof fetch = fetch.bind(globalThis),
  ) {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.fetchImpl(this.url(path), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    }).then((r) => expectJson<T>(r));
  }

  async openSession(text: string): Promise<{ session_id: string; version: number }> {
    return this.post("/sessions", { text });
  }

  async replaceText(sessionId: string, text: string): Promise<number> {
    const response = await this.fetchImpl(this.url(`/sessions/${sessionId}/text`), {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ text }),
    });
    const body = await expectJson<{ version: number }>(response);
    return body.version;
  }

  async completions(
    sessionId: string,
    line: number,
    col: number,
    signal?: AbortSignal,
  ): Promise<CompletionsResponse> {
    const response = await this.fetchImpl(
      this.url(`/sessions/${sessionId}/completions?line=${line}&col=${col}`),
      { signal },
    );
    return expectJson<CompletionsResponse>(response);
  }

  async patterns(sessionId: string, kind: TargetKind): Promise<PatternListing> {
    const response = await this.fetchImpl(
      this.url(`/sessions/${sessionId}/patterns?kind=${kind}`),
    );
    return expectJson<PatternListing>(response);
  }

  async addPattern(
    sessionId: string,
    kind: TargetKind,
    conditions: WireCondition[],
    target: string,
  ): Promise<WirePattern> {
    const body = await this.post<{ pattern: WirePattern }>(
      `/sessions/${sessionId}/patterns`,
      { kind, conditions, target },
    );
    return body.pattern;
  }

  async vote(
    sessionId: string,
    patternId: string,
    direction: "up" | "down",
  ): Promise<string> {
    const body = await this.post<{ state: string }>(
      `/sessions/${sessionId}/patterns/${patternId}/vote`,
      { direction },
    );
    return body.state;
  }

  async inspect(sessionId: string, patternId: string): Promise<InspectionResponse> {
    const response = await this.fetchImpl(
      this.url(`/sessions/${sessionId}/patterns/${patternId}/inspect`),
    );
    return expectJson<InspectionResponse>(response);
  }

  async exportPatterns(sessionId: string): Promise<unknown> {
    const response = await this.fetchImpl(
      this.url(`/sessions/${sessionId}/patterns/export`),
    );
    return expectJson<unknown>(response);
  }

  async importPatterns(sessionId: string, payload: unknown): Promise<void> {
    await this.post(`/sessions/${sessionId}/patterns/import`, payload);
  }
}
