/** Typed client for the studio service HTTP/JSON API.
 *
 * Every design-state mutation in the UI goes through this client; nothing
 * else touches the wire. The service is the single source of truth.
 */

export type FetchFn = typeof globalThis.fetch;

export interface PathDoc {
  fill_rule: string;
  subpaths: number[][][];
}

export interface ProvenanceDoc {
  source: "retrieved" | "generated" | "extracted";
  work_id: string | null;
  cutout_id: string | null;
}

export interface HoleDoc {
  id: string;
  transform: number[][];
  path: PathDoc;
  provenance: ProvenanceDoc | null;
}

export interface ElementDoc {
  type: "element";
  kind: "contour" | "cutout";
  fill: "foreground" | "hole";
  transform: number[][];
  path: PathDoc;
  provenance: ProvenanceDoc | null;
  holes: HoleDoc[];
}

export interface GroupDoc {
  type: "group";
  children: string[];
  transform: number[][];
}

export type NodeDoc = ElementDoc | GroupDoc;

export interface BoardDoc {
  canvas: [number, number];
  nodes: Record<string, NodeDoc>;
  roots: string[];
  next_id: number;
}

export interface SuggestionSet {
  objects: [string, string][];
  patterns: [string, string][];
  source: "provider" | "fallback";
}

export interface IdeaReply {
  text: string;
  accepted: string[];
}

export interface RetrievedRef {
  work_id: string;
  score: number;
  rank: number;
  image_ref: string;
  url: string;
}

export interface GeneratedRef {
  image_ref: string;
  url: string;
}

export interface ReferencesReply {
  retrieved?: RetrievedRef[];
  generated?: GeneratedRef[];
  generated_error?: string;
}

export interface SegmentReply {
  source: "provider" | "fallback";
  shape: [number, number];
  mask_png: string;
  path: PathDoc;
}

export interface BoardReply {
  version: number;
  board: BoardDoc;
  id?: string;
  group_id?: string;
  new_id?: string;
}

export interface SessionDoc {
  session_id: string;
  version: number;
  board: BoardDoc;
  [key: string]: unknown;
}

/** Non-2xx replies carry the service's one-field error envelope. */
export class ApiError extends Error {
  status: number;
  body: Record<string, unknown>;

  constructor(status: number, body: Record<string, unknown>) {
    super(typeof body.error === "string" ? body.error : `HTTP ${status}`);
    this.status = status;
    this.body = body;
  }

  /** Live board version echoed on stale-version conflicts. */
  get serverVersion(): number | null {
    return typeof this.body.version === "number" ? this.body.version : null;
  }
}

export class ApiClient {
  readonly baseUrl: string;
  private fetchFn: FetchFn;

  constructor(baseUrl: string, fetchFn?: FetchFn) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    const fn = fetchFn ?? globalThis.fetch;
    if (!fn) throw new Error("no fetch implementation available");
    this.fetchFn = fn.bind(globalThis);
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    query?: Record<string, string | number>,
  ): Promise<T> {
    let url = this.baseUrl + path;
    if (query && Object.keys(query).length > 0) {
      const qs = new URLSearchParams();
      for (const [k, v] of Object.entries(query)) qs.set(k, String(v));
      url += "?" + qs.toString();
    }
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
      init.headers = { "content-type": "application/json" };
    }
    const resp = await this.fetchFn(url, init);
    const data = (await resp.json()) as Record<string, unknown>;
    if (!resp.ok) throw new ApiError(resp.status, data);
    return data as T;
  }

  health(): Promise<{ status: string; offline: boolean; works: number }> {
    return this.request("GET", "/health");
  }

  createSession(canvas?: [number, number]): Promise<SessionDoc> {
    return this.request("POST", "/session", canvas ? { canvas } : {});
  }

  getSession(sid: string): Promise<SessionDoc> {
    return this.request("GET", `/session/${sid}`);
  }

  postIntent(
    sid: string,
    intentText: string,
    selections: Record<string, string>,
  ): Promise<SuggestionSet> {
    return this.request("POST", `/session/${sid}/intent`, {
      intent_text: intentText,
      selections,
    });
  }

  postIdea(sid: string, accepted: string[], text?: string): Promise<IdeaReply> {
    const body: Record<string, unknown> = { accepted };
    if (text !== undefined) body.text = text;
    return this.request("POST", `/session/${sid}/idea`, body);
  }

  references(
    sid: string,
    mode: "retrieved" | "generated" | "both",
    count?: number,
    suffix?: string,
  ): Promise<ReferencesReply> {
    const query: Record<string, string | number> = { mode };
    if (count !== undefined) query.count = count;
    if (suffix) query.suffix = suffix;
    return this.request("GET", `/session/${sid}/references`, undefined, query);
  }

  segment(
    sid: string,
    imageRef: string,
    fg: [number, number][],
    bg: [number, number][],
  ): Promise<SegmentReply> {
    return this.request("POST", `/session/${sid}/segment`, {
      image_ref: imageRef,
      fg_points: fg,
      bg_points: bg,
    });
  }

  boardOp(
    sid: string,
    verb: string,
    payload: Record<string, unknown>,
  ): Promise<BoardReply> {
    return this.request("POST", `/session/${sid}/board/${verb}`, payload);
  }

  undo(sid: string, version: number): Promise<BoardReply & { undone: boolean }> {
    return this.request("POST", `/session/${sid}/undo`, { version });
  }

  /** The cut-ready document, exactly as the service streams it. */
  async exportSvg(sid: string, scale = 1.0): Promise<Uint8Array> {
    const resp = await this.fetchFn(
      `${this.baseUrl}/session/${sid}/export.svg?scale=${scale}`,
    );
    if (!resp.ok) {
      const data = (await resp.json()) as Record<string, unknown>;
      throw new ApiError(resp.status, data);
    }
    return new Uint8Array(await resp.arrayBuffer());
  }
}
