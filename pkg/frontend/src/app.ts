/** The studio application: state, service sync, and panel wiring.
 *
 * Design state lives on the service; this class holds the latest fetched
 * copy plus transient UI state (selection, click prompt, accepted cards).
 * Every mutation is a POST; a stale-version conflict refetches the
 * authoritative state and replays the one pending operation, never merges.
 */

import {
  ApiClient,
  ApiError,
  type BoardReply,
  type PathDoc,
  type ReferencesReply,
  type SegmentReply,
  type SessionDoc,
  type SuggestionSet,
} from "./api.js";
import { FACTOR_NAMES, FACTOR_TYPES } from "./factors.js";
import { buildLayout, panelBody, type PanelLayout } from "./layout.js";
import {
  addPoint,
  newPrompt,
  splitPoints,
  type ClickPrompt,
  type PointLabel,
} from "./prompt.js";
import { renderIdeaEditor, renderSuggestions } from "./panels/idea.js";
import {
  clearPreview,
  previewDrag,
  renderBoard,
  renderToolbar,
} from "./panels/board.js";
import { renderGallery, renderSegmentation } from "./panels/references.js";

export class StudioApp {
  readonly api: ApiClient;
  readonly layout: PanelLayout;
  sid = "";
  version = 0;
  board: SessionDoc["board"] | null = null;
  suggestions: SuggestionSet | null = null;
  accepted: string[] = [];
  ideaText = "";
  refs: ReferencesReply | null = null;
  prompt: ClickPrompt | null = null;
  segResult: SegmentReply | null = null;
  segError: string | null = null;
  currentLabel: PointLabel = "fg";
  selection: string[] = [];
  lastExport: Uint8Array | null = null;
  toasts: string[] = [];

  private doc: Document;
  private boardMount: HTMLElement;
  private toolbarMount: HTMLElement;
  private suggestionsMount: HTMLElement;
  private ideaMount: HTMLElement;
  private galleryMount: HTMLElement;
  private segMount: HTMLElement;

  constructor(root: HTMLElement, api: ApiClient) {
    this.api = api;
    this.doc = root.ownerDocument;
    this.layout = buildLayout(this.doc);
    root.appendChild(this.layout.root);

    const left = panelBody(this.layout.left);
    this.buildIntentForm(left);
    this.suggestionsMount = this.mount(left, "suggestions");
    this.ideaMount = this.mount(left, "idea");

    const center = panelBody(this.layout.center);
    this.toolbarMount = this.mount(center, "toolbar-mount");
    this.boardMount = this.mount(center, "board-mount");

    const right = panelBody(this.layout.right);
    this.galleryMount = this.mount(right, "gallery-mount");
    this.segMount = this.mount(right, "seg-mount");
  }

  private mount(parent: HTMLElement, cls: string): HTMLElement {
    const el = this.doc.createElement("div");
    el.className = cls;
    parent.appendChild(el);
    return el;
  }

  private buildIntentForm(parent: HTMLElement): void {
    const form = this.doc.createElement("div");
    form.className = "intent-form";
    const text = this.doc.createElement("textarea");
    text.className = "intent-text";
    text.placeholder = "Describe what the cut should express";
    form.appendChild(text);
    for (const factor of FACTOR_NAMES) {
      const select = this.doc.createElement("select");
      select.className = "factor-select";
      select.dataset.factor = factor;
      const none = this.doc.createElement("option");
      none.value = "";
      none.textContent = factor;
      select.appendChild(none);
      for (const t of FACTOR_TYPES[factor]) {
        const opt = this.doc.createElement("option");
        opt.value = t;
        opt.textContent = t;
        select.appendChild(opt);
      }
      form.appendChild(select);
    }
    const btn = this.doc.createElement("button");
    btn.className = "submit-intent";
    btn.textContent = "Suggest";
    btn.addEventListener("click", () => {
      void this.submitIntent(text.value, this.pickedSelections());
    });
    form.appendChild(btn);
    parent.appendChild(form);
  }

  pickedSelections(): Record<string, string> {
    const out: Record<string, string> = {};
    for (const sel of this.layout.left.querySelectorAll<HTMLSelectElement>(
      "select.factor-select",
    )) {
      if (sel.value) out[sel.dataset.factor as string] = sel.value;
    }
    return out;
  }

  toast(message: string): void {
    this.toasts.push(message);
    const el = this.doc.createElement("div");
    el.className = "toast";
    el.textContent = message;
    this.layout.root.appendChild(el);
  }

  async init(canvas?: [number, number]): Promise<void> {
    const session = await this.api.createSession(canvas);
    this.sid = session.session_id;
    this.version = session.version;
    this.board = session.board;
    this.renderAll();
  }

  /** Join an existing session, as a reopened tab does. */
  async attach(sid: string): Promise<void> {
    this.sid = sid;
    await this.reload();
  }

  /** Rebuild all state from the service; the reload invariant in one call. */
  async reload(): Promise<void> {
    const session = await this.api.getSession(this.sid);
    this.version = session.version;
    this.board = session.board;
    this.selection = this.selection.filter((id) => id in session.board.nodes);
    this.renderAll();
  }

  // ------------------------------------------------------------ ideation

  async submitIntent(
    text: string,
    selections: Record<string, string>,
  ): Promise<void> {
    try {
      this.suggestions = await this.api.postIntent(this.sid, text, selections);
    } catch (err) {
      this.suggestions = null;
      this.toast(err instanceof Error ? err.message : String(err));
    }
    this.accepted = [];
    this.renderAll();
  }

  async acceptSuggestions(names: string[]): Promise<void> {
    this.accepted = names;
    if (names.length === 0) return;
    const idea = await this.api.postIdea(this.sid, names);
    this.ideaText = idea.text;
    this.renderAll();
  }

  async editIdea(text: string): Promise<void> {
    const idea = await this.api.postIdea(this.sid, this.accepted, text);
    this.ideaText = idea.text;
    this.renderAll();
  }

  // ---------------------------------------------------------- references

  async loadReferences(
    mode: "retrieved" | "generated" | "both" = "retrieved",
  ): Promise<void> {
    this.refs = await this.api.references(this.sid, mode);
    this.renderAll();
  }

  selectReference(imageRef: string): void {
    this.prompt = newPrompt(imageRef);
    this.segResult = null;
    this.segError = null;
    this.renderAll();
  }

  addPromptPoint(x: number, y: number, label?: PointLabel): void {
    if (!this.prompt) throw new Error("no reference selected");
    this.prompt = addPoint(this.prompt, x, y, label ?? this.currentLabel);
    this.renderAll();
  }

  toggleCurrentLabel(): void {
    this.currentLabel = this.currentLabel === "fg" ? "bg" : "fg";
    this.renderAll();
  }

  async runSegment(): Promise<void> {
    if (!this.prompt) throw new Error("no reference selected");
    const { fg, bg } = splitPoints(this.prompt);
    try {
      this.segResult = await this.api.segment(this.sid, this.prompt.imageRef, fg, bg);
      this.segError = null;
    } catch (err) {
      this.segResult = null;
      this.segError = err instanceof Error ? err.message : String(err);
    }
    this.renderAll();
  }

  /** Add the segmented outline to the board as an extracted cut-out. */
  async extractToBoard(): Promise<string> {
    if (!this.prompt || !this.segResult || !this.board) {
      throw new Error("segment a reference first");
    }
    let n = 1;
    while (`cut${n}` in this.board.nodes) n += 1;
    const id = `cut${n}`;
    const ref = this.prompt.imageRef;
    await this.mutate("add", {
      id,
      element: {
        path: this.segResult.path satisfies PathDoc,
        kind: "cutout",
        fill: "hole",
        provenance: {
          source: "extracted",
          work_id: ref.startsWith("gen:") ? null : ref,
          cutout_id: null,
        },
      },
    });
    return id;
  }

  // --------------------------------------------------------------- board

  /** A plain backing sheet to cut into, inset a little from the canvas. */
  async addSheet(): Promise<string> {
    if (!this.board) throw new Error("no board yet");
    let n = 1;
    while (`sheet${n}` in this.board.nodes) n += 1;
    const id = `sheet${n}`;
    const [w, h] = this.board.canvas;
    const m = Math.min(w, h) * 0.05;
    await this.mutate("add", {
      id,
      element: {
        path: {
          fill_rule: "evenodd",
          subpaths: [
            [
              [m, m],
              [w - m, m],
              [w - m, h - m],
              [m, h - m],
              [m, m],
            ],
          ],
        },
      },
    });
    return id;
  }

  select(id: string | null, extend = false): void {
    if (id === null) this.selection = [];
    else if (extend && !this.selection.includes(id)) this.selection.push(id);
    else this.selection = [id];
    this.renderAll();
  }

  /** One board mutation with optimistic concurrency.
   *
   * On a stale-version conflict the app refetches the authoritative board
   * and replays this operation once on top of it.
   */
  async mutate(verb: string, payload: Record<string, unknown>): Promise<BoardReply> {
    try {
      const reply = await this.api.boardOp(this.sid, verb, {
        ...payload,
        version: this.version,
      });
      this.accept(reply);
      return reply;
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        await this.reload();
        const reply = await this.api.boardOp(this.sid, verb, {
          ...payload,
          version: this.version,
        });
        this.accept(reply);
        return reply;
      }
      this.toast(err instanceof Error ? err.message : String(err));
      await this.reload();
      throw err;
    }
  }

  private accept(reply: BoardReply): void {
    this.version = reply.version;
    this.board = reply.board;
    this.renderAll();
  }

  private sole(): string {
    if (this.selection.length !== 1) throw new Error("select one element first");
    return this.selection[0];
  }

  async dragSelected(dx: number, dy: number): Promise<void> {
    const id = this.sole();
    previewDrag(this.boardMount, id, dx, dy);
    try {
      await this.mutate("transform", {
        id,
        name: "translate",
        params: { dx, dy },
      });
    } finally {
      clearPreview(this.boardMount, id);
    }
  }

  async rotateSelected(degrees: number): Promise<void> {
    await this.mutate("transform", {
      id: this.sole(),
      name: "rotate",
      params: { degrees },
    });
  }

  async flipSelected(axis: "h" | "v"): Promise<void> {
    await this.mutate("transform", {
      id: this.sole(),
      name: axis === "h" ? "flip_h" : "flip_v",
      params: {},
    });
  }

  async duplicateSelected(): Promise<string> {
    const reply = await this.mutate("duplicate", { id: this.sole() });
    return reply.new_id as string;
  }

  async groupSelection(): Promise<string> {
    if (this.selection.length < 2) throw new Error("select two or more elements");
    const reply = await this.mutate("group", { ids: [...this.selection] });
    this.selection = [reply.group_id as string];
    this.renderAll();
    return reply.group_id as string;
  }

  async ungroupSelected(): Promise<void> {
    await this.mutate("ungroup", { id: this.sole() });
    this.selection = [];
    this.renderAll();
  }

  async applyCutout(cutoutId: string, targetId: string): Promise<void> {
    await this.mutate("apply-cutout", {
      cutout_id: cutoutId,
      target_id: targetId,
    });
  }

  async undo(): Promise<void> {
    const reply = await this.api.undo(this.sid, this.version);
    this.accept(reply);
  }

  /** Download the export; the bytes come straight from the service. */
  async downloadExport(): Promise<Uint8Array> {
    const bytes = await this.api.exportSvg(this.sid);
    this.lastExport = bytes;
    const win = this.doc.defaultView as
      | (Window & { URL?: typeof URL })
      | null;
    if (win?.URL && typeof win.URL.createObjectURL === "function") {
      const blob = new Blob([bytes.buffer as ArrayBuffer], { type: "image/svg+xml" });
      const a = this.doc.createElement("a");
      a.href = win.URL.createObjectURL(blob);
      a.download = `${this.sid}.svg`;
      a.click();
      win.URL.revokeObjectURL(a.href);
    }
    return bytes;
  }

  // ------------------------------------------------------------- render

  renderAll(): void {
    renderSuggestions(
      this.suggestionsMount,
      this.suggestions,
      { onAccept: (names) => void this.acceptSuggestions(names) },
      this.accepted,
    );
    renderIdeaEditor(this.ideaMount, this.ideaText, (t) => void this.editIdea(t));

    renderToolbar(this.toolbarMount, {
      onAddSheet: () => void this.addSheet(),
      onDrag: (dx, dy) => void this.dragSelected(dx, dy),
      onRotate: (deg) => void this.rotateSelected(deg),
      onFlip: (axis) => void this.flipSelected(axis),
      onDuplicate: () => void this.duplicateSelected(),
      onGroup: () => void this.groupSelection(),
      onUngroup: () => void this.ungroupSelected(),
      onApplyCutout: () => {
        const [cut, target] = this.selection;
        if (cut && target) void this.applyCutout(cut, target);
      },
      onUndo: () => void this.undo(),
      onExport: () => void this.downloadExport(),
    });
    if (this.board) {
      renderBoard(this.boardMount, this.board, this.selection[0] ?? null, {
        onSelect: (id) => this.select(id),
      });
    }

    if (this.refs) {
      renderGallery(this.galleryMount, this.refs, this.api.baseUrl, {
        onSelect: (ref) => this.selectReference(ref),
      });
    }
    renderSegmentation(
      this.segMount,
      this.prompt,
      this.segResult,
      this.segError,
      this.currentLabel,
      {
        onPoint: (x, y, label) => this.addPromptPoint(x, y, label),
        onSegment: () => void this.runSegment(),
        onExtract: () => void this.extractToBoard(),
        onToggleLabel: () => this.toggleCurrentLabel(),
      },
    );
  }
}
