/** Mood Board panel: the central canvas rendered from the server board doc.
 *
 * Rendering is a pure projection of the board document; gestures report
 * intents upward and the canvas re-renders when authoritative state lands.
 * An in-flight drag shows as a CSS offset so dragging feels immediate
 * while the service stays the source of truth.
 */

import type { BoardDoc, ElementDoc, NodeDoc, PathDoc } from "../api.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface BoardCallbacks {
  onSelect(id: string | null): void;
}

function pathData(p: PathDoc): string {
  const parts: string[] = [];
  for (const sp of p.subpaths) {
    const pts = sp.slice();
    const [fx, fy] = pts[0];
    const last = pts[pts.length - 1];
    if (pts.length > 1 && last[0] === fx && last[1] === fy) pts.pop();
    parts.push(
      "M " + pts.map(([x, y]) => `${x} ${y}`).join(" L ") + " Z",
    );
  }
  return parts.join(" ");
}

function matrixAttr(m: number[][]): string {
  const [[a, c, e], [b, d, f]] = m;
  return `matrix(${a} ${b} ${c} ${d} ${e} ${f})`;
}

function elementPath(doc: Document, id: string, el: ElementDoc): SVGPathElement {
  const node = doc.createElementNS(SVG_NS, "path");
  node.setAttribute("data-id", id);
  const subpaths = el.path.subpaths.slice();
  for (const h of el.holes) subpaths.push(...h.path.subpaths);
  node.setAttribute(
    "d",
    pathData({ fill_rule: "evenodd", subpaths }),
  );
  node.setAttribute("fill", el.fill === "foreground" ? "#000000" : "none");
  node.setAttribute("fill-rule", "evenodd");
  node.setAttribute("transform", matrixAttr(el.transform));
  if (el.kind === "cutout") node.classList.add("cutout");
  if (el.provenance) node.dataset.provenance = el.provenance.source;
  return node;
}

function renderNode(
  doc: Document,
  board: BoardDoc,
  id: string,
  callbacks: BoardCallbacks,
): SVGElement {
  const n: NodeDoc = board.nodes[id];
  if (n.type === "group") {
    const g = doc.createElementNS(SVG_NS, "g");
    g.setAttribute("data-id", id);
    g.setAttribute("transform", matrixAttr(n.transform));
    for (const child of n.children) {
      g.appendChild(renderNode(doc, board, child, callbacks));
    }
    return g;
  }
  const p = elementPath(doc, id, n);
  p.addEventListener("click", (ev) => {
    ev.stopPropagation();
    callbacks.onSelect(id);
  });
  return p;
}

export function renderBoard(
  container: HTMLElement,
  board: BoardDoc,
  selected: string | null,
  callbacks: BoardCallbacks,
): SVGSVGElement {
  const doc = container.ownerDocument;
  container.textContent = "";
  const svg = doc.createElementNS(SVG_NS, "svg") as SVGSVGElement;
  svg.setAttribute("class", "board-canvas");
  svg.setAttribute("viewBox", `0 0 ${board.canvas[0]} ${board.canvas[1]}`);
  svg.addEventListener("click", () => callbacks.onSelect(null));
  for (const id of board.roots) {
    svg.appendChild(renderNode(doc, board, id, callbacks));
  }
  if (selected && board.nodes[selected]) {
    const el = svg.querySelector(`[data-id="${selected}"]`);
    el?.classList.add("selected");
  }
  container.appendChild(svg);
  return svg;
}

/** Optimistic preview: offset the selected node while its POST is in flight. */
export function previewDrag(
  container: HTMLElement,
  id: string,
  dx: number,
  dy: number,
): void {
  const el = container.querySelector<SVGElement>(`[data-id="${id}"]`);
  if (el) el.style.transform = `translate(${dx}px, ${dy}px)`;
}

export function clearPreview(container: HTMLElement, id: string): void {
  const el = container.querySelector<SVGElement>(`[data-id="${id}"]`);
  if (el) el.style.transform = "";
}

export interface ToolbarCallbacks {
  onAddSheet(): void;
  onDrag(dx: number, dy: number): void;
  onRotate(degrees: number): void;
  onFlip(axis: "h" | "v"): void;
  onDuplicate(): void;
  onGroup(): void;
  onUngroup(): void;
  onApplyCutout(): void;
  onUndo(): void;
  onExport(): void;
}

export function renderToolbar(
  container: HTMLElement,
  callbacks: ToolbarCallbacks,
): void {
  const doc = container.ownerDocument;
  container.textContent = "";
  const bar = doc.createElement("div");
  bar.className = "toolbar";
  const add = (cls: string, label: string, fn: () => void) => {
    const b = doc.createElement("button");
    b.className = cls;
    b.textContent = label;
    b.addEventListener("click", fn);
    bar.appendChild(b);
  };
  add("add-sheet", "add sheet", callbacks.onAddSheet);
  add("nudge-left", "◀", () => callbacks.onDrag(-10, 0));
  add("nudge-right", "▶", () => callbacks.onDrag(10, 0));
  add("nudge-up", "▲", () => callbacks.onDrag(0, -10));
  add("nudge-down", "▼", () => callbacks.onDrag(0, 10));
  add("rotate", "rotate 15", () => callbacks.onRotate(15));
  add("flip-h", "flip horizontal", () => callbacks.onFlip("h"));
  add("flip-v", "flip vertical", () => callbacks.onFlip("v"));
  add("duplicate", "duplicate", callbacks.onDuplicate);
  add("group", "group", callbacks.onGroup);
  add("ungroup", "ungroup", callbacks.onUngroup);
  add("apply-cutout", "apply cut-out", callbacks.onApplyCutout);
  add("undo", "undo", callbacks.onUndo);
  add("export", "export SVG", callbacks.onExport);
  container.appendChild(bar);
}
