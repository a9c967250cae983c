/** Reference Exploration panel: galleries, click prompts, mask preview. */

import type { ReferencesReply, SegmentReply } from "../api.js";
import type { ClickPrompt, PointLabel } from "../prompt.js";

export interface ReferenceCallbacks {
  onSelect(imageRef: string): void;
}

/** One gallery for both origins, each entry badged with where it came from. */
export function renderGallery(
  container: HTMLElement,
  refs: ReferencesReply,
  baseUrl: string,
  callbacks: ReferenceCallbacks,
): void {
  const doc = container.ownerDocument;
  container.textContent = "";
  const gallery = doc.createElement("div");
  gallery.className = "gallery";

  const entries: { ref: string; url: string; origin: string; label: string }[] =
    [];
  for (const r of refs.retrieved ?? []) {
    entries.push({
      ref: r.image_ref,
      url: r.url,
      origin: "retrieved",
      label: `#${r.rank} ${r.work_id}`,
    });
  }
  for (const g of refs.generated ?? []) {
    entries.push({ ref: g.image_ref, url: g.url, origin: "generated", label: g.image_ref });
  }

  for (const e of entries) {
    const fig = doc.createElement("figure");
    fig.className = "ref";
    fig.dataset.imageRef = e.ref;

    const img = doc.createElement("img");
    img.src = baseUrl + e.url;
    img.alt = e.label;
    fig.appendChild(img);

    const badge = doc.createElement("figcaption");
    badge.className = `origin origin-${e.origin}`;
    badge.textContent = e.origin;
    fig.appendChild(badge);

    fig.addEventListener("click", () => callbacks.onSelect(e.ref));
    gallery.appendChild(fig);
  }
  if (refs.generated_error) {
    const note = doc.createElement("p");
    note.className = "generation-note";
    note.textContent = `generation unavailable: ${refs.generated_error}`;
    gallery.appendChild(note);
  }
  container.appendChild(gallery);
}

export interface SegmentationCallbacks {
  onPoint(x: number, y: number, label: PointLabel): void;
  onSegment(): void;
  onExtract(): void;
}

/** The segmentation workspace for the selected reference. */
export function renderSegmentation(
  container: HTMLElement,
  prompt: ClickPrompt | null,
  result: SegmentReply | null,
  error: string | null,
  currentLabel: PointLabel,
  callbacks: SegmentationCallbacks & { onToggleLabel(): void },
): void {
  const doc = container.ownerDocument;
  container.textContent = "";
  if (!prompt) return;

  const stage = doc.createElement("div");
  stage.className = "seg-stage";
  stage.dataset.imageRef = prompt.imageRef;
  stage.addEventListener("click", (ev) => {
    const me = ev as MouseEvent;
    callbacks.onPoint(me.offsetX, me.offsetY, currentLabel);
  });

  for (const p of prompt.points) {
    const dot = doc.createElement("span");
    dot.className = `point point-${p.label}`;
    dot.style.left = `${p.x}px`;
    dot.style.top = `${p.y}px`;
    stage.appendChild(dot);
  }

  if (result) {
    const mask = doc.createElement("img");
    mask.className = "mask-preview";
    mask.src = `data:image/png;base64,${result.mask_png}`;
    stage.appendChild(mask);
  }
  container.appendChild(stage);

  if (error) {
    // a rejected point reads as feedback at the prompt, not a modal
    const msg = doc.createElement("p");
    msg.className = "point-error";
    msg.textContent = error;
    container.appendChild(msg);
  }

  const labelBtn = doc.createElement("button");
  labelBtn.className = "label-toggle";
  labelBtn.textContent = `clicks mark: ${currentLabel}`;
  labelBtn.addEventListener("click", callbacks.onToggleLabel);
  container.appendChild(labelBtn);

  const segBtn = doc.createElement("button");
  segBtn.className = "run-segment";
  segBtn.textContent = "Segment";
  segBtn.disabled = prompt.points.every((p) => p.label !== "fg");
  segBtn.addEventListener("click", callbacks.onSegment);
  container.appendChild(segBtn);

  const extractBtn = doc.createElement("button");
  extractBtn.className = "extract";
  extractBtn.textContent = "Extract to board";
  extractBtn.disabled = !result;
  extractBtn.addEventListener("click", callbacks.onExtract);
  container.appendChild(extractBtn);
}
