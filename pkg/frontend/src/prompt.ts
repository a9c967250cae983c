/** Click prompts for segmentation: labeled points on a reference image. */

export const POINT_LABELS = ["fg", "bg"] as const;

export type PointLabel = (typeof POINT_LABELS)[number];

export interface PromptPoint {
  x: number;
  y: number;
  label: PointLabel;
}

export interface ClickPrompt {
  imageRef: string;
  points: PromptPoint[];
}

export function newPrompt(imageRef: string): ClickPrompt {
  if (!imageRef) throw new Error("a click prompt needs an image reference");
  return { imageRef, points: [] };
}

/** Exactly two label classes exist; anything else is a caller bug. */
export function addPoint(
  prompt: ClickPrompt,
  x: number,
  y: number,
  label: PointLabel,
): ClickPrompt {
  if (!POINT_LABELS.includes(label)) {
    throw new Error(`point label must be one of ${POINT_LABELS.join(", ")}`);
  }
  if (!Number.isFinite(x) || !Number.isFinite(y)) {
    throw new Error("point coordinates must be finite");
  }
  return { ...prompt, points: [...prompt.points, { x, y, label }] };
}

/** Clicking a placed point again flips it to the other class. */
export function toggleLabel(prompt: ClickPrompt, index: number): ClickPrompt {
  const p = prompt.points[index];
  if (!p) throw new Error(`no point at index ${index}`);
  const flipped: PromptPoint = { ...p, label: p.label === "fg" ? "bg" : "fg" };
  const points = prompt.points.slice();
  points[index] = flipped;
  return { ...prompt, points };
}

export function removePoint(prompt: ClickPrompt, index: number): ClickPrompt {
  if (!prompt.points[index]) throw new Error(`no point at index ${index}`);
  return { ...prompt, points: prompt.points.filter((_, i) => i !== index) };
}

/** Split into the two coordinate lists the segment endpoint takes. */
export function splitPoints(prompt: ClickPrompt): {
  fg: [number, number][];
  bg: [number, number][];
} {
  const fg: [number, number][] = [];
  const bg: [number, number][] = [];
  for (const p of prompt.points) {
    (p.label === "fg" ? fg : bg).push([Math.round(p.x), Math.round(p.y)]);
  }
  return { fg, bg };
}
