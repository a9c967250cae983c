/** The three-panel studio layout.
 *
 * Idea prompting on the left, reference exploration on the right, and the
 * mood board always in the center slot; the layout builder is the only
 * place panels are created, so the arrangement cannot drift.
 */

export interface PanelLayout {
  root: HTMLElement;
  left: HTMLElement;
  center: HTMLElement;
  right: HTMLElement;
}

function panel(doc: Document, role: string, title: string): HTMLElement {
  const el = doc.createElement("section");
  el.className = `panel ${role}`;
  const h = doc.createElement("h2");
  h.textContent = title;
  el.appendChild(h);
  const body = doc.createElement("div");
  body.className = "panel-body";
  el.appendChild(body);
  return el;
}

export function buildLayout(doc: Document): PanelLayout {
  const root = doc.createElement("div");
  root.className = "studio three-panel";
  const left = panel(doc, "idea-prompting", "Idea Prompting");
  const center = panel(doc, "mood-board", "Mood Board");
  const right = panel(doc, "reference-exploration", "Reference Exploration");
  root.appendChild(left);
  root.appendChild(center);
  root.appendChild(right);
  return { root, left, center, right };
}

export function panelBody(p: HTMLElement): HTMLElement {
  const body = p.querySelector<HTMLElement>(".panel-body");
  if (!body) throw new Error("panel has no body");
  return body;
}

/** True iff the layout is three panels with the mood board in the middle. */
export function moodBoardIsCentral(root: HTMLElement): boolean {
  const panels = Array.from(root.children).filter((c) =>
    c.classList.contains("panel"),
  );
  return panels.length === 3 && panels[1].classList.contains("mood-board");
}
