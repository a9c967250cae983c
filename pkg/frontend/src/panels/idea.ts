/** Idea Prompting panel: factor pickers, suggestion cards, idea editor. */

import type { SuggestionSet } from "../api.js";

export interface IdeaCallbacks {
  onAccept(names: string[]): void;
}

const EMPTY_HINT =
  "No suggestions yet. Describe your intent, pick factor types, and ask for proposals.";

function card(
  doc: Document,
  name: string,
  meaning: string,
  kind: "object" | "pattern",
  accepted: boolean,
  onToggle: (name: string, on: boolean) => void,
): HTMLElement {
  const el = doc.createElement("article");
  el.className = `card ${kind}-card`;
  el.dataset.name = name;

  const title = doc.createElement("h3");
  title.className = "card-name";
  title.textContent = name;
  el.appendChild(title);

  const body = doc.createElement("p");
  body.className = "card-meaning";
  body.textContent = meaning;
  el.appendChild(body);

  const btn = doc.createElement("button");
  btn.className = "accept";
  el.classList.toggle("accepted", accepted);
  btn.textContent = accepted ? "Accepted" : "Accept";
  btn.addEventListener("click", () => {
    const on = !el.classList.contains("accepted");
    el.classList.toggle("accepted", on);
    btn.textContent = on ? "Accepted" : "Accept";
    onToggle(name, on);
  });
  el.appendChild(btn);
  return el;
}

/** Render suggestion cards; accepting cards reports the accepted set.
 *
 * `alreadyAccepted` survives re-renders, so acceptance accumulates across
 * the round trips each acceptance triggers.
 */
export function renderSuggestions(
  container: HTMLElement,
  set: SuggestionSet | null,
  callbacks: IdeaCallbacks,
  alreadyAccepted: readonly string[] = [],
): void {
  const doc = container.ownerDocument;
  container.textContent = "";

  const empty =
    !set || (set.objects.length === 0 && set.patterns.length === 0);
  if (empty) {
    const hint = doc.createElement("p");
    hint.className = "hint";
    hint.textContent = EMPTY_HINT;
    container.appendChild(hint);
    return;
  }

  if (set.source === "fallback") {
    const badge = doc.createElement("span");
    badge.className = "source-badge";
    badge.textContent = "offline suggestions";
    container.appendChild(badge);
  }

  const named = new Set(
    [...set.objects, ...set.patterns].map(([name]) => name),
  );
  const accepted = new Set(alreadyAccepted.filter((n) => named.has(n)));
  const toggle = (name: string, on: boolean) => {
    if (on) accepted.add(name);
    else accepted.delete(name);
    callbacks.onAccept([...accepted]);
  };

  for (const [group, kind] of [
    [set.objects, "object"],
    [set.patterns, "pattern"],
  ] as const) {
    const wrap = doc.createElement("div");
    wrap.className = `cards ${kind}-cards`;
    for (const [name, meaning] of group) {
      wrap.appendChild(card(doc, name, meaning, kind, accepted.has(name), toggle));
    }
    container.appendChild(wrap);
  }
}

/** The editable composed idea; edits go back through the service. */
export function renderIdeaEditor(
  container: HTMLElement,
  text: string,
  onEdit: (text: string) => void,
): HTMLTextAreaElement {
  const doc = container.ownerDocument;
  let area = container.querySelector<HTMLTextAreaElement>("textarea.idea-text");
  if (!area) {
    area = doc.createElement("textarea");
    area.className = "idea-text";
    area.addEventListener("change", () => onEdit(area!.value));
    container.appendChild(area);
  }
  area.value = text;
  return area;
}
