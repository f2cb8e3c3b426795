/** DOM rendering: the document is rebuilt from the view model on every
 * change, so what is on screen is exactly what the model says. */

import type { ViewModel } from "./state.js";
import { pickerVisible } from "./state.js";

export interface Handlers {
  onSend(text: string): void;
  onConfirm(candidateId: string): void;
  onStrategyChange(strategy: string): void;
  onKChange(k: number): void;
}

function el(tag: string, className: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function renderMessages(model: ViewModel): HTMLElement {
  const wrap = el("div", "messages");
  for (const message of model.messages) {
    const bubble = el("div", `bubble ${message.role}`, message.text);
    if (message.traceId) {
      bubble.dataset.traceId = message.traceId;
    }
    wrap.appendChild(bubble);
  }
  return wrap;
}

function renderPicker(model: ViewModel, handlers: Handlers): HTMLElement | null {
  if (!pickerVisible(model)) {
    return null;
  }
  const wrap = el("div", "candidate-picker");
  wrap.appendChild(el("div", "picker-title", "Which one do you mean?"));
  for (const candidate of model.pendingCandidates ?? []) {
    const button = el("button", "candidate", candidate.display_name) as HTMLButtonElement;
    button.dataset.vertexId = candidate.vertex_id;
    button.addEventListener("click", () => handlers.onConfirm(candidate.vertex_id));
    wrap.appendChild(button);
  }
  return wrap;
}

function renderPanel(model: ViewModel): HTMLElement {
  const wrap = el("details", "script-panel");
  wrap.appendChild(el("summary", "panel-title", "Turn inspector"));
  const panel = model.panel;
  if (!panel) {
    wrap.appendChild(el("div", "panel-empty", "no script for this turn"));
    return wrap;
  }
  if (panel.maskedText !== null) {
    wrap.appendChild(el("div", "masked", `masked: ${panel.maskedText}`));
  }
  if (panel.examplesUsed.length > 0) {
    const list = el("ul", "examples");
    for (const example of panel.examplesUsed) {
      list.appendChild(el("li", "example", `${example.id} (${example.score.toFixed(4)})`));
    }
    wrap.appendChild(list);
  }
  for (const attempt of panel.attempts) {
    const attemptEl = el("div", attempt.issues.length ? "attempt failed" : "attempt ok");
    attemptEl.appendChild(el("code", "script", attempt.script));
    for (const issue of attempt.issues) {
      attemptEl.appendChild(el("div", "issue", issue));
    }
    wrap.appendChild(attemptEl);
  }
  if (panel.finalScript) {
    const final = el("div", "final-script");
    final.appendChild(el("code", "script", panel.finalScript));
    wrap.appendChild(final);
  }
  if (panel.resultRows.length > 0) {
    const table = el("pre", "result-table", JSON.stringify(panel.resultRows, null, 2));
    wrap.appendChild(table);
    if (panel.truncated) {
      wrap.appendChild(el("div", "truncated", "results truncated"));
    }
  }
  return wrap;
}

function renderControls(model: ViewModel, handlers: Handlers): HTMLElement {
  const wrap = el("div", "controls");
  const strategy = el("select", "strategy-select") as HTMLSelectElement;
  for (const name of ["full_mask", "rep_mask", "eval_mask", "raw_match"]) {
    const option = document.createElement("option");
    option.value = name;
    option.textContent = name;
    strategy.appendChild(option);
  }
  strategy.value = model.overrides.strategy ?? "full_mask";
  strategy.addEventListener("change", () => handlers.onStrategyChange(strategy.value));
  wrap.appendChild(strategy);

  const k = el("input", "k-input") as HTMLInputElement;
  k.type = "number";
  k.min = "1";
  k.value = String(model.overrides.k ?? 5);
  k.addEventListener("change", () => handlers.onKChange(Number(k.value)));
  wrap.appendChild(k);
  return wrap;
}

function renderComposer(model: ViewModel, handlers: Handlers): HTMLElement {
  const wrap = el("form", "composer");
  const input = el("input", "composer-input") as HTMLInputElement;
  input.type = "text";
  input.placeholder = "Ask about a company...";
  input.disabled = model.inFlight;
  const send = el("button", "send", "Send") as HTMLButtonElement;
  send.type = "submit";
  send.disabled = model.inFlight;
  wrap.addEventListener("submit", (event) => {
    event.preventDefault();
    if (input.value.trim() && !model.inFlight) {
      handlers.onSend(input.value.trim());
    }
  });
  wrap.appendChild(input);
  wrap.appendChild(send);
  return wrap;
}

export function render(root: HTMLElement, model: ViewModel, handlers: Handlers): void {
  root.textContent = "";
  root.appendChild(renderControls(model, handlers));
  root.appendChild(renderMessages(model));
  if (model.notice) {
    root.appendChild(el("div", "notice", model.notice));
  }
  const picker = renderPicker(model, handlers);
  if (picker) {
    root.appendChild(picker);
  }
  root.appendChild(renderPanel(model));
  root.appendChild(renderComposer(model, handlers));
}
