/**
 * Chat view model: a pure projection of the message history and the API
 * responses seen so far. Replaying the same recorded events always rebuilds
 * the exact same model; nothing here recomputes masking, scoring, or
 * validation — server results are only displayed.
 */

import type { Candidate, Overrides, TurnResponse } from "./types.js";
import { STRATEGIES } from "./types.js";

export interface Message {
  role: "user" | "agent" | "system";
  text: string;
  traceId?: string;
}

export interface ScriptPanel {
  maskedText: string | null;
  examplesUsed: { id: string; score: number }[];
  attempts: { script: string; issues: string[] }[];
  finalScript: string | null;
  resultRows: unknown[];
  truncated: boolean;
}

export interface ViewModel {
  sessionId: string | null;
  messages: Message[];
  pendingCandidates: Candidate[] | null;
  overrides: Overrides;
  inFlight: boolean;
  notice: string | null;
  panel: ScriptPanel | null;
}

export function initialModel(): ViewModel {
  return {
    sessionId: null,
    messages: [],
    pendingCandidates: null,
    overrides: {},
    inFlight: false,
    notice: null,
    panel: null,
  };
}

export type Event =
  | { kind: "session"; sessionId: string }
  | { kind: "user_message"; text: string }
  | { kind: "turn"; turn: TurnResponse }
  | { kind: "api_error"; status: number; message: string }
  | { kind: "set_overrides"; strategy?: string; k?: number };

function panelFrom(turn: TurnResponse): ScriptPanel | null {
  if (!turn.final_script && turn.script_attempts.length === 0 && !turn.masked) {
    return null;
  }
  return {
    maskedText: turn.masked ? turn.masked.masked_text : null,
    examplesUsed: turn.examples_used,
    attempts: turn.script_attempts.map((attempt) => ({
      script: attempt.script,
      issues: attempt.issues.map((issue) => `${issue.kind}: ${issue.message}`),
    })),
    finalScript: turn.final_script,
    resultRows: turn.result ?? [],
    truncated: turn.truncated ?? false,
  };
}

export function apply(model: ViewModel, event: Event): ViewModel {
  switch (event.kind) {
    case "session":
      return { ...initialModel(), sessionId: event.sessionId, overrides: model.overrides };
    case "user_message":
      return {
        ...model,
        inFlight: true,
        notice: null,
        messages: [...model.messages, { role: "user", text: event.text }],
      };
    case "turn": {
      const turn = event.turn;
      return {
        ...model,
        inFlight: false,
        notice: null,
        messages: [
          ...model.messages,
          { role: "agent", text: turn.answer_text, traceId: turn.trace_id },
        ],
        // picker visible iff the turn asks for clarification
        pendingCandidates:
          turn.decision === "needs_clarification" && turn.candidates.length > 0
            ? turn.candidates
            : null,
        panel: panelFrom(turn),
      };
    }
    case "api_error":
      return {
        ...model,
        inFlight: false,
        notice: `request failed (${event.status}): ${event.message}`,
        messages: [
          ...model.messages,
          { role: "system", text: `request failed (${event.status}): ${event.message}` },
        ],
      };
    case "set_overrides": {
      const next: Overrides = {};
      if (event.strategy !== undefined) {
        if (!(STRATEGIES as readonly string[]).includes(event.strategy)) {
          return { ...model, notice: `unknown strategy: ${event.strategy}` };
        }
        next.strategy = event.strategy;
      }
      if (event.k !== undefined) {
        if (!Number.isInteger(event.k) || event.k < 1) {
          return { ...model, notice: "k must be a positive integer" };
        }
        next.k = event.k;
      }
      return { ...model, overrides: { ...model.overrides, ...next }, notice: null };
    }
  }
}

export function replay(events: Event[]): ViewModel {
  return events.reduce(apply, initialModel());
}

/** Overrides payload for the next message; null when nothing was toggled. */
export function overridesPayload(model: ViewModel): Overrides | null {
  return Object.keys(model.overrides).length > 0 ? model.overrides : null;
}

export function pickerVisible(model: ViewModel): boolean {
  return model.pendingCandidates !== null && model.pendingCandidates.length > 0;
}
