import type { TurnResponse } from "../src/types.js";

export function makeTurn(partial: Partial<TurnResponse>): TurnResponse {
  return {
    trace_id: "trace-1",
    user_text: "",
    rewritten_text: "",
    decision: "answerable",
    masked: null,
    examples_used: [],
    script_attempts: [],
    final_script: null,
    result: null,
    candidates: [],
    error: null,
    answer_text: "",
    latency_ms: 1.0,
    ...partial,
  };
}

/** A recorded two-step disambiguation exchange, as returned by the service. */
export const clarificationTurn = makeTurn({
  trace_id: "trace-clarify",
  user_text: "What is the postal code of Acme?",
  rewritten_text: "What is the postal code of Acme?",
  decision: "needs_clarification",
  masked: {
    masked_text: "What is the postal code of [COMPANY]?",
    mentions: [{ surface: "Acme", span: [27, 31], resolved_vertex: null }],
  },
  candidates: [
    { vertex_id: "c06", display_name: "Acme (Beijing)", score: 1.0 },
    { vertex_id: "c07", display_name: "ACME (Shanghai)", score: 1.0 },
  ],
  answer_text: "Which one do you mean: 1. Acme (Beijing); 2. ACME (Shanghai)?",
});

export const resolvedTurn = makeTurn({
  trace_id: "trace-resolved",
  user_text: "(selected: Acme (Beijing))",
  rewritten_text: "What is the postal code of Acme?",
  decision: "answerable",
  masked: {
    masked_text: "What is the postal code of [COMPANY]?",
    mentions: [{ surface: "Acme", span: [27, 31], resolved_vertex: "c06" }],
  },
  examples_used: [
    { id: "s24", score: 1.0 },
    { id: "s14", score: 0.8123 },
  ],
  script_attempts: [{ script: "g.V().has('company','name','Acme').values('postalCode')", issues: [] }],
  final_script: "g.V().has('company','name','Acme').values('postalCode')",
  result: ["100080"],
  answer_text: "The postal code of Acme is 100080.",
});

export const offTopicTurn = makeTurn({
  trace_id: "trace-offtopic",
  user_text: "What's the weather like?",
  decision: "off_topic",
  answer_text: "I can only help with questions about the companies and people in the enterprise knowledge graph.",
});
