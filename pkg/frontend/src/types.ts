/** Wire types mirroring the service's turn JSON contract. */

export interface Candidate {
  vertex_id: string;
  display_name: string;
  score: number;
}

export interface ValidationIssue {
  kind: string;
  message: string;
  location: number | null;
  offset: number | null;
}

export interface ScriptAttempt {
  script: string;
  issues: ValidationIssue[];
}

export interface MaskedQuery {
  masked_text: string;
  mentions: { surface: string; span: number[]; resolved_vertex: string | null }[];
}

export interface TurnResponse {
  trace_id: string;
  user_text: string;
  rewritten_text: string;
  decision: string;
  masked: MaskedQuery | null;
  examples_used: { id: string; score: number }[];
  script_attempts: ScriptAttempt[];
  final_script: string | null;
  result: unknown[] | null;
  candidates: Candidate[];
  error: string | null;
  answer_text: string;
  latency_ms: number;
  truncated?: boolean;
}

export interface ApiErrorBody {
  error: { code: string; message: string };
}

export interface Overrides {
  strategy?: string;
  k?: number;
}

export const STRATEGIES = ["raw_match", "eval_mask", "rep_mask", "full_mask"] as const;
