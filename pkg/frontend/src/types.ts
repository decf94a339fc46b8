/** Wire types for the /v1 ranking service. */

export type Outcome = "left_first" | "right_first" | "equal";

export interface ItemView {
  id: string;
  display_ref: string;
  image_url: string;
}

export interface RequestView {
  request_id: number;
  left: ItemView;
  right: ItemView;
  uncertainty: number;
  theta: number;
}

export type NextResponse =
  | { done: false; request: RequestView }
  | { done: true; ranking_url: string };

export interface SessionStats {
  session_id: string;
  status: "active" | "completed";
  item_count: number;
  human_count: number;
  auto_count: number;
  comparisons_done: number;
  comparisons_total_estimate: number;
  progress: number;
  theta: number;
  accuracy: number;
  cycle: number;
  pending_request_id: number | null;
}

export interface RankingRow {
  rank: number;
  id: string;
  display_ref: string;
  rating: number;
  bucket: number;
}

export interface RankingResponse {
  session_id: string;
  ranking: RankingRow[];
}

export interface SubmitResponse {
  ok: boolean;
  stats: SessionStats;
}

/** Uniform error envelope the service returns on 4xx. */
export interface ErrorEnvelope {
  code: string;
  message: string;
  details: Record<string, unknown>;
}
