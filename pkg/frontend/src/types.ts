/** Wire types for the /v1 service. Field names mirror the server payloads
 * exactly; nothing here is recomputed client-side. */

export interface PlayerRecord {
  player_id: string;
  name: string;
  team: string;
  position: string;
  age: number;
  seasons_pro: number;
  height_cm: number;
  weight_kg: number;
}

export interface PlayersPayload {
  snapshot_version: string;
  players: PlayerRecord[];
}

export interface HealthPayload {
  status: string;
  snapshot_version: string;
}

export interface StateProbabilities {
  boom: number;
  bust: number;
  injury: number;
  meaningful: number;
}

export interface FitPayload {
  family: string;
  params: number[];
  loss: number;
  converged: boolean;
  n: number;
}

export interface EvidenceItemPayload {
  doc_id: string;
  title: string;
  source_kind: string;
  relevance: number;
  stance: "support" | "refute";
  neutral_tone: boolean;
}

export interface InsightPayload {
  player_id: string;
  week: number;
  probabilities: StateProbabilities | null;
  combined_projection: number;
  fit: FitPayload | null;
  p15: number | null;
  p85: number | null;
  evidence: EvidenceItemPayload[];
  doc_count: number;
  document_free: boolean;
  donors: string[];
  sample_min: number | null;
  sample_max: number | null;
  sample_std: number | null;
}

export interface InsightEnvelope {
  snapshot_version: string;
  insight: InsightPayload;
}

export interface EvidencePayload {
  snapshot_version: string;
  player_id: string;
  week: number;
  evidence: EvidenceItemPayload[];
}

/** One side of a comparison: the insight plus its server-exported density
 * curve as [x, y] pairs on the shared axis. */
export interface ComparePanelPayload {
  snapshot_version: string;
  insight: InsightPayload;
  curve: [number, number][];
  p15: number | null;
  p85: number | null;
}

export interface ComparePayload {
  snapshot_version: string;
  week: number;
  a: ComparePanelPayload;
  b: ComparePanelPayload;
}

export interface LineupBreakdownEntry {
  player_id: string;
  combined_projection: number;
}

export interface LineupPayload {
  snapshot_version: string;
  week: number;
  total: number;
  players: LineupBreakdownEntry[];
}

export interface ErrorPayload {
  error: string;
}
