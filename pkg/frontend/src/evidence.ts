import type { EvidenceItemPayload } from "./types";

export interface EvidenceRow {
  docId: string;
  title: string;
  sourceKind: string;
  relevance: number;
  stance: "support" | "refute";
  neutralTone: boolean;
}

export interface EvidencePanel {
  /** All rows in the order the service returned them. */
  rows: EvidenceRow[];
  /** Stance groups; order within each group follows the served order. */
  support: EvidenceRow[];
  refute: EvidenceRow[];
  empty: boolean;
  emptyMessage: string | null;
}

function toRow(item: EvidenceItemPayload): EvidenceRow {
  return {
    docId: item.doc_id,
    title: item.title,
    sourceKind: item.source_kind,
    relevance: item.relevance,
    stance: item.stance,
    neutralTone: item.neutral_tone,
  };
}

export function buildEvidencePanel(items: EvidenceItemPayload[]): EvidencePanel {
  const rows = items.map(toRow);
  return {
    rows,
    support: rows.filter((r) => r.stance === "support"),
    refute: rows.filter((r) => r.stance === "refute"),
    empty: rows.length === 0,
    emptyMessage: rows.length === 0 ? "No supporting documents were retrieved for this week." : null,
  };
}
