/**
 * Wire types mirroring the backend's canonical JSON serialization.
 */

export type Span = { text: string; bold: boolean; italic: boolean };

export type Block =
  | { type: 'paragraph'; spans: Span[] }
  | { type: 'heading'; level: number; spans: Span[] }
  | { type: 'list'; ordered: boolean; items: Span[][] };

export type RichTextBody = { blocks: Block[] };

export type Document = {
  id: string;
  title: string;
  body: RichTextBody;
  track_style: boolean;
  chars_since_analysis: number;
  created_at: number;
  updated_at: number;
};

export type StyleDescription = {
  tone: string;
  voice: string;
  word_choice: string;
  sentence_structure: string;
  paragraph_structure: string;
};

export type StyleProfile = {
  id: string;
  summary: string;
  description: StyleDescription;
  source: 'default' | 'automatic' | 'manual_edit' | 'manual_refresh' | 'revert';
  created_at: number;
  summary_generated_at: number;
};

export type StyleComparison = {
  old_style_id: string;
  new_style_id: string;
  comparison_text: string;
  difference_rating: number;
};

export type StyleHistoryEntry = {
  seq: number;
  profile: StyleProfile;
  comparison: StyleComparison | null;
};

export type UpdateOutcome = {
  kind: 'committed' | 'no_update_needed';
  committed_style: StyleProfile | null;
  comparison: StyleComparison;
};

export type Polarity = 'like' | 'dislike';

export type Highlight = {
  id: string;
  document_id: string | null;
  excerpt: string;
  anchor: [number, number] | null;
  polarity: Polarity;
  reason: string | null;
  active: boolean;
  anchor_status: 'anchored' | 'moved' | 'orphaned' | null;
  created_at: number;
};

export type FeedbackSummary = {
  like_summary: string;
  dislike_summary: string;
  computed_over: string[];
  computed_at: number;
};

export type GenerationKind = 'rewrite' | 'apply_prompt' | 'continue' | 'inline_prompt';

export type Generation = {
  id: string;
  lineage_id: string;
  kind: GenerationKind;
  document_id: string;
  target_start: number;
  target_end: number;
  instruction: string | null;
  output: string;
  status: 'offered' | 'inserted' | 'discarded' | 'superseded';
  attempt: number;
  created_at: number;
};

export type Settings = {
  global_style_lock: boolean;
  feedback_mode: boolean;
  analysis_interval_n: number;
  update_threshold: number;
};

export type EventRecord = {
  seq: number;
  timestamp: number;
  session_id: string;
  type: string;
  payload: Record<string, unknown>;
};

export type Page = 'home' | 'style' | 'context' | 'history' | 'likes';

export type ResolveAction = 'insert' | 'regenerate' | 'discard';

export type ApiErrorBody = { error: { kind: string; message: string } };

/** Plain-text projection: blocks and list items joined with newlines. */
export function plainText(body: RichTextBody): string {
  const rows: string[] = [];
  for (const block of body.blocks) {
    if (block.type === 'list') {
      for (const item of block.items) rows.push(item.map((s) => s.text).join(''));
    } else {
      rows.push(block.spans.map((s) => s.text).join(''));
    }
  }
  return rows.join('\n');
}
