/**
 * UiSession — all editor state and flows, DOM-free so it is fully testable.
 *
 * Guarantees enforced here:
 *   - at most one offer card (pending generation) exists at a time;
 *   - page-view telemetry is emitted on every route change;
 *   - the document is never modified except by typing (updateDocument) and
 *     by resolving an offer with "insert" — every other flow is read-only
 *     with respect to document bodies.
 */

import { ApiClient } from './api';
import {
  plainText,
  type Document,
  type FeedbackSummary,
  type Generation,
  type Highlight,
  type Page,
  type Polarity,
  type ResolveAction,
  type Settings,
  type StyleHistoryEntry,
  type StyleProfile,
  type UpdateOutcome,
} from './types';

export type Selection = { start: number; end: number } | null;

export type SessionListener = () => void;

const STYLE_SECTION_LABELS: Array<[keyof StyleDescriptionText, string]> = [
  ['tone', 'Tone'],
  ['voice', 'Voice'],
  ['word_choice', 'Word Choice'],
  ['sentence_structure', 'Sentence Structure'],
  ['paragraph_structure', 'Paragraph Structure'],
];

type StyleDescriptionText = {
  tone: string;
  voice: string;
  word_choice: string;
  sentence_structure: string;
  paragraph_structure: string;
};

export function describeStyleAsText(description: StyleDescriptionText): string {
  return STYLE_SECTION_LABELS.map(([key, label]) => `${label}: ${description[key]}`).join('\n');
}

export class UiSession {
  document: Document | null = null;
  documents: Document[] = [];
  style: StyleProfile | null = null;
  settings: Settings | null = null;
  history: StyleHistoryEntry[] = [];
  highlights: Highlight[] = [];
  summaries: FeedbackSummary | null = null;
  contextText = '';
  offer: Generation | null = null;
  selection: Selection = null;
  route: Page = 'home';
  lastOutcome: UpdateOutcome | null = null;
  statusMessage = '';

  private listeners: SessionListener[] = [];

  constructor(readonly api: ApiClient) {}

  subscribe(listener: SessionListener): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  documentText(): string {
    return this.document ? plainText(this.document.body) : '';
  }

  async initialize(): Promise<void> {
    this.documents = await this.api.listDocuments();
    if (this.documents.length === 0) {
      const created = await this.api.createDocument('Untitled');
      this.documents = [created];
    }
    this.document = this.documents[0];
    const style = await this.api.getStyle();
    this.style = style.profile;
    this.settings = await this.api.getSettings();
    this.notify();
  }

  async openDocument(id: string): Promise<void> {
    this.document = await this.api.getDocument(id);
    this.notify();
  }

  /** Typing: push the full edited text; the server derives the char delta. */
  async updateText(text: string): Promise<void> {
    if (!this.document) throw new Error('no document open');
    this.document = await this.api.updateDocument(this.document.id, text);
    await this.refreshStyleSummary();
    this.notify();
  }

  setSelection(start: number, end: number): void {
    this.selection = start === end ? null : { start, end };
    this.notify();
  }

  clearSelection(): void {
    this.selection = null;
    this.notify();
  }

  /** Context-menu actions available for the current selection. */
  contextMenuActions(): Array<'rewrite' | 'apply_prompt' | 'like' | 'dislike'> {
    return this.selection ? ['rewrite', 'apply_prompt', 'like', 'dislike'] : [];
  }

  slashMenuActions(): Array<'continue' | 'inline_prompt'> {
    return ['continue', 'inline_prompt'];
  }

  private requireSelection(): { start: number; end: number } {
    if (!this.selection) throw new Error('nothing selected');
    return this.selection;
  }

  private requireDocument(): Document {
    if (!this.document) throw new Error('no document open');
    return this.document;
  }

  private takeOfferSlot(): void {
    if (this.offer) throw new Error('resolve the pending suggestion first');
  }

  // --- explicit teaching ---

  async like(reason?: string): Promise<Highlight> {
    const { start, end } = this.requireSelection();
    const highlight = await this.api.addHighlight(
      this.requireDocument().id,
      start,
      end,
      'like',
      reason
    );
    this.highlights.push(highlight);
    this.clearSelection();
    return highlight;
  }

  async dislike(reason?: string): Promise<Highlight> {
    const { start, end } = this.requireSelection();
    const highlight = await this.api.addHighlight(
      this.requireDocument().id,
      start,
      end,
      'dislike',
      reason
    );
    this.highlights.push(highlight);
    this.clearSelection();
    return highlight;
  }

  // --- generation flows ---

  async rewriteSelection(): Promise<Generation> {
    this.takeOfferSlot();
    const { start, end } = this.requireSelection();
    this.offer = await this.api.rewrite(this.requireDocument().id, start, end);
    this.notify();
    return this.offer;
  }

  async applyPromptToSelection(instruction: string): Promise<Generation> {
    this.takeOfferSlot();
    const { start, end } = this.requireSelection();
    this.offer = await this.api.applyPrompt(this.requireDocument().id, start, end, instruction);
    this.notify();
    return this.offer;
  }

  async continueAt(point: number): Promise<Generation> {
    this.takeOfferSlot();
    this.offer = await this.api.continueText(this.requireDocument().id, point);
    this.notify();
    return this.offer;
  }

  async inlinePromptAt(point: number, instruction: string): Promise<Generation> {
    this.takeOfferSlot();
    this.offer = await this.api.inlinePrompt(this.requireDocument().id, point, instruction);
    this.notify();
    return this.offer;
  }

  /** Offer-card buttons: insert / regenerate / delete(discard). */
  async resolveOffer(action: ResolveAction): Promise<void> {
    if (!this.offer) throw new Error('no pending suggestion');
    const resolved = await this.api.resolveGeneration(this.offer.id, action);
    if (action === 'regenerate') {
      this.offer = resolved;
    } else {
      this.offer = null;
      if (action === 'insert') {
        // the body changed server-side; re-read it and the (possibly updated)
        // style summary
        this.document = await this.api.getDocument(resolved.document_id);
        await this.refreshStyleSummary();
      }
    }
    this.notify();
  }

  // --- style pages ---

  async refreshStyleSummary(): Promise<void> {
    const style = await this.api.getStyle();
    this.style = style.profile;
  }

  async forceRefresh(): Promise<UpdateOutcome> {
    this.lastOutcome = await this.api.refreshStyle(this.requireDocument().id);
    this.statusMessage =
      this.lastOutcome.kind === 'no_update_needed' ? 'No style update needed' : 'Style updated';
    await this.refreshStyleSummary();
    this.notify();
    return this.lastOutcome;
  }

  /** Save the edited description, then return to the home route. */
  async saveStyle(descriptionText: string): Promise<StyleProfile> {
    const result = await this.api.putStyle(descriptionText);
    this.style = result.profile;
    await this.navigate('home');
    return result.profile;
  }

  async setGlobalLock(locked: boolean): Promise<void> {
    this.settings = await this.api.putLocks({ global_style_lock: locked });
    this.notify();
  }

  async setTrackStyle(tracked: boolean): Promise<void> {
    const doc = this.requireDocument();
    await this.api.putLocks({ document_id: doc.id, track_style: tracked });
    this.document = await this.api.getDocument(doc.id);
    this.notify();
  }

  async loadHistory(): Promise<StyleHistoryEntry[]> {
    this.history = (await this.api.getHistory()).entries;
    this.notify();
    return this.history;
  }

  async revert(entryId: string): Promise<StyleProfile> {
    const result = await this.api.revertStyle(entryId);
    this.style = result.profile;
    await this.loadHistory();
    return result.profile;
  }

  // --- likes & dislikes page ---

  async loadHighlights(): Promise<void> {
    this.highlights = await this.api.listHighlights();
    this.summaries = await this.api.getSummaries();
    this.notify();
  }

  async toggleHighlight(id: string, active: boolean): Promise<void> {
    await this.api.setHighlightActive(id, active);
    await this.loadHighlights();
  }

  async removeHighlight(id: string): Promise<void> {
    await this.api.deleteHighlight(id);
    await this.loadHighlights();
  }

  async addManual(polarity: Polarity, excerpt: string, reason?: string): Promise<void> {
    await this.api.addManualHighlight(polarity, excerpt, reason);
    await this.loadHighlights();
  }

  // --- context page ---

  async loadContext(): Promise<void> {
    const context = await this.api.getContext();
    this.contextText = plainText(context.body as Parameters<typeof plainText>[0]);
    this.notify();
  }

  async saveContext(text: string): Promise<void> {
    await this.api.putContext(text);
    this.contextText = text;
    this.notify();
  }

  // --- presentation ---

  /**
   * Feedback mode shows or hides highlight spans. Persisted as a setting;
   * deliberately never touches the highlight ledger.
   */
  async toggleFeedbackMode(): Promise<boolean> {
    const current = this.settings?.feedback_mode ?? false;
    this.settings = await this.api.putSettings({ feedback_mode: !current });
    this.notify();
    return this.settings.feedback_mode;
  }

  /** Every route change emits one page-view event. */
  async navigate(page: Page): Promise<void> {
    await this.api.pageView(page);
    this.route = page;
    this.notify();
  }

  /** Highlight spans to render for the open document when feedback mode is on. */
  visibleHighlightSpans(): Array<{ start: number; end: number; polarity: Polarity }> {
    if (!this.settings?.feedback_mode || !this.document) return [];
    const docId = this.document.id;
    return this.highlights
      .filter((h) => h.document_id === docId && h.anchor && h.anchor_status !== 'orphaned')
      .map((h) => ({ start: h.anchor![0], end: h.anchor![1], polarity: h.polarity }));
  }
}
