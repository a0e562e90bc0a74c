/**
 * Typed client for the writing-engine API. One method per endpoint; the
 * fetch implementation is injectable so tests can run without a network.
 */

import type {
  ApiErrorBody,
  Document,
  FeedbackSummary,
  Generation,
  Highlight,
  Page,
  Polarity,
  ResolveAction,
  Settings,
  StyleHistoryEntry,
  StyleProfile,
  UpdateOutcome,
  EventRecord,
} from './types';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly kind: string,
    message: string
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init)
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { 'content-type': 'application/json' } };
    if (body !== undefined) init.body = JSON.stringify(body);
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      let kind = 'Unknown';
      let message = `${method} ${path} failed with ${response.status}`;
      try {
        const data = (await response.json()) as ApiErrorBody;
        kind = data.error.kind;
        message = data.error.message;
      } catch {
        // non-JSON error body; keep the fallback message
      }
      throw new ApiError(response.status, kind, message);
    }
    return (await response.json()) as T;
  }

  // documents
  createDocument(title: string, body?: string): Promise<Document> {
    return this.request('POST', '/documents', { title, body });
  }
  listDocuments(): Promise<Document[]> {
    return this.request('GET', '/documents');
  }
  getDocument(id: string): Promise<Document> {
    return this.request('GET', `/documents/${id}`);
  }
  updateDocument(id: string, text: string, title?: string): Promise<Document> {
    return this.request('PUT', `/documents/${id}`, { body: text, title });
  }

  // style
  getStyle(): Promise<{ profile: StyleProfile; summary: string }> {
    return this.request('GET', '/style');
  }
  putStyle(descriptionText: string): Promise<{ profile: StyleProfile }> {
    return this.request('PUT', '/style', { description: descriptionText });
  }
  refreshStyle(documentId: string): Promise<UpdateOutcome> {
    return this.request('POST', '/style/refresh', { document_id: documentId });
  }
  getHistory(): Promise<{ entries: StyleHistoryEntry[] }> {
    return this.request('GET', '/style/history');
  }
  revertStyle(entryId: string): Promise<{ profile: StyleProfile }> {
    return this.request('POST', `/style/revert/${entryId}`);
  }
  putLocks(locks: {
    global_style_lock?: boolean;
    document_id?: string;
    track_style?: boolean;
  }): Promise<Settings> {
    return this.request('PUT', '/style/locks', locks);
  }

  // context
  getContext(): Promise<{ body: unknown }> {
    return this.request('GET', '/context');
  }
  putContext(text: string): Promise<{ body: unknown }> {
    return this.request('PUT', '/context', { body: text });
  }

  // highlights
  addHighlight(
    documentId: string,
    start: number,
    end: number,
    polarity: Polarity,
    reason?: string
  ): Promise<Highlight> {
    return this.request('POST', '/highlights', {
      polarity,
      document_id: documentId,
      start,
      end,
      reason,
    });
  }
  addManualHighlight(polarity: Polarity, excerpt: string, reason?: string): Promise<Highlight> {
    return this.request('POST', '/highlights', { polarity, excerpt, reason });
  }
  listHighlights(): Promise<Highlight[]> {
    return this.request('GET', '/highlights');
  }
  setHighlightActive(id: string, active: boolean): Promise<Highlight> {
    return this.request('PATCH', `/highlights/${id}`, { active });
  }
  deleteHighlight(id: string): Promise<{ deleted: string }> {
    return this.request('DELETE', `/highlights/${id}`);
  }
  getSummaries(): Promise<FeedbackSummary> {
    return this.request('GET', '/highlights/summaries');
  }

  // generations
  rewrite(documentId: string, start: number, end: number): Promise<Generation> {
    return this.request('POST', '/generations/rewrite', {
      document_id: documentId,
      start,
      end,
    });
  }
  applyPrompt(
    documentId: string,
    start: number,
    end: number,
    instruction: string
  ): Promise<Generation> {
    return this.request('POST', '/generations/apply', {
      document_id: documentId,
      start,
      end,
      instruction,
    });
  }
  continueText(documentId: string, point: number): Promise<Generation> {
    return this.request('POST', '/generations/continue', { document_id: documentId, point });
  }
  inlinePrompt(documentId: string, point: number, instruction: string): Promise<Generation> {
    return this.request('POST', '/generations/inline', {
      document_id: documentId,
      point,
      instruction,
    });
  }
  resolveGeneration(id: string, action: ResolveAction): Promise<Generation> {
    return this.request('POST', `/generations/${id}/resolve`, { action });
  }

  // telemetry
  pageView(page: Page): Promise<EventRecord> {
    return this.request('POST', '/telemetry/page-view', { page });
  }
  getEvents(fromSeq = 0, limit = 500): Promise<{ events: EventRecord[]; next_seq: number }> {
    return this.request('GET', `/telemetry/events?from_seq=${fromSeq}&limit=${limit}`);
  }

  // settings
  getSettings(): Promise<Settings> {
    return this.request('GET', '/settings');
  }
  putSettings(settings: {
    analysis_interval_n?: number;
    update_threshold?: number;
    feedback_mode?: boolean;
  }): Promise<Settings> {
    return this.request('PUT', '/settings', settings);
  }
}
