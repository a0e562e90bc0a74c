/**
 * DOM layer: renders the left panel, style toolbar, routed pages, the
 * editor with its context/slash menus, and the offer card. All state and
 * flows live in UiSession; this module only reads state and forwards
 * user intent.
 */

import { UiSession } from './session';
import { describeStyleAsText } from './session';
import type { Page, Polarity } from './types';

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = '',
  text = ''
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

function button(label: string, className: string, onClick: () => void): HTMLButtonElement {
  const node = el('button', className, label);
  node.addEventListener('click', onClick);
  return node;
}

function toast(message: string): void {
  const node = el('div', 'toast', message);
  document.body.appendChild(node);
  setTimeout(() => node.remove(), 4000);
}

async function guarded(action: () => Promise<unknown>): Promise<void> {
  try {
    await action();
  } catch (error) {
    toast(error instanceof Error ? error.message : String(error));
  }
}

export class App {
  private root: HTMLElement;
  private editor!: HTMLTextAreaElement;
  private contextMenu: HTMLElement | null = null;
  private slashMenu: HTMLElement | null = null;
  private typeTimer: number | undefined;

  constructor(
    private readonly session: UiSession,
    mount: HTMLElement
  ) {
    this.root = mount;
    session.subscribe(() => this.render());
  }

  async start(): Promise<void> {
    await this.session.initialize();
    await this.session.loadHighlights();
    this.render();
  }

  private render(): void {
    this.root.textContent = '';
    const shell = el('div', 'shell');
    shell.appendChild(this.renderLeftPanel());
    const main = el('div', 'main');
    main.appendChild(this.renderToolbar());
    main.appendChild(this.renderPage());
    shell.appendChild(main);
    this.root.appendChild(shell);
  }

  // --- left panel: documents, style summary, context entry ---

  private renderLeftPanel(): HTMLElement {
    const panel = el('aside', 'left-panel');
    panel.appendChild(el('h2', '', 'Documents'));
    const list = el('ul', 'doc-list');
    for (const doc of this.session.documents) {
      const item = el('li', doc.id === this.session.document?.id ? 'active' : '');
      item.appendChild(
        button(doc.title || 'Untitled', 'doc-link', () => {
          void guarded(async () => {
            await this.session.openDocument(doc.id);
            await this.session.navigate('home');
          });
        })
      );
      list.appendChild(item);
    }
    panel.appendChild(list);

    panel.appendChild(el('h2', '', 'Style'));
    const summaryCard = el('div', 'style-summary');
    summaryCard.appendChild(el('p', 'summary-text', this.session.style?.summary ?? ''));
    const styleActions = el('div', 'style-actions');
    styleActions.appendChild(
      button('⟳ refresh', 'icon-btn refresh', () => void guarded(() => this.session.forceRefresh()))
    );
    const locked = this.session.settings?.global_style_lock ?? false;
    styleActions.appendChild(
      button(locked ? '🔒 locked' : '🔓 unlocked', 'icon-btn lock', () =>
        void guarded(() => this.session.setGlobalLock(!locked))
      )
    );
    summaryCard.appendChild(styleActions);
    summaryCard.appendChild(
      button('Style', 'nav-btn', () => void guarded(() => this.session.navigate('style')))
    );
    summaryCard.appendChild(
      button('Context', 'nav-btn', () =>
        void guarded(async () => {
          await this.session.loadContext();
          await this.session.navigate('context');
        })
      )
    );
    panel.appendChild(summaryCard);
    if (this.session.statusMessage) {
      panel.appendChild(el('p', 'status', this.session.statusMessage));
    }
    return panel;
  }

  // --- style toolbar ---

  private renderToolbar(): HTMLElement {
    const bar = el('nav', 'toolbar');

    const track = el('label', 'toggle');
    const trackBox = el('input') as HTMLInputElement;
    trackBox.type = 'checkbox';
    trackBox.checked = this.session.document?.track_style ?? true;
    trackBox.addEventListener('change', () =>
      void guarded(() => this.session.setTrackStyle(trackBox.checked))
    );
    track.appendChild(trackBox);
    track.appendChild(document.createTextNode(' Track Style Of This Document'));
    bar.appendChild(track);

    const feedback = el('label', 'toggle');
    const feedbackBox = el('input') as HTMLInputElement;
    feedbackBox.type = 'checkbox';
    feedbackBox.checked = this.session.settings?.feedback_mode ?? false;
    feedbackBox.addEventListener('change', () =>
      void guarded(() => this.session.toggleFeedbackMode())
    );
    feedback.appendChild(feedbackBox);
    feedback.appendChild(document.createTextNode(' Feedback Mode'));
    bar.appendChild(feedback);

    const tabs: Array<[Page, string]> = [
      ['home', 'Home'],
      ['history', 'Style History'],
      ['likes', 'Likes & Dislikes'],
    ];
    for (const [page, label] of tabs) {
      bar.appendChild(
        button(label, this.session.route === page ? 'tab active' : 'tab', () =>
          void guarded(async () => {
            if (page === 'history') await this.session.loadHistory();
            if (page === 'likes') await this.session.loadHighlights();
            await this.session.navigate(page);
          })
        )
      );
    }
    return bar;
  }

  // --- routed pages ---

  private renderPage(): HTMLElement {
    switch (this.session.route) {
      case 'style':
        return this.renderStylePage();
      case 'context':
        return this.renderContextPage();
      case 'history':
        return this.renderHistoryPage();
      case 'likes':
        return this.renderLikesPage();
      default:
        return this.renderHome();
    }
  }

  private renderHome(): HTMLElement {
    const page = el('section', 'page home');
    this.editor = el('textarea', 'editor') as HTMLTextAreaElement;
    this.editor.value = this.session.documentText();
    this.editor.placeholder = 'Start writing…  (type "/" for continue / inline prompt)';
    this.editor.addEventListener('input', () => this.onTyped());
    this.editor.addEventListener('mouseup', () => this.onSelectionChanged());
    this.editor.addEventListener('keyup', (event) => {
      if (event.key === '/') this.openSlashMenu();
      else this.onSelectionChanged();
    });
    page.appendChild(this.editor);

    if (this.session.settings?.feedback_mode) {
      page.appendChild(this.renderHighlightPreview());
    }
    if (this.session.offer) {
      page.appendChild(this.renderOfferCard());
    }
    return page;
  }

  /** Read-only preview with highlight marks; shown only in feedback mode. */
  private renderHighlightPreview(): HTMLElement {
    const preview = el('div', 'highlight-preview');
    preview.appendChild(el('h3', '', 'Highlights'));
    const text = this.session.documentText();
    const spans = this.session
      .visibleHighlightSpans()
      .slice()
      .sort((a, b) => a.start - b.start);
    const body = el('div', 'preview-body');
    let cursor = 0;
    for (const span of spans) {
      if (span.start < cursor) continue; // overlapping spans render first-wins
      body.appendChild(document.createTextNode(text.slice(cursor, span.start)));
      const mark = el('mark', span.polarity === 'like' ? 'like' : 'dislike');
      mark.textContent = text.slice(span.start, span.end);
      body.appendChild(mark);
      cursor = span.end;
    }
    body.appendChild(document.createTextNode(text.slice(cursor)));
    preview.appendChild(body);
    return preview;
  }

  private onTyped(): void {
    window.clearTimeout(this.typeTimer);
    const text = this.editor.value;
    this.typeTimer = window.setTimeout(() => {
      void guarded(() => this.session.updateText(text));
    }, 400);
  }

  private onSelectionChanged(): void {
    const start = this.editor.selectionStart;
    const end = this.editor.selectionEnd;
    this.session.setSelection(start, end);
    this.closeMenus();
    if (start !== end) this.openContextMenu();
  }

  // --- context menu: rewrite / apply / like / dislike ---

  private openContextMenu(): void {
    const menu = el('div', 'context-menu');
    menu.appendChild(
      button('Rewrite', 'menu-item', () =>
        void guarded(async () => {
          this.closeMenus();
          await this.session.rewriteSelection();
        })
      )
    );
    menu.appendChild(
      button('Apply prompt…', 'menu-item', () => {
        const instruction = window.prompt('Prompt to apply to the selection:') ?? '';
        if (!instruction) return;
        this.closeMenus();
        void guarded(() => this.session.applyPromptToSelection(instruction));
      })
    );
    menu.appendChild(
      button('👍 Like', 'menu-item', () => this.collectFeedback('like'))
    );
    menu.appendChild(
      button('👎 Dislike', 'menu-item', () => this.collectFeedback('dislike'))
    );
    this.contextMenu = menu;
    document.body.appendChild(menu);
  }

  private collectFeedback(polarity: Polarity): void {
    const reason = window.prompt('Optionally, say why (leave blank to skip):') ?? '';
    this.closeMenus();
    void guarded(() =>
      polarity === 'like'
        ? this.session.like(reason || undefined)
        : this.session.dislike(reason || undefined)
    );
  }

  // --- slash menu: continue / inline prompt ---

  private openSlashMenu(): void {
    this.closeMenus();
    const point = this.editor.selectionStart;
    const menu = el('div', 'slash-menu');
    menu.appendChild(
      button('Continue text', 'menu-item', () =>
        void guarded(async () => {
          this.closeMenus();
          await this.session.continueAt(point);
        })
      )
    );
    menu.appendChild(
      button('Inline prompt…', 'menu-item', () => {
        const instruction = window.prompt('What should be written here?') ?? '';
        this.closeMenus();
        if (!instruction) return;
        void guarded(() => this.session.inlinePromptAt(point, instruction));
      })
    );
    this.slashMenu = menu;
    document.body.appendChild(menu);
  }

  private closeMenus(): void {
    this.contextMenu?.remove();
    this.slashMenu?.remove();
    this.contextMenu = null;
    this.slashMenu = null;
  }

  // --- offer card: insert / regenerate / delete ---

  private renderOfferCard(): HTMLElement {
    const offer = this.session.offer!;
    const card = el('div', 'offer-card');
    card.appendChild(el('h3', '', `Suggestion (${offer.kind}, attempt ${offer.attempt})`));
    card.appendChild(el('pre', 'offer-text', offer.output));
    const actions = el('div', 'offer-actions');
    actions.appendChild(
      button('Insert', 'primary', () => void guarded(() => this.session.resolveOffer('insert')))
    );
    actions.appendChild(
      button('Regenerate', '', () => void guarded(() => this.session.resolveOffer('regenerate')))
    );
    actions.appendChild(
      button('Delete', 'danger', () => void guarded(() => this.session.resolveOffer('discard')))
    );
    card.appendChild(actions);
    return card;
  }

  // --- style page (edit like a normal text file) ---

  private renderStylePage(): HTMLElement {
    const page = el('section', 'page style');
    page.appendChild(el('h2', '', 'Writing style'));
    const area = el('textarea', 'style-editor') as HTMLTextAreaElement;
    area.value = this.session.style ? describeStyleAsText(this.session.style.description) : '';
    page.appendChild(area);
    page.appendChild(
      button('Save', 'primary', () => void guarded(() => this.session.saveStyle(area.value)))
    );
    return page;
  }

  private renderContextPage(): HTMLElement {
    const page = el('section', 'page context');
    page.appendChild(el('h2', '', 'Context'));
    page.appendChild(
      el('p', 'hint', 'Anything here grounds new text: audience, setting, facts, characters.')
    );
    const area = el('textarea', 'context-editor') as HTMLTextAreaElement;
    area.value = this.session.contextText;
    page.appendChild(area);
    page.appendChild(
      button('Save', 'primary', () =>
        void guarded(async () => {
          await this.session.saveContext(area.value);
          await this.session.navigate('home');
        })
      )
    );
    return page;
  }

  // --- style history: newest first, comparisons between adjacent styles ---

  private renderHistoryPage(): HTMLElement {
    const page = el('section', 'page history');
    page.appendChild(el('h2', '', 'Style history'));
    for (const entry of this.session.history) {
      const styleBox = el('div', 'style-box');
      styleBox.appendChild(el('p', 'summary-text', entry.profile.summary));
      styleBox.appendChild(el('pre', 'description', describeStyleAsText(entry.profile.description)));
      styleBox.appendChild(
        button('↩ revert', 'icon-btn revert', () =>
          void guarded(() => this.session.revert(entry.profile.id))
        )
      );
      page.appendChild(styleBox);
      if (entry.comparison) {
        const compareBox = el('div', 'comparison-box');
        compareBox.appendChild(
          el('p', 'rating', `difference: ${entry.comparison.difference_rating}/10`)
        );
        compareBox.appendChild(el('p', '', entry.comparison.comparison_text));
        page.appendChild(compareBox);
      }
    }
    return page;
  }

  // --- likes & dislikes page ---

  private renderLikesPage(): HTMLElement {
    const page = el('section', 'page likes');
    page.appendChild(el('h2', '', 'Likes & Dislikes'));

    const summaries = el('div', 'summaries');
    summaries.appendChild(
      el('p', 'like', `Likes: ${this.session.summaries?.like_summary || '—'}`)
    );
    summaries.appendChild(
      el('p', 'dislike', `Dislikes: ${this.session.summaries?.dislike_summary || '—'}`)
    );
    page.appendChild(summaries);

    const form = el('div', 'manual-add');
    const excerpt = el('input') as HTMLInputElement;
    excerpt.placeholder = 'Add a like or dislike manually…';
    const reason = el('input') as HTMLInputElement;
    reason.placeholder = 'why (optional)';
    form.appendChild(excerpt);
    form.appendChild(reason);
    form.appendChild(
      button('👍 add like', '', () =>
        void guarded(() => this.session.addManual('like', excerpt.value, reason.value || undefined))
      )
    );
    form.appendChild(
      button('👎 add dislike', '', () =>
        void guarded(() =>
          this.session.addManual('dislike', excerpt.value, reason.value || undefined)
        )
      )
    );
    page.appendChild(form);

    for (const highlight of this.session.highlights) {
      const card = el('div', `highlight-card ${highlight.polarity}`);
      card.appendChild(el('p', 'excerpt', `“${highlight.excerpt}”`));
      if (highlight.reason) card.appendChild(el('p', 'reason', highlight.reason));
      const actions = el('div', 'card-actions');
      actions.appendChild(
        button(highlight.active ? 'active' : 'inactive', 'icon-btn', () =>
          void guarded(() => this.session.toggleHighlight(highlight.id, !highlight.active))
        )
      );
      actions.appendChild(
        button('✕', 'icon-btn danger', () =>
          void guarded(() => this.session.removeHighlight(highlight.id))
        )
      );
      card.appendChild(actions);
      page.appendChild(card);
    }
    return page;
  }
}
