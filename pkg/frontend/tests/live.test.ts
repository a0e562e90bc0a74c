/**
 * End-to-end check against the real backend: spawns the API server (mock
 * provider), drives the same scripted session over HTTP, and asserts the
 * event-log types plus the no-mutation rule from the server's own telemetry.
 * Skips when the backend cannot be launched (no python3 on PATH).
 */

import { spawn, spawnSync, type ChildProcess } from 'node:child_process';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api';
import { UiSession, describeStyleAsText } from '../src/session';

const PORT = 8731;
const BASE = `http://127.0.0.1:${PORT}`;
const TYPED_TEXT = 'Writing some words. They are fine.';

const pythonAvailable =
  spawnSync('python3', ['-c', 'import styleloop'], { cwd: '..' }).status === 0;

let server: ChildProcess | null = null;

async function waitForServer(): Promise<void> {
  for (let attempt = 0; attempt < 60; attempt++) {
    try {
      const response = await fetch(`${BASE}/settings`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error('backend did not come up');
}

beforeAll(async () => {
  if (!pythonAvailable) return;
  server = spawn('python3', ['-m', 'styleloop.cli', 'serve', '--port', String(PORT)], {
    cwd: '..',
    stdio: 'ignore',
  });
  await waitForServer();
}, 30_000);

afterAll(() => {
  server?.kill();
});

describe.skipIf(!pythonAvailable)('scripted session against the live backend', () => {
  it('logs the expected event types and mutates the body only via typing and insert', async () => {
    const session = new UiSession(new ApiClient(BASE));
    await session.initialize();

    await session.updateText(TYPED_TEXT);
    const textAfterTyping = session.documentText();
    expect(textAfterTyping).toBe(TYPED_TEXT);

    session.setSelection(8, 12);
    await session.like('great word choice');
    expect(session.documentText()).toBe(TYPED_TEXT);

    await session.inlinePromptAt(TYPED_TEXT.length, 'Write a haiku about Seattle');
    const offerOutput = session.offer!.output;
    await session.resolveOffer('insert');
    expect(session.documentText()).toBe(TYPED_TEXT + offerOutput);

    await session.navigate('style');
    const edited = describeStyleAsText({
      ...session.style!.description,
      tone: 'playful and direct',
    });
    await session.saveStyle(edited);
    expect(session.route).toBe('home');
    expect(session.style!.source).toBe('manual_edit');

    await session.loadHistory();
    await session.navigate('history');
    const oldest = session.history[session.history.length - 1];
    await session.revert(oldest.profile.id);
    expect(session.style!.source).toBe('revert');
    expect(session.style!.description).toEqual(oldest.profile.description);

    await session.toggleFeedbackMode();

    const events = await session.api.getEvents(0, 500);
    expect(events.events.map((e) => e.type)).toEqual([
      'document_created',
      'document_edited',
      'like_added',
      'inline_prompt',
      'generation_inserted',
      'page_view',
      'style_update_direct_edit',
      'page_view',
      'page_view',
      'style_revert',
      'settings_changed',
    ]);

    // the document body changed exactly twice: the typing edit and the insert
    const bodyTouching = events.events.filter((e) =>
      ['document_edited', 'generation_inserted'].includes(e.type)
    );
    expect(bodyTouching).toHaveLength(2);
  }, 30_000);
});
