// Controller behavior against a faithful in-memory fake of the service API.

import { afterEach, describe, expect, it, vi } from 'vitest';

import { GameApi, type ClickEventData } from '../src/api.js';
import { GameController, type GameUi, type ScreenName } from '../src/controller.js';
import { FieldView } from '../src/field.js';
import type { HudState } from '../src/state.js';

interface FakeProblem {
  id: string;
  lower: [number, number];
  upper: [number, number];
}

/** Minimal stand-in for the service; scores are arbitrary placeholders. */
class FakeService {
  clicks = new Map<string, ClickEventData[]>();
  requests = 0;
  deferClicks = false;
  private pending: Array<() => void> = [];

  constructor(
    readonly problems: FakeProblem[],
    readonly budget: number,
  ) {
    for (const p of problems) this.clicks.set(p.id, []);
  }

  releasePending(): void {
    for (const fn of this.pending.splice(0)) fn();
  }

  private currentIndex(): number | null {
    for (let i = 0; i < this.problems.length; i++) {
      const p = this.problems[i]!;
      if (this.clicks.get(p.id)!.length < this.budget) return i;
    }
    return null;
  }

  snapshot(): unknown {
    const idx = this.currentIndex();
    const current =
      idx === null
        ? null
        : {
            problem_id: this.problems[idx]!.id,
            problem_index: idx,
            lower: this.problems[idx]!.lower,
            upper: this.problems[idx]!.upper,
            clicks: this.clicks.get(this.problems[idx]!.id),
            clicks_used: this.clicks.get(this.problems[idx]!.id)!.length,
            remaining_shots: this.budget - this.clicks.get(this.problems[idx]!.id)!.length,
          };
    return {
      session_id: 'fake-session',
      player_id: 'tester',
      mode: 1,
      budget: this.budget,
      problem_ids: this.problems.map((p) => p.id),
      status: idx === null ? 'finished' : 'active',
      current,
      problems: this.problems.map((p) => ({
        problem_id: p.id,
        clicks_used: this.clicks.get(p.id)!.length,
        best_score: null,
      })),
    };
  }

  async handle(url: string, init?: RequestInit): Promise<Response> {
    this.requests += 1;
    const json = (body: unknown, status = 200) =>
      new Response(JSON.stringify(body), {
        status,
        headers: { 'content-type': 'application/json' },
      });
    if (url.endsWith('/sessions') && init?.method === 'POST') {
      return json(this.snapshot(), 201);
    }
    if (url.includes('/clicks')) {
      if (this.deferClicks) {
        await new Promise<void>((resolve) => this.pending.push(resolve));
      }
      const idx = this.currentIndex();
      if (idx === null) return json({ detail: 'session is finished' }, 409);
      const problem = this.problems[idx]!;
      const body = JSON.parse(String(init?.body)) as { x1: number; x2: number };
      const inDomain =
        body.x1 >= problem.lower[0] &&
        body.x1 <= problem.upper[0] &&
        body.x2 >= problem.lower[1] &&
        body.x2 <= problem.upper[1];
      if (!inDomain) return json({ detail: 'outside domain' }, 400);
      const events = this.clicks.get(problem.id)!;
      const score = -(body.x1 + body.x2); // placeholder value, server-authoritative
      const click = {
        click_index: events.length + 1,
        x: [body.x1, body.x2],
        score,
        cum_score: events.reduce((acc, c) => acc + c.score, score),
        ts: events.length,
      };
      events.push(click);
      const remaining = this.budget - events.length;
      const nextIdx = this.currentIndex();
      return json({
        session_id: 'fake-session',
        problem_id: problem.id,
        click,
        remaining_shots: remaining,
        problem_done: remaining === 0,
        status: nextIdx === null ? 'finished' : 'active',
        ...(remaining === 0 && nextIdx !== null
          ? { next_problem_id: this.problems[nextIdx]!.id }
          : {}),
      });
    }
    if (/\/sessions\/[^/]+$/.test(url)) {
      return json(this.snapshot());
    }
    return json({ detail: 'not found' }, 404);
  }
}

interface Harness {
  canvas: HTMLCanvasElement;
  field: FieldView;
  ui: GameUi;
  huds: HudState[];
  screens: ScreenName[];
  errors: string[];
  controller: GameController;
  service: FakeService;
}

function makeHarness(problems: FakeProblem[], budget: number): Harness {
  const service = new FakeService(problems, budget);
  vi.stubGlobal('fetch', (url: string | URL, init?: RequestInit) =>
    service.handle(String(url), init),
  );
  // jsdom has no canvas backend; silence its not-implemented report
  vi.spyOn(HTMLCanvasElement.prototype, 'getContext').mockImplementation(() => null);
  const canvas = document.createElement('canvas');
  canvas.width = 600;
  canvas.height = 400;
  document.body.appendChild(canvas);
  const field = new FieldView(canvas);
  const huds: HudState[] = [];
  const screens: ScreenName[] = [];
  const errors: string[] = [];
  const ui: GameUi = {
    field,
    renderHud: (h) => huds.push(h),
    showScreen: (s) => screens.push(s),
    setTransitionText: () => {},
    showError: (e) => errors.push(e),
  };
  const controller = new GameController(new GameApi('http://fake'), ui, { transitionMs: 0 });
  return { canvas, field, ui, huds, screens, errors, controller, service };
}

function clickAtDomain(h: Harness, x1: number, x2: number): void {
  const t = h.field.transform!;
  const [px, py] = t.domainToPixel(x1, x2);
  h.canvas.dispatchEvent(new MouseEvent('click', { clientX: px, clientY: py }));
}

const TOY: FakeProblem[] = [
  { id: 'toy', lower: [0, 0], upper: [10, 5] },
  { id: 'toy2', lower: [-1, -1], upper: [1, 1] },
];

afterEach(() => {
  vi.unstubAllGlobals();
  vi.restoreAllMocks();
  document.body.replaceChildren();
});

describe('GameController', () => {
  it('start renders a blank field and full shots', async () => {
    const h = makeHarness(TOY, 3);
    await h.controller.startGame('tester', 1);
    expect(h.screens).toContain('game');
    expect(h.canvas.dataset.markers).toBe('0');
    expect(h.huds.at(-1)!.remainingShots).toBe(3);
  });

  it('a field click adds a marker and updates the HUD from the response', async () => {
    const h = makeHarness(TOY, 3);
    await h.controller.startGame('tester', 1);
    clickAtDomain(h, 4.0, 2.5);
    await vi.waitFor(() => expect(h.canvas.dataset.markers).toBe('1'));
    const hud = h.huds.at(-1)!;
    expect(hud.currentScore).toBe(-(4.0 + 2.5));
    expect(hud.remainingShots).toBe(2);
  });

  it('letterbox clicks are ignored entirely', async () => {
    const h = makeHarness(TOY, 3);
    await h.controller.startGame('tester', 1);
    const before = h.service.requests;
    // domain is 10x5 on a 600x400 canvas: letterbox bands are on top/bottom
    h.canvas.dispatchEvent(new MouseEvent('click', { clientX: 300, clientY: 2 }));
    await new Promise((r) => setTimeout(r, 10));
    expect(h.service.requests).toBe(before);
    expect(h.canvas.dataset.markers).toBe('0');
  });

  it('a rejected click shakes the field and consumes no shot', async () => {
    const h = makeHarness(TOY, 3);
    await h.controller.startGame('tester', 1);
    // bypass the canvas (the transform never produces out-of-domain points)
    await h.controller.clickField(99.0, 99.0);
    expect(h.canvas.classList.contains('shake')).toBe(true);
    expect(h.canvas.dataset.markers).toBe('0');
    expect(h.huds.at(-1)!.remainingShots).toBe(3);
  });

  it('locks input while a click is in flight', async () => {
    const h = makeHarness(TOY, 3);
    await h.controller.startGame('tester', 1);
    h.service.deferClicks = true;
    const first = h.controller.clickField(1, 1);
    const second = h.controller.clickField(2, 2); // ignored: locked
    expect(h.controller.locked).toBe(true);
    h.service.releasePending();
    await Promise.all([first, second]);
    expect(h.service.clicks.get('toy')!).toHaveLength(1);
  });

  it('auto-advances to the next problem when the budget is exhausted', async () => {
    const h = makeHarness(TOY, 2);
    await h.controller.startGame('tester', 1);
    await h.controller.clickField(1, 1);
    await h.controller.clickField(2, 2);
    expect(h.screens).toContain('transition');
    expect(h.controller.session!.current!.problem_id).toBe('toy2');
    expect(h.canvas.dataset.markers).toBe('0'); // fresh field for the next task
  });

  it('shows the end screen after the last problem', async () => {
    const h = makeHarness([TOY[0]!], 1);
    await h.controller.startGame('tester', 1);
    await h.controller.clickField(1, 1);
    expect(h.screens.at(-1)).toBe('end');
    expect(h.controller.session!.status).toBe('finished');
  });

  it('resume restores markers and HUD', async () => {
    const h = makeHarness(TOY, 3);
    h.service.clicks.get('toy')!.push(
      { click_index: 1, x: [1, 1], score: -2, cum_score: -2, ts: 0 },
      { click_index: 2, x: [2, 2], score: -4, cum_score: -6, ts: 1 },
    );
    await h.controller.resumeSession('fake-session');
    expect(h.canvas.dataset.markers).toBe('2');
    expect(h.huds.at(-1)!.remainingShots).toBe(1);
    expect(h.huds.at(-1)!.bestScore).toBe(-2);
  });

  it('resume of an unknown session returns to the start screen', async () => {
    const h = makeHarness(TOY, 3);
    vi.stubGlobal('fetch', () =>
      Promise.resolve(new Response(JSON.stringify({ detail: 'unknown session' }), { status: 404 })),
    );
    await h.controller.resumeSession('gone');
    expect(h.screens.at(-1)).toBe('start');
  });

  it('network failure on start surfaces a retry prompt', async () => {
    const h = makeHarness(TOY, 3);
    vi.stubGlobal('fetch', () => Promise.reject(new TypeError('ECONNREFUSED')));
    await h.controller.startGame('tester', 1);
    expect(h.errors.at(-1)).toMatch(/retry/i);
  });
});
