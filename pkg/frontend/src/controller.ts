// The game state machine: session lifecycle, click submission with a
// single-in-flight lock, auto-advance between problems, end screen.

import { ApiError, GameApi, type SessionSnapshot } from './api.js';
import type { FieldView } from './field.js';
import { applyClick, hudFromSnapshot, type HudState } from './state.js';

export type ScreenName = 'start' | 'game' | 'transition' | 'end';

export interface GameUi {
  field: FieldView;
  renderHud: (hud: HudState) => void;
  showScreen: (name: ScreenName) => void;
  setTransitionText: (text: string) => void;
  showError: (text: string) => void;
}

export interface ControllerOptions {
  transitionMs?: number; // 0 in tests
}

const sleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

export class GameController {
  session: SessionSnapshot | null = null;
  private inFlight = false;
  private readonly transitionMs: number;

  constructor(
    private readonly api: GameApi,
    private readonly ui: GameUi,
    options: ControllerOptions = {},
  ) {
    this.transitionMs = options.transitionMs ?? 900;
    this.ui.field.onClick((x1, x2) => {
      void this.clickField(x1, x2);
    });
  }

  get locked(): boolean {
    return this.inFlight;
  }

  /** POST /sessions and render a blank field for problem 1. */
  async startGame(playerName: string, mode: number): Promise<void> {
    let snap: SessionSnapshot;
    try {
      snap = await this.api.createSession(playerName, mode);
    } catch (err) {
      this.ui.showError(`Could not start the game (${describe(err)}). Retry?`);
      return;
    }
    this.installSnapshot(snap);
  }

  /** GET /sessions/{id} and re-render the full state. */
  async resumeSession(sessionId: string): Promise<void> {
    let snap: SessionSnapshot;
    try {
      snap = await this.api.getSession(sessionId);
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) {
        this.ui.showScreen('start');
        return;
      }
      this.ui.showError(`Could not resume (${describe(err)}). Retry?`);
      return;
    }
    this.installSnapshot(snap);
  }

  /** Submit one decision; the field stays locked until the server responds. */
  async clickField(x1: number, x2: number): Promise<void> {
    const session = this.session;
    if (session === null || session.status !== 'active' || session.current === null) return;
    if (this.inFlight) return; // sequential-decision semantics: one click at a time
    this.inFlight = true;
    try {
      const resp = await this.api.submitClick(session.session_id, x1, x2);
      const updated = applyClick(session, resp);
      this.session = updated;
      if (updated.current !== null) {
        this.ui.field.setMarkers(updated.current.clicks);
      }
      this.ui.renderHud(hudFromSnapshot(updated));
      if (resp.problem_done) {
        await this.advance(resp.next_problem_id ?? null);
      }
    } catch (err) {
      if (err instanceof ApiError && err.status === 400) {
        // rejected (out of domain after rounding): no shot consumed
        this.ui.field.shake();
      } else {
        this.ui.showError(`Click failed (${describe(err)}). Retry?`);
      }
    } finally {
      this.inFlight = false;
    }
  }

  private async advance(nextProblemId: string | null): Promise<void> {
    if (nextProblemId !== null) {
      this.ui.setTransitionText(`Next task: ${nextProblemId}`);
      this.ui.showScreen('transition');
      if (this.transitionMs > 0) await sleep(this.transitionMs);
    }
    // the server already advanced; re-fetch for the next problem's bounds
    const sid = this.session?.session_id;
    if (sid === undefined) return;
    try {
      this.installSnapshot(await this.api.getSession(sid));
    } catch (err) {
      this.ui.showError(`Could not load the next task (${describe(err)}). Retry?`);
    }
  }

  private installSnapshot(snap: SessionSnapshot): void {
    this.session = snap;
    this.ui.renderHud(hudFromSnapshot(snap));
    if (snap.status === 'finished' || snap.current === null) {
      this.ui.showScreen('end');
      return;
    }
    this.ui.field.setDomain({
      lower: [snap.current.lower[0] ?? 0, snap.current.lower[1] ?? 0],
      upper: [snap.current.upper[0] ?? 1, snap.current.upper[1] ?? 1],
    });
    this.ui.field.setMarkers(snap.current.clicks);
    this.ui.showScreen('game');
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return err.status > 0 ? `HTTP ${err.status}` : err.message;
  return String(err);
}
