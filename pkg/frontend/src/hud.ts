// HUD DOM rendering: a pure projection of the derived HudState.

import { formatScore } from './format.js';
import type { HudState } from './state.js';

export interface HudElements {
  problem: HTMLElement;
  shots: HTMLElement;
  score: HTMLElement;
  best: HTMLElement;
  banner: HTMLElement;
}

export function renderHud(els: HudElements, hud: HudState): void {
  els.problem.textContent =
    hud.problemIndex === null
      ? 'done'
      : `Task ${hud.problemIndex} / ${hud.problemCount}`;
  els.shots.textContent = hud.remainingShots === null ? '-' : String(hud.remainingShots);
  els.score.textContent = formatScore(hud.currentScore);
  els.best.textContent = formatScore(hud.bestScore);
  if (hud.mode === 2 && hud.targetScore !== null) {
    els.banner.textContent = `Target score: ${formatScore(hud.targetScore)}`;
    els.banner.hidden = false;
  } else if (hud.mode === 3) {
    els.banner.textContent = `Cumulative score: ${formatScore(hud.cumScore ?? 0)}`;
    els.banner.hidden = false;
  } else {
    els.banner.textContent = '';
    els.banner.hidden = true;
  }
}
