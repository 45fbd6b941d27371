// Page wiring: start form, canvas sizing, HUD, end-screen summary.

import { GameApi } from './api.js';
import { GameController } from './controller.js';
import { FieldView } from './field.js';
import { formatScore } from './format.js';
import { renderHud, type HudElements } from './hud.js';
import type { HudState } from './state.js';

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (el === null) throw new Error(`missing element #${id}`);
  return el as T;
}

function showScreen(name: string): void {
  for (const screen of document.querySelectorAll<HTMLElement>('[data-screen]')) {
    screen.hidden = screen.dataset.screen !== name;
  }
}

function main(): void {
  const api = new GameApi('');
  const canvas = byId<HTMLCanvasElement>('field');
  const field = new FieldView(canvas);
  const hudEls: HudElements = {
    problem: byId('hud-problem'),
    shots: byId('hud-shots'),
    score: byId('hud-score'),
    best: byId('hud-best'),
    banner: byId('hud-banner'),
  };
  const errorBox = byId('error-box');

  const controller = new GameController(api, {
    field,
    renderHud: (hud: HudState) => {
      renderHud(hudEls, hud);
      if (hud.status === 'finished') renderEndScreen(controller);
    },
    showScreen: (name) => showScreen(name),
    setTransitionText: (text) => {
      byId('transition-text').textContent = text;
    },
    showError: (text) => {
      errorBox.textContent = text;
      errorBox.hidden = false;
    },
  });

  function renderEndScreen(ctl: GameController): void {
    const list = byId('end-summary');
    list.replaceChildren();
    for (const p of ctl.session?.problems ?? []) {
      const item = document.createElement('li');
      item.textContent = `${p.problem_id}: best score ${formatScore(p.best_score)}`;
      list.appendChild(item);
    }
  }

  function resizeCanvas(): void {
    const holder = canvas.parentElement;
    if (holder === null) return;
    canvas.width = holder.clientWidth;
    canvas.height = Math.max(320, Math.floor(holder.clientWidth * 0.62));
    field.render();
  }
  window.addEventListener('resize', resizeCanvas);
  resizeCanvas();

  byId<HTMLFormElement>('start-form').addEventListener('submit', (ev) => {
    ev.preventDefault();
    errorBox.hidden = true;
    const name = byId<HTMLInputElement>('player-name').value.trim() || 'anonymous';
    const mode = Number(byId<HTMLSelectElement>('mode-select').value);
    void controller.startGame(name, mode).then(() => {
      const sid = controller.session?.session_id;
      if (sid !== undefined) {
        window.localStorage.setItem('paretolab-session', sid);
      }
    });
  });

  const resumeButton = byId<HTMLButtonElement>('resume-button');
  const savedSession = window.localStorage.getItem('paretolab-session');
  resumeButton.hidden = savedSession === null;
  resumeButton.addEventListener('click', () => {
    errorBox.hidden = true;
    if (savedSession !== null) void controller.resumeSession(savedSession);
  });

  showScreen('start');
}

main();
