// HUD state derivation. Everything shown is either copied verbatim from the
// last server response or is a selection (max) over server-provided scores;
// the client performs no score arithmetic of its own.

import type { ClickEventData, ClickResponse, SessionSnapshot } from './api.js';

export interface HudState {
  playerId: string;
  mode: number;
  status: 'active' | 'finished';
  problemIndex: number | null; // 1-based position in the sequence
  problemCount: number;
  problemLabel: string | null;
  remainingShots: number | null;
  currentScore: number | null; // score of the latest click
  bestScore: number | null; // best server-reported score this problem
  cumScore: number | null; // server-reported running sum (mode 3 display)
  targetScore: number | null; // mode 2 only
}

function bestOf(clicks: ClickEventData[]): number | null {
  let best: number | null = null;
  for (const c of clicks) {
    if (best === null || c.score > best) best = c.score;
  }
  return best;
}

export function hudFromSnapshot(snap: SessionSnapshot): HudState {
  const current = snap.current;
  const clicks = current?.clicks ?? [];
  const last = clicks.length > 0 ? clicks[clicks.length - 1] ?? null : null;
  return {
    playerId: snap.player_id,
    mode: snap.mode,
    status: snap.status,
    problemIndex: current ? current.problem_index + 1 : null,
    problemCount: snap.problem_ids.length,
    problemLabel: current ? current.problem_id : null,
    remainingShots: current ? current.remaining_shots : null,
    currentScore: last ? last.score : null,
    bestScore: bestOf(clicks),
    cumScore: last ? last.cum_score : null,
    targetScore: current?.target_score ?? null,
  };
}

/** Fold a click response into a session snapshot (pure; returns a copy). */
export function applyClick(snap: SessionSnapshot, resp: ClickResponse): SessionSnapshot {
  if (snap.current === null || snap.current.problem_id !== resp.problem_id) {
    return snap;
  }
  const clicks = [...snap.current.clicks, resp.click];
  return {
    ...snap,
    status: resp.status,
    current: {
      ...snap.current,
      clicks,
      clicks_used: clicks.length,
      remaining_shots: resp.remaining_shots,
    },
    problems: snap.problems.map((p) =>
      p.problem_id === resp.problem_id
        ? { ...p, clicks_used: clicks.length, best_score: bestOf(clicks) }
        : p,
    ),
  };
}
