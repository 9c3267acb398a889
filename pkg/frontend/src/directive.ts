// Client-side mirrors of the server's directive assembly and hill rules.
// Used only for previews and for disabling controls; the server remains
// the source of truth and re-validates everything.

import type { SessionView } from './types.js';

export function stepDirectiveText(index: number): string {
  return index === 1
    ? `Given the above context, perform Step ${index} of the exercise.`
    : `Perform Step ${index} of the exercise.`;
}

/** Pending (not rejected) human stickies grouped by criterion, in activity order. */
export function humanAdditionsPreamble(state: SessionView): string {
  const byId = new Map(state.board.map((a) => [a.id, a]));
  const pending = state.pending_human_ids
    .map((id) => byId.get(id))
    .filter((a) => a !== undefined && a.status !== 'REJECTED');
  let blocks = '';
  for (const criterion of state.activity.criteria) {
    const items = pending.filter((a) => a!.criterion === criterion.key);
    if (items.length === 0) continue;
    const listing = items.map((a, i) => `${i + 1}. ${a!.text}`).join('\n');
    blocks += `The human participants added the following "${criterion.key}" ideas:\n${listing}\n\n`;
  }
  return blocks;
}

/** The exact message the server will send when the facilitator advances. */
export function nextOutboundPreview(state: SessionView): string | null {
  if (state.phase !== 'REVIEWING' || state.mode !== 'STEPWISE') return null;
  if (state.current_step === null || state.current_step >= state.last_step) return null;
  return humanAdditionsPreamble(state) + stepDirectiveText(state.current_step + 1);
}

export interface HillSelection {
  text: string;
  whoIds: string[];
  whatIds: string[];
  wowIds: string[];
}

/** Mirrors the engine's compose_hill preconditions for client-side gating. */
export function hillProblems(state: SessionView, selection: HillSelection): string[] {
  const problems: string[] = [];
  if (!selection.text.trim()) problems.push('hill text must be non-empty');
  const byId = new Map(state.board.map((a) => [a.id, a]));
  const lists: [string, string[]][] = [
    ['who', selection.whoIds],
    ['what', selection.whatIds],
    ['wow', selection.wowIds],
  ];
  for (const [name, ids] of lists) {
    if (ids.length === 0) problems.push(`hill requires a ${name}`);
    for (const id of ids) {
      const artifact = byId.get(id);
      if (!artifact) problems.push(`unknown artifact ${id}`);
      else if (artifact.status !== 'ACCEPTED') problems.push(`${id} is not accepted`);
    }
  }
  return problems;
}
