import { describe, expect, it } from 'vitest';

import {
  hillProblems,
  humanAdditionsPreamble,
  nextOutboundPreview,
  stepDirectiveText,
} from '../src/directive.js';
import { sessionFixture } from './fixtures.js';
import type { ArtifactView } from '../src/types.js';

function artifact(partial: Partial<ArtifactView>): ArtifactView {
  return {
    id: 'a-000009',
    criterion: 'who',
    text: 'Warehouse staff',
    original_text: 'Warehouse staff',
    origin: 'HUMAN',
    author: 'Ana',
    status: 'PROPOSED',
    cluster_id: null,
    ...partial,
  };
}

describe('stepDirectiveText', () => {
  it('keeps the context lead-in only on step 1', () => {
    expect(stepDirectiveText(1)).toBe(
      'Given the above context, perform Step 1 of the exercise.',
    );
    expect(stepDirectiveText(2)).toBe('Perform Step 2 of the exercise.');
  });
});

describe('humanAdditionsPreamble', () => {
  it('is empty without pending stickies', () => {
    expect(humanAdditionsPreamble(sessionFixture())).toBe('');
  });

  it('renders one numbered block per criterion in activity order', () => {
    const state = sessionFixture();
    state.board.push(
      artifact({ id: 'h1', criterion: 'what', text: 'Track shelf gaps' }),
      artifact({ id: 'h2', criterion: 'who', text: 'Warehouse staff' }),
      artifact({ id: 'h3', criterion: 'who', text: 'Buyers' }),
    );
    state.pending_human_ids = ['h1', 'h2', 'h3'];
    expect(humanAdditionsPreamble(state)).toBe(
      'The human participants added the following "who" ideas:\n' +
        '1. Warehouse staff\n2. Buyers\n\n' +
        'The human participants added the following "what" ideas:\n' +
        '1. Track shelf gaps\n\n',
    );
  });

  it('skips rejected pending stickies', () => {
    const state = sessionFixture();
    state.board.push(artifact({ id: 'h1', status: 'REJECTED' }));
    state.pending_human_ids = ['h1'];
    expect(humanAdditionsPreamble(state)).toBe('');
  });
});

describe('nextOutboundPreview', () => {
  it('combines preamble and directive', () => {
    const state = sessionFixture();
    state.board.push(artifact({ id: 'h1' }));
    state.pending_human_ids = ['h1'];
    expect(nextOutboundPreview(state)).toBe(
      'The human participants added the following "who" ideas:\n' +
        '1. Warehouse staff\n\n' +
        'Perform Step 2 of the exercise.',
    );
  });

  it('is null while awaiting the agent, at the last step, and in full-run mode', () => {
    expect(nextOutboundPreview(sessionFixture({ phase: 'AWAITING_AGENT' }))).toBeNull();
    expect(nextOutboundPreview(sessionFixture({ current_step: 5 }))).toBeNull();
    expect(
      nextOutboundPreview(sessionFixture({ mode: 'FULL_RUN', current_step: null })),
    ).toBeNull();
  });
});

describe('hillProblems', () => {
  function acceptedState() {
    const state = sessionFixture();
    state.board = [
      artifact({ id: 'w1', criterion: 'who', status: 'ACCEPTED' }),
      artifact({ id: 'w2', criterion: 'what', status: 'ACCEPTED' }),
      artifact({ id: 'w3', criterion: 'wow', status: 'ACCEPTED' }),
      artifact({ id: 'p1', criterion: 'wow', status: 'PROPOSED' }),
    ];
    return state;
  }

  it('accepts a complete selection', () => {
    expect(
      hillProblems(acceptedState(), {
        text: 'A hill.',
        whoIds: ['w1'],
        whatIds: ['w2'],
        wowIds: ['w3'],
      }),
    ).toEqual([]);
  });

  it('requires every ref list and the text', () => {
    const problems = hillProblems(acceptedState(), {
      text: '  ',
      whoIds: ['w1'],
      whatIds: [],
      wowIds: [],
    });
    expect(problems).toContain('hill requires a what');
    expect(problems).toContain('hill requires a wow');
    expect(problems).toContain('hill text must be non-empty');
  });

  it('rejects refs that are not accepted', () => {
    const problems = hillProblems(acceptedState(), {
      text: 'x',
      whoIds: ['w1'],
      whatIds: ['w2'],
      wowIds: ['p1'],
    });
    expect(problems).toEqual(['p1 is not accepted']);
  });
});
