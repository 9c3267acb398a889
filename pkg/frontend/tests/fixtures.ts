import type { SessionView } from '../src/types.js';

export function sessionFixture(overrides: Partial<SessionView> = {}): SessionView {
  return {
    id: 's-test',
    activity: {
      name: 'Hills',
      definition: 'Explanation of the exercise.',
      examples: ['Example of a good Hill Statement: "..."'],
      criteria: [
        { key: 'who', label: 'Who' },
        { key: 'what', label: 'What' },
        { key: 'wow', label: 'Wow' },
      ],
      steps: [
        { index: 1, instruction: 'Create the list Who', produces_criterion: 'who' },
        { index: 2, instruction: 'Create the list What', produces_criterion: 'what' },
        { index: 3, instruction: 'Create the list Wow', produces_criterion: 'wow' },
        { index: 4, instruction: 'Diverge' },
        { index: 5, instruction: 'Build hills' },
      ],
    },
    context: 'Some context',
    mode: 'STEPWISE',
    phase: 'REVIEWING',
    current_step: 1,
    last_step: 5,
    conversation: [
      { role: 'FACILITATOR', text: 'the composed prompt', ordinal: 1 },
      { role: 'AGENT', text: '1. Retail store managers', ordinal: 2 },
    ],
    board: [
      {
        id: 'a-000001',
        criterion: 'who',
        text: 'Retail store managers',
        original_text: 'Retail store managers',
        origin: 'AGENT',
        author: null,
        status: 'PROPOSED',
        cluster_id: null,
      },
    ],
    clusters: [],
    hills: [],
    step_commentary: [],
    pending_human_ids: [],
    completed_with_override: false,
    last_sequence: 4,
    ...overrides,
  };
}
