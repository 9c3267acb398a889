import { beforeEach, describe, expect, it, vi } from 'vitest';

import { renderBoard, type BoardHandlers } from '../src/board.js';
import { sessionFixture } from './fixtures.js';
import type { SessionView } from '../src/types.js';

function handlers(): BoardHandlers {
  return {
    onReview: vi.fn(),
    onAmend: vi.fn(),
    onAddSticky: vi.fn(),
    onDragStart: vi.fn(),
  };
}

function richState(): SessionView {
  const state = sessionFixture();
  state.board = [
    {
      id: 'a-1',
      criterion: 'who',
      text: 'Retail store managers',
      original_text: 'Retail store managers',
      origin: 'AGENT',
      author: null,
      status: 'PROPOSED',
      cluster_id: null,
    },
    {
      id: 'a-2',
      criterion: 'who',
      text: 'Store ops managers',
      original_text: 'Retail managers',
      origin: 'AGENT',
      author: null,
      status: 'ACCEPTED',
      cluster_id: 'c-1',
    },
    {
      id: 'a-3',
      criterion: 'what',
      text: 'Old idea',
      original_text: 'Old idea',
      origin: 'HUMAN',
      author: 'Ana',
      status: 'REJECTED',
      cluster_id: null,
    },
  ];
  state.clusters = [{ id: 'c-1', label: 'operations', member_ids: ['a-2'] }];
  return state;
}

describe('renderBoard', () => {
  beforeEach(() => {
    document.body.replaceChildren();
  });

  it('renders one column per criterion with its cards', () => {
    const board = renderBoard(richState(), handlers());
    const columns = board.querySelectorAll('.column');
    expect(columns).toHaveLength(3);
    expect(columns[0].querySelectorAll('.card')).toHaveLength(2);
    expect(columns[1].querySelectorAll('.card')).toHaveLength(1);
    expect(columns[2].querySelectorAll('.card')).toHaveLength(0);
    const labels = [...board.querySelectorAll('.column-label')].map((n) => n.textContent);
    expect(labels).toEqual(['Who', 'What', 'Wow']);
  });

  it('keeps rejected cards visible but struck', () => {
    const board = renderBoard(richState(), handlers());
    const rejected = board.querySelector('.card.status-rejected');
    expect(rejected).not.toBeNull();
    expect(rejected!.querySelector('.card-text')!.textContent).toBe('Old idea');
  });

  it('shows origin badges and cluster chips', () => {
    const board = renderBoard(richState(), handlers());
    const badges = [...board.querySelectorAll('.badge.origin')].map((n) => n.textContent);
    expect(badges).toContain('agent');
    expect(badges).toContain('human: Ana');
    expect(board.querySelector('.badge.cluster-chip')!.textContent).toBe('operations');
  });

  it('exposes the original text of an amended card as a tooltip', () => {
    const board = renderBoard(richState(), handlers());
    const amended = board.querySelector<HTMLElement>('[data-artifact-id="a-2"]')!;
    expect(amended.title).toBe('original: Retail managers');
    const untouched = board.querySelector<HTMLElement>('[data-artifact-id="a-1"]')!;
    expect(untouched.title).toBe('');
  });

  it('wires accept and reject buttons', () => {
    const handler = handlers();
    const board = renderBoard(richState(), handler);
    const card = board.querySelector<HTMLElement>('[data-artifact-id="a-1"]')!;
    card.querySelector<HTMLButtonElement>('button.accept')!.click();
    expect(handler.onReview).toHaveBeenCalledWith('a-1', 'accept', card);
    card.querySelector<HTMLButtonElement>('button.reject')!.click();
    expect(handler.onReview).toHaveBeenCalledWith('a-1', 'reject', card);
  });

  it('offers review controls only on proposed cards', () => {
    const board = renderBoard(richState(), handlers());
    expect(
      board.querySelector('[data-artifact-id="a-2"] .card-actions'),
    ).toBeNull();
    expect(
      board.querySelector('[data-artifact-id="a-1"] .card-actions'),
    ).not.toBeNull();
  });

  it('amend flow opens an editor prefilled with the current text', () => {
    const handler = handlers();
    const board = renderBoard(richState(), handler);
    document.body.append(board);
    const card = board.querySelector<HTMLElement>('[data-artifact-id="a-1"]')!;
    card.querySelector<HTMLButtonElement>('button.amend')!.click();
    const input = card.querySelector<HTMLInputElement>('.amend-editor input')!;
    expect(input.value).toBe('Retail store managers');
    input.value = 'Store managers';
    card.querySelector<HTMLButtonElement>('button.save-amend')!.click();
    expect(handler.onAmend).toHaveBeenCalledWith('a-1', 'Store managers', card);
  });

  it('submits the add-sticky form with criterion and author', () => {
    const handler = handlers();
    const board = renderBoard(richState(), handler);
    document.body.append(board);
    const column = board.querySelector<HTMLElement>('[data-criterion="wow"]')!;
    column.querySelector<HTMLInputElement>('.sticky-text')!.value = 'Delight';
    column.querySelector<HTMLInputElement>('.sticky-author')!.value = 'Bo';
    column
      .querySelector<HTMLFormElement>('form.add-sticky')!
      .dispatchEvent(new Event('submit', { cancelable: true }));
    expect(handler.onAddSticky).toHaveBeenCalledWith(
      'wow',
      'Delight',
      'Bo',
      column.querySelector('form.add-sticky'),
    );
  });

  it('hides forms and review buttons when the session is complete', () => {
    const state = richState();
    state.phase = 'COMPLETE';
    const board = renderBoard(state, handlers());
    expect(board.querySelector('.card-actions')).toBeNull();
    expect(board.querySelector('form.add-sticky')).toBeNull();
  });
});
