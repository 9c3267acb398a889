// Board rendering: one column per criterion, one card per artifact.
// Pure DOM construction; every handler delegates to the app.

import type { ArtifactView, SessionView } from './types.js';

export interface BoardHandlers {
  onReview(artifactId: string, decision: 'accept' | 'reject', errorHost: HTMLElement): void;
  onAmend(artifactId: string, text: string, errorHost: HTMLElement): void;
  onAddSticky(criterion: string, text: string, author: string, errorHost: HTMLElement): void;
  onDragStart(artifactId: string): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function errorSlot(): HTMLElement {
  return el('div', 'error-msg');
}

export function showError(host: HTMLElement, message: string): void {
  const slot = host.querySelector<HTMLElement>('.error-msg');
  if (slot) slot.textContent = message;
}

function renderCard(
  state: SessionView,
  artifact: ArtifactView,
  handlers: BoardHandlers,
): HTMLElement {
  const card = el('article', `card status-${artifact.status.toLowerCase()}`);
  card.dataset.artifactId = artifact.id;
  card.draggable = artifact.status !== 'REJECTED';
  card.addEventListener('dragstart', (event) => {
    event.dataTransfer?.setData('text/plain', artifact.id);
    handlers.onDragStart(artifact.id);
  });

  const text = el('p', 'card-text', artifact.text);
  if (artifact.text !== artifact.original_text) {
    card.title = `original: ${artifact.original_text}`;
  }
  card.append(text);

  const badges = el('div', 'badges');
  const origin =
    artifact.origin === 'AGENT' ? 'agent' : `human: ${artifact.author ?? ''}`;
  badges.append(el('span', 'badge origin', origin));
  badges.append(el('span', `badge status ${artifact.status.toLowerCase()}`, artifact.status));
  if (artifact.cluster_id) {
    const cluster = state.clusters.find((c) => c.id === artifact.cluster_id);
    badges.append(el('span', 'badge cluster-chip', cluster ? cluster.label : artifact.cluster_id));
  }
  card.append(badges);

  if (artifact.status === 'PROPOSED' && state.phase !== 'COMPLETE') {
    const actions = el('div', 'card-actions');
    const accept = el('button', 'accept', 'Accept');
    accept.addEventListener('click', () => handlers.onReview(artifact.id, 'accept', card));
    const reject = el('button', 'reject', 'Reject');
    reject.addEventListener('click', () => handlers.onReview(artifact.id, 'reject', card));
    const amend = el('button', 'amend', 'Amend');
    amend.addEventListener('click', () => {
      if (card.querySelector('.amend-editor')) return;
      const editor = el('div', 'amend-editor');
      const input = el('input');
      input.value = artifact.text;
      const save = el('button', 'save-amend', 'Save');
      save.addEventListener('click', () => handlers.onAmend(artifact.id, input.value, card));
      const cancel = el('button', 'cancel-amend', 'Cancel');
      cancel.addEventListener('click', () => editor.remove());
      editor.append(input, save, cancel);
      card.append(editor);
    });
    actions.append(accept, reject, amend);
    card.append(actions);
  }
  card.append(errorSlot());
  return card;
}

export function renderBoard(state: SessionView, handlers: BoardHandlers): HTMLElement {
  const board = el('section', 'board');
  board.id = 'board';
  for (const criterion of state.activity.criteria) {
    const column = el('div', 'column');
    column.dataset.criterion = criterion.key;
    column.append(el('h3', 'column-label', criterion.label));

    const cards = el('div', 'cards');
    for (const artifact of state.board) {
      if (artifact.criterion === criterion.key) {
        cards.append(renderCard(state, artifact, handlers));
      }
    }
    column.append(cards);

    if (state.phase !== 'COMPLETE') {
      const form = el('form', 'add-sticky');
      const text = el('input', 'sticky-text');
      text.placeholder = 'New idea';
      const author = el('input', 'sticky-author');
      author.placeholder = 'Author';
      const submit = el('button', 'sticky-submit', 'Add');
      submit.type = 'submit';
      form.append(text, author, submit, errorSlot());
      form.addEventListener('submit', (event) => {
        event.preventDefault();
        handlers.onAddSticky(criterion.key, text.value, author.value, form);
      });
      column.append(form);
    }
    board.append(column);
  }
  return board;
}
