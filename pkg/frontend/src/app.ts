// The facilitator console. The server is the single source of truth:
// every action is an API call, and rendering always starts from a
// server-returned snapshot (action responses and event-stream refetches).

import { ApiClient, ApiError, subscribeEvents, type EventStreamHandle } from './api.js';
import { renderBoard, errorSlot, showError } from './board.js';
import { hillProblems, nextOutboundPreview, type HillSelection } from './directive.js';
import type { SessionView } from './types.js';

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

function downloadText(filename: string, text: string, mime: string): void {
  if (typeof URL.createObjectURL !== 'function') return; // non-browser host
  const url = URL.createObjectURL(new Blob([text], { type: mime }));
  const anchor = document.createElement('a');
  anchor.href = url;
  anchor.download = filename;
  anchor.click();
  URL.revokeObjectURL(url);
}

export class ConsoleApp {
  readonly api: ApiClient;
  state: SessionView | null = null;
  private root!: HTMLElement;
  private stream: EventStreamHandle | null = null;
  private stagedClusterIds: string[] = [];
  private clusterLabelDraft = '';
  private refreshing = false;
  private refreshQueued = false;
  private online = true;

  constructor(private baseUrl: string = '') {
    this.api = new ApiClient(baseUrl);
  }

  mount(root: HTMLElement): void {
    this.root = root;
    if (this.state) this.render();
    else void this.renderSetup();
  }

  dispose(): void {
    this.stream?.close();
    this.stream = null;
  }

  // -- setup ----------------------------------------------------------------

  private async renderSetup(): Promise<void> {
    this.root.replaceChildren();
    const panel = el('section', 'setup');
    panel.id = 'setup';
    panel.append(el('h2', undefined, 'Start a session'));

    const activitySelect = el('select', 'setup-activity');
    activitySelect.id = 'setup-activity';
    try {
      const { activities } = await this.api.listActivities();
      for (const activity of activities) {
        const option = el('option', undefined, `${activity.name} (${activity.steps} steps)`);
        option.value = activity.id;
        activitySelect.append(option);
      }
    } catch (error) {
      panel.append(el('div', 'banner offline', `Cannot reach the server: ${String(error)}`));
    }
    if (this.state) return; // a session opened while the listing loaded

    const context = el('textarea', 'setup-context');
    context.id = 'setup-context';
    context.placeholder = 'Paste the session context: why are we co-creating, who participates?';

    const modeSelect = el('select', 'setup-mode');
    modeSelect.id = 'setup-mode';
    for (const [value, label] of [
      ['stepwise', 'Step by step'],
      ['full', 'Whole exercise at once'],
    ]) {
      const option = el('option', undefined, label);
      option.value = value;
      modeSelect.append(option);
    }

    const agentInput = el('input', 'setup-agent');
    agentInput.id = 'setup-agent';
    agentInput.value = 'manual';
    agentInput.title = 'manual, remote, or scripted:PATH';

    const start = el('button', 'setup-start', 'Create session');
    start.id = 'setup-start';
    const errors = errorSlot();
    start.addEventListener('click', async () => {
      try {
        const summary = await this.api.createSession({
          activity: activitySelect.value || 'hills',
          context: context.value,
          mode: modeSelect.value,
          agent: agentInput.value || undefined,
        });
        await this.openSession(summary.id);
      } catch (error) {
        showError(panel, error instanceof ApiError ? error.detail : String(error));
      }
    });

    panel.append(
      labelled('Activity', activitySelect),
      labelled('Context', context),
      labelled('Mode', modeSelect),
      labelled('Agent', agentInput),
      start,
      errors,
    );
    this.root.append(panel);
  }

  async openSession(sessionId: string): Promise<void> {
    this.state = await this.api.getSession(sessionId);
    this.render();
    this.stream?.close();
    this.stream = subscribeEvents(this.baseUrl, sessionId, {
      onEvent: () => void this.refresh(),
      onStatus: (online) => {
        this.online = online;
        this.renderBanner();
      },
    });
  }

  /** Re-pull server state; collapses bursts of stream events into one fetch. */
  private async refresh(): Promise<void> {
    if (!this.state) return;
    if (this.refreshing) {
      this.refreshQueued = true;
      return;
    }
    this.refreshing = true;
    try {
      const fresh = await this.api.getSession(this.state.id);
      // Re-render only on genuinely newer state; an acknowledged action
      // already applied this sequence, and re-rendering would wipe
      // in-progress form input.
      if (!this.state || fresh.last_sequence > this.state.last_sequence) {
        this.state = fresh;
        this.render();
      }
    } finally {
      this.refreshing = false;
      if (this.refreshQueued) {
        this.refreshQueued = false;
        void this.refresh();
      }
    }
  }

  private apply(state: SessionView): void {
    this.state = state;
    this.render();
  }

  private async action(
    host: HTMLElement,
    call: () => Promise<SessionView>,
  ): Promise<void> {
    try {
      this.apply(await call());
    } catch (error) {
      showError(host, error instanceof ApiError ? error.detail : String(error));
    }
  }

  // -- run view ----------------------------------------------------------------

  private renderBanner(): void {
    const banner = this.root.querySelector<HTMLElement>('#offline-banner');
    if (banner) banner.hidden = this.online;
  }

  render(): void {
    const state = this.state;
    if (!state || !this.root) return;
    this.root.replaceChildren();

    const header = el('header', 'session-header');
    header.append(el('h2', undefined, `${state.activity.name} session`));
    const stepLabel =
      state.mode === 'STEPWISE' && state.current_step !== null
        ? ` - step ${state.current_step} of ${state.last_step}`
        : '';
    const phase = el('span', 'phase-label', `${state.phase}${stepLabel}`);
    phase.id = 'phase-label';
    header.append(phase);
    this.root.append(header);

    const offline = el('div', 'banner offline', 'Connection lost; retrying...');
    offline.id = 'offline-banner';
    offline.hidden = this.online;
    this.root.append(offline);

    this.root.append(this.renderPromptPreview(state));
    this.root.append(this.renderControls(state));
    this.root.append(
      renderBoard(state, {
        onReview: (artifactId, decision, host) =>
          void this.action(host, () => this.api.review(state.id, artifactId, decision)),
        onAmend: (artifactId, text, host) =>
          void this.action(host, () => this.api.review(state.id, artifactId, 'amend', text)),
        onAddSticky: (criterion, text, author, host) =>
          void this.action(host, () => this.api.addArtifact(state.id, criterion, text, author)),
        onDragStart: () => undefined,
      }),
    );
    this.root.append(this.renderClusterTray(state));
    this.root.append(this.renderHillComposer(state));
    this.root.append(this.renderNotes(state));
  }

  private renderPromptPreview(state: SessionView): HTMLElement {
    const details = el('details', 'prompt-preview-wrap');
    details.append(el('summary', undefined, 'Composed prompt'));
    const pre = el('pre', 'prompt-preview');
    pre.id = 'prompt-preview';
    pre.textContent = state.conversation.length ? state.conversation[0].text : '';
    details.append(pre);
    return details;
  }

  private renderControls(state: SessionView): HTMLElement {
    const controls = el('section', 'controls');
    controls.id = 'controls';

    const outbound = el('pre', 'outbound-preview');
    outbound.id = 'outbound-preview';
    outbound.hidden = true;

    if (state.phase === 'REVIEWING' && state.mode === 'STEPWISE' && state.current_step !== null) {
      if (state.current_step < state.last_step) {
        const step = el('button', 'step-button', `Perform Step ${state.current_step + 1}`);
        step.id = 'step-button';
        step.addEventListener('click', () => {
          const preview = nextOutboundPreview(state);
          if (preview !== null) {
            outbound.textContent = preview;
            outbound.hidden = false;
          }
          void this.action(controls, () => this.api.advance(state.id));
        });
        controls.append(step);
      } else {
        const done = el('button', 'complete-button', 'Complete session');
        done.id = 'complete-button';
        done.addEventListener('click', () =>
          void this.action(controls, () => this.api.completeSession(state.id)),
        );
        controls.append(done);
      }
      const override = el('button', 'complete-override', 'Complete early');
      override.id = 'complete-override';
      override.addEventListener('click', () =>
        void this.action(controls, () => this.api.completeSession(state.id, true)),
      );
      controls.append(override);
    }

    if (state.phase === 'AWAITING_AGENT') {
      const send = el('button', 'send-button', 'Run agent turn');
      send.id = 'send-button';
      send.addEventListener('click', () =>
        void this.action(controls, () => this.api.advance(state.id)),
      );
      controls.append(send);

      const paste = el('form', 'paste-form');
      paste.id = 'paste-form';
      const textarea = el('textarea', 'paste-text');
      textarea.placeholder = 'Paste the agent reply here (manual mode)';
      const submit = el('button', 'paste-submit', 'Record reply');
      submit.type = 'submit';
      paste.append(textarea, submit);
      paste.addEventListener('submit', (event) => {
        event.preventDefault();
        void this.action(controls, () => this.api.pasteAgentResponse(state.id, textarea.value));
      });
      controls.append(paste);
    }

    const exportMd = el('button', 'export-md', 'Export markdown');
    exportMd.id = 'export-md';
    exportMd.addEventListener('click', async () => {
      try {
        const text = await this.api.exportSession(state.id, 'md');
        downloadText(`${state.id}.md`, text, 'text/markdown');
      } catch (error) {
        showError(controls, String(error));
      }
    });
    const exportCsv = el('button', 'export-csv', 'Export CSV');
    exportCsv.id = 'export-csv';
    exportCsv.addEventListener('click', async () => {
      try {
        const text = await this.api.exportSession(state.id, 'csv');
        downloadText(`${state.id}.csv`, text, 'text/csv');
      } catch (error) {
        showError(controls, String(error));
      }
    });

    controls.append(exportMd, exportCsv, outbound, errorSlot());
    return controls;
  }

  private renderClusterTray(state: SessionView): HTMLElement {
    const tray = el('section', 'cluster-tray');
    tray.id = 'cluster-tray';
    tray.append(el('h3', undefined, 'Clusters'));

    const existing = el('ul', 'cluster-list');
    for (const cluster of state.clusters) {
      const item = el('li', 'cluster-row', `${cluster.label}: ${cluster.member_ids.length} artifacts`);
      item.dataset.clusterId = cluster.id;
      existing.append(item);
    }
    tray.append(existing);

    if (state.phase === 'COMPLETE') return tray;

    const label = el('input', 'cluster-label');
    label.id = 'cluster-label';
    label.placeholder = 'Theme label';
    label.value = this.clusterLabelDraft;
    label.addEventListener('input', () => {
      this.clusterLabelDraft = label.value;
    });

    const dropZone = el('div', 'cluster-drop');
    dropZone.id = 'cluster-drop';
    dropZone.textContent = 'Drag cards here to stage a cluster';
    dropZone.addEventListener('dragover', (event) => event.preventDefault());
    dropZone.addEventListener('drop', (event) => {
      event.preventDefault();
      const artifactId = event.dataTransfer?.getData('text/plain');
      if (artifactId) this.stageClusterMember(artifactId, dropZone);
    });

    const staged = el('div', 'cluster-staged');
    staged.id = 'cluster-staged';
    for (const id of this.stagedClusterIds) {
      const artifact = state.board.find((a) => a.id === id);
      staged.append(el('span', 'chip', artifact ? artifact.text : id));
    }

    const assign = el('button', 'cluster-assign', 'Assign cluster');
    assign.id = 'cluster-assign';
    assign.disabled = this.stagedClusterIds.length === 0;
    assign.addEventListener('click', () => {
      const ids = [...this.stagedClusterIds];
      this.stagedClusterIds = [];
      this.clusterLabelDraft = '';
      void this.action(tray, () => this.api.assignCluster(state.id, label.value, ids));
    });

    tray.append(label, dropZone, staged, assign, errorSlot());
    return tray;
  }

  stageClusterMember(artifactId: string, zone?: HTMLElement): void {
    if (!this.stagedClusterIds.includes(artifactId)) {
      this.stagedClusterIds.push(artifactId);
    }
    if (zone) this.render();
  }

  private renderHillComposer(state: SessionView): HTMLElement {
    const composer = el('section', 'hill-composer');
    composer.id = 'hill-composer';
    composer.append(el('h3', undefined, 'Hills'));

    const list = el('ol', 'hill-list');
    for (const hill of state.hills) list.append(el('li', 'hill-row', hill.text));
    composer.append(list);

    if (state.phase === 'COMPLETE') return composer;

    const selects: Record<'who' | 'what' | 'wow', HTMLSelectElement> = {
      who: el('select'),
      what: el('select'),
      wow: el('select'),
    };
    const text = el('input', 'hill-text');
    text.id = 'hill-text';
    text.placeholder = 'Hill statement';

    const submit = el('button', 'hill-submit', 'Compose hill');
    submit.id = 'hill-submit';

    const selection = (): HillSelection => ({
      text: text.value,
      whoIds: selectedValues(selects.who),
      whatIds: selectedValues(selects.what),
      wowIds: selectedValues(selects.wow),
    });
    const gate = () => {
      submit.disabled = hillProblems(state, selection()).length > 0;
    };

    for (const key of ['who', 'what', 'wow'] as const) {
      const select = selects[key];
      select.multiple = true;
      select.id = `hill-${key}`;
      select.className = `hill-select ${key}`;
      for (const artifact of state.board) {
        if (artifact.criterion === key && artifact.status === 'ACCEPTED') {
          const option = el('option', undefined, artifact.text);
          option.value = artifact.id;
          select.append(option);
        }
      }
      select.addEventListener('change', gate);
      composer.append(labelled(key, select));
    }
    text.addEventListener('input', gate);
    gate();

    submit.addEventListener('click', () => {
      const picked = selection();
      void this.action(composer, () =>
        this.api.composeHill(state.id, picked.text, picked.whoIds, picked.whatIds, picked.wowIds),
      );
    });
    composer.append(text, submit, errorSlot());
    return composer;
  }

  private renderNotes(state: SessionView): HTMLElement {
    const notes = el('section', 'notes');
    notes.id = 'notes';
    notes.append(el('h3', undefined, 'Agent notes'));
    for (const commentary of state.step_commentary) {
      if (!commentary.disclaimers.length && !commentary.unparsed.length) continue;
      const block = el('div', 'note-block');
      block.append(el('h4', undefined, commentary.step === null ? 'Full run' : `Step ${commentary.step}`));
      for (const disclaimer of commentary.disclaimers) {
        block.append(el('p', 'disclaimer', disclaimer));
      }
      for (const line of commentary.unparsed) {
        block.append(el('p', 'unparsed', line));
      }
      notes.append(block);
    }
    return notes;
  }
}

function labelled(text: string, control: HTMLElement): HTMLElement {
  const wrap = el('label', 'field');
  wrap.append(el('span', 'field-label', text), control);
  return wrap;
}

function selectedValues(select: HTMLSelectElement): string[] {
  // Read the flags off `options` rather than `selectedOptions`; some DOM
  // implementations serve a stale cached collection for the latter.
  return Array.from(select.options)
    .filter((option) => option.selected)
    .map((option) => option.value);
}
