// HTTP client for the session service plus a small SSE reader built on
// fetch streaming, so the same code runs in the browser and in node tests.

import type {
  ActivityListing,
  SessionEventView,
  SessionSummary,
  SessionView,
} from './types.js';

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(detail);
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let detail = `${response.status} ${response.statusText}`;
  try {
    const body = await response.json();
    if (body && typeof body.detail === 'string') detail = body.detail;
  } catch {
    // non-JSON error body; keep the status line
  }
  return new ApiError(response.status, detail);
}

export class ApiClient {
  constructor(private baseUrl: string = '') {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { 'Content-Type': 'application/json' },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  listActivities(): Promise<{ activities: ActivityListing[] }> {
    return this.request('GET', '/activities');
  }

  createSession(body: {
    activity?: string;
    activity_document?: unknown;
    context: string;
    mode: string;
    agent?: string;
  }): Promise<SessionSummary> {
    return this.request('POST', '/sessions', body);
  }

  getSession(id: string): Promise<SessionView> {
    return this.request('GET', `/sessions/${id}`);
  }

  advance(id: string): Promise<SessionView> {
    return this.request('POST', `/sessions/${id}/advance`);
  }

  pasteAgentResponse(id: string, text: string): Promise<SessionView> {
    return this.request('POST', `/sessions/${id}/agent-response`, { text });
  }

  addArtifact(id: string, criterion: string, text: string, author: string): Promise<SessionView> {
    return this.request('POST', `/sessions/${id}/artifacts`, { criterion, text, author });
  }

  review(
    id: string,
    artifactId: string,
    decision: 'accept' | 'reject' | 'amend',
    text?: string,
  ): Promise<SessionView> {
    return this.request('POST', `/sessions/${id}/artifacts/${artifactId}/review`, {
      decision,
      text,
    });
  }

  assignCluster(id: string, label: string, artifactIds: string[]): Promise<SessionView> {
    return this.request('POST', `/sessions/${id}/clusters`, {
      label,
      artifact_ids: artifactIds,
    });
  }

  composeHill(
    id: string,
    text: string,
    whoIds: string[],
    whatIds: string[],
    wowIds: string[],
  ): Promise<SessionView> {
    return this.request('POST', `/sessions/${id}/hills`, {
      text,
      who_ids: whoIds,
      what_ids: whatIds,
      wow_ids: wowIds,
    });
  }

  completeSession(id: string, override = false): Promise<SessionView> {
    return this.request('POST', `/sessions/${id}/complete`, { override });
  }

  async exportSession(id: string, format: 'md' | 'csv'): Promise<string> {
    const response = await fetch(`${this.baseUrl}/sessions/${id}/export?format=${format}`);
    if (!response.ok) throw await parseError(response);
    return response.text();
  }

  async events(id: string, after = 0): Promise<SessionEventView[]> {
    const body = await this.request<{ events: SessionEventView[] }>(
      'GET',
      `/sessions/${id}/events?after=${after}`,
    );
    return body.events;
  }
}

// --- server-sent events ----------------------------------------------------

export interface SseFrame {
  id?: string;
  event?: string;
  data: string;
}

/** Split complete SSE frames off the front of a buffer; returns the rest. */
export function parseSseBuffer(buffer: string): { frames: SseFrame[]; rest: string } {
  const frames: SseFrame[] = [];
  const normalized = buffer.replace(/\r\n/g, '\n');
  const parts = normalized.split('\n\n');
  const rest = parts.pop() ?? '';
  for (const part of parts) {
    const frame: SseFrame = { data: '' };
    const dataLines: string[] = [];
    for (const line of part.split('\n')) {
      if (line.startsWith(':') || line === '') continue;
      const colon = line.indexOf(':');
      const field = colon === -1 ? line : line.slice(0, colon);
      let value = colon === -1 ? '' : line.slice(colon + 1);
      if (value.startsWith(' ')) value = value.slice(1);
      if (field === 'data') dataLines.push(value);
      else if (field === 'id') frame.id = value;
      else if (field === 'event') frame.event = value;
    }
    if (dataLines.length) {
      frame.data = dataLines.join('\n');
      frames.push(frame);
    }
  }
  return { frames, rest };
}

export interface EventStreamHandle {
  close(): void;
}

export interface EventStreamCallbacks {
  onEvent(event: SessionEventView): void;
  onStatus?(online: boolean): void;
}

/**
 * Subscribe to a session's live event stream. Reconnects automatically
 * from the last seen sequence; callers re-render on every event.
 */
export function subscribeEvents(
  baseUrl: string,
  sessionId: string,
  callbacks: EventStreamCallbacks,
  after = 0,
): EventStreamHandle {
  let closed = false;
  let cursor = after;
  const controller = { current: new AbortController() };

  async function readOnce(): Promise<void> {
    const response = await fetch(`${baseUrl}/sessions/${sessionId}/events?after=${cursor}`, {
      headers: { accept: 'text/event-stream' },
      signal: controller.current.signal,
    });
    if (!response.ok || !response.body) throw new Error(`stream failed: ${response.status}`);
    callbacks.onStatus?.(true);
    const reader = response.body.getReader();
    const decoder = new TextDecoder();
    let buffer = '';
    for (;;) {
      const { done, value } = await reader.read();
      if (done) return;
      buffer += decoder.decode(value, { stream: true });
      const { frames, rest } = parseSseBuffer(buffer);
      buffer = rest;
      for (const frame of frames) {
        const event = JSON.parse(frame.data) as SessionEventView;
        cursor = Math.max(cursor, event.sequence);
        callbacks.onEvent(event);
      }
    }
  }

  (async () => {
    while (!closed) {
      try {
        await readOnce();
      } catch {
        if (closed) return;
        callbacks.onStatus?.(false);
      }
      if (!closed) {
        await new Promise((resolve) => setTimeout(resolve, 1000));
        controller.current = new AbortController();
      }
    }
  })();

  return {
    close() {
      closed = true;
      controller.current.abort();
    },
  };
}
