// Shapes returned by the session service (GET /sessions/{id} and friends).

export interface CriterionRef {
  key: string;
  label: string;
  description?: string;
}

export interface ActivityDocument {
  name: string;
  definition: string;
  examples: string[];
  criteria: CriterionRef[];
  steps: { index: number; instruction: string; produces_criterion?: string }[];
}

export interface ActivityListing {
  id: string;
  name: string;
  steps: number;
  criteria: { key: string; label: string }[];
}

export type ArtifactStatus = 'PROPOSED' | 'ACCEPTED' | 'REJECTED';

export interface ArtifactView {
  id: string;
  criterion: string;
  text: string;
  original_text: string;
  origin: 'AGENT' | 'HUMAN';
  author: string | null;
  status: ArtifactStatus;
  cluster_id: string | null;
}

export interface ClusterView {
  id: string;
  label: string;
  member_ids: string[];
}

export interface HillView {
  id: string;
  text: string;
  who_refs: string[];
  what_refs: string[];
  wow_refs: string[];
}

export interface MessageView {
  role: 'SYSTEM' | 'FACILITATOR' | 'AGENT';
  text: string;
  ordinal: number;
}

export interface CommentaryView {
  step: number | null;
  disclaimers: string[];
  unparsed: string[];
}

export interface SessionView {
  id: string;
  activity: ActivityDocument;
  context: string;
  mode: 'STEPWISE' | 'FULL_RUN';
  phase: 'AWAITING_AGENT' | 'REVIEWING' | 'COMPLETE';
  current_step: number | null;
  last_step: number;
  conversation: MessageView[];
  board: ArtifactView[];
  clusters: ClusterView[];
  hills: HillView[];
  step_commentary: CommentaryView[];
  pending_human_ids: string[];
  completed_with_override: boolean;
  last_sequence: number;
}

export interface SessionSummary {
  id: string;
  activity: string;
  mode: string;
  phase: string;
  current_step: number | null;
  counts: Record<string, number>;
  created: string;
  agent: string;
}

export interface SessionEventView {
  sequence: number;
  timestamp: string;
  type: string;
  payload: Record<string, unknown>;
}
