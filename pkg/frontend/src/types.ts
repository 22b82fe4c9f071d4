/** Payload types for the review-service HTTP API. */

export type Status = 'auto' | 'adjusted' | 'manual' | 'no_object' | 'burn_in_excluded';
export type Difficulty = 'easy' | 'medium' | 'hard';
export type EditAction = 'confirm' | 'adjust' | 'replace' | 'no_object' | 'difficulty';
export type QueueReason = 'low_score' | 'no_candidate' | 'person_conflict' | 'user_flag';

/** Pixel-space box as the API carries it: center + size. */
export interface BboxPx {
  x_c: number;
  y_c: number;
  w: number;
  h: number;
}

export interface LabelRecordJson {
  frame: string;
  sequence_id: string;
  frame_index: number;
  width: number;
  height: number;
  status: Status;
  bbox_px: [number, number, number, number] | null;
  difficulty: Difficulty | null;
  pipeline_score: number | null;
  updated_at: number;
  editor: string;
  revision: number;
  frame_path: string | null;
  location: string;
  background_id: string;
}

export interface FrameInfoJson {
  frame: string;
  sequence_id: string;
  frame_index: number;
  width: number;
  height: number;
  frame_path: string | null;
  location: string;
  background_id: string;
}

export interface QueueItemJson {
  frame: string;
  reason: QueueReason;
  state: 'pending' | 'done';
}

export interface FrameLabelResponse {
  frame: string;
  record: LabelRecordJson | null;
  frame_info: FrameInfoJson | null;
  queue: QueueItemJson | null;
}

export interface ContextResponse {
  center: string;
  n: number;
  frames: FrameLabelResponse[];
}

export interface SequenceSummaryJson {
  sequence_id: string;
  frames: number;
  statuses: Record<string, number>;
}

export interface FrameEntryJson {
  frame: string;
  frame_index: number;
  status: Status | 'pending';
  difficulty: Difficulty | null;
  revision: number | null;
}

export interface StatsJson {
  total: number;
  by_status: Record<string, number>;
  by_difficulty: Record<string, number>;
  by_background: Record<string, number>;
  labeled: number;
  labeled_percentages: Record<string, number>;
  queue_pending: number;
}

export interface EditBody {
  action: EditAction;
  bbox?: BboxPx;
  difficulty?: Difficulty;
  editor: string;
  revision?: number | null;
}
