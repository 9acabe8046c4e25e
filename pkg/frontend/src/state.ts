/** Chat view state: one conversation turn per submitted question.
 *
 * The status timeline stores exactly the sequence observed through /status
 * polling, deduplicated but never reordered; recordStatus refuses to move
 * backwards so a stale poll response can never rewind the timeline.
 */

import type { Language, LifecycleStatus, ResultResponse } from "./types";
import { LIFECYCLE_ORDER as ORDER } from "./types";

export interface ConversationTurn {
  jobId: string | null;
  question: string;
  language: Language;
  timeline: LifecycleStatus[];
  result: ResultResponse | null;
  errorBanner: string | null;
  restoredFromHistory: boolean;
}

export interface ChatViewState {
  turns: ConversationTurn[];
  activeJobId: string | null;
  selectedLanguage: Language;
  pollIntervalMs: number;
}

export function initialState(pollIntervalMs = 500): ChatViewState {
  return {
    turns: [],
    activeJobId: null,
    selectedLanguage: "en",
    pollIntervalMs,
  };
}

export function newTurn(question: string, language: Language): ConversationTurn {
  return {
    jobId: null,
    question,
    language,
    timeline: [],
    result: null,
    errorBanner: null,
    restoredFromHistory: false,
  };
}

/** Append a polled status; deduplicates repeats and ignores regressions. */
export function recordStatus(
  turn: ConversationTurn,
  status: LifecycleStatus,
): ConversationTurn {
  const last = turn.timeline[turn.timeline.length - 1];
  if (last === status) {
    return turn;
  }
  if (last !== undefined && ORDER[status] < ORDER[last]) {
    return turn; // stale poll; never rewind
  }
  return { ...turn, timeline: [...turn.timeline, status] };
}

export function isTimelineNonDecreasing(timeline: LifecycleStatus[]): boolean {
  for (let i = 1; i < timeline.length; i++) {
    if (ORDER[timeline[i]] < ORDER[timeline[i - 1]]) {
      return false;
    }
  }
  return true;
}

export function completeTurn(
  turn: ConversationTurn,
  result: ResultResponse,
): ConversationTurn {
  return { ...turn, result };
}

export function failTurn(turn: ConversationTurn, banner: string): ConversationTurn {
  return { ...turn, errorBanner: banner };
}

export function isTerminal(status: LifecycleStatus): boolean {
  return status === "ready" || status === "error";
}
