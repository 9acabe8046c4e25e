/** Submit a question and follow its lifecycle by polling /status.
 *
 * Every observed state is pushed into the turn (and surfaced through
 * onUpdate so the view can re-render live). On a terminal state the result
 * is fetched and attached. Network failures retry with exponential backoff;
 * after three consecutive failures the turn gets a visible error banner.
 */

import { ApiClient } from "./api";
import {
  completeTurn,
  ConversationTurn,
  failTurn,
  isTerminal,
  newTurn,
  recordStatus,
} from "./state";
import type { Language, LifecycleStatus } from "./types";

export interface FollowOptions {
  pollIntervalMs?: number;
  maxNetworkFailures?: number;
  maxPolls?: number;
  sleep?: (ms: number) => Promise<void>;
  onUpdate?: (turn: ConversationTurn) => void;
}

const defaultSleep = (ms: number) => new Promise<void>((r) => setTimeout(r, ms));

export async function submitAndFollow(
  client: ApiClient,
  question: string,
  language: Language,
  options: FollowOptions = {},
): Promise<ConversationTurn> {
  const pollIntervalMs = options.pollIntervalMs ?? 500;
  const maxNetworkFailures = options.maxNetworkFailures ?? 3;
  const maxPolls = options.maxPolls ?? 600;
  const sleep = options.sleep ?? defaultSleep;
  const onUpdate = options.onUpdate ?? (() => {});

  let turn = newTurn(question, language);
  onUpdate(turn);

  let submitted;
  try {
    submitted = await client.submitQuery(question, language);
  } catch (err) {
    turn = failTurn(turn, `Could not submit the question: ${String(err)}`);
    onUpdate(turn);
    return turn;
  }
  turn = { ...turn, jobId: submitted.job_id };
  onUpdate(turn);

  let failures = 0;
  let status: LifecycleStatus | null = null;
  for (let poll = 0; poll < maxPolls; poll++) {
    try {
      const response = await client.getStatus(submitted.job_id);
      failures = 0;
      status = response.status;
      turn = recordStatus(turn, status);
      onUpdate(turn);
      if (isTerminal(status)) {
        break;
      }
    } catch (err) {
      failures += 1;
      if (failures >= maxNetworkFailures) {
        turn = failTurn(turn, `Lost contact with the server: ${String(err)}`);
        onUpdate(turn);
        return turn;
      }
      await sleep(pollIntervalMs * 2 ** failures); // backoff
      continue;
    }
    await sleep(pollIntervalMs);
  }

  if (status === null || !isTerminal(status)) {
    turn = failTurn(turn, "The job did not finish in time.");
    onUpdate(turn);
    return turn;
  }

  try {
    const result = await client.getResult(submitted.job_id);
    turn = completeTurn(turn, result);
  } catch (err) {
    turn = failTurn(turn, `Could not fetch the result: ${String(err)}`);
  }
  onUpdate(turn);
  return turn;
}
