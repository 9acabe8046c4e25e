/** Browser wiring: DOM events, live re-render, history panel. */

import { ApiClient } from "./api";
import { submitAndFollow } from "./follow";
import {
  historyEntryToTurn,
  renderHistoryPanel,
  renderTurn,
} from "./render";
import { ChatViewState, ConversationTurn, initialState } from "./state";
import type { HistoryEntry, Language } from "./types";

const TOKEN_KEY = "querygov-session-token";

function sessionToken(): string {
  const stored = window.localStorage.getItem(TOKEN_KEY);
  if (stored) {
    return stored;
  }
  const token = window.prompt("Session token") ?? "";
  window.localStorage.setItem(TOKEN_KEY, token);
  return token;
}

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) {
    throw new Error(`missing element #${id}`);
  }
  return el as T;
}

function main(): void {
  const state: ChatViewState = initialState();
  const client = new ApiClient("", sessionToken());
  let history: HistoryEntry[] = [];

  const conversation = byId<HTMLDivElement>("conversation");
  const historyPanel = byId<HTMLDivElement>("history-panel");
  const form = byId<HTMLFormElement>("ask-form");
  const input = byId<HTMLInputElement>("question-input");
  const languageSelect = byId<HTMLSelectElement>("language-select");

  function renderConversation(): void {
    conversation.innerHTML = state.turns.map(renderTurn).join("");
    conversation.scrollTop = conversation.scrollHeight;
  }

  function renderHistory(): void {
    historyPanel.innerHTML = renderHistoryPanel(history);
  }

  async function refreshHistory(): Promise<void> {
    try {
      history = await client.getHistory(50);
      renderHistory();
    } catch {
      // History is cosmetic; ignore transient failures.
    }
  }

  function upsertTurn(turn: ConversationTurn): void {
    const index = state.turns.findIndex(
      (t) => t === turn || (turn.jobId !== null && t.jobId === turn.jobId),
    );
    if (index === -1) {
      state.turns.push(turn);
    } else {
      state.turns[index] = turn;
    }
    state.activeJobId = turn.jobId;
    renderConversation();
  }

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const question = input.value.trim();
    if (!question) {
      return;
    }
    input.value = "";
    state.selectedLanguage = languageSelect.value as Language;
    void submitAndFollow(client, question, state.selectedLanguage, {
      pollIntervalMs: state.pollIntervalMs,
      onUpdate: upsertTurn,
    }).then(() => refreshHistory());
  });

  conversation.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    if (target.dataset.action === "copy-sql") {
      const pre = target.parentElement?.querySelector(".sql-text");
      if (pre?.textContent) {
        void navigator.clipboard.writeText(pre.textContent);
      }
    }
  });

  historyPanel.addEventListener("click", (event) => {
    const item = (event.target as HTMLElement).closest<HTMLElement>(
      ".history-entry",
    );
    if (!item) {
      return;
    }
    const entry = history.find((h) => h.job_id === item.dataset.jobId);
    if (entry) {
      state.turns.push(historyEntryToTurn(entry));
      renderConversation();
    }
  });

  void refreshHistory();
}

document.addEventListener("DOMContentLoaded", main);
