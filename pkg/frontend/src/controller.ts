// View-state machine for the chat page, free of DOM dependencies so the
// interaction logic is unit-testable. The DOM layer subscribes to onChange
// and re-renders from the snapshot.

import { AgentApi, ApiError } from "./api.js";

export interface Message {
  speaker: "user" | "agent";
  text: string;
  // A topic offer rendered as tappable accept/refuse chips.
  suggestion?: string | null;
  chipsEnabled?: boolean;
}

export interface ChatViewState {
  sessionId: string | null;
  messages: Message[];
  pending: boolean;
  ratingOpen: boolean;
  ratingSubmitted: number | null;
  feedbackText: string;
  finalized: boolean;
  errorBanner: string | null;
  // Input preserved for retry after a network failure.
  retryText: string | null;
}

// The chips send these exact phrases through the normal pipeline, so the
// classifier path is identical to typed input.
export const ACCEPT_TEXT = "yes";
export const REFUSE_TEXT = "no thanks";

export class ChatController {
  readonly state: ChatViewState = {
    sessionId: null,
    messages: [],
    pending: false,
    ratingOpen: false,
    ratingSubmitted: null,
    feedbackText: "",
    finalized: false,
    errorBanner: null,
    retryText: null,
  };

  private listeners: Array<(state: ChatViewState) => void> = [];

  constructor(private api: AgentApi) {}

  onChange(listener: (state: ChatViewState) => void): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  async start(): Promise<void> {
    this.state.pending = true;
    this.notify();
    try {
      const { session_id } = await this.api.createSession();
      this.state.sessionId = session_id;
      this.state.errorBanner = null;
    } catch (err) {
      this.state.errorBanner = "Could not reach the service. Retry?";
    } finally {
      this.state.pending = false;
      this.notify();
    }
  }

  canSend(): boolean {
    return !!this.state.sessionId && !this.state.pending && !this.state.finalized;
  }

  async send(text: string): Promise<void> {
    const trimmed = text.trim();
    if (!trimmed || !this.canSend()) return;

    // Chips on earlier messages are stale once the conversation moves on.
    for (const message of this.state.messages) message.chipsEnabled = false;
    this.state.messages.push({ speaker: "user", text: trimmed });
    this.state.pending = true;
    this.state.errorBanner = null;
    this.state.retryText = null;
    this.notify();

    try {
      const result = await this.api.sendUtterance(this.state.sessionId!, trimmed);
      this.state.messages.push({
        speaker: "agent",
        text: result.text,
        suggestion: result.suggestion,
        chipsEnabled: result.suggestion != null,
      });
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.state.finalized = true;
        this.state.errorBanner = "This session has ended.";
      } else {
        // Network failure: drop the optimistic user bubble, keep the input.
        this.state.messages.pop();
        this.state.retryText = trimmed;
        this.state.errorBanner = "Message not sent. Check the connection and retry.";
      }
    } finally {
      this.state.pending = false;
      this.notify();
    }
  }

  acceptSuggestion(): Promise<void> {
    return this.send(ACCEPT_TEXT);
  }

  refuseSuggestion(): Promise<void> {
    return this.send(REFUSE_TEXT);
  }

  openRating(): void {
    if (this.state.ratingSubmitted == null) {
      this.state.ratingOpen = true;
      this.notify();
    }
  }

  setFeedback(text: string): void {
    this.state.feedbackText = text;
  }

  async rate(rating: number): Promise<void> {
    if (this.state.ratingSubmitted != null) return; // submittable once
    if (!Number.isInteger(rating) || rating < 1 || rating > 5) {
      this.state.errorBanner = "Please pick a rating from 1 to 5.";
      this.notify();
      return;
    }
    this.state.pending = true;
    this.notify();
    try {
      await this.api.rateSession(this.state.sessionId!, rating, this.state.feedbackText);
      this.state.ratingSubmitted = rating;
      this.state.finalized = true;
      this.state.ratingOpen = false;
      this.state.errorBanner = null;
    } catch (err) {
      this.state.errorBanner = "Could not submit the rating. Retry?";
    } finally {
      this.state.pending = false;
      this.notify();
    }
  }

  /** The transcript as (user, agent) text pairs, for log comparison. */
  transcript(): Array<{ user: string; agent: string }> {
    const pairs: Array<{ user: string; agent: string }> = [];
    for (let i = 0; i + 1 < this.state.messages.length; i += 2) {
      pairs.push({
        user: this.state.messages[i].text,
        agent: this.state.messages[i + 1].text,
      });
    }
    return pairs;
  }

  /** True when the displayed transcript equals the service-side log. */
  async matchesServiceLog(): Promise<boolean> {
    if (!this.state.sessionId) return false;
    const log = await this.api.fetchLog(this.state.sessionId);
    const shown = this.transcript();
    if (log.turns.length !== shown.length) return false;
    return log.turns.every(
      (turn, i) =>
        turn.user_text === shown[i].user && turn.response_text === shown[i].agent,
    );
  }
}
