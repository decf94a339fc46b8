/**
 * Session controller, deliberately DOM-free: it talks to an ApiClient on
 * one side and an AnnotationView on the other, so the whole annotation
 * flow is testable without a browser.
 *
 * Concurrency contract: at most one judgment is in flight. Key presses
 * while busy are dropped on the floor rather than queued; the next pair
 * re-enables input, which keeps one keystroke = one judgment.
 */

import { ApiError, type ApiClient } from "./api.js";
import { keyToOutcome } from "./keyboard.js";
import type { Outcome, RankingRow, RequestView, SessionStats } from "./types.js";

export interface AnnotationView {
  showPair(req: RequestView, stats: SessionStats | null): void;
  showRanking(rows: RankingRow[], stats: SessionStats | null): void;
  showStats(stats: SessionStats): void;
  showError(message: string): void;
  clearError(): void;
  setBusy(busy: boolean): void;
}

export class AnnotationController {
  private readonly api: ApiClient;
  private readonly view: AnnotationView;
  private readonly sessionId: string;

  private pendingRequest: RequestView | null = null;
  private lastStats: SessionStats | null = null;
  private busyFlag = false;
  private done = false;

  constructor(api: ApiClient, view: AnnotationView, sessionId: string) {
    this.api = api;
    this.view = view;
    this.sessionId = sessionId;
  }

  get pending(): RequestView | null {
    return this.pendingRequest;
  }

  get busy(): boolean {
    return this.busyFlag;
  }

  get completed(): boolean {
    return this.done;
  }

  /** Fetch current stats and the server's pending pair (or the ranking). */
  async start(): Promise<void> {
    this.setBusy(true);
    try {
      this.lastStats = await this.api.stats(this.sessionId);
      this.view.showStats(this.lastStats);
      await this.refresh();
      this.view.clearError();
    } catch (err) {
      this.view.showError(describe(err));
    } finally {
      this.setBusy(false);
    }
  }

  /**
   * Submit a judgment for the pending pair. Ignored while another
   * submission is in flight or when nothing is pending, so rapid key
   * repeats cannot double-post. Returns true when a judgment was sent
   * and acknowledged.
   */
  async choose(outcome: Outcome): Promise<boolean> {
    if (this.busyFlag || this.done || this.pendingRequest === null) {
      return false;
    }
    const request = this.pendingRequest;
    this.setBusy(true);
    try {
      const ack = await this.api.submit(this.sessionId, request.request_id, outcome);
      this.lastStats = ack.stats;
      this.view.showStats(ack.stats);
      this.pendingRequest = null;
      await this.refresh();
      this.view.clearError();
      return true;
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        // stale request id or a session that finished elsewhere: adopt the
        // server's view silently instead of surfacing a scary banner
        this.pendingRequest = null;
        await this.refreshQuietly();
        return false;
      }
      // network failure or server error: the pair stays pending so the
      // same request id is retried; the server accepts it exactly once
      this.view.showError(describe(err));
      return false;
    } finally {
      this.setBusy(false);
    }
  }

  /** Keyboard entry point; unmapped keys are ignored. */
  handleKey(key: string): Promise<boolean> {
    const outcome = keyToOutcome(key);
    if (outcome === null) {
      return Promise.resolve(false);
    }
    return this.choose(outcome);
  }

  /** Re-sync with the server after an error banner. Never loses judgments. */
  async retry(): Promise<void> {
    if (this.busyFlag) {
      return;
    }
    this.setBusy(true);
    try {
      await this.refresh();
      this.view.clearError();
    } catch (err) {
      this.view.showError(describe(err));
    } finally {
      this.setBusy(false);
    }
  }

  private async refresh(): Promise<void> {
    const next = await this.api.next(this.sessionId);
    if (next.done) {
      const ranking = await this.api.ranking(this.sessionId);
      this.done = true;
      this.pendingRequest = null;
      this.view.showRanking(ranking.ranking, this.lastStats);
      return;
    }
    this.pendingRequest = next.request;
    this.view.showPair(next.request, this.lastStats);
  }

  private async refreshQuietly(): Promise<void> {
    try {
      await this.refresh();
    } catch (err) {
      this.view.showError(describe(err));
    }
  }

  private setBusy(busy: boolean): void {
    this.busyFlag = busy;
    this.view.setBusy(busy);
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) {
    return `${err.code}: ${err.message}`;
  }
  return err instanceof Error ? err.message : String(err);
}
