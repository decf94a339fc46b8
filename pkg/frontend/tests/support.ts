/** Shared test doubles: a call-recording view and item builders. */

import type { AnnotationView } from "../src/controller.js";
import type { ItemView, RankingRow, RequestView, SessionStats } from "../src/types.js";

export class RecordingView implements AnnotationView {
  pairs: RequestView[] = [];
  rankings: RankingRow[][] = [];
  statsShown: SessionStats[] = [];
  errors: string[] = [];
  clears = 0;
  busyLog: boolean[] = [];

  showPair(req: RequestView): void {
    this.pairs.push(req);
  }

  showRanking(rows: RankingRow[]): void {
    this.rankings.push(rows);
  }

  showStats(stats: SessionStats): void {
    this.statsShown.push(stats);
  }

  showError(message: string): void {
    this.errors.push(message);
  }

  clearError(): void {
    this.clears += 1;
  }

  setBusy(busy: boolean): void {
    this.busyLog.push(busy);
  }

  get lastStats(): SessionStats | undefined {
    return this.statsShown[this.statsShown.length - 1];
  }
}

export function item(id: string): ItemView {
  return {
    id,
    display_ref: `${id}.png`,
    image_url: `/v1/sessions/s/items/${id}/image`,
  };
}
