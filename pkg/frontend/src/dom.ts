/** Browser rendering of AnnotationView. All element ids live in index.html. */

import type { AnnotationView } from "./controller.js";
import type { RankingRow, RequestView, SessionStats } from "./types.js";

// neutral grey frame shown when an item's image fails to load
const PLACEHOLDER =
  "data:image/svg+xml," +
  encodeURIComponent(
    '<svg xmlns="http://www.w3.org/2000/svg" width="320" height="240">' +
      '<rect width="100%" height="100%" fill="#d8d8d8"/>' +
      '<text x="50%" y="50%" text-anchor="middle" fill="#555" font-size="16" ' +
      'font-family="sans-serif">image unavailable</text></svg>',
  );

function must<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (el === null) {
    throw new Error(`missing element #${id}`);
  }
  return el as T;
}

export interface DomViewOptions {
  /** Resolve a server-relative image URL to an absolute one. */
  resolveImage: (relative: string) => string;
  /** Image URL for a ranked item, addressed by id. */
  itemImage: (itemId: string) => string;
  /** The session's JSON export endpoint, for the download link. */
  exportUrl: string;
}

export class DomView implements AnnotationView {
  private readonly options: DomViewOptions;

  constructor(options: DomViewOptions) {
    this.options = options;
    for (const id of ["image-left", "image-right"]) {
      const img = must<HTMLImageElement>(id);
      img.addEventListener("error", () => {
        if (img.src !== PLACEHOLDER) {
          img.src = PLACEHOLDER;
        }
      });
    }
  }

  showPair(req: RequestView, stats: SessionStats | null): void {
    must("pair-panel").hidden = false;
    must("ranking-panel").hidden = true;
    must<HTMLImageElement>("image-left").src = this.options.resolveImage(req.left.image_url);
    must<HTMLImageElement>("image-right").src = this.options.resolveImage(req.right.image_url);
    must("caption-left").textContent = req.left.display_ref;
    must("caption-right").textContent = req.right.display_ref;
    must("pair-detail").textContent =
      `pair #${req.request_id}  ·  uncertainty ${req.uncertainty.toFixed(3)}` +
      `  ·  threshold ${req.theta.toFixed(3)}`;
    if (stats !== null) {
      this.showStats(stats);
    }
  }

  showRanking(rows: RankingRow[], stats: SessionStats | null): void {
    must("pair-panel").hidden = true;
    const panel = must("ranking-panel");
    panel.hidden = false;
    const exportLink = must<HTMLAnchorElement>("export-link");
    exportLink.href = this.options.exportUrl;
    const body = must<HTMLTableSectionElement>("ranking-body");
    body.replaceChildren();
    for (const row of rows) {
      const tr = document.createElement("tr");

      const thumbCell = document.createElement("td");
      const thumb = document.createElement("img");
      thumb.className = "thumb";
      thumb.alt = row.display_ref;
      thumb.addEventListener("error", () => {
        if (thumb.src !== PLACEHOLDER) {
          thumb.src = PLACEHOLDER;
        }
      });
      thumb.src = this.options.itemImage(row.id);
      thumbCell.appendChild(thumb);

      const cells = [
        String(row.rank),
        row.display_ref,
        row.rating.toFixed(1),
        String(row.bucket),
      ].map((text) => {
        const td = document.createElement("td");
        td.textContent = text;
        return td;
      });
      tr.append(cells[0]!, thumbCell, cells[1]!, cells[2]!, cells[3]!);
      body.appendChild(tr);
    }
    if (stats !== null) {
      this.showStats(stats);
    }
  }

  showStats(stats: SessionStats): void {
    const pct = Math.round(stats.progress * 100);
    must("stats-line").textContent =
      `${stats.session_id}  ·  ${stats.status}  ·  ${stats.item_count} items  ·  ` +
      `${stats.comparisons_done}/${stats.comparisons_total_estimate} comparisons (~${pct}%)` +
      `  ·  human ${stats.human_count} / auto ${stats.auto_count}` +
      `  ·  θ ${stats.theta.toFixed(3)}`;
  }

  showError(message: string): void {
    const banner = must("error-banner");
    banner.hidden = false;
    must("error-message").textContent = message;
  }

  clearError(): void {
    must("error-banner").hidden = true;
    must("error-message").textContent = "";
  }

  setBusy(busy: boolean): void {
    for (const id of ["choose-left", "choose-right", "choose-equal"]) {
      must<HTMLButtonElement>(id).disabled = busy;
    }
    must("pair-panel").classList.toggle("busy", busy);
  }
}
