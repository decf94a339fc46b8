/**
 * Entry point. The page is configured entirely from the query string:
 *
 *   annotate.html?session=my-session[&base=http://host:port]
 *
 * `base` defaults to the page's own origin, which is the common case of
 * the UI being served next to the API.
 */

import { HttpApiClient } from "./api.js";
import { AnnotationController } from "./controller.js";
import { DomView } from "./dom.js";
import { keyToOutcome } from "./keyboard.js";

function boot(): void {
  const params = new URLSearchParams(window.location.search);
  const sessionId = params.get("session");
  const base = params.get("base") ?? window.location.origin;

  const api = new HttpApiClient(base);
  const sid = sessionId ?? "";
  const view = new DomView({
    resolveImage: (relative) => api.imageUrl(sid, relative),
    itemImage: (itemId) => api.itemImageUrl(sid, itemId),
    exportUrl: api.exportUrl(sid),
  });

  if (sessionId === null || sessionId === "") {
    view.showError("no session: open this page as annotate.html?session=<id>");
    return;
  }

  const controller = new AnnotationController(api, view, sessionId);

  window.addEventListener("keydown", (event) => {
    if (keyToOutcome(event.key) === null) {
      return;
    }
    event.preventDefault(); // arrows must not scroll the page
    void controller.handleKey(event.key);
  });

  const clicks: Array<[string, string]> = [
    ["choose-left", "ArrowLeft"],
    ["choose-right", "ArrowRight"],
    ["choose-equal", "="],
  ];
  for (const [id, key] of clicks) {
    document.getElementById(id)?.addEventListener("click", () => {
      void controller.handleKey(key);
    });
  }
  document.getElementById("retry-button")?.addEventListener("click", () => {
    void controller.retry();
  });

  void controller.start();
}

boot();
