import { ApiClient, type Category, type Verdict } from "./api";
import { renderLabel, renderQueue } from "./render";
import { AdjudicationController, ReviewController } from "./state";

/**
 * Browser wiring. Configuration comes from two query/localStorage values:
 * base URL of the review service and the caller's bearer token. Adjudicator
 * tokens land on the queue screen, reviewer tokens on the review screen.
 */

function config(): { baseUrl: string; token: string; screen: string } {
  const params = new URLSearchParams(window.location.search);
  const baseUrl =
    params.get("api") ?? localStorage.getItem("pvlens-api") ?? "http://127.0.0.1:8642";
  const token = params.get("token") ?? localStorage.getItem("pvlens-token") ?? "";
  localStorage.setItem("pvlens-api", baseUrl);
  if (token) localStorage.setItem("pvlens-token", token);
  return { baseUrl, token, screen: params.get("screen") ?? "review" };
}

function mountReview(root: HTMLElement, api: ApiClient): void {
  const controller = new ReviewController(api, localStorage);

  const redraw = () => {
    root.innerHTML = renderLabel(controller);
  };

  root.addEventListener("click", async (event) => {
    const target = event.target as HTMLElement;
    const termId = target.dataset.termId;
    const verdict = target.dataset.verdict as Verdict | undefined;
    if (termId && verdict) {
      controller.setVerdict(termId, verdict);
      redraw();
      return;
    }
    if (target.dataset.action === "submit") {
      await controller.submit();
      redraw();
      return;
    }
    if (target.dataset.action === "retry") {
      await controller.loadNext();
      redraw();
      return;
    }
    if (target.dataset.action === "remove-draft") {
      controller.removeDraft(Number(target.dataset.index));
      redraw();
      return;
    }
    const category = target.dataset.category as Category | undefined;
    if (category) {
      controller.activeCategory = category;
      controller.focusedTermIndex = 0;
      redraw();
    }
  });

  root.addEventListener("submit", (event) => {
    const form = event.target as HTMLFormElement;
    if (form.dataset.action !== "add-user-term") return;
    event.preventDefault();
    const data = new FormData(form);
    controller.addDraft(
      data.get("category") as Category,
      String(data.get("text") ?? ""),
    );
    redraw();
  });

  document.addEventListener("keydown", (event) => {
    if ((event.target as HTMLElement).tagName === "INPUT") return;
    controller.handleKey(event.key);
    redraw();
  });

  controller.loadNext().then(redraw);
}

function mountQueue(root: HTMLElement, api: ApiClient): void {
  const controller = new AdjudicationController(api);

  const redraw = () => {
    root.innerHTML = renderQueue(controller);
  };

  root.addEventListener("click", async (event) => {
    const target = event.target as HTMLElement;
    const itemId = target.dataset.itemId;
    const verdict = target.dataset.verdict as
      | "include"
      | "exclude"
      | "accept"
      | "reject"
      | undefined;
    if (itemId && verdict) {
      await controller.resolve(itemId, verdict);
      redraw();
    }
  });

  controller.loadQueue().then(redraw);
}

export function bootstrap(): void {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app mount point");
  const { baseUrl, token, screen } = config();
  if (!token) {
    root.innerHTML =
      `<p class="status error">No token configured. Open with ?token=…&api=…</p>`;
    return;
  }
  const api = new ApiClient(baseUrl, token);
  if (screen === "adjudication") {
    mountQueue(root, api);
  } else {
    mountReview(root, api);
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  bootstrap();
}
