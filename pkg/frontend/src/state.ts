import {
  ApiClient,
  ApiError,
  type Category,
  type LabelPayload,
  type UserTermDraft,
  type Verdict,
} from "./api";

export type ScreenStatus =
  | "loading"
  | "ready"
  | "submitting"
  | "submitted"
  | "readonly"
  | "done"
  | "error";

export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

const CATEGORIES: Category[] = ["indication", "adverse_event", "boxed_warning"];

/**
 * Review-screen state: verdict selections, draft user terms, submission
 * gating. The submit gate mirrors the server's completeness rule, so the
 * UI never sends a request the server would reject as incomplete.
 */
export class ReviewController {
  label: LabelPayload | null = null;
  status: ScreenStatus = "loading";
  verdicts = new Map<string, Verdict>();
  drafts: UserTermDraft[] = [];
  activeCategory: Category = "adverse_event";
  focusedTermIndex = 0;
  missingTermIds: string[] = [];
  errorMessage = "";

  constructor(
    private api: ApiClient,
    private storage: StorageLike | null = null,
  ) {}

  private draftKey(): string {
    return `pvlens-drafts-${this.label?.set_id ?? ""}`;
  }

  async loadNext(): Promise<void> {
    this.status = "loading";
    try {
      const label = await this.api.nextLabel();
      if (label === null) {
        this.label = null;
        this.status = "done";
        return;
      }
      this.setLabel(label);
    } catch (err) {
      this.fail(err);
    }
  }

  async load(setId: string): Promise<void> {
    this.status = "loading";
    try {
      this.setLabel(await this.api.getLabel(setId));
    } catch (err) {
      this.fail(err);
    }
  }

  private setLabel(label: LabelPayload): void {
    this.label = label;
    this.verdicts = new Map();
    this.missingTermIds = [];
    this.focusedTermIndex = 0;
    this.activeCategory =
      CATEGORIES.find((c) => label.sections[c] !== undefined) ?? "adverse_event";
    this.restoreDrafts();
    this.status = label.closed ? "readonly" : "ready";
  }

  private fail(err: unknown): void {
    this.status = "error";
    this.errorMessage = err instanceof Error ? err.message : String(err);
  }

  termsInCategory(category: Category) {
    return this.label?.terms.filter((t) => t.category === category) ?? [];
  }

  setVerdict(termId: string, verdict: Verdict): void {
    if (!this.label || this.status !== "ready") return;
    // never invent terms: only ids present in the service payload
    if (!this.label.terms.some((t) => t.term_id === termId)) {
      throw new Error(`unknown term id ${termId}`);
    }
    this.verdicts.set(termId, verdict);
    this.missingTermIds = this.missingTermIds.filter((id) => id !== termId);
  }

  get allVerdictsSet(): boolean {
    return (
      this.label !== null &&
      this.label.terms.every((t) => this.verdicts.has(t.term_id))
    );
  }

  get canSubmit(): boolean {
    return this.status === "ready" && this.allVerdictsSet;
  }

  addDraft(category: Category, text: string): void {
    const trimmed = text.trim();
    if (!trimmed) return;
    this.drafts.push({ category, text: trimmed });
    this.persistDrafts();
  }

  removeDraft(index: number): void {
    this.drafts.splice(index, 1);
    this.persistDrafts();
  }

  private persistDrafts(): void {
    if (!this.storage || !this.label) return;
    this.storage.setItem(this.draftKey(), JSON.stringify(this.drafts));
  }

  private restoreDrafts(): void {
    this.drafts = [];
    if (!this.storage) return;
    const raw = this.storage.getItem(this.draftKey());
    if (raw) {
      try {
        this.drafts = JSON.parse(raw) as UserTermDraft[];
      } catch {
        this.drafts = [];
      }
    }
  }

  async submit(): Promise<boolean> {
    if (!this.label || !this.canSubmit) return false;
    this.status = "submitting";
    const decisions = Object.fromEntries(this.verdicts);
    try {
      await this.api.submitReview(this.label.set_id, decisions, this.drafts);
      this.storage?.removeItem(this.draftKey());
      this.status = "submitted";
      await this.loadNext();
      return true;
    } catch (err) {
      if (err instanceof ApiError) {
        if (err.status === 409) {
          // someone already submitted this assignment: read-only view
          this.status = "readonly";
          return false;
        }
        if (err.status === 422) {
          this.status = "ready";
          this.missingTermIds = err.missingTermIds;
          return false;
        }
      }
      // network failure: keep verdicts and drafts, stay editable
      this.status = "ready";
      this.errorMessage = err instanceof Error ? err.message : String(err);
      return false;
    }
  }

  /** Keyboard-first entry: i=include, e=exclude, n/arrow=next, p=previous. */
  handleKey(key: string): void {
    const terms = this.termsInCategory(this.activeCategory);
    if (terms.length === 0) return;
    const current = terms[Math.min(this.focusedTermIndex, terms.length - 1)];
    switch (key) {
      case "i":
        this.setVerdict(current.term_id, "include");
        this.focusNext(terms.length);
        break;
      case "e":
        this.setVerdict(current.term_id, "exclude");
        this.focusNext(terms.length);
        break;
      case "n":
      case "ArrowRight":
        this.focusNext(terms.length);
        break;
      case "p":
      case "ArrowLeft":
        this.focusedTermIndex = Math.max(0, this.focusedTermIndex - 1);
        break;
    }
  }

  private focusNext(count: number): void {
    this.focusedTermIndex = Math.min(count - 1, this.focusedTermIndex + 1);
  }
}

/** Adjudicator queue state: discrepant terms plus proposed user terms. */
export class AdjudicationController {
  queue: import("./api").AdjudicationQueue = { items: [], user_terms: [] };
  status: "loading" | "ready" | "forbidden" | "error" = "loading";
  errorMessage = "";

  constructor(private api: ApiClient) {}

  async loadQueue(): Promise<void> {
    this.status = "loading";
    try {
      this.queue = await this.api.adjudicationQueue();
      this.status = "ready";
    } catch (err) {
      if (err instanceof ApiError && err.status === 403) {
        this.status = "forbidden";
      } else {
        this.status = "error";
        this.errorMessage = err instanceof Error ? err.message : String(err);
      }
    }
  }

  get openItems() {
    return this.queue.items.filter((i) => i.final_verdict === null);
  }

  get openUserTerms() {
    return this.queue.user_terms.filter((t) => t.verdict === null);
  }

  async resolve(id: string, verdict: "include" | "exclude" | "accept" | "reject") {
    const result = await this.api.adjudicate(id, verdict);
    await this.loadQueue();
    return result;
  }
}
