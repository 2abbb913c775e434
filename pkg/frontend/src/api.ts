export type Category = "indication" | "adverse_event" | "boxed_warning";
export type Verdict = "include" | "exclude";
export type UserTermVerdict = "accept" | "reject";

export interface Term {
  term_id: string;
  concept_code: string;
  pt_code: string;
  surface: string;
  span: [number, number];
  category: Category;
}

export interface LabelPayload {
  set_id: string;
  closed: boolean;
  sections: Partial<Record<Category, string>>;
  terms: Term[];
}

export interface AdjudicationItem {
  item_id: string;
  set_id: string;
  term_id: string;
  reviewer_verdicts: Record<string, Verdict>;
  final_verdict: Verdict | null;
}

export interface QueueUserTerm {
  user_term_id: string;
  set_id: string;
  category: Category;
  text: string;
  proposed_by: string;
  verdict: UserTermVerdict | null;
}

export interface AdjudicationQueue {
  items: AdjudicationItem[];
  user_terms: QueueUserTerm[];
}

export interface UserTermDraft {
  category: Category;
  text: string;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: unknown,
  ) {
    super(`HTTP ${status}`);
  }

  /** term ids the server reported as missing on an incomplete submission */
  get missingTermIds(): string[] {
    const d = this.detail as { term_ids?: string[] } | undefined;
    return d && Array.isArray(d.term_ids) ? d.term_ids : [];
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private token: string,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await fetch(this.baseUrl + path, {
      ...init,
      headers: {
        Authorization: `Bearer ${this.token}`,
        "Content-Type": "application/json",
        ...(init?.headers ?? {}),
      },
    });
    if (res.status === 204) return null as T;
    const text = await res.text();
    const body = text ? safeJson(text) : null;
    if (!res.ok) {
      const detail =
        body && typeof body === "object" && "detail" in (body as object)
          ? (body as { detail: unknown }).detail
          : body;
      throw new ApiError(res.status, detail);
    }
    return body as T;
  }

  nextLabel(): Promise<LabelPayload | null> {
    return this.request<LabelPayload | null>("/labels/next");
  }

  getLabel(setId: string): Promise<LabelPayload> {
    return this.request<LabelPayload>(`/labels/${setId}`);
  }

  submitReview(
    setId: string,
    decisions: Record<string, Verdict>,
    userTerms: UserTermDraft[],
  ): Promise<{ adjudication_items_created: number }> {
    return this.request(`/labels/${setId}/review`, {
      method: "POST",
      body: JSON.stringify({ decisions, user_terms: userTerms }),
    });
  }

  addUserTerm(setId: string, draft: UserTermDraft): Promise<{ user_term_id: string }> {
    return this.request(`/labels/${setId}/user-terms`, {
      method: "POST",
      body: JSON.stringify(draft),
    });
  }

  adjudicationQueue(): Promise<AdjudicationQueue> {
    return this.request<AdjudicationQueue>("/adjudication/queue");
  }

  adjudicate(
    id: string,
    verdict: Verdict | UserTermVerdict,
  ): Promise<{ item_id: string; label_closed: boolean }> {
    return this.request(`/adjudication/${id}`, {
      method: "POST",
      body: JSON.stringify({ verdict }),
    });
  }

  exportDecisions(): Promise<string> {
    return fetch(this.baseUrl + "/export/decisions", {
      headers: { Authorization: `Bearer ${this.token}` },
    }).then((res) => {
      if (!res.ok) throw new ApiError(res.status, null);
      return res.text();
    });
  }
}

function safeJson(text: string): unknown {
  try {
    return JSON.parse(text);
  } catch {
    return text;
  }
}
