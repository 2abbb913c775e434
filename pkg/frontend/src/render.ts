import type { Category, Term, Verdict } from "./api";
import { segmentSection } from "./highlight";
import type { AdjudicationController, ReviewController } from "./state";

const CATEGORY_LABELS: Record<Category, string> = {
  indication: "Indication",
  adverse_event: "Adverse Event",
  boxed_warning: "Boxed Warning",
};

const CATEGORIES = Object.keys(CATEGORY_LABELS) as Category[];

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function highlightClass(verdict: Verdict | undefined, missing: boolean): string {
  if (missing) return "term missing";
  if (verdict === "include") return "term include";
  if (verdict === "exclude") return "term exclude";
  return "term";
}

export function renderSection(
  text: string,
  terms: Term[],
  verdicts: Map<string, Verdict>,
  missingTermIds: string[] = [],
): string {
  const parts = segmentSection(text, terms).map((seg) => {
    if (seg.kind === "text") return escapeHtml(seg.text);
    const cls = highlightClass(
      verdicts.get(seg.term.term_id),
      missingTermIds.includes(seg.term.term_id),
    );
    return `<mark class="${cls}" data-term-id="${seg.term.term_id}">${escapeHtml(seg.text)}</mark>`;
  });
  return `<p class="section-text">${parts.join("")}</p>`;
}

function renderVerdictToggle(term: Term, verdict: Verdict | undefined): string {
  const btn = (v: Verdict) =>
    `<button type="button" class="verdict ${v}${verdict === v ? " selected" : ""}"` +
    ` data-term-id="${term.term_id}" data-verdict="${v}">${v}</button>`;
  return (
    `<li class="term-row" data-term-id="${term.term_id}">` +
    `<span class="surface">${escapeHtml(term.surface)}</span>` +
    `<span class="pt">${escapeHtml(term.pt_code)}</span>` +
    btn("include") +
    btn("exclude") +
    `</li>`
  );
}

export function renderLabel(state: ReviewController): string {
  if (state.status === "loading") return `<p class="status">Loading…</p>`;
  if (state.status === "done") return `<p class="status">No labels left to review.</p>`;
  if (state.status === "error")
    return `<p class="status error">Load failed: ${escapeHtml(state.errorMessage)}</p><button type="button" data-action="retry">Retry</button>`;
  const label = state.label;
  if (!label) return `<p class="status">Nothing loaded.</p>`;

  const tabs = CATEGORIES.map((c) => {
    const active = c === state.activeCategory ? " active" : "";
    return `<button type="button" class="tab${active}" data-category="${c}">${CATEGORY_LABELS[c]}</button>`;
  }).join("");

  const readonly = state.status === "readonly";
  const category = state.activeCategory;
  const text = label.sections[category];
  const terms = state.termsInCategory(category);
  let body: string;
  if (text === undefined || (text === "" && terms.length === 0)) {
    body = `<p class="empty-state">No ${CATEGORY_LABELS[category]} section in this label.</p>`;
  } else if (terms.length === 0) {
    body =
      renderSection(text, [], state.verdicts) +
      `<p class="empty-state">No extracted terms in this section.</p>`;
  } else {
    body =
      renderSection(text, terms, state.verdicts, state.missingTermIds) +
      `<ul class="term-list">${terms
        .map((t) => renderVerdictToggle(t, state.verdicts.get(t.term_id)))
        .join("")}</ul>`;
  }

  const drafts = state.drafts
    .map(
      (d, i) =>
        `<li class="draft">${escapeHtml(d.text)} <em>(${CATEGORY_LABELS[d.category]})</em>` +
        `<button type="button" data-action="remove-draft" data-index="${i}">x</button></li>`,
    )
    .join("");
  const userTermForm = readonly
    ? ""
    : `<form data-action="add-user-term">` +
      `<input name="text" placeholder="Add a missed term…">` +
      `<select name="category">${CATEGORIES.map((c) => `<option value="${c}">${CATEGORY_LABELS[c]}</option>`).join("")}</select>` +
      `<button type="submit">Propose</button></form>`;

  const submit = readonly
    ? `<p class="status">Review already submitted; view is read-only.</p>`
    : `<button type="button" data-action="submit"${state.canSubmit ? "" : " disabled"}>Submit review</button>`;

  return (
    `<header><h1>${escapeHtml(label.set_id)}</h1>${tabs}</header>` +
    `<main>${body}</main>` +
    `<aside><h2>User-added terms</h2><ul class="drafts">${drafts}</ul>${userTermForm}</aside>` +
    `<footer>${submit}</footer>`
  );
}

export function renderQueue(state: AdjudicationController): string {
  if (state.status === "loading") return `<p class="status">Loading…</p>`;
  if (state.status === "forbidden")
    return `<p class="status error">Adjudicator access required.</p>`;
  if (state.status === "error")
    return `<p class="status error">${escapeHtml(state.errorMessage)}</p>`;
  const rows = state.queue.items
    .map((item) => {
      const verdicts = Object.entries(item.reviewer_verdicts)
        .map(([r, v]) => `<span class="reviewer-verdict">${escapeHtml(r)}: ${v}</span>`)
        .join(" ");
      const action =
        item.final_verdict === null
          ? `<button type="button" data-item-id="${item.item_id}" data-verdict="include">include</button>` +
            `<button type="button" data-item-id="${item.item_id}" data-verdict="exclude">exclude</button>`
          : `<span class="chip resolved">${item.final_verdict}</span>`;
      return `<tr class="queue-row" data-item-id="${item.item_id}"><td>${escapeHtml(item.set_id)}</td><td>${escapeHtml(item.term_id)}</td><td>${verdicts}</td><td>${action}</td></tr>`;
    })
    .join("");
  const userRows = state.queue.user_terms
    .map((t) => {
      const action =
        t.verdict === null
          ? `<button type="button" data-item-id="${t.user_term_id}" data-verdict="accept">accept</button>` +
            `<button type="button" data-item-id="${t.user_term_id}" data-verdict="reject">reject</button>`
          : `<span class="chip resolved">${t.verdict}</span>`;
      return `<tr class="user-term-row" data-item-id="${t.user_term_id}"><td>${escapeHtml(t.set_id)}</td><td>${escapeHtml(t.text)}</td><td>${escapeHtml(t.proposed_by)}</td><td>${action}</td></tr>`;
    })
    .join("");
  return (
    `<h1>Adjudication queue</h1>` +
    `<table class="queue"><tbody>${rows}</tbody></table>` +
    `<h2>User-added terms</h2>` +
    `<table class="user-terms"><tbody>${userRows}</tbody></table>`
  );
}
