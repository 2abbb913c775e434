import { spawn, type ChildProcess } from "node:child_process";
import { setTimeout as sleep } from "node:timers/promises";

import { afterAll, describe, expect, it } from "vitest";

import { ApiClient, type Verdict } from "../src/api";
import { AdjudicationController, ReviewController } from "../src/state";

// Exercises the UI controllers against the real review service. Opt in with
// PVLENS_E2E=1 (needs python3 and the backend package installed).
const enabled = process.env.PVLENS_E2E === "1";

const SCRIPT = new URL("../../scripts/run_review_service.py", import.meta.url)
  .pathname;
const SEED = "4";

const children: ChildProcess[] = [];

afterAll(() => {
  for (const child of children) child.kill();
});

async function startService(port: number): Promise<string> {
  const child = spawn("python3", [SCRIPT, "--port", String(port), "--seed", SEED], {
    stdio: ["ignore", "inherit", "inherit"],
  });
  children.push(child);
  const base = `http://127.0.0.1:${port}`;
  for (let i = 0; i < 100; i++) {
    try {
      const res = await fetch(`${base}/labels/next`, {
        headers: { Authorization: "Bearer tok-adj" },
      });
      if (res.status < 500) return base;
    } catch {
      // not listening yet
    }
    await sleep(150);
  }
  throw new Error(`service on port ${port} never came up`);
}

/** The two reviewers the seeded assignment gave the demo label, in order. */
async function assignedReviewers(base: string): Promise<string[]> {
  const assigned: string[] = [];
  for (const reviewer of ["r1", "r2", "r3"]) {
    const res = await fetch(`${base}/labels/next`, {
      headers: { Authorization: `Bearer tok-${reviewer}` },
    });
    if (res.status === 200) assigned.push(reviewer);
  }
  expect(assigned).toHaveLength(2);
  return assigned;
}

// The decisions both sessions make. First reviewer excludes t03 and proposes
// a user term; second excludes t05; the adjudicator settles both
// discrepancies and accepts the user term.
const FIRST_EXCLUDES = "t03";
const SECOND_EXCLUDES = "t05";
const USER_TERM_TEXT = "cephalalgia";
const FINAL: Record<string, Verdict> = { t03: "include", t05: "exclude" };

function verdictFor(termId: string, excluded: string): Verdict {
  return termId === excluded ? "exclude" : "include";
}

describe.skipIf(!enabled)("end-to-end against the live service", () => {
  it("UI-driven review + adjudication matches a scripted API session", async () => {
    const uiBase = await startService(8741);
    const [first, second] = await assignedReviewers(uiBase);

    // --- session 1: drive everything through the UI controllers ---
    const firstReview = new ReviewController(
      new ApiClient(uiBase, `tok-${first}`),
    );
    await firstReview.loadNext();
    expect(firstReview.status).toBe("ready");
    const label = firstReview.label!;
    expect(label.terms).toHaveLength(10);

    // every highlighted span slices to its surface text in the section
    const text = label.sections.adverse_event!;
    for (const term of label.terms) {
      expect(text.slice(term.span[0], term.span[1])).toBe(term.surface);
    }

    for (const term of label.terms) {
      firstReview.setVerdict(term.term_id, verdictFor(term.term_id, FIRST_EXCLUDES));
    }
    firstReview.addDraft("adverse_event", USER_TERM_TEXT);
    expect(firstReview.canSubmit).toBe(true);
    expect(await firstReview.submit()).toBe(true);
    expect(firstReview.status).toBe("done"); // only one label in the study

    const secondReview = new ReviewController(
      new ApiClient(uiBase, `tok-${second}`),
    );
    await secondReview.loadNext();
    expect(secondReview.status).toBe("ready");
    for (const term of secondReview.label!.terms) {
      secondReview.setVerdict(
        term.term_id,
        verdictFor(term.term_id, SECOND_EXCLUDES),
      );
    }
    expect(await secondReview.submit()).toBe(true);

    const adjApi = new ApiClient(uiBase, "tok-adj");
    const adj = new AdjudicationController(adjApi);
    await adj.loadQueue();
    expect(adj.status).toBe("ready");
    expect(adj.openItems.map((i) => i.term_id).sort()).toEqual(["t03", "t05"]);
    expect(adj.openUserTerms.map((t) => t.text)).toEqual([USER_TERM_TEXT]);

    let lastClosed = false;
    for (const item of [...adj.openItems]) {
      const result = await adj.resolve(item.item_id, FINAL[item.term_id]);
      lastClosed = result.label_closed;
    }
    for (const term of [...adj.openUserTerms]) {
      const result = await adj.resolve(term.user_term_id, "accept");
      lastClosed = result.label_closed;
    }
    expect(lastClosed).toBe(true);
    expect(adj.openItems).toHaveLength(0);
    expect(adj.openUserTerms).toHaveLength(0);

    const uiExport = await adjApi.exportDecisions();
    expect(uiExport.length).toBeGreaterThan(0);

    // --- session 2: the same decisions as raw HTTP calls, fresh service ---
    const rawBase = await startService(8742);
    const call = async (
      token: string,
      method: string,
      path: string,
      body?: unknown,
    ) => {
      const res = await fetch(rawBase + path, {
        method,
        headers: {
          Authorization: `Bearer tok-${token}`,
          "Content-Type": "application/json",
        },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
      expect(res.ok).toBe(true);
      return res;
    };

    const termIds = label.terms.map((t) => t.term_id);
    const decisionsFor = (excluded: string) =>
      Object.fromEntries(termIds.map((id) => [id, verdictFor(id, excluded)]));
    await call(first, "POST", "/labels/G1/review", {
      decisions: decisionsFor(FIRST_EXCLUDES),
      user_terms: [{ category: "adverse_event", text: USER_TERM_TEXT }],
    });
    await call(second, "POST", "/labels/G1/review", {
      decisions: decisionsFor(SECOND_EXCLUDES),
      user_terms: [],
    });

    const queue = (await (
      await call("adj", "GET", "/adjudication/queue")
    ).json()) as {
      items: Array<{ item_id: string; term_id: string }>;
      user_terms: Array<{ user_term_id: string }>;
    };
    for (const item of queue.items) {
      await call("adj", "POST", `/adjudication/${item.item_id}`, {
        verdict: FINAL[item.term_id],
      });
    }
    for (const term of queue.user_terms) {
      await call("adj", "POST", `/adjudication/${term.user_term_id}`, {
        verdict: "accept",
      });
    }
    const rawExport = await (
      await call("adj", "GET", "/export/decisions")
    ).text();

    expect(uiExport).toBe(rawExport);
  }, 120_000);
});
