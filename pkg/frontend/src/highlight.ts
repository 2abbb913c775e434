import type { Term } from "./api";

export interface TextSegment {
  kind: "text";
  text: string;
}

export interface TermSegment {
  kind: "term";
  text: string;
  term: Term;
}

export type Segment = TextSegment | TermSegment;

/**
 * Split section text into plain and highlighted segments from term spans.
 * Spans are half-open character offsets into the section text; the matcher
 * guarantees they are disjoint. A term whose span does not slice to its
 * surface indicates a payload/UI mismatch and is rejected loudly rather
 * than rendered wrong.
 */
export function segmentSection(text: string, terms: Term[]): Segment[] {
  const sorted = [...terms].sort((a, b) => a.span[0] - b.span[0]);
  const segments: Segment[] = [];
  let cursor = 0;
  for (const term of sorted) {
    const [start, end] = term.span;
    if (start < cursor) {
      throw new Error(`overlapping span for ${term.term_id}`);
    }
    if (end > text.length) {
      throw new Error(`span of ${term.term_id} exceeds section text`);
    }
    const slice = text.slice(start, end);
    if (slice.toLowerCase() !== term.surface.toLowerCase()) {
      throw new Error(
        `span text ${JSON.stringify(slice)} != surface ${JSON.stringify(term.surface)}`,
      );
    }
    if (start > cursor) {
      segments.push({ kind: "text", text: text.slice(cursor, start) });
    }
    segments.push({ kind: "term", text: slice, term });
    cursor = end;
  }
  if (cursor < text.length) {
    segments.push({ kind: "text", text: text.slice(cursor) });
  }
  return segments;
}
