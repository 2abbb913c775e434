"""Dictionary-based multi-pattern term extraction.

Every MedDRA synonym is compiled into an Aho-Corasick automaton; matches are
kept only at token boundaries, reduced by longest-match and containment
rules, then filtered by stopwords and semantic type.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import EmptyDictionary, StoreMismatch
from .spl_parser import LabelSection, SectionCategory
from .term_store import SemanticTypeFilter, StopwordList, TermStore


def _is_token_char(c: str) -> bool:
    # Hyphen is internal to tokens: "X-ray" is one token.
    return c.isalnum() or c == "-"


def _boundary_ok(text: str, start: int, end: int) -> bool:
    if start > 0 and _is_token_char(text[start - 1]):
        return False
    if end < len(text) and _is_token_char(text[end]):
        return False
    return True


def _lower(text: str) -> str:
    lowered = text.lower()
    if len(lowered) == len(text):
        return lowered
    # Rare locale-sensitive characters can change length under str.lower();
    # fall back to per-character lowering to keep offsets aligned.
    return "".join(c if len(c.lower()) != 1 else c.lower() for c in text)


@dataclass(frozen=True)
class TermMatch:
    concept_code: str
    pt_code: str
    surface: str
    span: tuple[int, int]
    category: SectionCategory


class MatchAutomaton:
    """Aho-Corasick automaton over lowercased synonym strings."""

    def __init__(self, patterns: dict[str, tuple[str, ...]], fingerprint: str):
        self.fingerprint = fingerprint
        self.pattern_count = len(patterns)
        # goto is a list of dicts: state -> char -> state
        goto: list[dict[str, int]] = [{}]
        outputs: list[list[tuple[int, tuple[str, ...]]]] = [[]]
        for pattern in sorted(patterns):
            state = 0
            for ch in pattern:
                nxt = goto[state].get(ch)
                if nxt is None:
                    goto.append({})
                    outputs.append([])
                    nxt = len(goto) - 1
                    goto[state][ch] = nxt
                state = nxt
            outputs[state].append((len(pattern), patterns[pattern]))

        fail = [0] * len(goto)
        queue = deque()
        for child in goto[0].values():
            queue.append(child)
        while queue:
            state = queue.popleft()
            for ch, child in goto[state].items():
                queue.append(child)
                f = fail[state]
                while f and ch not in goto[f]:
                    f = fail[f]
                fail[child] = goto[f].get(ch, 0) if goto[f].get(ch, 0) != child else 0
                outputs[child] = outputs[child] + outputs[fail[child]]

        self._goto = goto
        self._fail = fail
        self._outputs = outputs

    def scan(self, lowered_text: str):
        """Yield (start, end, concept_codes) for every dictionary occurrence."""
        state = 0
        goto = self._goto
        fail = self._fail
        outputs = self._outputs
        for i, ch in enumerate(lowered_text):
            while state and ch not in goto[state]:
                state = fail[state]
            state = goto[state].get(ch, 0)
            if outputs[state]:
                for length, codes in outputs[state]:
                    yield i + 1 - length, i + 1, codes


def build_automaton(store: TermStore) -> MatchAutomaton:
    """Compile every MedDRA synonym in the store, case-insensitively."""
    patterns = {syn: codes for syn, codes in store.synonym_index.items() if syn}
    if not patterns:
        raise EmptyDictionary("store holds no MedDRA synonyms")
    return MatchAutomaton(patterns, store.fingerprint)


def _reduce_spans(raw: list[tuple[int, int, str]]) -> list[tuple[int, int, str]]:
    """Longest match per start offset, then drop spans contained in kept ones."""
    by_start: dict[int, int] = {}
    for start, end, _code in raw:
        if end > by_start.get(start, -1):
            by_start[start] = end
    candidates = sorted(by_start.items(), key=lambda it: (it[0], -it[1]))
    kept_spans: list[tuple[int, int]] = []
    for start, end in candidates:
        contained = any(
            ks <= start and end <= ke and (ks, ke) != (start, end)
            for ks, ke in kept_spans
        )
        if not contained:
            kept_spans.append((start, end))
    keep = set(kept_spans)
    return [(s, e, c) for s, e, c in raw if (s, e) in keep]


def extract_terms(
    section: LabelSection,
    automaton: MatchAutomaton,
    store: TermStore,
    stopwords: StopwordList | None = None,
    semantic_filter: SemanticTypeFilter | None = None,
) -> list[TermMatch]:
    """Extract filtered term matches from one label section.

    Rules, in order: longest match at each start offset; suppression of
    matches contained in a kept longer match; stopword removal on the full
    matched surface; semantic-type filtering. Output is sorted by span start,
    longer spans first, then concept code. Every kept span is returned;
    dedup to distinct (pt_code, category) happens downstream via
    ``distinct_events``.
    """
    if automaton.fingerprint != store.fingerprint:
        raise StoreMismatch("automaton was built from a different store")
    stopwords = stopwords or StopwordList()
    semantic_filter = semantic_filter or SemanticTypeFilter()

    text = section.text
    lowered = _lower(text)
    raw: list[tuple[int, int, str]] = []
    for start, end, codes in automaton.scan(lowered):
        if not _boundary_ok(lowered, start, end):
            continue
        for code in codes:
            raw.append((start, end, code))

    kept = _reduce_spans(raw)
    matches = []
    for start, end, code in kept:
        if lowered[start:end] in stopwords.entries:
            continue
        if not semantic_filter.admits(store.concepts[code]):
            continue
        matches.append(
            TermMatch(
                concept_code=code,
                pt_code=store.normalize_to_pt(code),
                surface=text[start:end],
                span=(start, end),
                category=section.category,
            )
        )
    matches.sort(key=lambda m: (m.span[0], -(m.span[1] - m.span[0]), m.concept_code))
    return matches


def distinct_events(matches: list[TermMatch]) -> dict[tuple[str, SectionCategory], list[TermMatch]]:
    """Group matches by (pt_code, category); values retain every span."""
    grouped: dict[tuple[str, SectionCategory], list[TermMatch]] = {}
    for m in matches:
        grouped.setdefault((m.pt_code, m.category), []).append(m)
    return grouped


def match_all_naive(text: str, store: TermStore) -> list[tuple[int, int, str]]:
    """Test oracle: scan every synonym at every offset, no filtering.

    Returns (start, end, concept_code) triples for each boundary-valid
    occurrence.
    """
    lowered = _lower(text)
    raw = []
    for synonym in sorted(store.synonym_index):
        if not synonym:
            continue
        n = len(synonym)
        for start in range(0, len(lowered) - n + 1):
            if lowered[start : start + n] != synonym:
                continue
            if not _boundary_ok(lowered, start, start + n):
                continue
            for code in store.synonym_index[synonym]:
                raw.append((start, start + n, code))
    return raw
