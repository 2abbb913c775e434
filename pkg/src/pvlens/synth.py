"""Seeded synthetic terminology and label-corpus generation.

Used by the benchmark subcommand and by determinism tests: the same seed
always produces byte-identical files.
"""

from __future__ import annotations

import os
import random

_SYLLABLES = [
    "da", "lo", "mi", "ra", "ve", "xan", "tor", "pel", "qui", "zam",
    "bri", "col", "dex", "fen", "gal", "hep", "ix", "jun", "kel", "nor",
]

_FILLER = [
    "patients", "may", "experience", "during", "treatment", "with",
    "therapy", "reported", "in", "clinical", "trials", "commonly",
    "observed", "cases", "of", "including", "severe", "and", "mild",
    "events", "were", "noted", "for", "some", "subjects", "the",
]


def _word(rng: random.Random) -> str:
    return "".join(rng.choice(_SYLLABLES) for _ in range(rng.randint(2, 4)))


def make_terminology(
    directory,
    n_labels: int,
    n_pts: int = 40,
    n_llts: int = 15,
    seed: int = 0,
) -> None:
    """Write a synthetic terminology directory covering ``n_labels`` labels."""
    rng = random.Random(seed)
    os.makedirs(directory, exist_ok=True)

    concept_lines = []
    synonym_lines = []
    semtype_lines = []
    pt_codes = []
    for i in range(n_pts):
        code = f"P{i:04d}"
        name = f"{_word(rng)} {_word(rng)}" if rng.random() < 0.3 else _word(rng)
        concept_lines.append(f"{code}|MedDRA|PT|{name}|")
        semtype_lines.append(f"{code}|{rng.choice(['T047', 'T184', 'T033'])}")
        if rng.random() < 0.4:
            synonym_lines.append(f"{code}|{_word(rng)}")
        pt_codes.append(code)
    for i in range(n_llts):
        code = f"L{i:04d}"
        parent = rng.choice(pt_codes)
        concept_lines.append(f"{code}|MedDRA|LLT|{_word(rng)}|{parent}")
        semtype_lines.append(f"{code}|{rng.choice(['T047', 'T184'])}")

    mthspl_lines = []
    ndc_lines = []
    for i in range(n_labels):
        set_id = f"G{i:05d}"
        sub = f"S{i % max(1, n_labels // 2):05d}"  # some substances share labels
        mthspl_lines.append(f"{set_id}|{sub}|{_word(rng)}in")
        ndc = f"{i % 90000:05d}{1000 + i % 9000:04d}{i % 100:02d}"
        ndc_lines.append(f"{ndc}|R{i:05d}|N{i:05d}")

    def dump(name, lines):
        with open(os.path.join(directory, name), "w", encoding="utf-8") as fh:
            fh.write("".join(line + "\n" for line in lines))

    dump("concepts.psv", concept_lines)
    dump("synonyms.psv", synonym_lines)
    dump("semtypes.psv", semtype_lines)
    dump("mthspl.psv", mthspl_lines)
    dump("ndc_map.psv", ndc_lines)
    dump("stopwords.txt", ["adverse reaction", "the", "events"])


def _sentence(rng: random.Random, vocabulary: list[str]) -> str:
    words = []
    for _ in range(rng.randint(8, 16)):
        if vocabulary and rng.random() < 0.25:
            words.append(rng.choice(vocabulary))
        else:
            words.append(rng.choice(_FILLER))
    return " ".join(words) + "."


def make_corpus(
    directory,
    count: int,
    vocabulary: list[str],
    seed: int = 0,
    target_bytes: int = 5000,
) -> list[str]:
    """Write ``count`` synthetic label XML files of roughly ``target_bytes``."""
    rng = random.Random(seed)
    os.makedirs(directory, exist_ok=True)
    paths = []
    section_codes = {
        "34067-9": "INDICATIONS AND USAGE",
        "34084-4": "ADVERSE REACTIONS",
        "34066-1": "BOXED WARNING",
    }
    for i in range(count):
        set_id = f"G{i:05d}"
        ndc = f"{i % 90000:05d}-{1000 + i % 9000:04d}-{i % 100:02d}"
        date = f"202{rng.randint(0, 4)}-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}"
        parts = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<label set-id="{set_id}" version="1" effective-date="{date}">',
            f"<ndc-list><ndc>{ndc}</ndc></ndc-list>",
        ]
        for code, title in section_codes.items():
            parts.append(f'<section code="{code}"><title>{title}</title>')
            body_len = 0
            while body_len < target_bytes // 3:
                sentence = _sentence(rng, vocabulary)
                parts.append(f"<p>{sentence}</p>")
                body_len += len(sentence)
            parts.append("</section>")
        parts.append("</label>")
        payload = "\n".join(parts)
        path = os.path.join(directory, f"{set_id}.xml")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(payload)
        paths.append(path)
    return paths


def make_dataset(term_dir, label_dir, count: int, seed: int = 0):
    """Generate a matching terminology + corpus pair."""
    from .term_store import load_terminology

    make_terminology(term_dir, n_labels=count, seed=seed)
    store = load_terminology(term_dir)
    vocabulary = sorted(store.synonym_index)
    make_corpus(label_dir, count, vocabulary, seed=seed + 1)
    return store
