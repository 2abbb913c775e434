"""Command-line entry points: run, export, bench, match."""

from __future__ import annotations

import datetime
import json
import sys
import tempfile

import click

from .errors import PvlensError
from .matcher import build_automaton, extract_terms
from .pipeline import RunConfig, benchmark, run_pipeline
from .repository import EventRepository
from .spl_parser import LabelSection, SectionCategory
from .term_store import load_stopwords, load_terminology


@click.group()
def main():
    """Label safety-term extraction pipeline."""


@main.command()
@click.option("--input", "input_dir", required=True, type=click.Path(exists=True))
@click.option("--terms", "terminology_dir", required=True, type=click.Path(exists=True))
@click.option("--repo", "repo_path", required=True, type=click.Path())
@click.option("--srlc", "srlc_file", type=click.Path(exists=True))
@click.option("--workers", "worker_count", default=1, type=click.IntRange(min=1))
@click.option("--stopwords", "stopword_file", type=click.Path(exists=True))
@click.option("--semtypes", "semtype_file", type=click.Path(exists=True))
@click.option("--sections", "section_map_file", type=click.Path(exists=True))
@click.option("--run-date", type=click.DateTime(formats=["%Y-%m-%d"]))
def run(run_date, **kwargs):
    """Process a directory of label XML files into the repository."""
    config = RunConfig(
        run_date=run_date.date() if run_date else None, **kwargs
    )
    try:
        report = run_pipeline(config)
    except PvlensError as exc:
        click.echo(f"fatal: {exc}", err=True)
        sys.exit(1)
    click.echo(json.dumps(report.as_dict(), indent=2))


@main.command()
@click.option("--repo", "repo_path", required=True, type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(["csv", "jsonl"]), default="csv")
def export(repo_path, fmt):
    """Write the repository to stdout as CSV or JSON lines."""
    try:
        with EventRepository(repo_path) as repo:
            click.echo(repo.export(fmt), nl=False)
    except PvlensError as exc:
        click.echo(f"fatal: {exc}", err=True)
        sys.exit(1)


@main.command()
@click.option("--count", default=1000, type=click.IntRange(min=1))
@click.option("--workers", default=4, type=click.IntRange(min=1))
@click.option("--seed", default=0, type=int)
def bench(count, workers, seed):
    """Time an end-to-end run over a seeded synthetic corpus."""
    with tempfile.TemporaryDirectory() as work_dir:
        report = benchmark(work_dir, count, workers, seed=seed)
    click.echo(
        json.dumps(
            {
                "labels": report.label_count,
                "workers": report.worker_count,
                "wall_time_s": round(report.wall_time_s, 3),
                "labels_per_second": round(report.labels_per_second, 2),
            }
        )
    )


@main.command()
@click.option("--text", required=True)
@click.option("--terms", "terminology_dir", required=True, type=click.Path(exists=True))
@click.option("--stopwords", "stopword_file", type=click.Path(exists=True))
@click.option(
    "--category",
    type=click.Choice([c.value for c in SectionCategory]),
    default=SectionCategory.ADVERSE_EVENT.value,
)
def match(text, terminology_dir, stopword_file, category):
    """Debug: dump matches for a text snippet as JSON lines."""
    try:
        store = load_terminology(terminology_dir)
        automaton = build_automaton(store)
        stopwords = load_stopwords(stopword_file) if stopword_file else None
    except PvlensError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    section = LabelSection(
        category=SectionCategory(category), source_code="cli", text=text
    )
    for m in extract_terms(section, automaton, store, stopwords):
        click.echo(
            json.dumps(
                {
                    "concept_code": m.concept_code,
                    "pt_code": m.pt_code,
                    "surface": m.surface,
                    "span": list(m.span),
                    "category": m.category.value,
                }
            )
        )


if __name__ == "__main__":
    main()
