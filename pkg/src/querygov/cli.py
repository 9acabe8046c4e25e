"""Command-line interface: catalog, clean, sync, corpus, guard, serve, ask, metrics."""

from __future__ import annotations

import json
import sys
import tempfile
from pathlib import Path

import click

from .catalog import CatalogError, load_catalog, serialize_schema_for_prompt
from .cleaning import CleaningPipeline, RawRecord, load_pipeline_config
from .dedupe import detect_near_duplicates
from .embedding import HashingEmbedder
from .guard import run_guard
from .resources import data_path
from .retrieval import ExamplePair, VectorIndex, load_corpus, persist_corpus
from .sampledata import ANALYST_TOKEN, build_demo_service, build_sample_pipeline
from .service.audit import FileAuditLog
from .service.metrics import compute_metrics
from .spelling import load_dictionary
from .sync import SqliteStore, load_cursor, run_sync_cycle
from .translation import default_translator


@click.group()
def main():
    """Schema-constrained NL-to-SQL governance engine."""


# -- catalog ------------------------------------------------------------------


@main.group()
def catalog():
    """Validate and render the schema/policy catalog."""


@catalog.command("validate")
@click.argument("path", type=click.Path(exists=True))
def catalog_validate(path):
    try:
        cat = load_catalog(path)
    except CatalogError as exc:
        click.echo(f"invalid: {exc}", err=True)
        sys.exit(1)
    click.echo(
        f"ok: version {cat.version}, {len(cat.tables)} tables, "
        f"{sum(len(t.columns) for t in cat.tables)} columns, "
        f"{len(cat.rules.rules)} rules"
    )


@catalog.command("render-prompt")
@click.argument("path", type=click.Path(exists=True))
def catalog_render_prompt(path):
    click.echo(serialize_schema_for_prompt(load_catalog(path)), nl=False)


# -- clean ---------------------------------------------------------------------


def _build_pipeline(catalog_path, config_path, dictionary_path) -> CleaningPipeline:
    cat = load_catalog(catalog_path or data_path("catalog.json"))
    config = load_pipeline_config(config_path or data_path("pipeline.json"))
    dictionary = load_dictionary(dictionary_path or data_path("dictionary.txt"))
    return CleaningPipeline(cat, config, dictionary, default_translator())


def _read_records(path) -> list[RawRecord]:
    records = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        doc = json.loads(line)
        records.append(
            RawRecord(doc["record_id"], doc["modified_at"], doc.get("fields", {}))
        )
    return records


@main.group()
def clean():
    """Run the cleaning pipeline over record files."""


@clean.command("run")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--report", "report_path", type=click.Path())
@click.option("--catalog", "catalog_path", type=click.Path(exists=True))
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--dictionary", "dictionary_path", type=click.Path(exists=True))
def clean_run(in_path, out_path, report_path, catalog_path, config_path, dictionary_path):
    pipeline = _build_pipeline(catalog_path, config_path, dictionary_path)
    records = _read_records(in_path)
    flagged = 0
    with Path(out_path).open("w", encoding="utf-8") as out:
        report = Path(report_path).open("w", encoding="utf-8") if report_path else None
        try:
            for raw in records:
                cleaned = pipeline.clean_record(raw)
                out.write(
                    json.dumps(
                        {
                            "record_id": cleaned.record_id,
                            "modified_at": cleaned.modified_at,
                            "fields": cleaned.fields,
                        },
                        ensure_ascii=False,
                    )
                    + "\n"
                )
                for flag in cleaned.flags:
                    flagged += 1
                    if report:
                        report.write(
                            f"{cleaned.record_id}\t{flag.rule_id}\t{flag.message}\n"
                        )
        finally:
            if report:
                report.close()
    click.echo(f"cleaned {len(records)} records, {flagged} flags")


@clean.command("dedupe")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--catalog", "catalog_path", type=click.Path(exists=True))
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--dictionary", "dictionary_path", type=click.Path(exists=True))
def clean_dedupe(in_path, catalog_path, config_path, dictionary_path):
    pipeline = _build_pipeline(catalog_path, config_path, dictionary_path)
    cleaned = [pipeline.clean_record(r) for r in _read_records(in_path)]
    ded = pipeline.config.dedupe
    clusters = detect_near_duplicates(
        cleaned,
        shingle_size=ded.shingle_size,
        num_hashes=ded.num_hashes,
        bands=ded.bands,
        threshold=ded.jaccard_threshold,
        identity_fields=ded.identity_fields,
    )
    for cluster in clusters:
        click.echo(
            f"cluster rep={cluster.representative_record_id} "
            f"members={','.join(cluster.member_record_ids)}"
        )
    click.echo(f"{len(clusters)} near-duplicate clusters")


# -- sync ------------------------------------------------------------------------


@main.group()
def sync():
    """Source-to-analytics synchronization."""


@sync.command("run-once")
@click.option("--source", "source_path", required=True, type=click.Path(exists=True))
@click.option("--target", "target_path", required=True, type=click.Path())
@click.option("--cursor", "cursor_path", required=True, type=click.Path())
@click.option("--table", default="employees")
@click.option("--report", "report_path", type=click.Path())
@click.option("--catalog", "catalog_path", type=click.Path(exists=True))
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--dictionary", "dictionary_path", type=click.Path(exists=True))
def sync_run_once(source_path, target_path, cursor_path, table, report_path,
                  catalog_path, config_path, dictionary_path):
    pipeline = _build_pipeline(catalog_path, config_path, dictionary_path)
    table_def = pipeline.catalog.table(table)
    if table_def is None:
        raise click.ClickException(f"table {table!r} not in catalog")
    data_columns = [
        c.name for c in table_def.columns if c.name not in ("record_id", "modified_at")
    ]
    source = SqliteStore(source_path, table, data_columns)
    target = SqliteStore(target_path, table, data_columns)
    target.ensure_schema()
    cursor = load_cursor(cursor_path)
    report_lines: list[str] = []
    new_cursor = run_sync_cycle(
        source, target, pipeline, cursor,
        cursor_path=cursor_path,
        report_sink=lambda rid, rule, msg: report_lines.append(f"{rid}\t{rule}\t{msg}"),
    )
    if report_path:
        Path(report_path).write_text("\n".join(report_lines) + ("\n" if report_lines else ""), encoding="utf-8")
    stats = new_cursor.last_batch_stats
    click.echo(
        f"extracted={stats.extracted} cleaned={stats.cleaned} "
        f"upserted={stats.upserted} hard_rejected={stats.hard_rejected} "
        f"flagged={stats.flagged} cursor={new_cursor.last_successful_sync}"
    )


@sync.command("status")
@click.option("--cursor", "cursor_path", required=True, type=click.Path())
def sync_status(cursor_path):
    cursor = load_cursor(cursor_path)
    stats = cursor.last_batch_stats
    click.echo(f"last_successful_sync: {cursor.last_successful_sync}")
    click.echo(f"cycle_interval_hours: {cursor.cycle_interval_hours}")
    click.echo(
        f"last_batch: extracted={stats.extracted} upserted={stats.upserted} "
        f"hard_rejected={stats.hard_rejected} flagged={stats.flagged}"
    )


# -- corpus ------------------------------------------------------------------------


def _guard_validator(catalog_path):
    cat = load_catalog(catalog_path or data_path("catalog.json"))

    def validate(sql: str) -> None:
        outcome = run_guard(sql, cat)
        if not outcome.passed:
            raise ValueError(outcome.verdict.to_text())

    return validate


@main.group()
def corpus():
    """Maintain the validated question/SQL example corpus."""


@corpus.command("add")
@click.option("--corpus", "corpus_path", required=True, type=click.Path())
@click.option("--catalog", "catalog_path", type=click.Path(exists=True))
@click.option("--id", "example_id", required=True)
@click.option("--question", required=True)
@click.option("--sql", required=True)
@click.option("--language", default="en")
@click.option("--dimension", default=1536)
def corpus_add(corpus_path, catalog_path, example_id, question, sql, language, dimension):
    validator = _guard_validator(catalog_path)
    path = Path(corpus_path)
    if path.exists():
        index = load_corpus(path, validator=validator)
    else:
        index = VectorIndex(dimension, validator=validator)
    embedder = HashingEmbedder(index.dimension)
    index.add(
        ExamplePair(
            example_id=example_id,
            question_text=question,
            sql_text=sql,
            language_of_origin=language,
            embedding=embedder.embed(question),
        )
    )
    persist_corpus(index, path)
    click.echo(f"corpus now holds {len(index)} examples")


@corpus.command("search")
@click.argument("question")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--k", default=5)
def corpus_search(question, corpus_path, k):
    index = load_corpus(corpus_path)
    embedder = HashingEmbedder(index.dimension)
    for pair, similarity in index.retrieve(embedder.embed(question), k):
        click.echo(f"{similarity:+.4f}  {pair.example_id}  {pair.question_text}")


@corpus.command("verify")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--catalog", "catalog_path", type=click.Path(exists=True))
def corpus_verify(corpus_path, catalog_path):
    validator = _guard_validator(catalog_path)
    index = load_corpus(corpus_path)
    failures = 0
    for pair in index.entries():
        try:
            validator(pair.sql_text)
        except ValueError as exc:
            failures += 1
            click.echo(f"FAIL {pair.example_id}: {exc}")
    click.echo(f"verified {len(index)} examples, {failures} failures")
    if failures:
        sys.exit(1)


# -- guard ------------------------------------------------------------------------


@main.command("guard")
@click.argument("action", type=click.Choice(["check"]))
@click.argument("sql")
@click.option("--catalog", "catalog_path", type=click.Path(exists=True))
@click.option("--question", default="")
def guard_cmd(action, sql, catalog_path, question):
    """Exit codes: 0 pass, 1 syntax, 2 schema, 3 policy."""
    cat = load_catalog(catalog_path or data_path("catalog.json"))
    outcome = run_guard(sql, cat, question)
    click.echo(outcome.verdict.to_text())
    sys.exit(outcome.verdict.exit_code)


# -- service ------------------------------------------------------------------------


@main.command("serve")
@click.option("--workdir", type=click.Path(), default=None)
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8000)
@click.option("--static", "static_dir", type=click.Path(exists=True), default=None)
def serve(workdir, host, port, static_dir):
    """Run the demo service over the seeded sample store."""
    import uvicorn

    from .service.api import build_app

    workdir = workdir or tempfile.mkdtemp(prefix="querygov-")
    service, _ = build_demo_service(workdir)
    click.echo(f"workdir: {workdir}")
    click.echo(f"session token: {ANALYST_TOKEN}")
    uvicorn.run(build_app(service, static_dir), host=host, port=port)


@main.command("ask")
@click.argument("question")
@click.option("--lang", default=None)
@click.option("--workdir", type=click.Path(), default=None)
def ask(question, lang, workdir):
    """One-shot question against the demo service."""
    workdir = workdir or tempfile.mkdtemp(prefix="querygov-")
    service, _ = build_demo_service(workdir)
    try:
        job_id = service.submit_query(question, lang, ANALYST_TOKEN)
        job = service.wait(job_id, 60.0)
        click.echo(f"status: {job.status}")
        if job.generated_sql:
            click.echo(f"sql: {job.generated_sql}")
        if job.refusal:
            click.echo(job.refusal)
        elif job.result is not None:
            click.echo(" | ".join(label for label, _ in job.result.headers))
            for row in job.result.rows:
                click.echo(" | ".join(row))
            if job.result.truncated:
                click.echo("(truncated)")
    finally:
        service.shutdown()


@main.command("metrics")
@click.option("--audit", "audit_path", required=True, type=click.Path(exists=True))
@click.option("--window", default=None,
              help="relative (7d, 12h) or ISO range start..end")
def metrics_cmd(audit_path, window):
    import re
    from datetime import datetime, timedelta, timezone

    log = FileAuditLog(audit_path)
    window_tuple = None
    if window:
        relative = re.fullmatch(r"(\d+)([dh])", window)
        if relative:
            amount, unit = int(relative.group(1)), relative.group(2)
            delta = timedelta(days=amount) if unit == "d" else timedelta(hours=amount)
            start = (datetime.now(timezone.utc) - delta).isoformat()
            window_tuple = (start, "9999")
        else:
            start, _, end = window.partition("..")
            window_tuple = (start, end or "9999")
    report = compute_metrics(log.events(), window=window_tuple)
    click.echo(json.dumps(report.to_dict(), indent=2))


if __name__ == "__main__":
    main()
