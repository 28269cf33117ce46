"""Batch command-line interface.

Subcommands: linearize, convert, eval, retrieve, export, stats, vg-convert.
Exit codes: 0 success, 1 configuration or fatal error, 2 partial failure
(some inputs processed, some failed; failures go to stderr).
"""

from __future__ import annotations

import json
import os
import sys
from contextlib import contextmanager
from pathlib import Path

import click

from . import __version__
from .amr import PenmanError, iter_penman_blocks, parse_penman
from .convert import (
    AdapterError,
    DEFAULT_RULES,
    ExternalAdapter,
    convert_external,
    convert_rules,
    export_training_pairs,
)
from .corpus import (
    convert_vg_regions,
    corpus_stats,
    filter_ungrounded,
    load_records,
    save_records,
)
from .evaluate import evaluate_corpus
from .linearize import Strategy, linearize
from .retrieval import (
    RetrievalIndex,
    UnknownGoldImage,
    aggregate_metrics,
    load_index,
    rank,
)
from .scenegraph import GRAMMAR_VERSION, SceneGraph, serialize_sg, sg_from_json, sg_to_json

ADAPTER_ENV_VAR = "AMRSG_ADAPTER"

_STRATEGIES = {s.value: s for s in Strategy}


@contextmanager
def _open_out(path: str):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8") as fh:
            yield fh


def _read_penman_blocks(path: str) -> list[tuple[dict, str]]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        click.echo(f"error: cannot read {path}: {err}", err=True)
        sys.exit(1)
    return list(iter_penman_blocks(text))


def _load_eval_corpus(path: str) -> dict[str, SceneGraph]:
    """Lenient JSONL loader for evaluation: needs region_id + scene_graph."""
    graphs: dict[str, SceneGraph] = {}
    try:
        fh = open(path, encoding="utf-8")
    except OSError as err:
        click.echo(f"error: cannot read {path}: {err}", err=True)
        sys.exit(1)
    with fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
                graphs[str(data["region_id"])] = sg_from_json(data["scene_graph"])
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as err:
                click.echo(f"warning: {path}:{lineno}: {err}", err=True)
    return graphs


def _print_version(ctx, param, value):
    if not value or ctx.resilient_parsing:
        return
    click.echo(f"amrsg {__version__} (scene-graph grammar v{GRAMMAR_VERSION})")
    ctx.exit(0)


@click.group()
@click.option(
    "--version",
    is_flag=True,
    callback=_print_version,
    expose_value=False,
    is_eager=True,
    help="Print toolkit and format-grammar versions.",
)
def cli():
    """AMR parsing, linearization, scene-graph conversion and evaluation."""


@cli.command("linearize")
@click.argument("input_path")
@click.option("--strategy", type=click.Choice(sorted(_STRATEGIES)), default="dfs")
@click.option("--emit", type=click.Choice(["text", "tokens"]), default="text")
@click.option("--out", default="-", help="Output path ('-' for stdout).")
def cmd_linearize(input_path, strategy, emit, out):
    """Write one linearization per graph in a PENMAN file."""
    blocks = _read_penman_blocks(input_path)
    failures = 0
    with _open_out(out) as fh:
        for i, (meta, text) in enumerate(blocks):
            try:
                seq = linearize(parse_penman(text, meta), _STRATEGIES[strategy])
            except PenmanError as err:
                click.echo(f"error: graph {i}: {err}", err=True)
                failures += 1
                continue
            fh.write((seq.text if emit == "text" else "\t".join(seq.tokens)) + "\n")
    sys.exit(2 if failures else 0)


@cli.command("convert")
@click.argument("input_path")
@click.option("--engine", type=click.Choice(["rules", "external"]), default="rules")
@click.option("--adapter", default=None, help=f"Adapter command (or ${ADAPTER_ENV_VAR}).")
@click.option("--timeout", type=float, default=30.0, help="Adapter timeout in seconds.")
@click.option("--strategy", type=click.Choice(sorted(_STRATEGIES)), default="dfs")
@click.option("--emit", type=click.Choice(["text", "jsonl"]), default="text")
@click.option("--out", default="-", help="Output path ('-' for stdout).")
def cmd_convert(input_path, engine, adapter, timeout, strategy, emit, out):
    """Convert each PENMAN graph into a scene-graph target string.

    With --emit jsonl, each line carries the region id (from ::id metadata,
    falling back to the block index) and the scene graph as JSON.
    """
    blocks = _read_penman_blocks(input_path)
    adapter_proc = None
    if engine == "external":
        command = adapter or os.environ.get(ADAPTER_ENV_VAR)
        if not command:
            click.echo(
                f"error: --engine external requires --adapter or ${ADAPTER_ENV_VAR}", err=True
            )
            sys.exit(1)
        adapter_proc = ExternalAdapter(command, timeout=timeout)
    failures = 0
    try:
        with _open_out(out) as fh:
            for i, (meta, text) in enumerate(blocks):
                try:
                    graph = parse_penman(text, meta)
                    if engine == "rules":
                        sg = convert_rules(graph, DEFAULT_RULES)
                    else:
                        sg = convert_external(
                            linearize(graph, _STRATEGIES[strategy]), adapter_proc
                        )
                except (PenmanError, AdapterError) as err:
                    click.echo(f"error: graph {i}: {err}", err=True)
                    failures += 1
                    continue
                if emit == "text":
                    fh.write(serialize_sg(sg) + "\n")
                else:
                    region_id = meta.get("id", str(i))
                    fh.write(
                        json.dumps({"region_id": region_id, "scene_graph": sg_to_json(sg)}) + "\n"
                    )
    finally:
        if adapter_proc is not None:
            adapter_proc.close()
    sys.exit(2 if failures else 0)


@cli.command("eval")
@click.argument("generated_path")
@click.argument("reference_path")
@click.option("--per-region", is_flag=True, help="Emit one JSON line per region.")
@click.option("--out", default="-", help="Output path ('-' for stdout).")
def cmd_eval(generated_path, reference_path, per_region, out):
    """SPICE-style corpus evaluation of generated vs. reference scene graphs."""
    generated = _load_eval_corpus(generated_path)
    reference = _load_eval_corpus(reference_path)
    only_gen = sorted(set(generated) - set(reference))
    only_ref = sorted(set(reference) - set(generated))
    if only_gen or only_ref:
        if only_gen:
            click.echo(f"error: region ids only in generated: {', '.join(only_gen)}", err=True)
        if only_ref:
            click.echo(f"error: region ids only in reference: {', '.join(only_ref)}", err=True)
        sys.exit(1)
    if not generated:
        click.echo("error: empty corpus", err=True)
        sys.exit(1)
    report = evaluate_corpus(
        [(rid, generated[rid], reference[rid]) for rid in sorted(generated)]
    )
    with _open_out(out) as fh:
        if per_region:
            for region_id, rep in report.per_region:
                fh.write(json.dumps({"region_id": region_id, **rep.to_json()}) + "\n")
        fh.write(
            json.dumps({"mean_f1": report.mean_f1, "region_count": report.region_count}) + "\n"
        )
    sys.exit(0)


@cli.command("retrieve")
@click.option("--index", "index_path", required=True, help="Index JSONL file.")
@click.option("--queries", "queries_path", required=True, help="Query corpus JSONL.")
@click.option("--gold", "gold_path", default=None, help="JSON map region_id -> image_id.")
@click.option("--k", "ks", default="5,10", help="Comma-separated recall cutoffs.")
@click.option("--out", default="-", help="Output path ('-' for stdout).")
def cmd_retrieve(index_path, queries_path, gold_path, ks, out):
    """Rank images for every query region and report Recall@k / median rank."""
    try:
        cutoffs = [int(k) for k in ks.split(",") if k.strip()]
    except ValueError:
        click.echo(f"error: bad --k value {ks!r}", err=True)
        sys.exit(1)
    try:
        index = load_index(index_path)
    except (OSError, ValueError, KeyError) as err:
        click.echo(f"error: cannot load index {index_path}: {err}", err=True)
        sys.exit(1)
    gold_map = None
    if gold_path:
        try:
            gold_map = {str(k): str(v) for k, v in json.loads(Path(gold_path).read_text()).items()}
        except (OSError, ValueError) as err:
            click.echo(f"error: cannot load gold mapping {gold_path}: {err}", err=True)
            sys.exit(1)
    queries = []
    try:
        fh = open(queries_path, encoding="utf-8")
    except OSError as err:
        click.echo(f"error: cannot read {queries_path}: {err}", err=True)
        sys.exit(1)
    with fh:
        for line in fh:
            if not line.strip():
                continue
            data = json.loads(line)
            region_id = str(data["region_id"])
            gold = gold_map.get(region_id) if gold_map else str(data.get("image_id", ""))
            queries.append((region_id, sg_from_json(data["scene_graph"]), gold))
    if not queries:
        click.echo("error: empty query set", err=True)
        sys.exit(1)
    results = []
    for region_id, sg, gold in queries:
        if not gold:
            click.echo(f"error: no gold image id for query {region_id}", err=True)
            sys.exit(1)
        try:
            results.append(rank(sg, index, gold, query_id=region_id))
        except UnknownGoldImage as err:
            click.echo(f"error: query {region_id}: {err}", err=True)
            sys.exit(1)
    metrics = aggregate_metrics(results, cutoffs)
    with _open_out(out) as fh:
        fh.write(
            json.dumps(
                {
                    "recall_at": {str(k): v for k, v in metrics["recall_at"].items()},
                    "median_rank": metrics["median_rank"],
                }
            )
            + "\n"
        )
    sys.exit(0)


@cli.command("export")
@click.argument("corpus_path")
@click.option("--strategy", type=click.Choice(sorted(_STRATEGIES)), default="dfs")
@click.option("--no-filter", is_flag=True, help="Skip the ungrounded-tuple filter.")
@click.option("--out", default="-", help="Output path ('-' for stdout).")
def cmd_export(corpus_path, strategy, no_filter, out):
    """Export training pairs (linearized AMR -> target string) as JSONL."""
    try:
        result = load_records(corpus_path)
    except OSError as err:
        click.echo(f"error: cannot read {corpus_path}: {err}", err=True)
        sys.exit(1)
    for _, message in result.errors:
        click.echo(f"warning: {message}", err=True)
    pairs, skipped = export_training_pairs(
        result.records, _STRATEGIES[strategy], apply_filter=not no_filter
    )
    with _open_out(out) as fh:
        for pair in pairs:
            fh.write(json.dumps(pair.to_json()) + "\n")
    click.echo(f"exported {len(pairs)} pairs, skipped {skipped}", err=True)
    sys.exit(0)


@cli.command("stats")
@click.argument("corpus_path")
@click.option("--filtered", is_flag=True, help="Apply the ungrounded filter first.")
def cmd_stats(corpus_path, filtered):
    """Print corpus statistics as JSON."""
    try:
        result = load_records(corpus_path)
    except OSError as err:
        click.echo(f"error: cannot read {corpus_path}: {err}", err=True)
        sys.exit(1)
    records = result.records
    if filtered:
        records = [filter_ungrounded(r) for r in records]
    stats = corpus_stats(records)
    click.echo(json.dumps({**stats.to_json(), "skipped_lines": result.skipped}))
    sys.exit(0)


@cli.command("vg-convert")
@click.argument("vg_path")
@click.option("--out", default="-", help="Output corpus path ('-' for stdout).")
def cmd_vg_convert(vg_path, out):
    """Convert Visual Genome region-graph JSON into the corpus JSONL format."""
    try:
        vg_images = json.loads(Path(vg_path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as err:
        click.echo(f"error: cannot read {vg_path}: {err}", err=True)
        sys.exit(1)
    records = convert_vg_regions(vg_images)
    if out == "-":
        for record in records:
            from .corpus import record_to_json

            click.echo(json.dumps(record_to_json(record)))
    else:
        save_records(records, out)
    click.echo(f"converted {len(records)} regions", err=True)
    sys.exit(0)


def main(argv=None):
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.ClickException as err:
        err.show()
        sys.exit(1)
    except click.exceptions.Abort:
        sys.exit(1)
    sys.exit(0)


if __name__ == "__main__":
    main()
