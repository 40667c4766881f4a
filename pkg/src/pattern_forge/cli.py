"""Command line interface: learn, complete, lint, patterns, export/import, serve."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .html_ast import parse
from .id3 import extract_rules, train
from .inspector import lint as run_lint
from .patterns import (
    PatternImportError,
    pattern_file_from_json,
    pattern_file_to_json,
)
from .server import create_app, completions_to_response, pattern_to_response, group_to_response
from .session import Session
from .tables import TargetKind, build_table

_KIND_CHOICES = click.Choice([k.value for k in TargetKind])


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


@click.group()
def main() -> None:
    """Learn structural code patterns from HTML and put them to work."""


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--kind", type=_KIND_CHOICES, default=None, help="Limit to one target kind.")
@click.option("--csv", "dump_csv", is_flag=True, help="Dump the training tables as CSV instead.")
def learn(file: str, kind: str | None, dump_csv: bool) -> None:
    """Parse FILE, train the decision trees, and print the learned rules."""
    doc = parse(_read(file))
    kinds = [TargetKind(kind)] if kind else list(TargetKind)
    for k in kinds:
        table = build_table(doc, k)
        if dump_csv:
            click.echo(f"# {k.value} table")
            click.echo(table.to_csv(), nl=False)
            continue
        tree = train(table)
        click.echo(f"# {k.value} patterns")
        for pattern in extract_rules(tree):
            click.echo(
                f"{pattern.id}  {pattern.describe()}  "
                f"(support={pattern.support}, confidence={pattern.confidence:.2f})"
            )


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--line", type=int, required=True)
@click.option("--col", type=int, required=True)
@click.option("--patterns", "patterns_file", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Apply prioritized/blacklisted patterns from a JSON file.")
def complete(file: str, line: int, col: int, patterns_file: str | None) -> None:
    """Rank completions for FILE at --line/--col (1-based)."""
    session = Session(_read(file))
    if patterns_file:
        session.import_patterns(pattern_file_from_json(_read(patterns_file)))
    result = session.get_completions(line, col)
    click.echo(json.dumps(completions_to_response(result, session.version), indent=2))


@main.command("lint")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.option("--patterns", "patterns_file", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Apply prioritized/blacklisted patterns from a JSON file.")
def lint_cmd(file: str, as_json: bool, patterns_file: str | None) -> None:
    """Report pattern violations in FILE. Exit code 1 if any are found."""
    session = Session(_read(file))
    if patterns_file:
        session.import_patterns(pattern_file_from_json(_read(patterns_file)))
    session.engine.ensure_all_trained(session.doc)
    active = [p for p in session.store.all_patterns()]
    sites = run_lint(session.doc, active)
    if as_json:
        payload = [
            {
                "level": "VIOLATION",
                "span": {
                    "start_line": s.span.start_line,
                    "start_col": s.span.start_col,
                    "end_line": s.span.end_line,
                    "end_col": s.span.end_col,
                },
                "pattern_id": s.pattern_id,
                "rule": session.store.get(s.pattern_id).describe(),
                "witness": s.witness,
            }
            for s in sites
        ]
        click.echo(json.dumps(payload, indent=2))
    else:
        for s in sites:
            rule = session.store.get(s.pattern_id).describe()
            click.echo(
                f"VIOLATION {s.span.start_line}:{s.span.start_col}-"
                f"{s.span.end_line}:{s.span.end_col} {s.pattern_id} \"{rule}\" {s.witness}"
            )
    sys.exit(1 if sites else 0)


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--kind", type=_KIND_CHOICES, required=True)
def patterns(file: str, kind: str) -> None:
    """List prioritized, standard (grouped), and blacklisted patterns for FILE."""
    session = Session(_read(file))
    listing = session.list_patterns(TargetKind(kind))
    payload = {
        "kind": listing.kind.value,
        "prioritized": [pattern_to_response(p) for p in listing.prioritized],
        "standard_groups": [group_to_response(g) for g in listing.standard_groups],
        "blacklisted": [pattern_to_response(p) for p in listing.blacklisted],
    }
    click.echo(json.dumps(payload, indent=2))


@main.command("export")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.argument("patterns_json", type=click.Path(dir_okay=False))
@click.option("--from", "import_first", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Merge this pattern file into the session before exporting.")
def export_cmd(file: str, patterns_json: str, import_first: str | None) -> None:
    """Write the session's prioritized and blacklisted patterns to PATTERNS_JSON."""
    session = Session(_read(file))
    if import_first:
        session.import_patterns(pattern_file_from_json(_read(import_first)))
    Path(patterns_json).write_text(pattern_file_to_json(session.export_patterns()), encoding="utf-8")
    click.echo(f"wrote {patterns_json}")


@main.command("import")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.argument("patterns_json", type=click.Path(exists=True, dir_okay=False))
@click.option("--kind", type=_KIND_CHOICES, default=None)
def import_cmd(file: str, patterns_json: str, kind: str | None) -> None:
    """Load patterns into a session for FILE and print the resulting lists."""
    session = Session(_read(file))
    try:
        session.import_patterns(pattern_file_from_json(_read(patterns_json)))
    except PatternImportError as exc:
        raise click.ClickException(str(exc))
    kinds = [TargetKind(kind)] if kind else list(TargetKind)
    for k in kinds:
        listing = session.list_patterns(k)
        for p in listing.prioritized:
            click.echo(f"prioritized  {p.id}  {p.describe()}")
        for p in listing.blacklisted:
            click.echo(f"blacklisted  {p.id}  {p.describe()}")


@main.command()
@click.option("--port", type=int, default=8765, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
def serve(port: int, host: str) -> None:
    """Run the local HTTP session service (and the editor UI when built)."""
    import uvicorn

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
