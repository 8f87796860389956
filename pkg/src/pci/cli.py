"""Command-line interface: ``pci validate|lint|graph-check|ingest|query|instantiate|catalog``.

Exit status: 0 success, 1 findings at error severity, 2 usage, IO or syntax errors.
"""

from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path
from typing import Callable, Sequence

from pci.annotation import (
    AnnotationError,
    AnnotationStore,
    Filler,
    add_annotation,
    catalog,
    instantiate_template,
    parse_store,
    save_store,
    serialize_template,
)
from pci.errors import ParseError, PCIError
from pci.graph import check_well_formed, parse_graph, serialize_graph
from pci.pci_data import BundleError, load_bundled
from pci.projection import answer_query, format_results
from pci.report import ValidationReport
from pci.vocabulary import Vocabulary, VocabularyError, lint_labels, parse_vocabulary, validate_vocabulary

EXIT_OK, EXIT_FINDINGS, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    """Bad input the user can fix: reported on stderr with exit 2."""


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _out(text: str) -> None:
    sys.stdout.write(text)


def _print_findings(findings) -> None:
    _out("".join(f"{f}\n" for f in findings))


class _Context:
    """Lazily loaded vocabulary and bundle shared by the commands."""

    def __init__(self, args: argparse.Namespace):
        self.vocab_path: str | None = getattr(args, "vocab", None)
        self.store_path: str | None = getattr(args, "store", None)
        self._bundle = None

    @property
    def bundle(self):
        if self._bundle is None:
            try:
                self._bundle = load_bundled()
            except (BundleError, OSError) as exc:
                raise UsageError(str(exc)) from None
        return self._bundle

    def vocabulary(self) -> Vocabulary:
        if self.vocab_path is None:
            return self.bundle.vocabulary
        return parse_vocabulary(_read(self.vocab_path))

    def controlled(self):
        return self.bundle.controlled_map()

    def require_store(self) -> str:
        if self.store_path is None:
            raise UsageError("--store is required for this command")
        return self.store_path

    def store(self) -> AnnotationStore:
        path = self.require_store()
        return parse_store(_read(path))


# -- commands ---------------------------------------------------------------------


def cmd_validate(args, ctx: _Context) -> int:
    path = args.path or ctx.vocab_path
    text = _read(path) if path else None
    v = parse_vocabulary(text, check=False) if text is not None else ctx.bundle.vocabulary
    report = validate_vocabulary(v, strict_signatures=not args.lenient)
    _print_findings(report)
    return EXIT_FINDINGS if report.errors else EXIT_OK


def cmd_lint(args, ctx: _Context) -> int:
    path = args.path or ctx.vocab_path
    v = parse_vocabulary(_read(path), check=False) if path else ctx.bundle.vocabulary
    findings = lint_labels(v)
    _print_findings(findings)
    return EXIT_FINDINGS if ValidationReport(findings).errors else EXIT_OK


def cmd_graph_check(args, ctx: _Context) -> int:
    g = parse_graph(_read(args.graph))
    report = check_well_formed(g, ctx.vocabulary(), ctx.controlled())
    _print_findings(report)
    return EXIT_FINDINGS if report.errors else EXIT_OK


def cmd_ingest(args, ctx: _Context) -> int:
    path = ctx.require_store()
    if args.create and not Path(path).exists():
        store = AnnotationStore()
    else:
        store = ctx.store()
    v = ctx.vocabulary()
    incoming = parse_store(_read(args.annotations), strict_refs=False)
    problems: list[str] = []
    for aid, asset in sorted(incoming.assets.items()):
        known = store.assets.get(aid)
        if known is None:
            store.assets[aid] = asset
        elif known != asset:
            problems.append(f"error {aid} asset conflicts with the stored definition")
    if not problems:
        for aid in sorted(incoming.annotations):
            try:
                add_annotation(store, incoming.annotations[aid], v, ctx.controlled())
            except AnnotationError as exc:
                if exc.findings:
                    problems.extend(str(f) for f in exc.findings)
                else:
                    problems.append(f"error {aid} {exc}")
    if problems:
        # All or nothing: the store file is left untouched.
        _out("".join(p + "\n" for p in problems))
        return EXIT_FINDINGS
    try:
        save_store(store, path)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from None
    _out(f"ingested {len(incoming.annotations)} annotations into {path}\n")
    return EXIT_OK


def cmd_query(args, ctx: _Context) -> int:
    query = parse_graph(_read(args.query))
    store = ctx.store()
    results = answer_query(query, store, ctx.vocabulary(), workers=args.workers)
    _out(format_results(results, explain=args.explain))
    return EXIT_OK


_FILL_RE = re.compile(r"^([A-Za-z0-9_-]+)=([^@!]+)(?:@([A-Za-z0-9-]+))?(?:!([A-Za-z0-9_.-]+))?$")


def _parse_fill(text: str) -> tuple[str, Filler]:
    m = _FILL_RE.match(text)
    if not m:
        raise UsageError(f"bad --fill {text!r}; expected slot=value[@lang][!vocabulary]")
    return m.group(1), Filler(m.group(2), m.group(3), m.group(4))


def cmd_instantiate(args, ctx: _Context) -> int:
    try:
        template = ctx.bundle.template(args.template)
    except KeyError:
        raise UsageError(f"unknown template {args.template!r}") from None
    fillers = dict(_parse_fill(f) for f in args.fill)
    unknown = sorted(set(fillers) - set(template.slots))
    if unknown:
        raise UsageError(f"template {template.template_id} has no slot {', '.join(unknown)}")
    try:
        g = instantiate_template(template, fillers, ctx.controlled())
    except (AnnotationError, ValueError) as exc:
        _out(f"error {template.template_id} {exc}\n")
        return EXIT_FINDINGS
    report = check_well_formed(g, ctx.vocabulary(), ctx.controlled())
    if report.errors:
        _print_findings(report.errors)
        return EXIT_FINDINGS
    _out(serialize_graph(g))
    return EXIT_OK


def cmd_catalog(args, ctx: _Context) -> int:
    _out(catalog(ctx.store(), ctx.vocabulary()).render())
    return EXIT_OK


def cmd_templates(args, ctx: _Context) -> int:
    for t in ctx.bundle.templates:
        _out(serialize_template(t) if args.full else f"{t.template_id} {t.group.value} slots={','.join(t.slots)}\n")
    return EXIT_OK


# -- argument parsing ---------------------------------------------------------------


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    # Global flags are accepted before or after the subcommand; SUPPRESS keeps
    # the subparser from overwriting a value given before it.
    default = argparse.SUPPRESS if suppress else None
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--vocab", metavar="PATH", default=default, help="vocabulary file (default: bundled PCI v4)")
    p.add_argument("--store", metavar="PATH", default=default, help="annotation store file")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pci",
        description="Conceptual-graph indexing and retrieval of audiovisual segments.",
        parents=[_global_flags(False)],
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    common = [_global_flags(True)]

    def add(name: str, func: Callable, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=common, help=help, description=help)
        p.set_defaults(func=func)
        return p

    p = add("validate", cmd_validate, "check relation arities and signatures of a vocabulary")
    p.add_argument("path", nargs="?", help="vocabulary file (default: --vocab or bundled)")
    p.add_argument("--lenient", action="store_true", help="skip the signature covariance rule")
    p = add("lint", cmd_lint, "report naming-convention warnings for a vocabulary")
    p.add_argument("path", nargs="?", help="vocabulary file (default: --vocab or bundled)")
    p = add("graph-check", cmd_graph_check, "check a graph file for well-formedness")
    p.add_argument("graph")
    p = add("ingest", cmd_ingest, "validate an annotation file and append it to the store")
    p.add_argument("annotations")
    p.add_argument("--create", action="store_true", help="start a new store if --store does not exist")
    p = add("query", cmd_query, "list segments whose graph admits a projection of the query")
    p.add_argument("query")
    p.add_argument("--explain", action="store_true", help="dump every projection mapping")
    p.add_argument("--workers", type=int, default=1, help="annotations evaluated in parallel")
    p = add("instantiate", cmd_instantiate, "fill the slots of a bundled template and print the graph")
    p.add_argument("template")
    p.add_argument("--fill", action="append", default=[], metavar="SLOT=VALUE[@LANG][!VOCAB]")
    p = add("catalog", cmd_catalog, "count annotations per template group and World_PCI theme")
    p = add("templates", cmd_templates, "list the bundled templates")
    p.add_argument("--full", action="store_true", help="print the template files")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    ctx = _Context(args)
    try:
        return args.func(args, ctx)
    except VocabularyError as exc:
        # Structural problems such as cycles are findings, not syntax errors.
        _print_findings(exc.findings)
        return EXIT_FINDINGS
    except ParseError as exc:
        print(f"pci: syntax error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UsageError as exc:
        print(f"pci: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PCIError as exc:
        print(f"pci: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
