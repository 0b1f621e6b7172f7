"""Command-line shell over the pipeline.

Every subcommand reads a project file (or ``$CAPWEAVE_PROJECT``), runs the
corresponding module operation, and writes machine-readable output to stdout:
JSON for everything except the matrix export, which is CSV. Exit codes:
0 success, 1 validation failure, 2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import payloads, store
from .errors import CapweaveError, ParseError
from .formulation import Strategy
from .optimization import Constraints, optimize
from .formulation import enumerate_candidates, rank_candidates
from .project import Project
from .transformation import transform_capability

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_IO = 3


@dataclass
class CommandResult:
    exit_code: int
    stdout: bytes = b""
    stderr: str = ""


class _UsageError(Exception):
    pass


def _resolve_path(args) -> Path:
    raw = getattr(args, "file", None) or os.environ.get("CAPWEAVE_PROJECT")
    if not raw:
        raise _UsageError("no project file given and CAPWEAVE_PROJECT is not set")
    return Path(raw)


def _load(args) -> Project:
    return store.load_project(_resolve_path(args).read_bytes())


def _json_result(payload) -> CommandResult:
    return CommandResult(EXIT_OK, stdout=store.canonical_json_bytes(payload))


def cmd_validate(args) -> CommandResult:
    data = _resolve_path(args).read_bytes()
    try:
        violations = store.document_violations(data)
    except ParseError as exc:
        return CommandResult(
            EXIT_VALIDATION,
            stdout=store.canonical_json_bytes(payloads.error_payload(exc)),
            stderr=f"{exc}\n",
        )
    payload = payloads.violations_payload(violations)
    code = EXIT_OK if not violations else EXIT_VALIDATION
    return CommandResult(code, stdout=store.canonical_json_bytes(payload))


def cmd_formulate(args) -> CommandResult:
    project = _load(args)
    strategy = Strategy.GREEDY if args.greedy else Strategy.EXACT
    weights = payloads.parse_weights_csv(args.weights) if args.weights else None
    return _json_result(payloads.candidates_payload(project, strategy, weights))


def cmd_optimize(args) -> CommandResult:
    project = _load(args)
    constraints = Constraints(
        schedule_budget=args.budget if args.budget is not None else project.constraints.schedule_budget,
        min_tech_readiness=args.min_trl if args.min_trl is not None else project.constraints.min_tech_readiness,
    )
    ranked = rank_candidates(enumerate_candidates(project.graph), project.weights)
    selection = optimize(project.graph, ranked, constraints)
    if args.write:
        mutated = store.apply_mutation(
            project,
            {"kind": "recordSelection", "selection": store.selection_document(selection)},
        )
        store.save_project_file(mutated, _resolve_path(args))
    return _json_result(payloads.selection_payload(selection))


def cmd_transform(args) -> CommandResult:
    project = _load(args)
    drafts_raw = json.loads(Path(args.drafts).read_text(encoding="utf-8"))
    if not isinstance(drafts_raw, dict):
        raise ParseError("drafts file must map directive ids to requirement texts")
    drafts = {
        directive_id: [texts] if isinstance(texts, str) else texts
        for directive_id, texts in drafts_raw.items()
    }
    updated, created = transform_capability(project, args.capability, drafts)
    if args.write:
        store.save_project_file(updated, _resolve_path(args))
    return _json_result(payloads.requirements_payload(created))


def cmd_trace(args) -> CommandResult:
    project = _load(args)
    return _json_result(payloads.trace_payload(project, args.entity, args.backward))


def cmd_impact(args) -> CommandResult:
    project = _load(args)
    report = payloads.resolve_impact(project, args.entity, args.direction, args.as_kind)
    return _json_result(payloads.impact_payload(report))


def cmd_export(args) -> CommandResult:
    project = _load(args)
    if args.matrix:
        return CommandResult(EXIT_OK, stdout=store.export_matrix(project).encode("utf-8"))
    report = payloads.resolve_impact(project, args.impact, "down", None)
    return _json_result(payloads.impact_payload(report))


def cmd_serve(args) -> CommandResult:
    import uvicorn

    from .api import create_app

    path = _resolve_path(args)
    store.load_project(path.read_bytes())  # fail fast on a broken file
    app = create_app(path)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return CommandResult(EXIT_OK)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="capweave",
        description="Traceability workbench over function-decomposition graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file", nargs="?", help="project file (.capweave.json); defaults to $CAPWEAVE_PROJECT")
        p.set_defaults(handler=handler)
        return p

    add("validate", cmd_validate, "check a project file against every invariant")

    p = add("formulate", cmd_formulate, "enumerate and rank candidate capability sets")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="exhaustive enumeration (default)")
    mode.add_argument("--greedy", action="store_true", help="greedy refinement from the mission's children")
    p.add_argument("--weights", help="composite weights as 'cohesion,coupling,abstraction'")

    p = add("optimize", cmd_optimize, "select and plan increments under constraints")
    p.add_argument("--budget", type=float, help="effort budget per increment (0 = unlimited)")
    p.add_argument("--min-trl", type=int, dest="min_trl", help="minimum technology readiness level")
    p.add_argument("--write", action="store_true", help="record the selection into the project file")

    p = add("transform", cmd_transform, "turn directives of a chosen capability into requirements")
    p.add_argument("--capability", required=True, help="chosen capability node id")
    p.add_argument("--drafts", required=True, help="JSON file mapping directive ids to requirement texts")
    p.add_argument("--write", action="store_true", help="persist the new requirements into the project file")

    p = add("trace", cmd_trace, "trace a need forward or a requirement backward")
    p.add_argument("--from", dest="entity", required=True, help="need id (forward) or requirement id (backward)")
    p.add_argument("--backward", action="store_true", help="trace a requirement back to its needs")

    p = add("impact", cmd_impact, "change-impact report for an entity")
    p.add_argument("--entity", required=True, help="node, directive, capability or requirement id")
    p.add_argument("--direction", choices=["down", "up", "both"], default="down")
    p.add_argument("--as", dest="as_kind", choices=list(payloads.IMPACT_KINDS),
                   help="disambiguate ids that are both nodes and chosen capabilities")

    p = add("export", cmd_export, "export the trace matrix (CSV) or an impact report (JSON)")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--matrix", action="store_true", help="RFC-4180 trace matrix")
    group.add_argument("--impact", metavar="ID", help="impact report for the entity")

    p = add("serve", cmd_serve, "serve the local HTTP API for the workbench UI")
    p.add_argument("--port", type=int, default=8787)
    p.add_argument("--host", default="127.0.0.1", help="bind address (loopback unless opted out)")

    return parser


def run_command(argv: list[str]) -> CommandResult:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else EXIT_USAGE
        return CommandResult(code)
    try:
        return args.handler(args)
    except _UsageError as exc:
        return CommandResult(EXIT_USAGE, stderr=f"usage error: {exc}\n")
    except OSError as exc:
        return CommandResult(EXIT_IO, stderr=f"I/O error: {exc}\n")
    except json.JSONDecodeError as exc:
        return CommandResult(EXIT_VALIDATION, stderr=f"invalid JSON input: {exc}\n")
    except CapweaveError as exc:
        return CommandResult(
            EXIT_VALIDATION,
            stdout=store.canonical_json_bytes(payloads.error_payload(exc)),
            stderr=f"{exc}\n",
        )


def main() -> None:
    result = run_command(sys.argv[1:])
    if result.stdout:
        sys.stdout.buffer.write(result.stdout)
        sys.stdout.buffer.flush()
    if result.stderr:
        sys.stderr.write(result.stderr)
    sys.exit(result.exit_code)


if __name__ == "__main__":
    main()
