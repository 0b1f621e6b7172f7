"""Local HTTP API for the workbench UI.

Local-first and unauthenticated: the server binds to loopback unless the CLI
opts into another host. Reads serve immutable project snapshots concurrently;
mutations serialize through one lock and persist to the project file on every
commit, so an interleaved read sees either the pre- or post-mutation version,
never a torn one.
"""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from . import payloads, store
from .errors import (
    CapabilityDeferredError,
    CapweaveError,
    EmptyRequirementListError,
    GraphTooLargeForExactError,
    MemberExceedsBudgetError,
    NoFeasibleSelectionError,
    ParseError,
    UnknownEntityError,
    ValidationError,
)
from .formulation import Strategy, enumerate_candidates, rank_candidates
from .optimization import Constraints, optimize
from .transformation import transform_capability

_STATUS_BY_ERROR: list[tuple[type, int]] = [
    (ParseError, 400),
    (UnknownEntityError, 404),
    (NoFeasibleSelectionError, 422),
    (MemberExceedsBudgetError, 422),
    (GraphTooLargeForExactError, 422),
    (CapabilityDeferredError, 422),
    (EmptyRequirementListError, 409),
    (ValidationError, 409),
    (CapweaveError, 409),
]


def _status_for(exc: Exception) -> int:
    for error_type, status in _STATUS_BY_ERROR:
        if isinstance(exc, error_type):
            return status
    return 500


def _json_response(payload, status_code: int = 200) -> Response:
    return Response(
        content=store.canonical_json_bytes(payload),
        status_code=status_code,
        media_type="application/json",
    )


class ProjectState:
    """Current project snapshot plus the single-writer lock."""

    def __init__(self, path: Path):
        self.path = path
        self.project = store.load_project(path.read_bytes())
        self.write_lock = threading.Lock()

    def commit(self, project) -> None:
        store.save_project_file(project, self.path)
        self.project = project


def create_app(path: str | Path) -> FastAPI:
    state = ProjectState(Path(path))
    app = FastAPI(title="capweave", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.projects = state

    @app.exception_handler(CapweaveError)
    async def handle_domain_error(_request: Request, exc: CapweaveError):
        return _json_response(payloads.error_payload(exc), _status_for(exc))

    async def _body(request: Request) -> dict:
        try:
            body = await request.json()
        except Exception:
            raise ParseError("request body must be JSON") from None
        if not isinstance(body, dict):
            raise ParseError("request body must be a JSON object")
        return body

    @app.get("/project")
    async def get_project():
        return Response(content=store.save_project(state.project), media_type="application/json")

    @app.get("/graph")
    async def get_graph():
        return _json_response(payloads.graph_payload(state.project))

    @app.get("/candidates")
    async def get_candidates(strategy: str = "exact", w: str | None = None):
        try:
            parsed_strategy = Strategy(strategy)
        except ValueError:
            raise ParseError("strategy must be 'exact' or 'greedy'", field="strategy") from None
        weights = payloads.parse_weights_csv(w) if w else None
        return _json_response(
            payloads.candidates_payload(state.project, parsed_strategy, weights)
        )

    @app.post("/selection")
    async def post_selection(request: Request):
        body = await _body(request)
        constraints_doc = body.get("constraints")
        if not isinstance(constraints_doc, dict):
            raise ParseError("missing constraints object", field="constraints")
        with state.write_lock:
            project = state.project
            budget = constraints_doc.get("scheduleBudget", project.constraints.schedule_budget)
            min_trl = constraints_doc.get("minTechReadiness", project.constraints.min_tech_readiness)
            try:
                constraints = Constraints(budget, min_trl)
            except (TypeError, ValueError) as exc:
                raise ParseError(str(exc), field="constraints") from None
            weights = (
                payloads.parse_weights_csv(body["weights"])
                if isinstance(body.get("weights"), str)
                else project.weights
            )
            ranked = rank_candidates(enumerate_candidates(project.graph), weights)
            selection = optimize(project.graph, ranked, constraints)
            mutated = store.apply_mutation(
                project,
                {"kind": "recordSelection", "selection": store.selection_document(selection)},
            )
            if mutated.constraints != constraints:
                mutated = store.apply_mutation(
                    mutated,
                    {
                        "kind": "setConstraints",
                        "scheduleBudget": constraints.schedule_budget,
                        "minTechReadiness": constraints.min_tech_readiness,
                    },
                )
            state.commit(mutated)
        return _json_response(payloads.selection_payload(selection))

    @app.post("/transform")
    async def post_transform(request: Request):
        body = await _body(request)
        capability = body.get("capability")
        drafts = body.get("drafts")
        if not isinstance(capability, str):
            raise ParseError("missing capability id", field="capability")
        if not isinstance(drafts, dict):
            raise ParseError("missing drafts object", field="drafts")
        normalized = {
            d: [texts] if isinstance(texts, str) else texts for d, texts in drafts.items()
        }
        with state.write_lock:
            updated, created = transform_capability(state.project, capability, normalized)
            state.commit(updated)
        return _json_response(payloads.requirements_payload(created))

    @app.get("/trace/{entity_id}")
    async def get_trace(entity_id: str, direction: str = ""):
        project = state.project
        if direction not in ("", "forward", "backward"):
            raise ParseError("direction must be 'forward' or 'backward'", field="direction")
        if direction:
            backward = direction == "backward"
        else:
            backward = project.entity_kind(entity_id) == "requirement"
        return _json_response(payloads.trace_payload(project, entity_id, backward))

    @app.post("/impact")
    async def post_impact(request: Request):
        body = await _body(request)
        entity = body.get("entity")
        if not isinstance(entity, str):
            raise ParseError("missing entity id", field="entity")
        direction = body.get("direction", "down")
        if direction not in ("down", "up", "both"):
            raise ParseError("direction must be down, up or both", field="direction")
        as_kind = body.get("as")
        if as_kind is not None and as_kind not in payloads.IMPACT_KINDS:
            raise ParseError("unknown impact kind", field="as")
        report = payloads.resolve_impact(state.project, entity, direction, as_kind)
        return _json_response(payloads.impact_payload(report))

    @app.post("/mutations")
    async def post_mutation(request: Request):
        body = await _body(request)
        with state.write_lock:
            mutated = store.apply_mutation(state.project, body)
            state.commit(mutated)
            entry = mutated.audit_log[-1]
        return _json_response(
            {
                "version": mutated.meta.version,
                "audit": {"at": entry.at, "kind": entry.kind, "entities": list(entry.entities)},
            }
        )

    @app.get("/export/matrix")
    async def get_matrix():
        return Response(content=store.export_matrix(state.project), media_type="text/csv")

    return app
