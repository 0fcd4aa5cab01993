"""HTTP binding of the reading service."""

from __future__ import annotations

import os

from fastapi import FastAPI, HTTPException, Request

from . import linguistics as ling
from .gaze import GazeSample
from .service import NotFoundError, ReadingService, ServiceConfig, StateError


def create_app(service: ReadingService) -> FastAPI:
    app = FastAPI(title="gazeread")

    def _err(e: Exception):
        if isinstance(e, NotFoundError):
            return HTTPException(status_code=404, detail=str(e))
        if isinstance(e, StateError):
            return HTTPException(status_code=409, detail=str(e))
        return HTTPException(status_code=422, detail=str(e))

    @app.post("/sessions")
    async def create_session(request: Request):
        body = await request.json()
        try:
            session_id = service.create_session(body["user_id"], body["layout"])
        except (ValueError, KeyError) as e:
            raise _err(e)
        return {"session_id": session_id}

    @app.post("/sessions/{session_id}/gaze")
    async def ingest(session_id: str, request: Request):
        body = await request.json()
        try:
            batch = [GazeSample(s["timestamp_ms"], s["x_px"], s["y_px"], bool(s.get("valid", True)))
                     for s in body["samples"]]
            accepted = service.ingest_gaze(session_id, batch)
        except (ValueError, KeyError, StateError) as e:
            raise _err(e)
        return {"accepted": accepted}

    @app.post("/sessions/{session_id}/score")
    async def score(session_id: str):
        try:
            scores, flagged = service.finalize_and_score(session_id)
        except (ValueError, KeyError, StateError) as e:
            raise _err(e)
        return {"scores": scores, "flagged": flagged}

    @app.post("/sessions/{session_id}/simplify")
    async def simplify(session_id: str):
        try:
            results, errors = service.simplify_flagged(session_id)
        except (KeyError, StateError) as e:
            raise _err(e)
        return {
            "results": [
                {"sentence_index": r.sentence_index, "original": r.original,
                 "simplified": r.simplified, "client_id": r.client_id}
                for r in results
            ],
            "errors": errors,
        }

    @app.post("/sessions/{session_id}/marks")
    async def marks(session_id: str, request: Request):
        body = await request.json()
        try:
            accepted = service.submit_marks(session_id, [bool(m) for m in body["marks"]])
        except (ValueError, KeyError) as e:
            raise _err(e)
        return {"accepted": accepted}

    @app.get("/sessions/{session_id}/document")
    async def document(session_id: str):
        try:
            return service.get_document(session_id)
        except KeyError as e:
            raise _err(e)

    @app.post("/users/{user_id}/train")
    async def train(user_id: str, request: Request):
        body = {}
        if await request.body():
            body = await request.json()
        try:
            report = service.train_user(user_id, seed=body.get("seed"))
        except ValueError as e:
            raise _err(e)
        return report.to_dict()

    @app.get("/users/{user_id}/report")
    async def report(user_id: str):
        rep = service.load_report(user_id)
        if rep is None:
            raise HTTPException(status_code=404, detail=f"no report for {user_id}")
        return rep

    return app


def default_app() -> FastAPI:
    """App wired from environment: GAZEREAD_STORE, GAZEREAD_LEXICON_DIR, GAZEREAD_CONFIG."""
    store = os.environ.get("GAZEREAD_STORE", "./gazeread-store")
    lex_dir = os.environ.get("GAZEREAD_LEXICON_DIR")
    config_path = os.environ.get("GAZEREAD_CONFIG")
    if lex_dir:
        aoa = ling.Lexicon.from_csv(os.path.join(lex_dir, "aoa.csv"), "aoa")
        zipf = ling.Lexicon.from_csv(os.path.join(lex_dir, "zipf.csv"), "zipf")
    else:
        aoa, zipf = ling.load_fixture_lexicons()
    config = ServiceConfig.from_file(config_path) if config_path else ServiceConfig()
    return create_app(ReadingService(store, aoa, zipf, config))


def __getattr__(name: str):
    # `uvicorn gazeread.api:app` resolves this lazily so importing the module
    # has no side effects
    if name == "app":
        return default_app()
    raise AttributeError(name)
