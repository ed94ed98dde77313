"""HTTP recognition service.

All preprocessing happens server-side from raw point sequences; the client
only captures strokes.  The model is immutable, so concurrent requests are
safe and identical requests return identical responses.
"""

from __future__ import annotations

import time

import numpy as np
from fastapi import FastAPI
from fastapi.encoders import jsonable_encoder
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .checkpoint import ModelBundle
from .eightdir import extract
from .features import featurize_sample
from .ink import InkCharacter, NonFiniteCoordinate, Stroke, validate
from .model import forward_variant
from .preprocess import interpolate_ink, normalize_box
from .stroke_maps import DEFAULT_MAX_STROKES, DEFAULT_SIZE, build_stack


class RecognizeRequest(BaseModel):
    strokes: list[list[tuple[float, float]]]
    k: int = Field(default=10, ge=1)


def _build_ink(payload: RecognizeRequest) -> InkCharacter | JSONResponse:
    if not payload.strokes or any(len(s) == 0 for s in payload.strokes):
        return JSONResponse(status_code=422, content={"detail": "empty ink"})
    ink = InkCharacter([Stroke(s) for s in payload.strokes])
    try:
        validate(ink)
    except NonFiniteCoordinate as e:
        return JSONResponse(status_code=400, content={"detail": str(e)})
    return ink


def create_app(bundle: ModelBundle, static_dir=None) -> FastAPI:
    app = FastAPI(title="ssdcnn recognition service")

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request, exc):
        return JSONResponse(status_code=400, content={"detail": jsonable_encoder(exc.errors())})

    @app.get("/api/health")
    async def health():
        return PlainTextResponse("ok")

    @app.get("/api/model")
    async def model_info():
        return {
            "variant": bundle.model.kind,
            "class_count": bundle.model.class_count,
            "alphabet_size": len(bundle.alphabet),
            "checkpoint_hash": bundle.digest,
        }

    @app.post("/api/recognize")
    async def recognize(payload: RecognizeRequest):
        t0 = time.perf_counter()
        ink = _build_ink(payload)
        if not isinstance(ink, InkCharacter):
            return ink
        feats = featurize_sample(ink, bundle.model.kind, bundle.preprocess)
        t1 = time.perf_counter()
        candidates = [
            {
                "label": bundle.alphabet.name_of(cls),
                "class_id": cls,
                "probability": prob,
            }
            for cls, prob in forward_variant(bundle.model, feats).top(
                min(payload.k, bundle.model.class_count)
            )
        ]
        t2 = time.perf_counter()
        return {
            "candidates": candidates,
            "timings": {
                "preprocess_ms": (t1 - t0) * 1000.0,
                "forward_ms": (t2 - t1) * 1000.0,
                "total_ms": (t2 - t0) * 1000.0,
            },
        }

    @app.post("/api/featuremaps")
    async def featuremaps(payload: RecognizeRequest):
        ink = _build_ink(payload)
        if not isinstance(ink, InkCharacter):
            return ink
        work = interpolate_ink(
            normalize_box(ink, DEFAULT_SIZE), bundle.preprocess.method, bundle.preprocess.max_gap
        )
        stack = build_stack(work)
        dirs = extract(work)
        return {
            "stroke_count": len(ink.strokes),
            "size": DEFAULT_SIZE,
            "max_strokes": DEFAULT_MAX_STROKES,
            "stack": stack.astype(int).tolist(),
            "dirs": np.asarray(dirs, dtype=float).tolist(),
        }

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="static")
    return app
