"""HTTP surface: POST /embed for 1-64 texts, GET /health for readiness."""

import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

MAX_BATCH = 64

logger = logging.getLogger("embed_sidecar")


class EmbedRequest(BaseModel):
    texts: list
    normalize: bool = False


class EmbedResponse(BaseModel):
    vectors: list
    model_id: str
    truncated: list


class HealthResponse(BaseModel):
    status: str
    model_id: str
    dim: int


def create_app(encoder_loader=None):
    """encoder_loader: zero-argument callable returning a ready encoder,
    run once at startup; None (or a raising loader) keeps the service in
    the 503 not-ready state."""
    state = {"encoder": None}

    @asynccontextmanager
    async def lifespan(_app):
        if encoder_loader is not None:
            try:
                state["encoder"] = encoder_loader()
                logger.info("model ready: %s (dim %s)",
                            state["encoder"].model_id, state["encoder"].dim)
            except Exception:
                logger.exception("model load failed; serving 503")
        yield

    app = FastAPI(title="embed-sidecar", lifespan=lifespan)

    def ready_encoder():
        encoder = state["encoder"]
        if encoder is None:
            raise HTTPException(status_code=503, detail="model not ready")
        return encoder

    @app.get("/health", response_model=HealthResponse)
    def health():
        encoder = ready_encoder()
        return HealthResponse(status="ok", model_id=encoder.model_id, dim=encoder.dim)

    @app.post("/embed", response_model=EmbedResponse)
    def embed(request: EmbedRequest):
        encoder = ready_encoder()
        texts = request.texts
        if not isinstance(texts, list) or not 1 <= len(texts) <= MAX_BATCH:
            raise HTTPException(
                status_code=400,
                detail=f"texts must hold 1..{MAX_BATCH} strings, got {len(texts)}",
            )
        for i, text in enumerate(texts):
            if not isinstance(text, str) or text == "":
                raise HTTPException(status_code=400,
                                    detail=f"empty or non-string text at index {i}")
        vectors, truncated = encoder.embed(texts, normalize=request.normalize)
        return EmbedResponse(vectors=vectors, model_id=encoder.model_id,
                             truncated=truncated)

    return app
