import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from app.config import configure_logging, settings
from app.routes import check, describe, solve

logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Configure logging on startup."""
    configure_logging()
    logger.info("starting in %s mode", settings.environment)
    yield


app = FastAPI(
    title="Magnetic Fields API",
    description="Left-invariant geometry and unit magnetic fields on 3-dimensional Lie groups",
    version="1.0.0",
    lifespan=lifespan
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=False,
    allow_methods=["*"],
    allow_headers=["*"],
)

app.include_router(describe.router, prefix="/api", tags=["Geometry"])
app.include_router(check.router, prefix="/api", tags=["Magnetic"])
app.include_router(solve.router, prefix="/api", tags=["Magnetic"])


@app.get("/")
async def root():
    return {
        "message": "Magnetic Fields API",
        "version": "1.0.0",
        "docs": "/docs"
    }


@app.get("/health")
async def health_check():
    return {"status": "healthy"}
