"""FastAPI application."""
import logging

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from api.routes import analysis, simulation
from errors import DegenerateTestError, DomainError, InputError

logger = logging.getLogger(__name__)

app = FastAPI(
    title="mfhd API",
    description="Model-free score tests and FDR selection for high-dimensional predictors",
    version="1.0.0"
)

# Configure CORS
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Include routers
app.include_router(analysis.router)
app.include_router(simulation.router)


@app.exception_handler(InputError)
@app.exception_handler(DomainError)
async def bad_request(request: Request, exc: Exception):
    return JSONResponse(status_code=400, content={"detail": str(exc)})


@app.exception_handler(DegenerateTestError)
async def degenerate_test(request: Request, exc: DegenerateTestError):
    logger.warning(f"Degenerate test on {request.url.path}: {exc}")
    return JSONResponse(status_code=422, content={"detail": str(exc)})


@app.exception_handler(Exception)
async def unexpected(request: Request, exc: Exception):
    logger.error(f"Unhandled error on {request.url.path}: {exc}", exc_info=True)
    return JSONResponse(status_code=500, content={"detail": "internal error"})


@app.get("/")
async def root():
    """Root endpoint."""
    return {"message": "mfhd API", "version": "1.0.0"}


@app.get("/health")
async def health():
    """Health check endpoint."""
    return {"status": "healthy"}
