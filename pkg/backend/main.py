import logging

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from backend import config
from backend.db import Base, engine
import backend.models  # noqa: F401  (registers the tables)
from routers import runs, verify

config.configure_logging()
logger = logging.getLogger(__name__)

app = FastAPI(title="dsverify", description="Fixed-point digital system verification")

# Create database tables
Base.metadata.create_all(bind=engine)
logger.info("tables: %s", ", ".join(Base.metadata.tables.keys()))

app.add_middleware(
    CORSMiddleware,
    allow_origins=config.CORS_ORIGINS,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

app.include_router(verify.router)
app.include_router(runs.router)


@app.get("/")
def root():
    return {"message": "dsverify API is running", "commands": len(verify.COMMANDS)}
