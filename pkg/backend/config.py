import logging
import os
from pathlib import Path

from dotenv import load_dotenv

# -------------------------------------------------
# Load environment variables from backend/.env
# -------------------------------------------------
env_path = Path(__file__).resolve().parent / ".env"
load_dotenv(dotenv_path=env_path)

LOG_LEVEL = os.getenv("DSV_LOG_LEVEL", "WARNING").upper()

# -------------------------------------------------
# Bounded engine defaults
# -------------------------------------------------
SEARCH_BUDGET = int(os.getenv("DSV_SEARCH_BUDGET", 10_000_000))
FALLBACK_SAMPLES = int(os.getenv("DSV_FALLBACK_SAMPLES", 100_000))
FALLBACK_SEED = int(os.getenv("DSV_FALLBACK_SEED", 1))
WORKERS = int(os.getenv("DSV_WORKERS", 1))

# Jury cross-check on every stability verdict (slow; for debugging)
CROSSCHECK = os.getenv("DSV_CROSSCHECK", "").lower() in ("1", "true", "yes", "on")

CORS_ORIGINS = [
    o.strip() for o in os.getenv("DSV_CORS_ORIGINS", "http://localhost:3000").split(",") if o.strip()
]

LOG_FORMAT = "%(levelname)-5.5s [%(name)s] %(message)s"


def configure_logging(level: str | None = None):
    """Send diagnostics to stderr; stdout is reserved for verdicts."""
    logging.basicConfig(level=level or LOG_LEVEL, format=LOG_FORMAT, datefmt="%H:%M:%S")
