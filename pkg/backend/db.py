import logging
import os

from sqlalchemy import create_engine
from sqlalchemy.orm import declarative_base, sessionmaker

from backend import config  # noqa: F401  (loads backend/.env)

logger = logging.getLogger(__name__)

DATABASE_URL = os.getenv("DATABASE_URL", "sqlite:///./dsverify.db")

# -------------------------------------------------
# Ensure correct MySQL driver format (safe conversion)
# -------------------------------------------------
if DATABASE_URL.startswith("mysql://"):
    DATABASE_URL = DATABASE_URL.replace("mysql://", "mysql+pymysql://", 1)

logger.info("run history database: %s", DATABASE_URL.split("@")[-1])

# -------------------------------------------------
# Create engine
# -------------------------------------------------
if DATABASE_URL.startswith("sqlite"):
    engine = create_engine(DATABASE_URL, connect_args={"check_same_thread": False})
else:
    engine = create_engine(
        DATABASE_URL,
        pool_pre_ping=True,   # Reconnect automatically if MySQL times out
        pool_recycle=280,
    )

# -------------------------------------------------
# Session factory
# -------------------------------------------------
SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)

Base = declarative_base()


# -------------------------------------------------
# Dependency for FastAPI
# -------------------------------------------------
def get_db():
    db = SessionLocal()
    try:
        yield db
    finally:
        db.close()
