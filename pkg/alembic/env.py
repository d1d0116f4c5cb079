from logging.config import fileConfig

from alembic import context

from backend.db import DATABASE_URL, Base, engine
import backend.models  # noqa: F401  (registers verification_runs)

config = context.config

if config.config_file_name is not None:
    fileConfig(config.config_file_name)

# -------------------------------------------------
# Run history only; the URL comes from DATABASE_URL / backend/.env
# -------------------------------------------------
config.set_main_option("sqlalchemy.url", DATABASE_URL)
target_metadata = Base.metadata

# sqlite (the default) cannot ALTER columns in place
BATCH = DATABASE_URL.startswith("sqlite")


def run_migrations_offline() -> None:
    """Emit the run-history DDL as SQL without connecting."""
    context.configure(
        url=DATABASE_URL,
        target_metadata=target_metadata,
        literal_binds=True,
        dialect_opts={"paramstyle": "named"},
        render_as_batch=BATCH,
    )
    with context.begin_transaction():
        context.run_migrations()


def run_migrations_online() -> None:
    """Migrate through the service's own engine."""
    with engine.connect() as connection:
        context.configure(
            connection=connection,
            target_metadata=target_metadata,
            compare_type=True,
            render_as_batch=BATCH,
        )
        with context.begin_transaction():
            context.run_migrations()


if context.is_offline_mode():
    run_migrations_offline()
else:
    run_migrations_online()
