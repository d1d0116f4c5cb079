"""verification runs

Revision ID: 3f9a2c71d0b4
Revises: 
Create Date: 2026-10-19 10:12:40.118305

"""
from typing import Sequence, Union

from alembic import op
import sqlalchemy as sa

# revision identifiers, used by Alembic.
revision: str = '3f9a2c71d0b4'
down_revision: Union[str, Sequence[str], None] = None
branch_labels: Union[str, Sequence[str], None] = None
depends_on: Union[str, Sequence[str], None] = None


def upgrade() -> None:
    """Upgrade schema."""
    op.create_table(
        'verification_runs',
        sa.Column('id', sa.Integer(), nullable=False),
        sa.Column('command', sa.String(length=64), nullable=False),
        sa.Column('property', sa.String(length=64), nullable=False),
        sa.Column('status', sa.String(length=16), nullable=False),
        sa.Column('system', sa.Text(), nullable=False),
        sa.Column('int_bits', sa.Integer(), nullable=False),
        sa.Column('frac_bits', sa.Integer(), nullable=False),
        sa.Column('bound', sa.Integer(), nullable=True),
        sa.Column('error_bound', sa.Float(), nullable=True),
        sa.Column('realization', sa.String(length=16), nullable=True),
        sa.Column('engine_mode', sa.String(length=16), nullable=False),
        sa.Column('states_explored', sa.BigInteger(), nullable=False),
        sa.Column('wall_time', sa.Float(), nullable=False),
        sa.Column('notes', sa.Text(), nullable=True),
        sa.Column('counterexample', sa.Text(), nullable=True),
        sa.Column('created_at', sa.DateTime(timezone=True), server_default=sa.text('CURRENT_TIMESTAMP'), nullable=True),
        sa.PrimaryKeyConstraint('id'),
    )
    op.create_index(op.f('ix_verification_runs_id'), 'verification_runs', ['id'], unique=False)
    op.create_index(op.f('ix_verification_runs_command'), 'verification_runs', ['command'], unique=False)
    op.create_index(op.f('ix_verification_runs_status'), 'verification_runs', ['status'], unique=False)


def downgrade() -> None:
    """Downgrade schema."""
    op.drop_index(op.f('ix_verification_runs_status'), table_name='verification_runs')
    op.drop_index(op.f('ix_verification_runs_command'), table_name='verification_runs')
    op.drop_index(op.f('ix_verification_runs_id'), table_name='verification_runs')
    op.drop_table('verification_runs')
