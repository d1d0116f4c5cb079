from sqlalchemy import BigInteger, Column, DateTime, Float, Integer, String, Text, func

from backend.db import Base


class VerificationRun(Base):
    __tablename__ = "verification_runs"

    id = Column(Integer, primary_key=True, index=True)
    command = Column(String(64), index=True, nullable=False)
    property = Column(String(64), nullable=False)
    status = Column(String(16), index=True, nullable=False)  # successful / failed

    system = Column(Text, nullable=False)  # JSON system description
    int_bits = Column(Integer, nullable=False)
    frac_bits = Column(Integer, nullable=False)
    bound = Column(Integer, nullable=True)
    error_bound = Column(Float, nullable=True)
    realization = Column(String(16), nullable=True)

    engine_mode = Column(String(16), nullable=False)  # analytic / exhaustive / random
    states_explored = Column(BigInteger, default=0, nullable=False)
    wall_time = Column(Float, default=0.0, nullable=False)
    notes = Column(Text, nullable=True)

    counterexample = Column(Text, nullable=True)  # fwl-ce/1 document
    created_at = Column(DateTime(timezone=True), server_default=func.now())
