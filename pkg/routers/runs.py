import json

from fastapi import APIRouter, Body, Depends, HTTPException
from sqlalchemy.orm import Session

from backend import counterexample, models
from backend.db import get_db
from backend.errors import VerificationError

router = APIRouter(prefix="/runs", tags=["runs"])


def run_doc(run: models.VerificationRun) -> dict:
    return {
        "id": run.id,
        "command": run.command,
        "property": run.property,
        "status": run.status,
        "system": json.loads(run.system),
        "int_bits": run.int_bits,
        "frac_bits": run.frac_bits,
        "bound": run.bound,
        "error_bound": run.error_bound,
        "realization": run.realization,
        "stats": {
            "mode": run.engine_mode,
            "states_explored": run.states_explored,
            "wall_time": run.wall_time,
            "notes": json.loads(run.notes) if run.notes else [],
        },
        "has_counterexample": run.counterexample is not None,
        "created_at": run.created_at.isoformat() if run.created_at else None,
    }


def _get_run(db: Session, run_id: int) -> models.VerificationRun:
    run = db.query(models.VerificationRun).filter(models.VerificationRun.id == run_id).first()
    if not run:
        raise HTTPException(status_code=404, detail="Run not found")
    return run


@router.get("/")
def list_runs(
    status: str | None = None,
    command: str | None = None,
    limit: int = 50,
    db: Session = Depends(get_db),
):
    query = db.query(models.VerificationRun)
    if status:
        query = query.filter(models.VerificationRun.status == status)
    if command:
        query = query.filter(models.VerificationRun.command == command)
    runs = query.order_by(models.VerificationRun.id.desc()).limit(max(1, min(limit, 500))).all()
    return [run_doc(r) for r in runs]


@router.get("/{run_id}")
def get_run(run_id: int, db: Session = Depends(get_db)):
    return run_doc(_get_run(db, run_id))


@router.get("/{run_id}/counterexample")
def get_counterexample(run_id: int, db: Session = Depends(get_db)):
    run = _get_run(db, run_id)
    if run.counterexample is None:
        raise HTTPException(status_code=404, detail="Run has no counterexample")
    return json.loads(run.counterexample)


@router.post("/replay")
def replay_counterexample(doc: dict = Body(...)):
    try:
        ce = counterexample.deserialize(doc)
        result = counterexample.replay(ce)
    except VerificationError as e:
        raise HTTPException(status_code=400, detail=str(e))
    return {"property": ce.property.value, "result": result.value}
