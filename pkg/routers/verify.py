import json
import logging

from fastapi import APIRouter, Depends, HTTPException
from sqlalchemy.orm import Session

from backend import models
from backend.commands import COMMANDS, CommandParams, get_command, run_command, system_document
from backend.counterexample import serialize
from backend.db import get_db
from backend.errors import VerificationError
from routers.runs import run_doc

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/verify", tags=["verify"])


@router.get("/")
def list_commands():
    return [
        {
            "command": c.name,
            "property": c.property.value,
            "systems": list(c.systems),
            "required": sorted(c.required),
            "summary": c.summary,
        }
        for c in COMMANDS.values()
    ]


@router.post("/{command}")
def verify_system(command: str, params: CommandParams, db: Session = Depends(get_db)):
    if command not in COMMANDS:
        raise HTTPException(status_code=404, detail=f"Unknown command {command}")

    try:
        verdict = run_command(command, params)
        doc = system_document(get_command(command), params)
    except VerificationError as e:
        raise HTTPException(status_code=400, detail=str(e))

    ce = serialize(verdict.counterexample) if verdict.counterexample else None
    run = models.VerificationRun(
        command=command,
        property=verdict.property.value,
        status=verdict.status.value,
        system=json.dumps(doc),
        int_bits=params.intbits,
        frac_bits=params.fracbits,
        bound=params.bound,
        error_bound=params.error,
        realization=params.realization if verdict.property.bounded else None,
        engine_mode=verdict.stats.mode,
        states_explored=verdict.stats.states_explored,
        wall_time=verdict.stats.wall_time,
        notes=json.dumps(verdict.stats.notes),
        counterexample=json.dumps(ce) if ce else None,
    )
    db.add(run)
    db.commit()
    db.refresh(run)
    logger.info("run %d: %s %s", run.id, command, verdict.status.value)

    return {**run_doc(run), "banner": verdict.banner, "counterexample": ce}
