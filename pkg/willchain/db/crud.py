from typing import List, Optional

from sqlalchemy.orm import Session

from ..core.errors import NotFoundError
from ..services.simulation import Simulation
from . import models

CURRENT_WORLD = "current"


def save_world(db: Session, sim: Simulation, name: str = CURRENT_WORLD) -> None:
    db_world = db.get(models.World, name)
    if db_world is None:
        db_world = models.World(name=name, payload=sim.serialize())
        db.add(db_world)
    else:
        db_world.payload = sim.serialize()
    db.commit()


def load_world(db: Session, name: str = CURRENT_WORLD) -> Simulation:
    db_world = db.get(models.World, name)
    if db_world is None:
        raise NotFoundError(f"no simulation named {name!r}; run `init` first")
    return Simulation.load(db_world.payload)


def save_snapshot(db: Session, sim: Simulation, name: str) -> str:
    state_hash = sim.world_hash()
    db_snapshot = db.get(models.Snapshot, name)
    if db_snapshot is None:
        db.add(models.Snapshot(name=name, state_hash=state_hash, payload=sim.serialize()))
    else:
        db_snapshot.state_hash = state_hash
        db_snapshot.payload = sim.serialize()
    db.commit()
    return state_hash


def load_snapshot(db: Session, name: str) -> Simulation:
    db_snapshot = db.get(models.Snapshot, name)
    if db_snapshot is None:
        raise NotFoundError(f"no snapshot named {name!r}")
    return Simulation.load(db_snapshot.payload)


def get_snapshot(db: Session, name: str) -> Optional[models.Snapshot]:
    return db.get(models.Snapshot, name)


def list_snapshots(db: Session) -> List[str]:
    return [row.name for row in db.query(models.Snapshot).order_by(models.Snapshot.name).all()]
