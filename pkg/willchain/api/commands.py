"""One handler per CLI subcommand.

Every handler takes the parsed arguments and an open database session, works
on the `current` world stored in the database, and returns the exit status.
Results are printed to stdout as canonical JSON.
"""

import json
import sys
from argparse import Namespace
from pathlib import Path
from typing import Any, Dict

from loguru import logger
from sqlalchemy.orm import Session

from ..core.encoding import canonical_json
from ..core.errors import InputError
from ..db import crud
from ..models.chain import Genesis
from ..models.interchain import Topology
from ..models.scenario import AdvanceStep, RelayStep, RevealKeyStep, StoreFileStep, TxStep
from ..services.simulation import (
    EXIT_OK,
    ScenarioRunner,
    Simulation,
    read_model,
    write_report,
)


def _emit(value: Any) -> None:
    sys.stdout.write(canonical_json(value) + "\n")


def _component_ref(did: str, value: str) -> str:
    return f"{did}#{value}" if value.isdigit() else value


def _json_arg(value: str, name: str) -> Dict[str, Any]:
    try:
        parsed = json.loads(value)
    except json.JSONDecodeError as exc:
        raise InputError(f"--{name} is not valid JSON: {exc.msg}") from exc
    if not isinstance(parsed, dict):
        raise InputError(f"--{name} must be a JSON object")
    return parsed


def init(args: Namespace, db: Session) -> int:
    genesis = read_model(Path(args.genesis), Genesis)
    topology = read_model(Path(args.topology), Topology) if args.topology else None
    sim = Simulation.create(genesis, topology, args.seed)
    crud.save_world(db, sim)
    _emit({"chains": sim.state_hashes(), "seed": sim.seed})
    return EXIT_OK


def run(args: Namespace, db: Session) -> int:
    runner = ScenarioRunner.from_file(Path(args.scenario), args.seed, args.timestamps or None)
    status, records, sim = runner.run(crud.load_snapshot(db, args.resume) if args.resume else None)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as out:
            write_report(records, out)
    else:
        write_report(records, sys.stdout)
    crud.save_world(db, sim)
    if args.snapshot:
        crud.save_snapshot(db, sim, args.snapshot)
    logger.info("scenario {} finished at height {}", runner.scenario.name, sim.chain.height)
    return status


def _step(db: Session, step) -> int:
    sim = crud.load_world(db)
    data = sim.execute_step(step)
    crud.save_world(db, sim)
    _emit({"height": sim.chain.height, "result": data})
    return EXIT_OK


def tx(args: Namespace, db: Session) -> int:
    if args.tx_command == "create-will":
        try:
            body = json.loads(Path(args.file).read_text(encoding="utf-8"))
        except OSError as exc:
            raise InputError(f"cannot read {args.file}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"{args.file} is not valid JSON: {exc.msg}") from exc
        body["type"] = "create-will"
    elif args.tx_command == "checkin":
        body = {"type": "checkin", "did": args.did}
    elif args.tx_command == "claim":
        body = {
            "type": "interchain-claim" if args.recipient else "claim",
            "did": args.did,
            "component_id": _component_ref(args.did, args.component),
            "evidence": _json_arg(args.evidence, "evidence"),
        }
        if args.recipient:
            body["recipient"] = args.recipient
    elif args.tx_command == "approve":
        body = {"type": "approve-contract", "chain_id": args.chain, "address": args.address}
    elif args.tx_command == "transfer":
        body = {"type": "transfer", "to": args.to, "amount": args.amount, "denom": args.denom}
    else:
        raise InputError(f"unknown tx command {args.tx_command!r}")
    return _step(db, TxStep(sender=args.sender, body=body, fee_payer=args.fee_payer))


def advance(args: Namespace, db: Session) -> int:
    return _step(db, AdvanceStep(blocks=args.blocks))


def relay(args: Namespace, db: Session) -> int:
    return _step(db, RelayStep(steps=args.steps, until_idle=args.until_idle))


def store_file(args: Namespace, db: Session) -> int:
    did = args.did
    step = StoreFileStep(
        path=str(Path(args.path).resolve()),
        chunk_size=args.chunk_size,
        did=did,
        component_id=_component_ref(did, args.component) if did and args.component else None,
        beneficiary=args.beneficiary,
        temp_key=args.temp_key,
    )
    return _step(db, step)


def retrieve_file(args: Namespace, db: Session) -> int:
    sim = crud.load_world(db)
    data = sim.retrieve_file(args.file_id)
    Path(args.out).write_bytes(data)
    _emit({"file_id": args.file_id, "size": len(data), "out": args.out})
    return EXIT_OK


def reveal_key(args: Namespace, db: Session) -> int:
    step = RevealKeyStep(
        did=args.did,
        component_id=_component_ref(args.did, args.component),
        temp_key=args.temp_key,
        beneficiary=args.beneficiary,
    )
    return _step(db, step)


def inspect(args: Namespace, db: Session) -> int:
    sim = crud.load_snapshot(db, args.snapshot) if args.snapshot else crud.load_world(db)
    _emit(sim.inspect(args.query))
    return EXIT_OK


def snapshot(args: Namespace, db: Session) -> int:
    if args.snapshot_command == "save":
        state_hash = crud.save_snapshot(db, crud.load_world(db), args.name)
        _emit({"snapshot": args.name, "state_hash": state_hash})
    elif args.snapshot_command == "load":
        sim = crud.load_snapshot(db, args.name)
        crud.save_world(db, sim)
        _emit({"snapshot": args.name, "state_hash": sim.world_hash(), "height": sim.chain.height})
    else:
        _emit({"snapshots": crud.list_snapshots(db)})
    return EXIT_OK
