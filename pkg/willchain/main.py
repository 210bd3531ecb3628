import argparse
import sys
from typing import List, Optional

from loguru import logger
from sqlalchemy.orm import sessionmaker

from .api import commands
from .core.errors import ScenarioAssertionError, WillchainError
from .core.logging import configure_logging
from .db.database import get_db, make_engine
from .db.setupDB import setup_database
from .services.simulation import EXIT_ASSERTION, EXIT_INPUT


class Parser(argparse.ArgumentParser):
    """Usage errors exit with the input-error status instead of argparse's 2."""

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_INPUT)


def build_parser() -> argparse.ArgumentParser:
    parser = Parser(prog="willchain", description="Deterministic digital-will protocol simulator")
    parser.add_argument("--db", help="database URL (default: WILLCHAIN_DATABASE_URL)")
    parser.add_argument("--log-level", help="loguru level, e.g. DEBUG")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=Parser)

    p = sub.add_parser("init", help="create a world from genesis and topology files")
    p.add_argument("--genesis", required=True)
    p.add_argument("--topology")
    p.add_argument("--seed", type=int)
    p.set_defaults(handler=commands.init)

    p = sub.add_parser("run", help="run a scenario file")
    p.add_argument("scenario")
    p.add_argument("--seed", type=int)
    p.add_argument("--report", help="write the line-delimited report here instead of stdout")
    p.add_argument("--snapshot", help="also save the final world under this snapshot name")
    p.add_argument("--resume", help="continue the scenario from this snapshot instead of genesis")
    p.add_argument("--timestamps", action="store_true")
    p.set_defaults(handler=commands.run)

    p = sub.add_parser("tx", help="submit a transaction to the current world")
    tx_sub = p.add_subparsers(dest="tx_command", required=True, parser_class=Parser)
    p.set_defaults(handler=commands.tx)
    for name in ("create-will", "checkin", "claim", "approve", "transfer"):
        t = tx_sub.add_parser(name)
        t.add_argument("--sender", required=True, help="keyring alias")
        t.add_argument("--fee-payer")
        if name == "create-will":
            t.add_argument("--file", required=True, help="JSON body of the will")
        if name in ("checkin", "claim"):
            t.add_argument("--did", required=True)
        if name == "claim":
            t.add_argument("--component", required=True, help="component index or id")
            t.add_argument("--evidence", required=True, help="JSON evidence or evidence spec")
            t.add_argument("--recipient", help="claim through the destination entrypoint for this recipient")
        if name == "approve":
            t.add_argument("--chain", required=True)
            t.add_argument("--address", required=True)
        if name == "transfer":
            t.add_argument("--to", required=True)
            t.add_argument("--amount", required=True, type=int)
            t.add_argument("--denom")

    p = sub.add_parser("advance", help="produce blocks")
    p.add_argument("--blocks", type=int, default=1)
    p.set_defaults(handler=commands.advance)

    p = sub.add_parser("relay", help="step the relayers")
    p.add_argument("--steps", type=int, default=1)
    p.add_argument("--until-idle", action="store_true")
    p.set_defaults(handler=commands.relay)

    p = sub.add_parser("store-file", help="store a file, optionally as an encrypted deed")
    p.add_argument("path")
    p.add_argument("--chunk-size", type=int)
    p.add_argument("--did")
    p.add_argument("--component")
    p.add_argument("--beneficiary")
    p.add_argument("--temp-key")
    p.set_defaults(handler=commands.store_file)

    p = sub.add_parser("retrieve-file", help="reassemble a stored file")
    p.add_argument("file_id")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=commands.retrieve_file)

    p = sub.add_parser("reveal-key", help="release the outer layer of an attached deed")
    p.add_argument("--did", required=True)
    p.add_argument("--component", required=True)
    p.add_argument("--temp-key", required=True)
    p.add_argument("--beneficiary")
    p.set_defaults(handler=commands.reveal_key)

    p = sub.add_parser("inspect", help="query wills, accounts, packets, trace, balances")
    p.add_argument("query")
    p.add_argument("--snapshot")
    p.set_defaults(handler=commands.inspect)

    p = sub.add_parser("snapshot", help="save or load named snapshots")
    snap_sub = p.add_subparsers(dest="snapshot_command", required=True, parser_class=Parser)
    for name in ("save", "load"):
        s = snap_sub.add_parser(name)
        s.add_argument("name")
    snap_sub.add_parser("list")
    p.set_defaults(handler=commands.snapshot)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    engine = make_engine(args.db)
    setup_database(engine)
    session_factory = sessionmaker(autocommit=False, autoflush=False, bind=engine)
    try:
        with get_db(session_factory) as db:
            return args.handler(args, db)
    except ScenarioAssertionError as exc:
        logger.error("assertion failed: {}", exc.message)
        sys.stderr.write(f"assertion failed: {exc.message}\n")
        return EXIT_ASSERTION
    except WillchainError as exc:
        sys.stderr.write(f"error [{exc.code}]: {exc.message}\n")
        return EXIT_INPUT
    finally:
        engine.dispose()


if __name__ == "__main__":
    sys.exit(main())
