"""Scenario-driven simulation of the will module and its destination chains.

A `Simulation` bundles the home chain runtime, the file vault, destination
chains, relayers and a seed-derived keyring. Scenario files refer to keys by
alias: `@alice` becomes alice's address, `@alice.pk` her public key, and
`$name.field` a value saved by an earlier step. Randomness comes only from the
seed, through named streams whose draw counters are part of the saved world,
so a reloaded world continues exactly as an uninterrupted run would.
"""

import random
import re
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, TextIO, Tuple, Type, TypeVar

from loguru import logger
from pydantic import BaseModel, TypeAdapter
from pydantic import ValidationError as PydanticValidationError

from ..core.config import settings
from ..core.encoding import canonical_bytes, canonical_json, sha256
from ..core.errors import (
    InputError,
    NotFoundError,
    ScenarioAssertionError,
    WillchainError,
)
from ..crypto.group import Group, production_group
from ..crypto.keys import DeterministicNonceSource, KeyPair
from ..crypto.layered import layered_decrypt_inner
from ..crypto.pedersen import default_params, pedersen_commit
from ..crypto.schnorr import make_pop, schnorr_aggregate, schnorr_sign
from ..models.chain import Genesis, Tx, TxBody, TxResult
from ..models.interchain import Topology
from ..models.scenario import (
    AdvanceStep,
    AssertStep,
    RelayStep,
    ReportRecord,
    RevealKeyStep,
    Scenario,
    Step,
    StoreFileStep,
    TxStep,
    WorldState,
)
from ..models.vault import ChunkMap
from .chain import ChainRuntime, sign_tx, will_escrow_address
from .claims import (
    aggregate_evidence,
    claim_message,
    derive_address,
    direct_evidence,
    knowledge_evidence,
    pedersen_evidence,
    signature_proof_setup,
)
from .interchain.contracts import DestinationChain
from .interchain.network import Network
from .vault import FileVault
from .will_core import component_id as component_key

EXIT_OK = 0
EXIT_ASSERTION = 2
EXIT_INPUT = 3

MAX_RELAY_ROUNDS = 100

REFERENCE = re.compile(r"(?<!\w)([@$])([A-Za-z_][\w-]*)(?:\.([A-Za-z_]\w*))?")
ADDRESS = re.compile(r"[0-9a-f]{40}")

_TX_BODY = TypeAdapter(TxBody)

M = TypeVar("M", bound=BaseModel)


def read_model(path: Path, model: Type[M]) -> M:
    try:
        return model.model_validate_json(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except PydanticValidationError as exc:
        raise InputError(f"{path} is not a valid {model.__name__}: {exc.errors()[0]['msg']}") from exc


class Keyring:
    """Test keys derived from the scenario seed, one per alias."""

    def __init__(self, seed: int, group: Group):
        self.seed = seed
        self.group = group
        self._keys: Dict[str, KeyPair] = {}

    def key(self, alias: str) -> KeyPair:
        alias = alias.lstrip("@")
        kp = self._keys.get(alias)
        if kp is None:
            kp = KeyPair.derive(self.group, self.seed.to_bytes(8, "big", signed=True), alias)
            self._keys[alias] = kp
        return kp

    def address(self, alias: str) -> str:
        return derive_address(self.key(alias).pk)

    def alias_of(self, address: str) -> Optional[str]:
        for alias, kp in self._keys.items():
            if derive_address(kp.pk) == address:
                return alias
        return None


class RandomStreams:
    """Draw n of stream `name` is seeded by H(seed, name, n)."""

    def __init__(self, seed: int, draws: Optional[Dict[str, int]] = None):
        self.seed = seed
        self.draws = draws if draws is not None else {}

    def next(self, name: str) -> random.Random:
        n = self.draws.get(name, 0)
        self.draws[name] = n + 1
        digest = sha256(
            b"willchain/stream/v1",
            self.seed.to_bytes(8, "big", signed=True),
            name.encode("utf-8"),
            n.to_bytes(8, "big"),
        )
        return random.Random(int.from_bytes(digest, "big"))


class Simulation:
    def __init__(self, world: WorldState, group: Optional[Group] = None, base_dir: Path = Path(".")):
        self.group = group or production_group()
        self.seed = world.seed
        self.base_dir = base_dir
        self.keyring = Keyring(world.seed, self.group)
        self.streams = RandomStreams(world.seed, dict(world.draws))
        self.chain = ChainRuntime(world.chain, FileVault(world.vault), self.group)
        self.chain.events = list(world.events)
        self.network = Network(
            self.chain,
            {chain_id: DestinationChain(state) for chain_id, state in world.destinations.items()},
            world.relayers,
            list(world.trace),
        )
        self.saved: Dict[str, Any] = dict(world.saved)
        self.steps_done = world.steps_done
        self._step_handlers: Dict[str, Callable[[Any], Dict[str, Any]]] = {
            "tx": self._tx_step,
            "advance": self._advance_step,
            "relay": self._relay_step,
            "assert": self._assert_step,
            "store-file": self._store_file_step,
            "reveal-key": self._reveal_key_step,
        }

    @classmethod
    def create(
        cls,
        genesis: Genesis,
        topology: Optional[Topology] = None,
        seed: Optional[int] = None,
        group: Optional[Group] = None,
        base_dir: Path = Path("."),
    ) -> "Simulation":
        topology = topology or Topology()
        if seed is None:
            seed = topology.seed if topology.seed is not None else settings.SEED
        group = group or production_group()
        keyring = Keyring(seed, group)
        try:
            home = ChainRuntime.from_genesis(genesis, keyring.address)
        except WillchainError as exc:
            raise InputError(f"bad genesis: {exc.message}") from exc
        sim = cls(WorldState(seed=seed, chain=home.state), group, base_dir)
        for spec in topology.chains:
            chain = DestinationChain.create(spec.chain_id, spec.contract_address)
            for owner, assets in sorted(spec.escrow.items()):
                for denom, amount in sorted(assets.items()):
                    chain.contract.deposit(sim.address_of(owner), denom, amount)
            sim.network.add_destination(chain)
        try:
            for channel in topology.channels:
                sim.network.open_channel(channel.channel_id, channel.counterparty_chain)
        except WillchainError as exc:
            raise InputError(f"bad topology: {exc.message}") from exc
        for relayer in topology.relayers:
            sim.network.add_relayer(relayer.id, relayer.channels)
        logger.bind(chain=home.chain_id).info(
            "simulation created: seed {}, {} destination chain(s), {} relayer(s)",
            seed,
            len(topology.chains),
            len(topology.relayers),
        )
        return sim

    # persistence

    def world(self) -> WorldState:
        return WorldState(
            seed=self.seed,
            chain=self.chain.state,
            vault=self.chain.vault.state,
            destinations={cid: d.state for cid, d in sorted(self.network.destinations.items())},
            relayers=[r.state for r in self.network.relayers],
            trace=self.network.trace,
            events=self.chain.events,
            saved=self.saved,
            draws=self.streams.draws,
            steps_done=self.steps_done,
        )

    def serialize(self) -> str:
        return canonical_json(self.world().model_dump(mode="json"))

    @classmethod
    def load(cls, payload: str, group: Optional[Group] = None, base_dir: Path = Path(".")) -> "Simulation":
        try:
            world = WorldState.model_validate_json(payload)
        except PydanticValidationError as exc:
            raise InputError(f"saved world does not parse: {exc.errors()[0]['msg']}") from exc
        return cls(world, group, base_dir)

    def state_hashes(self) -> Dict[str, str]:
        hashes = {self.chain.chain_id: self.chain.state_hash()}
        for chain_id, chain in sorted(self.network.destinations.items()):
            hashes[chain_id] = sha256(canonical_bytes(chain.state.model_dump(mode="json"))).hex()
        return hashes

    def world_hash(self) -> str:
        return sha256(canonical_bytes(self.state_hashes())).hex()

    # references

    def address_of(self, ref: str) -> str:
        """Raw address, `@alias` or bare alias, all as an address."""
        ref = ref.lstrip("@")
        if ADDRESS.fullmatch(ref):
            return ref
        return self.keyring.address(ref)

    def resolve(self, value: Any) -> Any:
        if isinstance(value, dict):
            return {self.resolve(k) if isinstance(k, str) else k: self.resolve(v) for k, v in value.items()}
        if isinstance(value, list):
            return [self.resolve(v) for v in value]
        if not isinstance(value, str):
            return value
        whole = REFERENCE.fullmatch(value)
        if whole:
            return self._lookup(*whole.groups())
        return REFERENCE.sub(lambda m: str(self._lookup(*m.groups())), value)

    def _lookup(self, sigil: str, name: str, field: Optional[str]) -> Any:
        if sigil == "@":
            kp = self.keyring.key(name)
            if field is None:
                return derive_address(kp.pk)
            if field == "pk":
                return kp.pk.hex()
            raise InputError(f"unknown key field @{name}.{field}")
        if name not in self.saved:
            raise InputError(f"${name} was not saved by an earlier step")
        value = self.saved[name]
        if field is None:
            return value
        if not isinstance(value, dict) or field not in value:
            raise InputError(f"${name} has no field {field!r}")
        return value[field]

    # transactions

    @staticmethod
    def _signature_proof_nonces() -> DeterministicNonceSource:
        # setup and reveal must reproduce the same signature
        return DeterministicNonceSource(seed=b"signature-proof")

    def _expand_expected(self, spec: Dict[str, Any]) -> Dict[str, Any]:
        kind = spec.get("kind")
        if kind == "commitment" and isinstance(spec.get("m"), int):
            params = default_params(self.group)
            c = pedersen_commit(params, self.group.scalar(spec["m"]), self.group.scalar(spec["r"]))
            return {"kind": kind, "commitment": c.hex()}
        if kind == "signer-set" and "signers" in spec:
            return {"kind": kind, "public_keys": [self.keyring.key(a).pk.hex() for a in spec["signers"]]}
        if kind == "statement-key" and "signer" in spec:
            return {"kind": kind, "public_key": self.keyring.key(spec["signer"]).pk.hex()}
        if kind == "signature-hash" and "signer" in spec:
            expected, _ = signature_proof_setup(self.keyring.key(spec["signer"]), self._signature_proof_nonces())
            return expected.model_dump(mode="json")
        if kind == "beneficiary-address" and "signer" in spec:
            return {"kind": kind, "address": self.keyring.address(spec["signer"])}
        return spec

    def _expand_evidence(self, spec: Dict[str, Any], did: str, comp_id: str, claimant: str) -> Dict[str, Any]:
        kind = spec.get("kind")
        msg = claim_message(did, comp_id, claimant, self.chain.chain_id)
        nonces = DeterministicNonceSource(seed=b"evidence")
        if kind == "pedersen-opening" and isinstance(spec.get("m"), int):
            ev = pedersen_evidence(self.group.scalar(spec["m"]), self.group.scalar(spec["r"]))
        elif kind == "direct-sig" and "signer" in spec:
            ev = direct_evidence(self.keyring.key(spec["signer"]), msg, nonces)
        elif kind == "knowledge-proof" and "signer" in spec:
            ev = knowledge_evidence(self.keyring.key(spec["signer"]), msg, nonces)
        elif kind == "signature-reveal" and "signer" in spec:
            _, ev = signature_proof_setup(self.keyring.key(spec["signer"]), self._signature_proof_nonces())
        elif kind == "aggregate" and "signers" in spec:
            signers = [self.keyring.key(a) for a in spec["signers"]]
            sigs = [(schnorr_sign(kp, msg, nonces), kp.pk) for kp in signers]
            ev = aggregate_evidence(schnorr_aggregate(sigs, msg, self.chain.registry()))
        else:
            return spec
        return ev.model_dump(mode="json")

    def _expand_body(self, body: Dict[str, Any], kp: KeyPair) -> Dict[str, Any]:
        kind = body.get("type")
        if "component" in body and "component_id" not in body:
            body["component_id"] = component_key(body.get("did", ""), int(body.pop("component")))
        if kind == "create-will":
            for comp in body.get("components", []):
                req = comp.get("requirement") if isinstance(comp, dict) else None
                if isinstance(req, dict) and isinstance(req.get("expected"), dict):
                    req["expected"] = self._expand_expected(req["expected"])
        elif kind in ("claim", "interchain-claim") and isinstance(body.get("evidence"), dict):
            body["evidence"] = self._expand_evidence(
                body["evidence"], body.get("did", ""), body.get("component_id", ""), derive_address(kp.pk)
            )
        elif kind == "register-key" and "pop_commitment" not in body:
            pop = make_pop(kp, DeterministicNonceSource(seed=b"pop"))
            body["pop_commitment"] = pop.commitment.hex()
            body["pop_response"] = pop.response.hex()
        return body

    def submit(self, sender: str, body: Dict[str, Any], fee_payer: Optional[str] = None) -> TxResult:
        kp = self.keyring.key(sender)
        body = self._expand_body(self.resolve(body), kp)
        try:
            parsed = _TX_BODY.validate_python(body)
        except PydanticValidationError as exc:
            raise InputError(f"invalid {body.get('type')} transaction: {exc.errors()[0]['msg']}") from exc
        address = derive_address(kp.pk)
        account = self.chain.state.accounts.get(address)
        tx = Tx(
            sender=address,
            public_key=kp.pk.hex(),
            nonce=account.sequence if account else 0,
            body=parsed,
            fee_payer=self.address_of(self.resolve(fee_payer)) if fee_payer else None,
        )
        signed = sign_tx(tx, kp, self.chain.chain_id, DeterministicNonceSource(seed=b"tx"))
        return self.chain.apply_tx(signed)

    # blocks, relaying, files

    def advance(self, blocks: int = 1) -> Dict[str, Any]:
        outputs = 0
        for _ in range(blocks):
            outputs += len(self.chain.begin_block())
            if not self.chain.conservation_holds():
                raise ScenarioAssertionError(f"native supply is not conserved at height {self.chain.height}")
        return {"height": self.chain.height, "outputs": outputs}

    def relay(self, steps: int = 1, until_idle: bool = False) -> Dict[str, Any]:
        rounds = delivered = 0
        while rounds < (MAX_RELAY_ROUNDS if until_idle else steps):
            if until_idle and not self.network.pending():
                break
            delivered += self.network.step(self.streams.next("relayers"))
            rounds += 1
        return {"rounds": rounds, "delivered": delivered}

    def store_file(
        self,
        data: bytes,
        *,
        chunk_size: Optional[int] = None,
        did: Optional[str] = None,
        component_id: Optional[str] = None,
        beneficiary: Optional[str] = None,
        temp_key: Optional[str] = None,
    ) -> ChunkMap:
        vault = self.chain.vault
        if beneficiary is None or temp_key is None:
            return vault.store_file(data, chunk_size)
        try:
            self.chain.will(did).component(component_id)
        except KeyError:
            raise NotFoundError(f"{did} has no component {component_id}") from None
        chunk_map, _ = vault.store_deed(
            data,
            self.keyring.key(beneficiary).pk,
            self.keyring.key(temp_key).pk,
            chunk_size,
            self.streams.next("deeds"),
        )
        self.chain.attach_deed(did, component_id, chunk_map)
        return chunk_map

    def retrieve_file(self, file_id: str) -> bytes:
        vault = self.chain.vault
        return vault.retrieve_file(vault.chunk_map(file_id))

    def reveal_key(self, did: str, comp_id: str, temp_key: str, beneficiary: Optional[str] = None) -> Dict[str, Any]:
        c1 = self.chain.reveal_key(did, comp_id, self.keyring.key(temp_key).sk)
        result: Dict[str, Any] = {"c1_size": len(c1)}
        if beneficiary is not None:
            plaintext = layered_decrypt_inner(c1, self.keyring.key(beneficiary).sk)
            result["sha256"] = sha256(plaintext).hex()
            result["text"] = plaintext.decode("utf-8", errors="replace")
        return result

    # inspection

    def _destination(self, chain_id: Optional[str]) -> DestinationChain:
        if chain_id is None and len(self.network.destinations) == 1:
            return next(iter(self.network.destinations.values()))
        try:
            return self.network.destinations[chain_id]
        except KeyError:
            raise NotFoundError(f"unknown destination chain {chain_id}") from None

    def inspect(self, query: str) -> Dict[str, Any]:
        """`kind:key` views over the world, e.g. `will:<did>` or `account:@alice`."""
        kind, _, key = query.partition(":")
        key = self.resolve(key) if key else key
        state = self.chain.state
        if kind == "will":
            will = self.chain.will(key)
            ledger = state.share_ledgers.get(key)
            return {
                "will": will.model_dump(mode="json"),
                "token": state.tokens[key].model_dump(mode="json"),
                "shares": ledger.model_dump(mode="json") if ledger else None,
                "escrow": self.chain.balance(will_escrow_address(key)),
            }
        if kind == "token":
            token = state.tokens.get(key)
            if token is None:
                raise NotFoundError(f"no token minted for {key}")
            return token.model_dump(mode="json")
        if kind == "account":
            account = state.accounts.get(self.address_of(key))
            if account is None:
                raise NotFoundError(f"unknown account {key}")
            return account.model_dump(mode="json")
        if kind == "balances":
            return {
                "accounts": {a: acc.balances for a, acc in sorted(state.accounts.items())},
                "burned": state.burned,
                "supply": state.supply,
                "native_total": self.chain.native_total(),
                "conserved": self.chain.conservation_holds(),
            }
        if kind == "destination":
            return self._destination(key or None).state.model_dump(mode="json")
        if kind == "packets":
            packets = []
            for endpoint in self.network.chains().values():
                for packet_key, packet in sorted(endpoint.store.outbox.items()):
                    receiver = self.network.chains().get(packet.path.destination_chain)
                    packets.append(
                        {
                            "key": packet_key,
                            "phase": packet.phase.value,
                            "commitment": packet.commitment,
                            "received": receiver is not None and packet_key in receiver.store.receipts,
                        }
                    )
            return {"packets": packets}
        if kind == "trace":
            return {"trace": [r.model_dump(mode="json") for r in self.network.trace]}
        if kind == "events":
            events = [e for e in self.chain.events if not key or e.type == key]
            return {"events": [e.model_dump(mode="json") for e in events]}
        if kind == "file":
            return self.chain.vault.chunk_map(key).model_dump(mode="json")
        if kind == "hash":
            return {"chains": self.state_hashes(), "world": self.world_hash()}
        raise InputError(f"unknown inspect query {kind!r}")

    # scenario steps

    def execute_step(self, step: Step) -> Dict[str, Any]:
        try:
            data = self._step_handlers[step.op](step)
        except WillchainError as exc:
            if step.expect_error is None or exc.code != step.expect_error:
                raise
            data = {"error": exc.code}
        else:
            if step.expect_error is not None:
                raise ScenarioAssertionError(f"{step.op} step was expected to fail with {step.expect_error}")
        if step.save_as:
            self.saved[step.save_as] = data
        self.steps_done += 1
        return data

    def _tx_step(self, step: TxStep) -> Dict[str, Any]:
        result = self.submit(step.sender, step.body, step.fee_payer)
        return {**result.data, "events": [e.type for e in result.events]}

    def _advance_step(self, step: AdvanceStep) -> Dict[str, Any]:
        return self.advance(step.blocks)

    def _relay_step(self, step: RelayStep) -> Dict[str, Any]:
        return self.relay(step.steps, step.until_idle)

    def _store_file_step(self, step: StoreFileStep) -> Dict[str, Any]:
        if step.path is not None:
            try:
                data = (self.base_dir / step.path).read_bytes()
            except OSError as exc:
                raise InputError(f"cannot read {step.path}: {exc.strerror}") from exc
        elif step.text is not None:
            data = step.text.encode("utf-8")
        else:
            data = self.streams.next("files").randbytes(step.random_size)
        chunk_map = self.store_file(
            data,
            chunk_size=step.chunk_size,
            did=self.resolve(step.did),
            component_id=self.resolve(step.component_id),
            beneficiary=step.beneficiary,
            temp_key=step.temp_key,
        )
        return {"file_id": chunk_map.file_id, "chunks": len(chunk_map.entries), "size": chunk_map.total_size}

    def _reveal_key_step(self, step: RevealKeyStep) -> Dict[str, Any]:
        return self.reveal_key(
            self.resolve(step.did), self.resolve(step.component_id), step.temp_key, step.beneficiary
        )

    def _assert_step(self, step: AssertStep) -> Dict[str, Any]:
        actual = self._observe(step)
        expected = self.resolve(step.equals)
        if expected is None and step.check in ("event", "trace"):
            passed = actual >= 1
        elif expected is None and step.check == "conservation":
            passed = actual is True
        else:
            passed = actual == expected
        if not passed:
            subject = f"{step.check} of {step.target}" if step.target else step.check
            raise ScenarioAssertionError(f"{subject} is {actual!r}, expected {expected!r}")
        return {"check": step.check, "actual": actual}

    def _observe(self, step: AssertStep) -> Any:
        target = self.resolve(step.target) if step.target is not None else None
        attributes = self.resolve(step.attributes)
        if step.check == "balance":
            return self.chain.balance(self.address_of(target), step.denom)
        if step.check == "destination-balance":
            return self._destination(step.chain).balance(target, step.denom or self.chain.denom)
        if step.check == "will-status":
            return self.chain.will(target).status.value
        if step.check == "component-state":
            will = self.chain.will(target.rsplit("#", 1)[0])
            try:
                return will.component(target).state.value
            except KeyError:
                raise NotFoundError(f"unknown component {target}") from None
        if step.check == "event":
            return sum(
                1
                for e in self.chain.events
                if e.type == target and all(e.attributes.get(k) == v for k, v in attributes.items())
            )
        if step.check == "trace":
            records = [r.model_dump(mode="json") for r in self.network.trace]
            return sum(1 for r in records if all(r.get(k) == v for k, v in attributes.items()))
        if step.check == "released":
            return len(self._destination(step.chain).state.contract.released)
        if step.check == "conservation":
            return self.chain.conservation_holds()
        if step.check == "height":
            return self.chain.height
        if step.check == "burned":
            return self.chain.state.burned
        if step.check == "file":
            return self.retrieve_file(target).decode("utf-8", errors="replace")
        if step.check == "value":
            return target
        raise InputError(f"unknown check {step.check!r}")


class ScenarioRunner:
    def __init__(
        self,
        scenario: Scenario,
        base_dir: Path = Path("."),
        seed: Optional[int] = None,
        timestamps: Optional[bool] = None,
    ):
        self.scenario = scenario
        self.base_dir = base_dir
        self.seed = seed if seed is not None else scenario.seed
        self.timestamps = settings.REPORT_TIMESTAMPS if timestamps is None else timestamps

    @classmethod
    def from_file(cls, path: Path, seed: Optional[int] = None, timestamps: Optional[bool] = None) -> "ScenarioRunner":
        path = Path(path)
        return cls(read_model(path, Scenario), path.parent, seed, timestamps)

    def build(self) -> Simulation:
        genesis = self.scenario.genesis
        if isinstance(genesis, str):
            genesis = read_model(self.base_dir / genesis, Genesis)
        topology = self.scenario.topology
        if isinstance(topology, str):
            topology = read_model(self.base_dir / topology, Topology)
        return Simulation.create(genesis, topology, self.seed, base_dir=self.base_dir)

    def run(self, simulation: Optional[Simulation] = None) -> Tuple[int, List[ReportRecord], Simulation]:
        """Run the remaining steps; returns (exit status, report, final simulation)."""
        sim = simulation or self.build()
        sim.base_dir = self.base_dir
        records: List[ReportRecord] = []
        status = EXIT_OK
        for index in range(sim.steps_done, len(self.scenario.steps)):
            step = self.scenario.steps[index]
            log = logger.bind(scenario=self.scenario.name, step=index)
            try:
                data = sim.execute_step(step)
                record = self._record(sim, index, step.op, True, data=data)
            except ScenarioAssertionError as exc:
                log.error("step {} ({}) failed: {}", index, step.op, exc.message)
                records.append(self._record(sim, index, step.op, False, exc.code, exc.message))
                status = EXIT_ASSERTION
                break
            except WillchainError as exc:
                log.error("step {} ({}) raised {}: {}", index, step.op, exc.code, exc.message)
                records.append(self._record(sim, index, step.op, False, exc.code, exc.message))
                status = EXIT_INPUT
                break
            records.append(record)
        logger.bind(scenario=self.scenario.name).info(
            "scenario finished with status {} after {} step(s)", status, len(records)
        )
        return status, records, sim

    def _record(
        self,
        sim: Simulation,
        index: int,
        op: str,
        ok: bool,
        code: str = "ok",
        message: str = "",
        data: Optional[Dict[str, Any]] = None,
    ) -> ReportRecord:
        return ReportRecord(
            index=index,
            op=op,
            ok=ok,
            code=code,
            message=message,
            height=sim.chain.height,
            data=data or {},
            state_hash=sim.world_hash(),
            timestamp=datetime.now(timezone.utc).isoformat() if self.timestamps else None,
        )


def write_report(records: List[ReportRecord], out: TextIO) -> None:
    for record in records:
        out.write(canonical_json(record.model_dump(mode="json", exclude_none=True)) + "\n")


def run_scenario(
    path: Path, seed: Optional[int] = None, timestamps: Optional[bool] = None
) -> Tuple[int, List[ReportRecord], Simulation]:
    return ScenarioRunner.from_file(path, seed, timestamps).run()
