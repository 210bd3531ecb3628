from typing import Dict, Protocol

from pydantic import TypeAdapter, ValidationError as PydanticValidationError

from ...core.encoding import canonical_bytes, hash_fields
from ...core.errors import InvalidEncodingError, NotEncapsulableError
from ...models.chain import ChainState
from ...models.interchain import Packet, PacketPayload, Path, Phase
from ...models.will import ComponentOutput, ContractCall, IbcSend
from ..will_core import contract_key

_OUTPUT = TypeAdapter(ComponentOutput)
_PAYLOAD = TypeAdapter(PacketPayload)


def encapsulate(logic: ComponentOutput) -> bytes:
    """Serialize an interchain output so a remote contract can run it."""
    if not isinstance(logic, (IbcSend, ContractCall)):
        raise NotEncapsulableError(f"{logic.type} outputs stay on the home chain")
    return canonical_bytes(logic.model_dump(mode="json"))


def decapsulate(data: bytes) -> ComponentOutput:
    try:
        logic = _OUTPUT.validate_json(data)
    except PydanticValidationError as exc:
        raise InvalidEncodingError("payload is not an encapsulated output") from exc
    if not isinstance(logic, (IbcSend, ContractCall)):
        raise NotEncapsulableError(f"{logic.type} outputs cannot cross chains")
    return logic


def encode_payload(payload) -> str:
    return canonical_bytes(payload.model_dump(mode="json")).hex()


def decode_payload(packet: Packet):
    try:
        return _PAYLOAD.validate_json(bytes.fromhex(packet.payload))
    except (ValueError, PydanticValidationError) as exc:
        raise InvalidEncodingError(f"packet {packet.key()} carries an unreadable payload") from exc


def packet_commitment(path: Path, sequence: int, payload: bytes) -> str:
    return hash_fields(path.key().encode("utf-8"), sequence.to_bytes(8, "big"), payload).hex()


def commitment_of(packet: Packet) -> str:
    """Recompute from the packet's fields; a relayer never trusts packet.commitment."""
    return packet_commitment(packet.path, packet.sequence, bytes.fromhex(packet.payload))


class PacketStore(Protocol):
    """Anything with a committed outbox: the will module's state and every destination chain."""

    outbox: Dict[str, Packet]
    next_sequence: Dict[str, int]
    receipts: Dict[str, int]


def send_packet(store: PacketStore, path: Path, phase: Phase, payload) -> Packet:
    path_key = path.key()
    sequence = store.next_sequence.get(path_key, 1)
    store.next_sequence[path_key] = sequence + 1
    data = encode_payload(payload)
    packet = Packet(
        path=path,
        sequence=sequence,
        phase=phase,
        payload=data,
        commitment=packet_commitment(path, sequence, bytes.fromhex(data)),
    )
    store.outbox[packet.key()] = packet
    return packet


def stored_commitment(store: PacketStore, packet: Packet) -> str | None:
    stored = store.outbox.get(packet.key())
    return stored.commitment if stored is not None else None


def approve_contract(state: ChainState, creator: str, chain_id: str, address: str) -> ChainState:
    """Record that `creator` trusts the contract; wills may only reference approved contracts."""
    key = contract_key(chain_id, address)
    approved = set(state.approvals.get(creator, []))
    approved.add(key)
    approvals = dict(state.approvals)
    approvals[creator] = sorted(approved)
    return state.model_copy(update={"approvals": approvals})
