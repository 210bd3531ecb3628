"""Relayers: watch committed outboxes, decide, deliver.

A relayer holds no authority. It can only carry packets whose commitment the
source chain has stored; the destination records a receipt per packet so a
second delivery of the same packet is rejected.
"""

from typing import Dict, List, Optional, Protocol, Tuple

from loguru import logger

from ...core.errors import ChannelNotFoundError, ProofRejectedError, ReplayRejectedError
from ...models.interchain import Decision, Packet, Proof, RelayerState
from .packets import PacketStore, commitment_of, stored_commitment


class Endpoint(Protocol):
    chain_id: str
    height: int
    store: PacketStore
    channels: Dict[str, str]

    def receive_packet(self, packet: Packet) -> Optional[Packet]: ...


class Relayer:
    def __init__(self, state: RelayerState):
        self.state = state

    @property
    def id(self) -> str:
        return self.state.id

    def watches(self, channel: str) -> bool:
        return channel in self.state.channels


def relayer_scan(r: Relayer, chains: Dict[str, Endpoint]) -> List[Tuple[Packet, Proof]]:
    """Packets on watched channels that the destination has not received yet."""
    found: List[Tuple[Packet, Proof]] = []
    for chain_id in sorted(chains):
        source = chains[chain_id]
        for packet in source.store.outbox.values():
            if not r.watches(packet.path.channel):
                continue
            destination = chains.get(packet.path.destination_chain)
            if destination is None or packet.key() in destination.store.receipts:
                continue
            found.append((packet, Proof(height=source.height, commitment=packet.commitment)))
    return found


def proof_verifies(proof: Proof, packet: Packet, source: Endpoint) -> bool:
    """The source committed exactly this packet at or below the proven height."""
    stored = stored_commitment(source.store, packet)
    if stored is None or proof.height > source.height:
        return False
    try:
        recomputed = commitment_of(packet)
    except ValueError:
        return False
    return stored == proof.commitment == recomputed


def relayer_decide(r: Relayer, proof: Proof, packet: Packet, source: Endpoint) -> Decision:
    if proof_verifies(proof, packet, source):
        return Decision.DELIVER
    if stored_commitment(source.store, packet) is not None:
        logger.bind(relayer=r.id).warning("dropping packet {} with a bad commitment", packet.key())
    return Decision.DROP


def deliver(packet: Packet, proof: Proof, destination: Endpoint, source: Endpoint) -> Optional[Packet]:
    """Hand a proven packet to its destination; returns the response it commits."""
    if (
        packet.path.destination_chain != destination.chain_id
        or packet.path.channel not in destination.channels
    ):
        raise ChannelNotFoundError(
            f"{destination.chain_id} has no channel {packet.path.channel} for this packet"
        )
    if packet.path.source_chain != source.chain_id or not proof_verifies(proof, packet, source):
        raise ProofRejectedError(f"packet {packet.key()} is not committed by {source.chain_id}")
    key = packet.key()
    if key in destination.store.receipts:
        raise ReplayRejectedError(f"packet {key} was already received")
    response = destination.receive_packet(packet)
    destination.store.receipts[key] = destination.height
    return response
