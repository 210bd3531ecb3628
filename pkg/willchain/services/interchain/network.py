import random
from typing import Dict, List, Optional

from loguru import logger

from ...core.errors import ChannelNotFoundError, ReplayRejectedError, WillchainError
from ...models.interchain import (
    AckPayload,
    Channel,
    ConfirmPayload,
    Decision,
    Packet,
    Phase,
    RelayerState,
    TraceRecord,
)
from ..chain import ChainRuntime
from .contracts import DestinationChain
from .packets import decode_payload
from .relayer import Endpoint, Relayer, deliver, relayer_decide, relayer_scan


class Network:
    """The home chain, its destination chains, pre-opened channels and relayers."""

    def __init__(
        self,
        home: ChainRuntime,
        destinations: Optional[Dict[str, DestinationChain]] = None,
        relayers: Optional[List[RelayerState]] = None,
        trace: Optional[List[TraceRecord]] = None,
    ):
        self.home = home
        self.destinations = destinations or {}
        self.relayers = [Relayer(state) for state in relayers or []]
        self.trace: List[TraceRecord] = trace or []

    def add_destination(self, chain: DestinationChain) -> None:
        self.destinations[chain.chain_id] = chain

    def open_channel(self, channel_id: str, counterparty_chain: str) -> Channel:
        if counterparty_chain not in self.destinations:
            raise ChannelNotFoundError(f"unknown counterparty chain {counterparty_chain}")
        channel = Channel(
            channel_id=channel_id,
            home_chain=self.home.chain_id,
            counterparty_chain=counterparty_chain,
        )
        self.home.open_channel(channel_id, counterparty_chain)
        self.destinations[counterparty_chain].open_channel(channel_id, self.home.chain_id)
        return channel

    def add_relayer(self, relayer_id: str, channels: List[str]) -> Relayer:
        relayer = Relayer(RelayerState(id=relayer_id, channels=list(channels)))
        self.relayers.append(relayer)
        return relayer

    def chains(self) -> Dict[str, Endpoint]:
        chains: Dict[str, Endpoint] = {self.home.chain_id: self.home}
        chains.update(self.destinations)
        return chains

    def pending(self) -> int:
        return sum(len(relayer_scan(r, self.chains())) for r in self.relayers)

    def step(self, rng: random.Random) -> int:
        """One relayer round; returns how many packets were delivered."""
        chains = self.chains()
        order = list(self.relayers)
        rng.shuffle(order)
        work = [(r, packet, proof) for r in order for packet, proof in relayer_scan(r, chains)]
        rng.shuffle(work)
        delivered = 0
        for relayer, packet, proof in work:
            source = chains[packet.path.source_chain]
            destination = chains[packet.path.destination_chain]
            decision = relayer_decide(relayer, proof, packet, source)
            if decision == Decision.DROP:
                relayer.state.dropped.append(packet.key())
                self._record(relayer, packet, "dropped")
                continue
            try:
                deliver(packet, proof, destination, source)
            except ReplayRejectedError:
                self._record(relayer, packet, "replay-rejected")
                continue
            except WillchainError as exc:
                logger.bind(relayer=relayer.id).warning("delivery of {} failed: {}", packet.key(), exc.message)
                self._record(relayer, packet, exc.code)
                continue
            relayer.state.delivered.append(packet.key())
            delivered += 1
            self._record(relayer, packet, self._verdict(packet))
        for chain in self.destinations.values():
            chain.end_block()
        return delivered

    def run_until_idle(self, rng: random.Random, max_steps: int = 50) -> int:
        steps = 0
        while steps < max_steps and self.pending():
            self.step(rng)
            steps += 1
        return steps

    @staticmethod
    def _verdict(packet: Packet) -> str:
        if packet.phase == Phase.INIT:
            return "delivered"
        payload = decode_payload(packet)
        if isinstance(payload, ConfirmPayload):
            return payload.verdict.value
        if isinstance(payload, AckPayload):
            return "ok" if payload.ok else "rejected"
        return "delivered"

    def _record(self, relayer: Relayer, packet: Packet, verdict: str) -> None:
        self.trace.append(
            TraceRecord(
                path=packet.path.key(),
                seq=packet.sequence,
                phase=packet.phase,
                commitment=packet.commitment,
                verdict=verdict,
                relayer=relayer.id,
            )
        )
