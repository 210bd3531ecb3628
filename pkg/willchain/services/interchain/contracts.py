"""Entrypoint contracts on destination chains.

One behavioral stub per destination chain implements the common interface:
record an execution sent by the will module, accept a claim, and release or
keep the escrow once the will module has confirmed a verdict. The contract
only ever acts on packets a relayer has proven against the will module's
committed outbox.
"""

import copy
from typing import Dict, Optional, Tuple

from loguru import logger

from ...core.errors import InvalidEncodingError, ValidationError, WillchainError
from ...models.interchain import (
    AckPayload,
    ClaimPayload,
    ConfirmPayload,
    ContractRecord,
    DestinationAccount,
    DestinationState,
    EntrypointState,
    ExecutePayload,
    Packet,
    PendingContractClaim,
    Phase,
    Verdict,
)
from ...models.will import ContractCall, IbcSend
from .packets import decapsulate, decode_payload, send_packet


class EntrypointContract:
    def __init__(self, state: EntrypointState):
        self.state = state

    @property
    def address(self) -> str:
        return self.state.address

    def approves(self, creator: str) -> bool:
        return creator in self.state.approved_by

    def deposit(self, creator: str, denom: str, amount: int) -> None:
        """Escrow assets for a creator; depositing is how a creator opts in."""
        held = self.state.escrow.setdefault(creator, {})
        held[denom] = held.get(denom, 0) + amount
        if creator not in self.state.approved_by:
            self.state.approved_by.append(creator)
            self.state.approved_by.sort()

    def record_execution(self, payload: ExecutePayload, call: ContractCall, sequence: int) -> None:
        self.state.executions.append(
            ContractRecord(
                did=payload.did,
                component_id=payload.component_id,
                creator=payload.creator,
                logic=call.payload,
                sequence=sequence,
            )
        )
        if payload.did not in self.state.executed_wills:
            self.state.executed_wills.append(payload.did)

    def submit_claim(self, payload: ClaimPayload) -> Tuple[bool, str]:
        """Accept a claim and reserve its slice of the creator's escrow until the verdict."""
        if not self.approves(payload.creator):
            return False, "creator-not-approved"
        held = self.state.escrow.get(payload.creator, {})
        if payload.release:
            if any(held.get(denom, 0) < amount for denom, amount in payload.release.items()):
                return False, "insufficient-escrow"
            reserved = dict(payload.release)
        else:
            reserved = {denom: amount for denom, amount in held.items() if amount}
        if not reserved:
            return False, "nothing-escrowed"
        for denom, amount in reserved.items():
            held[denom] -= amount
        self.state.escrow[payload.creator] = {d: a for d, a in held.items() if a}
        self.state.pending_claims[payload.claim_id] = PendingContractClaim(
            claim_id=payload.claim_id,
            did=payload.did,
            creator=payload.creator,
            claimant=payload.claimant,
            recipient=payload.recipient,
            reserved=reserved,
        )
        return True, ""

    def settle(self, claim_id: str, verdict: Verdict) -> Optional[Tuple[str, Dict[str, int]]]:
        """Release the claim's reserved slice on an eligible verdict, else return it to escrow.

        Returns (recipient, released assets), or None when nothing is released.
        """
        pending = self.state.pending_claims.pop(claim_id, None)
        if pending is None:
            return None
        if verdict != Verdict.ELIGIBLE:
            held = self.state.escrow.setdefault(pending.creator, {})
            for denom, amount in pending.reserved.items():
                held[denom] = held.get(denom, 0) + amount
            self.state.rejected.append(claim_id)
            return None
        self.state.released.append(claim_id)
        return pending.recipient, dict(pending.reserved)


class DestinationChain:
    """Minimal chain hosting one entrypoint contract and plain balances."""

    def __init__(self, state: DestinationState):
        self.state = state

    @classmethod
    def create(cls, chain_id: str, contract_address: str) -> "DestinationChain":
        return cls(
            DestinationState(
                chain_id=chain_id,
                contract=EntrypointState(chain_id=chain_id, address=contract_address),
            )
        )

    @property
    def chain_id(self) -> str:
        return self.state.chain_id

    @property
    def height(self) -> int:
        return self.state.height

    @property
    def store(self) -> DestinationState:
        return self.state

    @property
    def channels(self) -> Dict[str, str]:
        return self.state.channels

    @property
    def contract(self) -> EntrypointContract:
        return EntrypointContract(self.state.contract)

    def open_channel(self, channel_id: str, counterparty_chain: str) -> None:
        self.state.channels[channel_id] = counterparty_chain

    def balance(self, address: str, denom: str) -> int:
        account = self.state.accounts.get(address)
        return account.balances.get(denom, 0) if account else 0

    def credit(self, address: str, denom: str, amount: int) -> None:
        account = self.state.accounts.setdefault(address, DestinationAccount(address=address))
        account.balances[denom] = account.balances.get(denom, 0) + amount

    def end_block(self) -> None:
        self.state.height += 1

    def receive_packet(self, packet: Packet) -> Optional[Packet]:
        snapshot = copy.deepcopy(self.state)
        try:
            response = self._dispatch(packet)
        except WillchainError:
            self.state = snapshot
            raise
        return response

    def _dispatch(self, packet: Packet) -> Optional[Packet]:
        payload = decode_payload(packet)
        log = logger.bind(chain=self.chain_id, channel=packet.path.channel)
        if packet.phase == Phase.INIT:
            if isinstance(payload, ExecutePayload):
                ok, reason = self._execute(payload, packet.sequence)
                ref = f"execute:{payload.component_id}"
            elif isinstance(payload, ClaimPayload):
                ok, reason = self.contract.submit_claim(payload)
                ref = f"claim:{payload.claim_id}"
            else:
                raise InvalidEncodingError("init packet carries neither an execution nor a claim")
            log.debug("init #{} handled: ok={} {}", packet.sequence, ok, reason)
            ack = AckPayload(acked_sequence=packet.sequence, ref=ref, ok=ok, reason=reason)
            return send_packet(self.state, packet.path.reversed(), Phase.ACK, ack)

        if packet.phase == Phase.CONFIRM:
            if not isinstance(payload, ConfirmPayload):
                raise InvalidEncodingError("confirm packet does not carry a verdict")
            op, _, ref = payload.ref.partition(":")
            if op == "claim":
                settled = self.contract.settle(ref, payload.verdict)
                if settled is not None:
                    recipient, released = settled
                    for denom, amount in sorted(released.items()):
                        self.credit(recipient, denom, amount)
                log.info("claim {} confirmed as {}", ref[:12], payload.verdict.value)
            return None

        raise ValidationError(f"entrypoint does not accept {packet.phase.value} packets")

    def _execute(self, payload: ExecutePayload, sequence: int) -> Tuple[bool, str]:
        contract = self.contract
        logic = decapsulate(bytes.fromhex(payload.logic))
        if isinstance(logic, ContractCall):
            if not contract.approves(payload.creator):
                return False, "creator-not-approved"
            if logic.contract_address != contract.address:
                return False, "unknown-contract"
            contract.record_execution(payload, logic, sequence)
        elif isinstance(logic, IbcSend):
            self.credit(logic.address, logic.denom, logic.amount)
        return True, ""
