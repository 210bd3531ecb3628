"""Single-chain runtime hosting the will module.

`ChainRuntime` owns a `ChainState` and applies transactions to it one at a
time. Every transaction is atomic: the state is copied before dispatch and
restored on any `WillchainError`, so a rejected transaction leaves the state
hash untouched. Block production (`begin_block`) executes the wills and claim
windows scheduled at the new height; failures there become events and never
halt the chain.
"""

import copy
from typing import Callable, Dict, List, Optional, Tuple

from loguru import logger

from ..core.encoding import canonical_bytes, sha256
from ..core.errors import (
    AuthError,
    BalanceError,
    ChannelNotFoundError,
    InvalidEncodingError,
    NotFoundError,
    PrematureRevealError,
    TooLateError,
    UnauthorizedError,
    ValidationError,
    WillchainError,
)
from ..crypto.group import Group, Scalar, production_group
from ..crypto.keys import KeyPair, NonceSource
from ..crypto.layered import LayeredCiphertext, layered_decrypt_outer
from ..crypto.proofs import DlogProof
from ..crypto.schnorr import KeyRegistry, SchnorrSignature, register_key, schnorr_sign, schnorr_verify
from ..models.chain import (
    Account,
    AdvanceNoop,
    ApproveContract,
    ChainEvent,
    ChainState,
    Checkin,
    Claim,
    ContractCheckin,
    CreateWill,
    Genesis,
    InterchainClaim,
    PendingInterchainClaim,
    RegisterCheckinContract,
    RegisterKey,
    RftClaim,
    Sponsor,
    TransferTx,
    Tx,
    TxResult,
)
from ..models.interchain import (
    AckPayload,
    Channel,
    ClaimPayload,
    ConfirmPayload,
    ExecutePayload,
    Packet,
    Path,
    Phase,
    Verdict,
)
from ..models.vault import ChunkMap
from ..models.will import (
    CheckinOccurred,
    ClaimSubmitted,
    ClaimWindowElapsed,
    ComponentOutput,
    ComponentState,
    ContractCall,
    Emit,
    IbcSend,
    Transfer,
    Will,
    WillStatus,
)
from .claims import claim_message, derive_address, verify_claim
from .interchain.packets import approve_contract, decode_payload, encapsulate, send_packet
from .vault import FileVault
from .will_core import (
    StepContext,
    create_will,
    execute_will,
    expand_output,
    may_claim,
    mint_rft,
    replace_component,
    rft_claim,
    settle_status,
    step_component,
)


def module_address(name: str) -> str:
    """Keyless account owned by the runtime itself."""
    return sha256(b"willchain/module/", name.encode("utf-8"))[:20].hex()


FEE_COLLECTOR = module_address("fee-collector")
CLAIM_BOND_ACCOUNT = module_address("claim-bond")


def will_escrow_address(did: str) -> str:
    return module_address(f"will-escrow/{did}")


def channel_escrow_address(channel: str) -> str:
    return module_address(f"channel-escrow/{channel}")


def sign_tx(tx: Tx, kp: KeyPair, chain_id: str, nonce_source: NonceSource) -> Tx:
    payload = canonical_bytes(tx.signing_payload(chain_id))
    sig = schnorr_sign(kp, payload, nonce_source)
    return tx.model_copy(update={"signature": sig.hex()})


class ChainRuntime:
    def __init__(
        self,
        state: ChainState,
        vault: Optional[FileVault] = None,
        group: Optional[Group] = None,
    ):
        self.state = state
        self.vault = vault or FileVault()
        self.group = group or production_group()
        self.events: List[ChainEvent] = []
        self._pending: List[ChainEvent] = []
        self._handlers: Dict[type, Callable[[Tx], Dict]] = {
            CreateWill: self._create_will,
            Checkin: self._checkin,
            Claim: self._claim,
            InterchainClaim: self._interchain_claim,
            TransferTx: self._transfer,
            ApproveContract: self._approve_contract,
            AdvanceNoop: lambda tx: {},
            RftClaim: self._rft_claim,
            Sponsor: self._sponsor,
            RegisterKey: self._register_key,
            RegisterCheckinContract: self._register_checkin_contract,
            ContractCheckin: self._contract_checkin,
        }

    @classmethod
    def from_genesis(cls, genesis: Genesis, resolve: Optional[Callable[[str], str]] = None) -> "ChainRuntime":
        """`resolve` maps keyring aliases in the genesis file to addresses."""
        params = genesis.params()
        state = ChainState(params=params)
        for entry in genesis.accounts:
            address = entry.address
            if address is None:
                if resolve is None:
                    raise ValidationError(f"genesis alias {entry.alias!r} needs a keyring")
                address = resolve(entry.alias)
            account = state.accounts.setdefault(address, Account(address=address))
            account.balances[params.native_denom] = account.balance(params.native_denom) + entry.balance
            state.supply += entry.balance
        logger.bind(chain=params.chain_id).info(
            "genesis with {} account(s), supply {}", len(state.accounts), state.supply
        )
        return cls(state)

    # properties and views

    @property
    def chain_id(self) -> str:
        return self.state.params.chain_id

    @property
    def height(self) -> int:
        return self.state.height

    @property
    def store(self) -> ChainState:
        return self.state

    @property
    def channels(self) -> Dict[str, str]:
        return self.state.channels

    @property
    def denom(self) -> str:
        return self.state.params.native_denom

    def registry(self) -> KeyRegistry:
        return KeyRegistry.from_encoded(self.group, self.state.registered_keys)

    def balance(self, address: str, denom: Optional[str] = None) -> int:
        account = self.state.accounts.get(address)
        return account.balance(denom or self.denom) if account else 0

    def native_total(self) -> int:
        return sum(a.balance(self.denom) for a in self.state.accounts.values())

    def conservation_holds(self) -> bool:
        return self.native_total() + self.state.burned == self.state.supply

    def will(self, did: str) -> Will:
        try:
            return self.state.wills[did]
        except KeyError:
            raise NotFoundError(f"unknown will {did}") from None

    def state_hash(self) -> str:
        return sha256(
            canonical_bytes(self.state.model_dump(mode="json")), self.vault.digest()
        ).hex()

    def open_channel(self, channel_id: str, counterparty_chain: str) -> None:
        self.state.channels[channel_id] = counterparty_chain

    def channel_to(self, chain_id: str) -> str:
        for channel_id in sorted(self.state.channels):
            if self.state.channels[channel_id] == chain_id:
                return channel_id
        raise ChannelNotFoundError(f"no channel from {self.chain_id} to {chain_id}")

    # events

    def _emit(self, type_: str, **attributes) -> ChainEvent:
        event = ChainEvent(height=self.state.height, type=type_, attributes=attributes)
        self._pending.append(event)
        return event

    def _commit_events(self) -> List[ChainEvent]:
        committed, self._pending = self._pending, []
        self.events.extend(committed)
        return committed

    # balances

    def _account(self, address: str) -> Account:
        account = self.state.accounts.get(address)
        if account is None:
            account = self.state.accounts[address] = Account(address=address)
        return account

    def _move(self, sender: str, recipient: str, amount: int, denom: Optional[str] = None) -> None:
        denom = denom or self.denom
        source = self._account(sender)
        if source.balance(denom) < amount:
            raise BalanceError(f"{sender} holds {source.balance(denom)}{denom}, needs {amount}{denom}")
        source.balances[denom] = source.balance(denom) - amount
        target = self._account(recipient)
        target.balances[denom] = target.balance(denom) + amount

    def _burn(self, address: str, amount: int) -> None:
        account = self._account(address)
        if account.balance(self.denom) < amount:
            raise BalanceError(f"{address} cannot cover a {amount}{self.denom} burn")
        account.balances[self.denom] = account.balance(self.denom) - amount
        self.state.burned += amount

    # transactions

    def apply_tx(self, tx: Tx) -> TxResult:
        snapshot = copy.deepcopy(self.state)
        self._pending = []
        log = logger.bind(chain=self.chain_id, height=self.state.height)
        try:
            account = self._authenticate(tx)
            self._charge_fee(tx, account)
            handler = self._handlers[type(tx.body)]
            data = handler(tx) or {}
            self._account(tx.sender).sequence += 1
        except WillchainError as exc:
            self.state = snapshot
            self._pending = []
            self._emit("tx_rejected", sender=tx.sender, type=tx.body.type, code=exc.code)
            self._commit_events()
            log.info("{} from {} rejected: {}", tx.body.type, tx.sender[:8], exc.message)
            raise
        events = self._commit_events()
        log.debug("{} from {} applied", tx.body.type, tx.sender[:8])
        return TxResult(ok=True, events=events, data=data)

    def _authenticate(self, tx: Tx) -> Account:
        try:
            pk = self.group.element_from_hex(tx.public_key)
            sig = SchnorrSignature.from_hex(self.group, tx.signature)
        except InvalidEncodingError as exc:
            raise AuthError(f"malformed credentials: {exc.message}") from exc
        if derive_address(pk) != tx.sender:
            raise AuthError("public key does not match the sender address")
        if not schnorr_verify(pk, canonical_bytes(tx.signing_payload(self.chain_id)), sig):
            raise AuthError("signature does not verify")
        account = self._account(tx.sender)
        if tx.nonce != account.sequence:
            raise AuthError(f"expected sequence {account.sequence}, got {tx.nonce}")
        account.pk = tx.public_key
        return account

    def _charge_fee(self, tx: Tx, account: Account) -> None:
        fee = self.state.params.tx_fee
        payer = tx.fee_payer or tx.sender
        if payer not in (tx.sender, account.sponsor):
            raise AuthError(f"{payer} does not sponsor {tx.sender}")
        # a standing sponsor that cannot cover the fee leaves it to the sender
        if tx.fee_payer is None and account.sponsor and self.balance(account.sponsor) >= fee:
            payer = account.sponsor
        if fee:
            self._move(payer, FEE_COLLECTOR, fee)

    def _create_will(self, tx: Tx) -> Dict:
        body: CreateWill = tx.body
        for draft in body.components:
            output = draft.output
            if isinstance(output, IbcSend) and output.channel not in self.state.channels:
                raise ChannelNotFoundError(f"unknown channel {output.channel}")
            if isinstance(output, ContractCall) and output.chain_id not in (None, self.chain_id):
                self.channel_to(output.chain_id)
        will, token = create_will(
            tx.sender,
            bytes.fromhex(tx.public_key),
            body.expiration,
            body.components,
            body.beneficiaries,
            body.nonce,
            self.state.height,
            approvals=set(self.state.approvals.get(tx.sender, [])),
            home_chain_id=self.chain_id,
            claim_window=body.claim_window or self.state.params.claim_window,
        )
        if will.did in self.state.wills:
            raise ValidationError(f"{will.did} already exists; use a fresh nonce")
        if body.rft_escrow > body.deposit:
            raise ValidationError("rft escrow cannot exceed the deposit")
        if body.deposit:
            self._move(tx.sender, will_escrow_address(will.did), body.deposit)
        if body.shares:
            self.state.share_ledgers[will.did] = mint_rft(will, body.shares, body.rft_escrow)
        self.state.wills[will.did] = will
        self.state.tokens[will.did] = token
        self.state.expiration_index.setdefault(will.expiration, []).append(will.did)
        self._emit(
            "will_created",
            did=will.did,
            creator=will.creator,
            token_id=token.token_id,
            expiration=will.expiration,
        )
        return {"did": will.did, "token_id": token.token_id}

    def checkin(self, creator: str, did: str) -> int:
        """Reschedule expiration and cancel open claim windows; returns the new expiration."""
        will = self.will(did)
        if creator != will.creator and creator != self.state.checkin_contracts.get(did):
            raise UnauthorizedError(f"{creator} is not allowed to check in for {did}")
        if will.status != WillStatus.ACTIVE:
            raise TooLateError(f"{did} has already expired")
        height = self.state.height
        expiration = max(will.expiration, height + self.state.params.checkin_period)
        if expiration != will.expiration:
            self._unindex(self.state.expiration_index, will.expiration, did)
            self.state.expiration_index.setdefault(expiration, []).append(did)
        components = []
        for comp in will.components:
            new_comp, _ = step_component(comp, CheckinOccurred(height=height))
            if comp.state == ComponentState.ACTIVE and new_comp.state == ComponentState.CANCELLED:
                self._unindex(self.state.window_index, comp.claim_window.end, comp.id)
                self._emit("claim_window_cancelled", did=did, component_id=comp.id)
            components.append(new_comp)
        self.state.wills[did] = will.model_copy(
            update={"expiration": expiration, "components": components}
        )
        self._emit("checkin", did=did, expiration=expiration)
        return expiration

    @staticmethod
    def _unindex(index: Dict[int, List[str]], key: int, value: str) -> None:
        entries = index.get(key, [])
        if value in entries:
            entries.remove(value)
        if not entries:
            index.pop(key, None)

    def _checkin(self, tx: Tx) -> Dict:
        will = self.will(tx.body.did)
        if tx.sender != will.creator:
            raise UnauthorizedError(f"only the creator may check in for {will.did}")
        return {"expiration": self.checkin(tx.sender, will.did)}

    def _contract_checkin(self, tx: Tx) -> Dict:
        did = tx.body.did
        self.will(did)
        if self.state.checkin_contracts.get(did) != tx.sender:
            raise UnauthorizedError(f"{tx.sender} is not the check-in contract of {did}")
        return {"expiration": self.checkin(tx.sender, did)}

    def _register_checkin_contract(self, tx: Tx) -> Dict:
        will = self.will(tx.body.did)
        if tx.sender != will.creator:
            raise UnauthorizedError("only the creator may register a check-in contract")
        self.state.checkin_contracts[will.did] = tx.body.contract
        self.state.wills[will.did] = will.model_copy(update={"checkin_contract": tx.body.contract})
        self._emit("checkin_contract_registered", did=will.did, contract=tx.body.contract)
        return {}

    def _step_context(self, will: Will) -> StepContext:
        return StepContext(
            did=will.did,
            chain_id=self.chain_id,
            expiration=will.expiration,
            claim_window=will.claim_window,
            group=self.group,
            registry=self.registry(),
        )

    def submit_claim(self, claimant: str, did: str, component_id: str, evidence) -> ComponentState:
        will = self.will(did)
        try:
            comp = will.component(component_id)
        except KeyError:
            raise NotFoundError(f"{did} has no component {component_id}") from None
        height = self.state.height
        new_comp, outputs = step_component(
            comp,
            ClaimSubmitted(evidence=evidence, claimant=claimant, height=height),
            self._step_context(will),
        )
        will = replace_component(will, new_comp)
        if new_comp.state == ComponentState.ACTIVE:
            penalty = self.state.params.penalty_amount
            self._burn(claimant, penalty)
            self.state.window_index.setdefault(new_comp.claim_window.end, []).append(new_comp.id)
            self._emit(
                "claim_window_opened",
                did=did,
                component_id=component_id,
                claimant=claimant,
                closes_at=new_comp.claim_window.end,
                penalty_burned=penalty,
            )
        else:
            will = settle_status(will)
            self._emit("claim_executed", did=did, component_id=component_id, claimant=claimant)
        self.state.wills[did] = will
        if outputs:
            self._apply_outputs(will, component_id, outputs)
        return new_comp.state

    def _claim(self, tx: Tx) -> Dict:
        state = self.submit_claim(tx.sender, tx.body.did, tx.body.component_id, tx.body.evidence)
        return {"state": state.value}

    def _interchain_claim(self, tx: Tx) -> Dict:
        body: InterchainClaim = tx.body
        will = self.will(body.did)
        try:
            comp = will.component(body.component_id)
        except KeyError:
            raise NotFoundError(f"{body.did} has no component {body.component_id}") from None
        output = comp.output
        if not comp.is_claim or not isinstance(output, ContractCall) or output.chain_id is None:
            raise ValidationError(f"{comp.id} is not claimable through an entrypoint contract")
        if not may_claim(comp, tx.sender):
            raise UnauthorizedError(f"{tx.sender} may not claim {comp.id}")
        channel = self.channel_to(output.chain_id)
        claim_id = sha256(
            comp.id.encode("utf-8"),
            tx.sender.encode("utf-8"),
            tx.nonce.to_bytes(8, "big"),
        ).hex()[:32]
        bond = 0
        if will.status == WillStatus.ACTIVE:
            bond = self.state.params.penalty_amount
            self._move(tx.sender, CLAIM_BOND_ACCOUNT, bond)
        self.state.interchain_claims[claim_id] = PendingInterchainClaim(
            did=will.did,
            component_id=comp.id,
            claimant=tx.sender,
            recipient=body.recipient,
            evidence=body.evidence,
            channel=channel,
            bond=bond,
        )
        packet = send_packet(
            self.state,
            self._outbound_path(channel),
            Phase.INIT,
            ClaimPayload(
                claim_id=claim_id,
                did=will.did,
                component_id=comp.id,
                creator=will.creator,
                claimant=tx.sender,
                recipient=body.recipient,
                release=dict(output.release),
            ),
        )
        self._emit("interchain_claim_sent", did=will.did, component_id=comp.id, claim_id=claim_id, sequence=packet.sequence)
        return {"claim_id": claim_id}

    def _transfer(self, tx: Tx) -> Dict:
        body: TransferTx = tx.body
        self._move(tx.sender, body.to, body.amount, body.denom)
        self._emit("transfer", sender=tx.sender, recipient=body.to, amount=body.amount, denom=body.denom or self.denom)
        return {}

    def _approve_contract(self, tx: Tx) -> Dict:
        self.state = approve_contract(self.state, tx.sender, tx.body.chain_id, tx.body.address)
        self._emit("contract_approved", creator=tx.sender, chain_id=tx.body.chain_id, address=tx.body.address)
        return {}

    def _rft_claim(self, tx: Tx) -> Dict:
        did = tx.body.did
        will = self.will(did)
        ledger = self.state.share_ledgers.get(did)
        if ledger is None:
            raise NotFoundError(f"{did} has no refungible shares")
        ledger, payout = rft_claim(ledger, tx.sender, will)
        self.state.share_ledgers[did] = ledger
        if payout:
            self._move(will_escrow_address(did), tx.sender, payout)
        self._emit("rft_redeemed", did=did, holder=tx.sender, payout=payout)
        return {"payout": payout}

    def _sponsor(self, tx: Tx) -> Dict:
        target = tx.body.account
        if target == tx.sender:
            raise ValidationError("an account cannot sponsor itself")
        self._account(target).sponsor = tx.sender
        self._emit("sponsor_set", account=target, sponsor=tx.sender)
        return {}

    def _register_key(self, tx: Tx) -> Dict:
        pk = self.group.element_from_hex(tx.public_key)
        try:
            pop = DlogProof(
                self.group.element_from_hex(tx.body.pop_commitment),
                self.group.scalar_from_hex(tx.body.pop_response),
            )
        except InvalidEncodingError as exc:
            raise ValidationError(f"malformed proof of possession: {exc.message}") from exc
        registry = self.registry()
        register_key(registry, pk, pop)
        self.state.registered_keys = registry.encoded()
        self._emit("key_registered", address=tx.sender)
        return {}

    # outputs

    def _spendable(self, did: str) -> int:
        """Will escrow minus what is still reserved for share holders."""
        ledger = self.state.share_ledgers.get(did)
        reserved = ledger.escrow if ledger else 0
        return self.balance(will_escrow_address(did)) - reserved

    def _outbound_path(self, channel: str) -> Path:
        return Channel(
            channel_id=channel,
            home_chain=self.chain_id,
            counterparty_chain=self.state.channels[channel],
        ).outbound()

    def _apply_outputs(self, will: Will, component_id: str, outputs: List[ComponentOutput]) -> None:
        did = will.did
        escrow = will_escrow_address(did)
        for output in outputs:
            if isinstance(output, Transfer):
                if output.denom == self.denom and self._spendable(did) < output.amount:
                    self._emit("transfer_failed", did=did, component_id=component_id, to=output.to, reason="insufficient escrow")
                    continue
                try:
                    self._move(escrow, output.to, output.amount, output.denom)
                except BalanceError as exc:
                    self._emit("transfer_failed", did=did, component_id=component_id, to=output.to, reason=exc.message)
                    continue
                self._emit("transfer", did=did, component_id=component_id, recipient=output.to, amount=output.amount, denom=output.denom)
            elif isinstance(output, Emit):
                self._emit("emit", did=did, component_id=component_id, message=output.message)
            elif isinstance(output, IbcSend):
                if output.channel not in self.state.channels:
                    self._emit("ibc_send_failed", did=did, component_id=component_id, reason="channel-not-found")
                    continue
                if output.denom == self.denom and self._spendable(did) < output.amount:
                    self._emit("ibc_send_failed", did=did, component_id=component_id, reason="insufficient escrow")
                    continue
                try:
                    self._move(escrow, channel_escrow_address(output.channel), output.amount, output.denom)
                except BalanceError as exc:
                    self._emit("ibc_send_failed", did=did, component_id=component_id, reason=exc.message)
                    continue
                self._send_execution(will, component_id, output.channel, output)
            elif isinstance(output, ContractCall):
                if output.chain_id in (None, self.chain_id):
                    self._emit("contract_called", did=did, component_id=component_id, contract=output.contract_address, payload=output.payload)
                    continue
                try:
                    channel = self.channel_to(output.chain_id)
                except ChannelNotFoundError as exc:
                    self._emit("contract_call_failed", did=did, component_id=component_id, reason=exc.message)
                    continue
                self._send_execution(will, component_id, channel, output)

    def _send_execution(self, will: Will, component_id: str, channel: str, output: ComponentOutput) -> None:
        packet = send_packet(
            self.state,
            self._outbound_path(channel),
            Phase.INIT,
            ExecutePayload(
                did=will.did,
                component_id=component_id,
                creator=will.creator,
                logic=encapsulate(output).hex(),
            ),
        )
        self._emit(
            "packet_sent",
            did=will.did,
            component_id=component_id,
            channel=channel,
            sequence=packet.sequence,
            phase=packet.phase.value,
        )

    # blocks

    def begin_block(self) -> List[ComponentOutput]:
        self.state.height += 1
        height = self.state.height
        self._pending = []
        produced: List[ComponentOutput] = []
        for did in self.state.expiration_index.pop(height, []):
            will = self.state.wills.get(did)
            if will is None or will.status != WillStatus.ACTIVE or will.expiration != height:
                continue
            previous = will
            try:
                will, outputs = execute_will(will, height)
                self.state.wills[did] = will
                self._emit("will_executed", did=did, status=will.status.value, outputs=len(outputs))
                for before, after in zip(previous.components, will.components):
                    if before.state != ComponentState.EXECUTED and after.state == ComponentState.EXECUTED:
                        self._apply_outputs(will, after.id, expand_output(after.output))
                produced.extend(outputs)
            except WillchainError as exc:
                self._emit("execution_failed", did=did, code=exc.code)
        for comp_id in self.state.window_index.pop(height, []):
            did = comp_id.rsplit("#", 1)[0]
            will = self.state.wills.get(did)
            if will is None:
                continue
            comp = will.component(comp_id)
            if comp.state != ComponentState.ACTIVE:
                continue
            new_comp, outputs = step_component(comp, ClaimWindowElapsed(height=height))
            if new_comp.state != ComponentState.EXECUTED:
                continue
            will = settle_status(replace_component(will, new_comp))
            self.state.wills[did] = will
            self._emit("claim_window_elapsed", did=did, component_id=comp_id)
            self._apply_outputs(will, comp_id, outputs)
            produced.extend(outputs)
        self._commit_events()
        return produced

    # interchain endpoint

    def receive_packet(self, packet: Packet) -> Optional[Packet]:
        """Handle an acknowledgement from an entrypoint contract; answers with a confirm."""
        snapshot = copy.deepcopy(self.state)
        self._pending = []
        try:
            if packet.phase != Phase.ACK:
                raise ValidationError(f"the will module only accepts acks, got {packet.phase.value}")
            ack = decode_payload(packet)
            if not isinstance(ack, AckPayload):
                raise InvalidEncodingError("ack packet does not carry an ack payload")
            op, _, ref = ack.ref.partition(":")
            if op == "claim":
                confirm = self._confirm_claim(ref, ack)
            else:
                verdict = Verdict.ACKNOWLEDGED if ack.ok else Verdict.INELIGIBLE
                self._emit("interchain_execution_acknowledged", component_id=ref, ok=ack.ok, reason=ack.reason)
                confirm = ConfirmPayload(ref=ack.ref, verdict=verdict)
            response = send_packet(self.state, packet.path.reversed(), Phase.CONFIRM, confirm)
        except WillchainError:
            self.state = snapshot
            self._pending = []
            raise
        self._commit_events()
        return response

    def _confirm_claim(self, claim_id: str, ack: AckPayload) -> ConfirmPayload:
        pending = self.state.interchain_claims.pop(claim_id, None)
        if pending is None:
            raise NotFoundError(f"no pending interchain claim {claim_id}")
        verdict, penalty = Verdict.INELIGIBLE, 0
        will = self.state.wills.get(pending.did)
        if ack.ok and will is not None:
            verdict, penalty = self._judge_claim(will, pending)
        if penalty:
            self._burn(CLAIM_BOND_ACCOUNT, penalty)
        if pending.bond > penalty:
            self._move(CLAIM_BOND_ACCOUNT, pending.claimant, pending.bond - penalty)
        self._emit(
            "interchain_claim_verdict",
            did=pending.did,
            component_id=pending.component_id,
            claim_id=claim_id,
            verdict=verdict.value,
            penalty_burned=penalty,
        )
        return ConfirmPayload(ref=ack.ref, verdict=verdict, penalty=penalty)

    def _judge_claim(self, will: Will, pending: PendingInterchainClaim) -> Tuple[Verdict, int]:
        try:
            comp = will.component(pending.component_id)
        except KeyError:
            return Verdict.INELIGIBLE, 0
        if comp.state not in (ComponentState.INACTIVE, ComponentState.CANCELLED):
            return Verdict.INELIGIBLE, 0
        if not may_claim(comp, pending.claimant):
            return Verdict.INELIGIBLE, 0
        msg = claim_message(will.did, comp.id, pending.claimant, self.chain_id)
        try:
            valid = verify_claim(
                comp.requirement, pending.evidence, msg, group=self.group, registry=self.registry()
            )
        except WillchainError:
            valid = False
        if not valid:
            return Verdict.INELIGIBLE, 0
        if will.status == WillStatus.ACTIVE:
            return Verdict.EARLY, pending.bond
        # the entrypoint releases the assets itself, so no outputs are applied here
        executed = comp.model_copy(update={"state": ComponentState.EXECUTED, "claim_window": None})
        self.state.wills[will.did] = settle_status(replace_component(will, executed))
        return Verdict.ELIGIBLE, 0

    # encrypted attachments

    def attach_deed(self, did: str, component_id: str, chunk_map: ChunkMap) -> None:
        will = self.will(did)
        try:
            comp = will.component(component_id)
        except KeyError:
            raise NotFoundError(f"{did} has no component {component_id}") from None
        self.state.wills[did] = replace_component(
            will, comp.model_copy(update={"attachment": chunk_map.file_id})
        )
        self._emit("deed_attached", did=did, component_id=component_id, file_id=chunk_map.file_id)
        self._commit_events()

    def reveal_key(self, did: str, component_id: str, sk_t: Scalar) -> bytes:
        """Strip the outer layer of an attached deed and publish c1 for the beneficiary."""
        will = self.will(did)
        try:
            comp = will.component(component_id)
        except KeyError:
            raise NotFoundError(f"{did} has no component {component_id}") from None
        if will.status == WillStatus.ACTIVE or comp.state != ComponentState.EXECUTED:
            raise PrematureRevealError(f"{component_id} has not executed yet")
        if comp.attachment is None:
            raise NotFoundError(f"{component_id} has no attached deed")
        stored = self.vault.retrieve_file(self.vault.chunk_map(comp.attachment))
        ciphertext = LayeredCiphertext.from_bytes(self.group, stored)
        c1 = layered_decrypt_outer(ciphertext, sk_t)
        self._pending = []
        self._emit("key_revealed", did=did, component_id=component_id, file_id=comp.attachment, c1=c1.hex())
        self._commit_events()
        logger.bind(did=did).info("outer layer released for {}", component_id)
        return c1
