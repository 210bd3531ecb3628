from enum import Enum
from typing import Annotated, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field, NonNegativeInt, PositiveInt, model_validator

WILL_PORT = "will"
ENTRYPOINT_PORT = "entrypoint"


class Phase(str, Enum):
    INIT = "init"
    ACK = "ack"
    CONFIRM = "confirm"


class Decision(str, Enum):
    DELIVER = "deliver"
    DROP = "drop"


class Verdict(str, Enum):
    ELIGIBLE = "eligible"
    EARLY = "early"
    INELIGIBLE = "ineligible"
    ACKNOWLEDGED = "acknowledged"


class Path(BaseModel):
    source_chain: str
    source_port: str
    destination_chain: str
    destination_port: str
    channel: str

    @model_validator(mode="after")
    def _will_module_is_an_endpoint(self):
        if WILL_PORT not in (self.source_port, self.destination_port):
            raise ValueError("every path must have the will module as one endpoint")
        return self

    def reversed(self) -> "Path":
        return Path(
            source_chain=self.destination_chain,
            source_port=self.destination_port,
            destination_chain=self.source_chain,
            destination_port=self.source_port,
            channel=self.channel,
        )

    def key(self) -> str:
        return f"{self.source_chain}:{self.source_port}>{self.destination_chain}:{self.destination_port}@{self.channel}"


class Packet(BaseModel):
    path: Path
    sequence: NonNegativeInt
    phase: Phase
    payload: str
    commitment: str

    def key(self) -> str:
        return f"{self.path.key()}#{self.sequence}"


class Proof(BaseModel):
    """Simulated light-client proof: the source height and the committed hash."""

    height: NonNegativeInt
    commitment: str


# Packet payloads, serialized canonically and hex-encoded into Packet.payload.

class ExecutePayload(BaseModel):
    kind: Literal["execute"] = "execute"
    did: str
    component_id: str
    creator: str
    logic: str


class ClaimPayload(BaseModel):
    kind: Literal["claim"] = "claim"
    claim_id: str
    did: str
    component_id: str
    creator: str
    claimant: str
    recipient: str
    release: Dict[str, PositiveInt] = Field(default_factory=dict)


class AckPayload(BaseModel):
    kind: Literal["ack"] = "ack"
    acked_sequence: NonNegativeInt
    ref: str
    ok: bool
    reason: str = ""


class ConfirmPayload(BaseModel):
    kind: Literal["confirm"] = "confirm"
    ref: str
    verdict: Verdict
    penalty: NonNegativeInt = 0


PacketPayload = Annotated[
    Union[ExecutePayload, ClaimPayload, AckPayload, ConfirmPayload],
    Field(discriminator="kind"),
]


class Channel(BaseModel):
    channel_id: str
    home_chain: str
    counterparty_chain: str
    home_port: str = WILL_PORT
    counterparty_port: str = ENTRYPOINT_PORT

    def outbound(self) -> Path:
        return Path(
            source_chain=self.home_chain,
            source_port=self.home_port,
            destination_chain=self.counterparty_chain,
            destination_port=self.counterparty_port,
            channel=self.channel_id,
        )


class TraceRecord(BaseModel):
    path: str
    seq: NonNegativeInt
    phase: Phase
    commitment: str
    verdict: str
    relayer: Optional[str] = None


class DestinationAccount(BaseModel):
    address: str
    balances: Dict[str, NonNegativeInt] = Field(default_factory=dict)


class ChainSpec(BaseModel):
    chain_id: str
    contract_address: str = "0xcontract_address"
    # creator alias or address -> {denom: amount} escrowed at the entrypoint
    escrow: Dict[str, Dict[str, NonNegativeInt]] = Field(default_factory=dict)


class ChannelSpec(BaseModel):
    channel_id: str
    counterparty_chain: str


class RelayerSpec(BaseModel):
    id: str
    channels: List[str] = Field(default_factory=list)


class Topology(BaseModel):
    chains: List[ChainSpec] = Field(default_factory=list)
    channels: List[ChannelSpec] = Field(default_factory=list)
    relayers: List[RelayerSpec] = Field(default_factory=list)
    seed: Optional[int] = None


class ContractRecord(BaseModel):
    did: str
    component_id: str
    creator: str
    logic: str
    sequence: NonNegativeInt


class PendingContractClaim(BaseModel):
    claim_id: str
    did: str
    creator: str
    claimant: str
    recipient: str
    reserved: Dict[str, NonNegativeInt] = Field(default_factory=dict)


class EntrypointState(BaseModel):
    chain_id: str
    address: str
    approved_by: List[str] = Field(default_factory=list)
    escrow: Dict[str, Dict[str, NonNegativeInt]] = Field(default_factory=dict)
    executed_wills: List[str] = Field(default_factory=list)
    executions: List[ContractRecord] = Field(default_factory=list)
    pending_claims: Dict[str, PendingContractClaim] = Field(default_factory=dict)
    released: List[str] = Field(default_factory=list)
    rejected: List[str] = Field(default_factory=list)


class DestinationState(BaseModel):
    chain_id: str
    height: NonNegativeInt = 0
    accounts: Dict[str, DestinationAccount] = Field(default_factory=dict)
    contract: EntrypointState
    channels: Dict[str, str] = Field(default_factory=dict)
    outbox: Dict[str, Packet] = Field(default_factory=dict)
    next_sequence: Dict[str, int] = Field(default_factory=dict)
    receipts: Dict[str, NonNegativeInt] = Field(default_factory=dict)


class RelayerState(BaseModel):
    id: str
    channels: List[str] = Field(default_factory=list)
    delivered: List[str] = Field(default_factory=list)
    dropped: List[str] = Field(default_factory=list)
