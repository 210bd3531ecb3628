from typing import Annotated, Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field, NonNegativeInt, PositiveInt, model_validator

from .chain import ChainEvent, ChainState, Genesis
from .interchain import DestinationState, RelayerState, Topology, TraceRecord
from .vault import VaultState


class StepBase(BaseModel):
    # error code the step must fail with; the step fails if it succeeds instead
    expect_error: Optional[str] = None
    save_as: Optional[str] = None


class TxStep(StepBase):
    op: Literal["tx"] = "tx"
    sender: str
    body: Dict[str, Any]
    fee_payer: Optional[str] = None


class AdvanceStep(StepBase):
    op: Literal["advance"] = "advance"
    blocks: PositiveInt = 1


class RelayStep(StepBase):
    op: Literal["relay"] = "relay"
    steps: PositiveInt = 1
    until_idle: bool = False


class AssertStep(StepBase):
    op: Literal["assert"] = "assert"
    check: Literal[
        "balance",
        "destination-balance",
        "will-status",
        "component-state",
        "event",
        "trace",
        "released",
        "conservation",
        "height",
        "burned",
        "file",
        "value",
    ]
    target: Optional[str] = None
    chain: Optional[str] = None
    denom: Optional[str] = None
    attributes: Dict[str, Any] = Field(default_factory=dict)
    equals: Any = None


class StoreFileStep(StepBase):
    """Store raw bytes, or an encrypted deed when `beneficiary` and `temp_key` are set."""

    op: Literal["store-file"] = "store-file"
    path: Optional[str] = None
    text: Optional[str] = None
    random_size: Optional[NonNegativeInt] = None
    chunk_size: Optional[PositiveInt] = None
    did: Optional[str] = None
    component_id: Optional[str] = None
    beneficiary: Optional[str] = None
    temp_key: Optional[str] = None

    @model_validator(mode="after")
    def _one_source(self):
        if sum(x is not None for x in (self.path, self.text, self.random_size)) != 1:
            raise ValueError("store-file needs exactly one of path, text or random_size")
        if (self.beneficiary is None) != (self.temp_key is None):
            raise ValueError("an encrypted deed needs both beneficiary and temp_key")
        if self.beneficiary is not None and (self.did is None or self.component_id is None):
            raise ValueError("an encrypted deed must be attached to a will component")
        return self


class RevealKeyStep(StepBase):
    op: Literal["reveal-key"] = "reveal-key"
    did: str
    component_id: str
    temp_key: str
    # when set, the beneficiary decrypts c1 and the plaintext is saved as text
    beneficiary: Optional[str] = None


Step = Annotated[
    Union[TxStep, AdvanceStep, RelayStep, AssertStep, StoreFileStep, RevealKeyStep],
    Field(discriminator="op"),
]


class Scenario(BaseModel):
    name: str = "scenario"
    seed: Optional[int] = None
    # inline definitions, or paths relative to the scenario file
    genesis: Union[Genesis, str] = Field(default_factory=Genesis)
    topology: Union[Topology, str] = Field(default_factory=Topology)
    steps: List[Step] = Field(default_factory=list)


class ReportRecord(BaseModel):
    index: NonNegativeInt
    op: str
    ok: bool
    code: str = "ok"
    message: str = ""
    height: NonNegativeInt
    data: Dict[str, Any] = Field(default_factory=dict)
    state_hash: str
    timestamp: Optional[str] = None


class WorldState(BaseModel):
    """Everything needed to resume a simulation exactly where it stopped."""

    seed: int
    chain: ChainState
    vault: VaultState = Field(default_factory=VaultState)
    destinations: Dict[str, DestinationState] = Field(default_factory=dict)
    relayers: List[RelayerState] = Field(default_factory=list)
    trace: List[TraceRecord] = Field(default_factory=list)
    events: List[ChainEvent] = Field(default_factory=list)
    saved: Dict[str, Any] = Field(default_factory=dict)
    # draws taken from each named random stream
    draws: Dict[str, int] = Field(default_factory=dict)
    steps_done: NonNegativeInt = 0
