from typing import Dict, List

from pydantic import BaseModel, Field, NonNegativeInt

from ..core.config import settings


class ChunkEntry(BaseModel):
    contract: str
    index: NonNegativeInt
    hash: str


class ChunkMap(BaseModel):
    file_id: str
    entries: List[ChunkEntry] = Field(default_factory=list)
    total_size: NonNegativeInt = 0


class VaultState(BaseModel):
    capacity: NonNegativeInt = settings.CELL_CAPACITY
    max_chunk_size: NonNegativeInt = settings.MAX_CHUNK_SIZE
    # contract id -> cell index -> hex bytes; insertion order is allocation order
    contracts: Dict[str, Dict[int, str]] = Field(default_factory=dict)
    maps: Dict[str, ChunkMap] = Field(default_factory=dict)
