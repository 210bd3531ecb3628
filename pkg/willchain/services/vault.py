"""Chunked file storage spread over fixed-size storage contracts.

A mapping index (`ChunkMap`) records, for every chunk position, which storage
contract and cell holds it plus the chunk hash. Files are addressed by the
hash of the bytes actually stored, so integrity can be checked without
decrypting anything.
"""

import random
from typing import List, Optional, Tuple

from loguru import logger

from ..core.config import settings
from ..core.encoding import canonical_bytes, sha256
from ..core.errors import (
    CellOccupiedError,
    ChunkMissingError,
    CorruptionDetectedError,
    NotFoundError,
    ValidationError,
)
from ..crypto.group import GroupElement
from ..crypto.layered import LayeredCiphertext, layered_encrypt
from ..models.vault import ChunkEntry, ChunkMap, VaultState

CONTRACT_PREFIX = "storage-"


def chunk(file: bytes, chunk_size: int) -> List[bytes]:
    if chunk_size < 1:
        raise ValidationError("chunk size must be at least 1")
    return [file[i : i + chunk_size] for i in range(0, len(file), chunk_size)]


class FileVault:
    def __init__(self, state: Optional[VaultState] = None):
        self.state = state or VaultState()
        # contracts before this position are full
        self._first_open = 0

    def digest(self) -> bytes:
        return sha256(canonical_bytes(self.state.model_dump(mode="json")))

    def _allocate(self) -> Tuple[str, int]:
        contract_ids = list(self.state.contracts)
        for position in range(self._first_open, len(contract_ids)):
            cells = self.state.contracts[contract_ids[position]]
            if len(cells) < self.state.capacity:
                index = next(i for i in range(self.state.capacity) if i not in cells)
                return contract_ids[position], index
            self._first_open = position + 1
        contract_id = f"{CONTRACT_PREFIX}{len(self.state.contracts)}"
        self.state.contracts[contract_id] = {}
        logger.debug("opened storage contract {}", contract_id)
        return contract_id, 0

    def write_cell(self, contract_id: str, index: int, data: bytes) -> None:
        if len(data) > self.state.max_chunk_size:
            raise ValidationError(
                f"chunk of {len(data)} bytes exceeds the {self.state.max_chunk_size}-byte cell limit"
            )
        if index >= self.state.capacity:
            raise ValidationError(f"cell index {index} is beyond contract capacity")
        cells = self.state.contracts.setdefault(contract_id, {})
        if index in cells:
            raise CellOccupiedError(f"{contract_id}[{index}] is already written")
        cells[index] = data.hex()

    def store_file(self, file: bytes, chunk_size: Optional[int] = None) -> ChunkMap:
        if chunk_size is None:
            chunk_size = settings.CHUNK_SIZE
        if chunk_size > self.state.max_chunk_size:
            raise ValidationError(
                f"chunk size {chunk_size} exceeds the {self.state.max_chunk_size}-byte cell limit"
            )
        entries = []
        for piece in chunk(file, chunk_size):
            contract_id, index = self._allocate()
            self.write_cell(contract_id, index, piece)
            entries.append(ChunkEntry(contract=contract_id, index=index, hash=sha256(piece).hex()))
        chunk_map = ChunkMap(file_id=sha256(file).hex(), entries=entries, total_size=len(file))
        self.state.maps[chunk_map.file_id] = chunk_map
        logger.info("stored file {} in {} chunk(s)", chunk_map.file_id[:16], len(entries))
        return chunk_map

    def retrieve_file(self, m: ChunkMap) -> bytes:
        pieces = []
        for position, entry in enumerate(m.entries):
            raw = self.state.contracts.get(entry.contract, {}).get(entry.index)
            if raw is None:
                raise ChunkMissingError(f"chunk {position} missing at {entry.contract}[{entry.index}]")
            piece = bytes.fromhex(raw)
            if sha256(piece).hex() != entry.hash:
                raise CorruptionDetectedError(f"chunk {position} does not match its recorded hash")
            pieces.append(piece)
        data = b"".join(pieces)
        if len(data) != m.total_size or sha256(data).hex() != m.file_id:
            raise CorruptionDetectedError(f"file {m.file_id[:16]} does not match its id")
        return data

    def chunk_map(self, file_id: str) -> ChunkMap:
        try:
            return self.state.maps[file_id]
        except KeyError:
            raise NotFoundError(f"no file with id {file_id}") from None

    def store_deed(
        self,
        deed: bytes,
        k_b: GroupElement,
        k_t: GroupElement,
        chunk_size: Optional[int] = None,
        rng: Optional[random.Random] = None,
    ) -> Tuple[ChunkMap, LayeredCiphertext]:
        """Encrypt to the beneficiary, wrap with the temporary key, then store."""
        ciphertext = layered_encrypt(deed, k_b, k_t, rng)
        return self.store_file(ciphertext.to_bytes(), chunk_size), ciphertext
