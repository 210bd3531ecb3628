"""
Tests for chunked file storage and encrypted deeds.
"""
import random
import sys
import unittest
from pathlib import Path

from hypothesis import given, settings as hsettings, strategies as st

# Add the project root to the Python path
PROJECT_ROOT = Path(__file__).parent
sys.path.append(str(PROJECT_ROOT))

from willchain.core.errors import (
    CellOccupiedError,
    ChunkMissingError,
    CorruptionDetectedError,
    NotFoundError,
    ValidationError,
)
from willchain.crypto.group import SECP256K1
from willchain.crypto.keys import KeyPair
from willchain.crypto.layered import LayeredCiphertext, layered_decrypt_inner, layered_decrypt_outer
from willchain.models.vault import VaultState
from willchain.services.vault import FileVault, chunk


class ChunkingTest(unittest.TestCase):
    def test_last_chunk_may_be_short(self):
        self.assertEqual(chunk(b"abcdefg", 3), [b"abc", b"def", b"g"])
        self.assertEqual(chunk(b"", 3), [])

    def test_chunk_size_must_be_positive(self):
        with self.assertRaises(ValidationError):
            chunk(b"abc", 0)


class FileVaultTest(unittest.TestCase):
    def setUp(self):
        self.vault = FileVault(VaultState(capacity=4, max_chunk_size=64))

    @hsettings(max_examples=30, deadline=None)
    @given(st.binary(max_size=600), st.integers(min_value=1, max_value=64))
    def test_any_file_comes_back_unchanged(self, data, size):
        vault = FileVault(VaultState(capacity=4, max_chunk_size=64))
        chunk_map = vault.store_file(data, size)
        self.assertEqual(vault.retrieve_file(chunk_map), data)
        self.assertEqual(chunk_map.total_size, len(data))

    def test_chunks_spill_into_new_contracts(self):
        chunk_map = self.vault.store_file(bytes(range(200)), 20)
        self.assertEqual(len(chunk_map.entries), 10)
        self.assertEqual(len(self.vault.state.contracts), 3)
        self.assertEqual([e.contract for e in chunk_map.entries[:5]], ["storage-0"] * 4 + ["storage-1"])

    def test_files_are_content_addressed(self):
        a = self.vault.store_file(b"same bytes", 4)
        b = self.vault.store_file(b"same bytes", 5)
        self.assertEqual(a.file_id, b.file_id)
        self.assertEqual(self.vault.chunk_map(a.file_id), b)

    def test_oversized_chunks_are_refused(self):
        with self.assertRaises(ValidationError):
            self.vault.store_file(b"x" * 100, 65)

    def test_missing_chunk_is_reported(self):
        chunk_map = self.vault.store_file(b"0123456789", 4)
        entry = chunk_map.entries[1]
        del self.vault.state.contracts[entry.contract][entry.index]
        with self.assertRaises(ChunkMissingError):
            self.vault.retrieve_file(chunk_map)

    def test_tampered_chunk_is_detected(self):
        chunk_map = self.vault.store_file(b"0123456789", 4)
        entry = chunk_map.entries[0]
        self.vault.state.contracts[entry.contract][entry.index] = b"9999".hex()
        with self.assertRaises(CorruptionDetectedError):
            self.vault.retrieve_file(chunk_map)

    def test_tampered_map_is_detected(self):
        chunk_map = self.vault.store_file(b"0123456789", 4)
        shortened = chunk_map.model_copy(update={"entries": chunk_map.entries[:2]})
        with self.assertRaises(CorruptionDetectedError):
            self.vault.retrieve_file(shortened)

    def test_zero_chunk_size_is_refused_not_defaulted(self):
        for data in (b"0123456789", b""):
            with self.subTest(size=len(data)):
                with self.assertRaises(ValidationError):
                    self.vault.store_file(data, 0)
        self.assertEqual(self.vault.state.maps, {})
        self.assertEqual(self.vault.state.contracts, {})

    def test_omitted_chunk_size_uses_the_default(self):
        vault = FileVault()
        chunk_map = vault.store_file(b"x" * 10)
        self.assertEqual(len(chunk_map.entries), 1)

    def test_cells_are_write_once(self):
        self.vault.write_cell("storage-9", 0, b"first")
        with self.assertRaises(CellOccupiedError):
            self.vault.write_cell("storage-9", 0, b"second")

    def test_cell_index_is_bounded(self):
        with self.assertRaises(ValidationError):
            self.vault.write_cell("storage-9", 4, b"x")

    def test_unknown_file(self):
        with self.assertRaises(NotFoundError):
            self.vault.chunk_map("00" * 32)

    def test_digest_tracks_contents(self):
        before = self.vault.digest()
        self.vault.store_file(b"abc", 2)
        self.assertNotEqual(self.vault.digest(), before)


class LargeFileTest(unittest.TestCase):
    def test_random_files_round_trip_and_any_flipped_byte_is_caught(self):
        rng = random.Random(1024)
        for _ in range(100):
            vault = FileVault()
            data = rng.randbytes(rng.randint(0, 1 << 20))
            chunk_map = vault.store_file(data, rng.randint(256, 4096))
            self.assertEqual(vault.retrieve_file(chunk_map), data)
            if not chunk_map.entries:
                continue

            entry = rng.choice(chunk_map.entries)
            cells = vault.state.contracts[entry.contract]
            original = cells[entry.index]
            raw = bytearray(bytes.fromhex(original))
            raw[rng.randrange(len(raw))] ^= 1 << rng.randrange(8)
            cells[entry.index] = raw.hex()
            with self.assertRaises(CorruptionDetectedError):
                vault.retrieve_file(chunk_map)
            cells[entry.index] = original


class DeedTest(unittest.TestCase):
    def setUp(self):
        self.vault = FileVault()
        self.beneficiary = KeyPair.derive(SECP256K1, b"vault-tests", "beneficiary")
        self.temp = KeyPair.derive(SECP256K1, b"vault-tests", "temp")

    def test_stored_deed_needs_both_keys(self):
        deed = b"account numbers and passwords"
        chunk_map, ciphertext = self.vault.store_deed(
            deed, self.beneficiary.pk, self.temp.pk, 16, random.Random(7)
        )
        stored = self.vault.retrieve_file(chunk_map)
        self.assertEqual(stored, ciphertext.to_bytes())
        self.assertNotIn(deed, stored)
        c1 = layered_decrypt_outer(LayeredCiphertext.from_bytes(SECP256K1, stored), self.temp.sk)
        self.assertEqual(layered_decrypt_inner(c1, self.beneficiary.sk), deed)


if __name__ == "__main__":
    unittest.main()
