import hashlib
import json
from typing import Any

from .errors import InvalidEncodingError


def canonical_json(value: Any) -> str:
    """Sorted-key compact JSON; the single text form used for files, hashes and reports."""
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def canonical_bytes(value: Any) -> bytes:
    return canonical_json(value).encode("utf-8")


def sha256(*parts: bytes) -> bytes:
    h = hashlib.sha256()
    for part in parts:
        h.update(part)
    return h.digest()


def hash_fields(*parts: bytes) -> bytes:
    """Hash of length-prefixed fields, so field boundaries are unambiguous."""
    h = hashlib.sha256()
    h.update(len(parts).to_bytes(4, "big"))
    for part in parts:
        h.update(len(part).to_bytes(4, "big"))
        h.update(part)
    return h.digest()


def from_hex(value: str, field: str = "value") -> bytes:
    try:
        return bytes.fromhex(value)
    except (TypeError, ValueError) as exc:
        raise InvalidEncodingError(f"{field} is not valid hex") from exc
