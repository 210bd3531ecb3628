import argparse
import random
from pathlib import Path
from typing import Iterator, List, Tuple

from willchain.core.config import settings
from willchain.crypto.group import Group, get_group
from willchain.crypto.keys import DeterministicNonceSource, KeyPair
from willchain.crypto.layered import layered_encrypt
from willchain.crypto.pedersen import default_params, pedersen_commit
from willchain.crypto.proofs import dlog_prove
from willchain.crypto.schnorr import schnorr_sign

Vector = List[Tuple[str, str]]


def pedersen_vectors(group: Group, seed: bytes, count: int) -> Iterator[Vector]:
    params = default_params(group)
    yield [("h", params.h.hex())]
    for i in range(count):
        m = group.hash_to_scalar(b"vectors/pedersen/m", seed, i.to_bytes(4, "big"))
        r = group.hash_to_scalar(b"vectors/pedersen/r", seed, i.to_bytes(4, "big"))
        yield [("m", m.hex()), ("r", r.hex()), ("commitment", pedersen_commit(params, m, r).hex())]


def schnorr_vectors(group: Group, seed: bytes, count: int) -> Iterator[Vector]:
    for i in range(count):
        kp = KeyPair.derive(group, seed, f"schnorr-{i}")
        msg = f"willchain vector {i}".encode("utf-8")
        sig = schnorr_sign(kp, msg, DeterministicNonceSource(seed=seed))
        yield [("sk", kp.sk.hex()), ("pk", kp.pk.hex()), ("msg", msg.hex()), ("signature", sig.hex())]


def dlog_vectors(group: Group, seed: bytes, count: int) -> Iterator[Vector]:
    for i in range(count):
        kp = KeyPair.derive(group, seed, f"dlog-{i}")
        context = f"context {i}".encode("utf-8")
        proof = dlog_prove(kp, context, DeterministicNonceSource(seed=seed))
        yield [("pk", kp.pk.hex()), ("context", context.hex()), ("proof", proof.to_bytes().hex())]


def layered_vectors(group: Group, seed: bytes, count: int) -> Iterator[Vector]:
    for i in range(count):
        beneficiary = KeyPair.derive(group, seed, f"beneficiary-{i}")
        temp = KeyPair.derive(group, seed, f"temp-{i}")
        data = f"deed {i}".encode("utf-8")
        c = layered_encrypt(data, beneficiary.pk, temp.pk, random.Random(i))
        yield [
            ("sk_b", beneficiary.sk.hex()),
            ("sk_t", temp.sk.hex()),
            ("plaintext", data.hex()),
            ("ciphertext", c.to_bytes().hex()),
        ]


SUITES = {
    "pedersen": pedersen_vectors,
    "schnorr": schnorr_vectors,
    "dlog": dlog_vectors,
    "layered": layered_vectors,
}


def main(out_dir: str, group_name: str, count: int, seed: int) -> None:
    group = get_group(group_name)
    seed_bytes = seed.to_bytes(8, "big", signed=True)
    target = Path(out_dir)
    target.mkdir(parents=True, exist_ok=True)
    for name, suite in SUITES.items():
        lines = [f"# {name} vectors, group {group.name}, seed {seed}"]
        for vector in suite(group, seed_bytes, count):
            lines.extend(f"{key} = {value}" for key, value in vector)
            lines.append("")
        path = target / f"{name}_{group.name}.txt"
        path.write_text("\n".join(lines), encoding="utf-8")
        print(f"wrote {path}")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Write hex key = value test vectors")
    parser.add_argument("--out", type=str, default="vectors", help="output directory")
    parser.add_argument("--group", type=str, default="secp256k1", help="secp256k1 or toy101")
    parser.add_argument("--count", type=int, default=8)
    parser.add_argument("--seed", type=int, default=settings.SEED)
    args = parser.parse_args()
    main(args.out, args.group, args.count, args.seed)
