#!/usr/bin/env python3
"""Generates tests/vectors/credfield_vectors.json.

Independent route for the frozen test vectors: PBKDF2 comes from hashlib and
the curve arithmetic plus deterministic nonces come from the pure-Python
`ecdsa` package. Nothing here shares code with the C++ library.

    pip install ecdsa
    python3 tests/oracle/gen_vectors.py > tests/vectors/credfield_vectors.json
"""

import hashlib
import json

import ecdsa
from ecdsa.util import sigencode_strings_canonize

CURVE = ecdsa.SECP256k1
N = CURVE.order
ITERATIONS = 1000


def build_salt(origin: str, user_id: str) -> bytes:
    o = origin.encode()
    u = user_id.encode()
    return len(o).to_bytes(2, "big") + o + len(u).to_bytes(2, "big") + u


def pbkdf2(secret: bytes, salt: bytes, iterations: int, length: int) -> bytes:
    return hashlib.pbkdf2_hmac("sha512", secret, salt, iterations, length)


def scalar_from_dk(dk: bytes) -> int:
    return 1 + int.from_bytes(dk, "big") % (N - 1)


def signing_key(scalar: int) -> ecdsa.SigningKey:
    return ecdsa.SigningKey.from_secret_exponent(scalar, curve=CURVE, hashfunc=hashlib.sha256)


def compressed(scalar: int) -> bytes:
    return signing_key(scalar).get_verifying_key().to_string("compressed")


def sign(scalar: int, digest: bytes) -> bytes:
    r, s = signing_key(scalar).sign_digest_deterministic(
        digest, hashfunc=hashlib.sha256, sigencode=sigencode_strings_canonize)
    return r + s


def derive(user_id, challenge, password, origin, browser_time, browser_key, iterations):
    dk = pbkdf2(password.encode(), build_salt(origin, user_id), iterations, 48)
    sp = scalar_from_dk(dk)
    digest_p = hashlib.sha256(b"\x01" + challenge).digest()
    sigma_p = sign(sp, digest_p)
    digest_b = hashlib.sha256(b"\x02" + sigma_p + browser_time.to_bytes(8, "big")).digest()
    sigma_b = sign(browser_key, digest_b)
    blob = (b"\x01" + browser_time.to_bytes(8, "big") + sigma_p + sigma_b
            + compressed(sp) + compressed(browser_key))
    assert len(blob) == 203
    return blob


def det_bytes(label: str, i: int, length: int) -> bytes:
    out = b""
    counter = 0
    while len(out) < length:
        out += hashlib.sha256(f"{label}/{i}/{counter}".encode()).digest()
        counter += 1
    return out[:length]


SCALAR_CASES = [
    ("correct horse", "https://bank.example", "alice"),
    ("correct horse", "https://evil.example", "alice"),
    ("correct horse", "https://bank.example", "bob"),
    ("hunter2", "https://bank.example", "alice"),
    ("123456", "http://intra.corp:8080", "u"),
    ("pässwörd", "https://münchen.example", "jürgen"),
    ("x", "https://a", "bc"),
    ("x", "https://ab", "c"),
    ("Tr0ub4dor&3", "https://login.example.com:8443", "carol@example.com"),
    ("a much longer passphrase with spaces and symbols !@#$%^&*()", "https://shop.example", "dave"),
    ("0", "http://localhost:3000", "admin"),
    ("correct horse battery staple", "https://bank.example", "ALICE"),
]


def main():
    out = {"iterations": ITERATIONS, "curve_order": format(N, "064x")}

    scalars = []
    for password, origin, user in SCALAR_CASES:
        salt = build_salt(origin, user)
        dk = pbkdf2(password.encode(), salt, ITERATIONS, 48)
        sp = scalar_from_dk(dk)
        scalars.append({
            "password": password, "origin": origin, "user_id": user,
            "salt": salt.hex(), "dk": dk.hex(), "scalar": format(sp, "064x"),
            "v_p": compressed(sp).hex(),
        })
    out["password_scalar"] = scalars

    stores = []
    for case in scalars:
        v = bytes.fromhex(case["v_p"])
        salt = case["user_id"].encode()
        stores.append({"salt": salt.hex(), "v": v.hex(), "p": pbkdf2(v, salt, ITERATIONS, 64).hex()})
    for i in range(3):
        k = 1 + int.from_bytes(det_bytes("browser", i, 32), "big") % (N - 1)
        v = compressed(k)
        stores.append({"salt": "", "v": v.hex(), "p": pbkdf2(v, b"", ITERATIONS, 64).hex()})
    out["store_identifier"] = stores

    signs = []
    keys = [1, 2, 3, N - 1, (N - 1) // 2]
    keys += [1 + int.from_bytes(det_bytes("key", i, 32), "big") % (N - 1) for i in range(7)]
    for i, k in enumerate(keys):
        digest = det_bytes("digest", i, 32) if i % 3 else bytes(32)
        sig = sign(k, digest)
        signs.append({"key": format(k, "064x"), "digest": digest.hex(), "signature": sig.hex()})
    # Well-known secp256k1 deterministic vectors (message hashed with SHA-256 first).
    for k, msg in [(1, b"Satoshi Nakamoto"), (N - 1, b"Satoshi Nakamoto"),
                   (1, b"All those moments will be lost in time, like tears in rain. Time to die...")]:
        digest = hashlib.sha256(msg).digest()
        signs.append({"key": format(k, "064x"), "digest": digest.hex(), "signature": sign(k, digest).hex()})
    out["sign_deterministic"] = signs

    derives = []
    cases = [
        ("alice", bytes(32), "correct horse", "https://bank.example", 1700000000, 1),
    ]
    for i in range(11):
        pw, origin, user = SCALAR_CASES[(i + 1) % len(SCALAR_CASES)]
        challenge = det_bytes("challenge", i, 32)
        t = 1700000000 + 37 * i
        bk = 1 + int.from_bytes(det_bytes("bkey", i, 32), "big") % (N - 1)
        cases.append((user, challenge, pw, origin, t, bk))
    for user, challenge, pw, origin, t, bk in cases:
        blob = derive(user, challenge, pw, origin, t, bk, ITERATIONS)
        derives.append({
            "user_id": user, "challenge": challenge.hex(), "password": pw, "origin": origin,
            "browser_time": t, "browser_key": format(bk, "064x"), "credential": blob.hex(),
        })
    out["derive"] = derives

    json.dump(out, __import__("sys").stdout, indent=2, ensure_ascii=False)
    print()


if __name__ == "__main__":
    main()
