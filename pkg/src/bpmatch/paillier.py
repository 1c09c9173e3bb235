"""Paillier cryptosystem with generator N + 1.

Work is tallied in modular multiplications: a modular exponentiation counts
as the squarings and multiplications of the left-to-right binary method for
its exponent, so tallies depend only on the operands.
"""
import math
import random
from dataclasses import dataclass
from typing import Optional, Tuple

from . import metering
from .errors import BadRandomizer, MalformedCiphertext
from .primes import distinct_primes

MIN_T = 8


@dataclass(frozen=True)
class PaillierPublicKey:
    n: int
    t: int = 0

    @property
    def g(self) -> int:
        return self.n + 1

    @property
    def nsquare(self) -> int:
        return self.n * self.n


@dataclass(frozen=True)
class PaillierPrivateKey:
    p: int
    q: int
    lam: int
    mu: int


def _powmod(b: int, e: int, m: int) -> int:
    metering.count("modmul", max(e.bit_length() - 1, 0) + max(bin(e).count("1") - 1, 0))
    return pow(b, e, m)


def _mulmod(a: int, b: int, m: int) -> int:
    metering.count("modmul")
    return a * b % m


def keys_from_primes(p: int, q: int, t: int = 0) -> Tuple[PaillierPublicKey, PaillierPrivateKey]:
    if p == q:
        raise ValueError("primes must be distinct")
    n = p * q
    if math.gcd(n, (p - 1) * (q - 1)) != 1:
        raise ValueError("gcd(N, phi(N)) != 1")
    lam = math.lcm(p - 1, q - 1)
    # with g = N + 1, L(g^lam mod N^2) = lam mod N
    mu = pow(lam % n, -1, n)
    return PaillierPublicKey(n, t), PaillierPrivateKey(p, q, lam, mu)


def generate_keys(t: int, rng: random.Random) -> Tuple[PaillierPublicKey, PaillierPrivateKey]:
    if t < MIN_T:
        raise ValueError(f"security parameter t={t} below floor {MIN_T}")
    while True:
        p, q = distinct_primes(t, rng)
        try:
            return keys_from_primes(p, q, t)
        except ValueError:
            continue


def random_randomizer(pk: PaillierPublicKey, rng: random.Random) -> int:
    while True:
        r = rng.randrange(1, pk.n)
        if math.gcd(r, pk.n) == 1:
            return r


def _encrypt(pk: PaillierPublicKey, m: int, r: int) -> int:
    if not 0 < r < pk.n or math.gcd(r, pk.n) != 1:
        raise BadRandomizer(f"randomizer {r} not a unit mod N")
    nsq = pk.nsquare
    # (N+1)^m = 1 + m*N mod N^2
    gm = (1 + (m % pk.n) * pk.n) % nsq
    metering.count("modmul")
    return _mulmod(gm, _powmod(r, pk.n, nsq), nsq)


def encrypt(pk: PaillierPublicKey, m: int, r: int) -> int:
    """c = (N+1)^m * r^N mod N^2; negative m is taken mod N."""
    with metering.operation("encrypt"):
        return _encrypt(pk, m, r)


def encode(pk: PaillierPublicKey, m: int) -> int:
    with metering.operation("encode"):
        metering.count("modmul")
        return (1 + (m % pk.n) * pk.n) % pk.nsquare


def _check(pk: PaillierPublicKey, c: int) -> None:
    if not isinstance(c, int) or not 0 < c < pk.nsquare or math.gcd(c, pk.n) != 1:
        raise MalformedCiphertext(f"{c!r} is not a unit mod N^2")


def decrypt(sk: PaillierPrivateKey, pk: PaillierPublicKey, c: int, signed: bool = False) -> int:
    """Plaintext in [0, N), or in (-N/2, N/2] when ``signed``."""
    _check(pk, c)
    with metering.operation("decrypt"):
        x = _powmod(c, sk.lam, pk.nsquare)
        m = _mulmod((x - 1) // pk.n, sk.mu, pk.n)
    if signed and m > pk.n // 2:
        m -= pk.n
    return m


def hom_add(pk: PaillierPublicKey, c1: int, c2: int, r: Optional[int] = None) -> int:
    """Product of ciphertexts; with ``r`` the result is re-randomized by E(0, r)."""
    _check(pk, c1)
    _check(pk, c2)
    with metering.operation("hom_add"):
        c = _mulmod(c1, c2, pk.nsquare)
        if r is not None:
            c = _mulmod(c, _encrypt(pk, 0, r), pk.nsquare)
    return c


def hom_neg(pk: PaillierPublicKey, c: int) -> int:
    _check(pk, c)
    with metering.operation("hom_neg"):
        metering.count("modinv")
        return pow(c, -1, pk.nsquare)


def public_key_to_json(pk: PaillierPublicKey) -> dict:
    return {"scheme": "paillier", "t": str(pk.t), "n": str(pk.n), "g": str(pk.g)}


def keys_to_json(pk: PaillierPublicKey, sk: PaillierPrivateKey) -> dict:
    obj = public_key_to_json(pk)
    obj.update({"p": str(sk.p), "q": str(sk.q), "lambda": str(sk.lam), "mu": str(sk.mu)})
    return obj


def public_key_from_json(obj: dict) -> PaillierPublicKey:
    pk = PaillierPublicKey(int(obj["n"]), int(obj.get("t", "0")))
    if "g" in obj and int(obj["g"]) != pk.g:
        raise ValueError("only g = N + 1 is supported")
    return pk


def keys_from_json(obj: dict) -> Tuple[PaillierPublicKey, PaillierPrivateKey]:
    pk, sk = keys_from_primes(int(obj["p"]), int(obj["q"]), int(obj.get("t", "0")))
    if pk.n != int(obj["n"]):
        raise ValueError("inconsistent key file")
    return pk, sk
