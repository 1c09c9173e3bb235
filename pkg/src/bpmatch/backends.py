"""Uniform adapter over the two additively homomorphic schemes.

The BP protocol only sees this surface: encrypt with a fresh randomizer,
encode a public constant, add (re-randomizing), negate, decrypt into a signed
window, and a fixed-width JSON codec for ciphertexts.  An instance built
without a private key can do everything except decrypt.
"""
import random
from typing import Any, Optional, Protocol

from . import bgn, paillier
from .bgn import PlaintextWindow
from .errors import CodecError, PlaintextOutOfWindow
from .field_curve import point_from_json, point_to_json


class HomomorphicBackend(Protocol):
    name: str

    @property
    def has_private_key(self) -> bool: ...

    @property
    def capacity(self) -> int: ...

    def public(self) -> "HomomorphicBackend": ...

    def encrypt(self, m: int, rng: random.Random) -> Any: ...

    def encode(self, m: int) -> Any: ...

    def hom_add(self, c1: Any, c2: Any, rng: random.Random) -> Any: ...

    def hom_neg(self, c: Any) -> Any: ...

    def decrypt(self, c: Any, window: PlaintextWindow) -> int: ...

    def ciphertext_to_json(self, c: Any) -> Any: ...

    def ciphertext_from_json(self, obj: Any) -> Any: ...

    def cipher_bytes(self) -> int: ...

    def key_bits(self) -> int: ...


class BgnBackend:
    name = "bgn"

    def __init__(self, pk: bgn.PublicKey, sk: Optional[bgn.PrivateKey] = None):
        self.pk = pk
        self.sk = sk
        self._width = len(str(pk.curve.p))

    @classmethod
    def generate(cls, t: int, rng: random.Random) -> "BgnBackend":
        return cls(*bgn.generate_keys(t, rng))

    @property
    def has_private_key(self) -> bool:
        return self.sk is not None

    @property
    def capacity(self) -> int:
        """Number of distinct plaintexts (q2); needs the private key."""
        if self.sk is None:
            raise ValueError("plaintext capacity is private")
        return self.sk.q2

    def public(self) -> "BgnBackend":
        return BgnBackend(self.pk)

    def encrypt(self, m, rng):
        return bgn.encrypt(self.pk, m, rng.randrange(self.pk.n))

    def encode(self, m):
        return bgn.encode(self.pk, m)

    def hom_add(self, c1, c2, rng):
        return bgn.hom_add(self.pk, c1, c2, rng.randrange(self.pk.n))

    def hom_neg(self, c):
        return bgn.hom_neg(self.pk, c)

    def decrypt(self, c, window):
        if self.sk is None:
            raise ValueError("decryption needs the private key")
        return bgn.decrypt(self.sk, self.pk, c, window)

    def ciphertext_to_json(self, c):
        return point_to_json(c.point, self._width)

    def ciphertext_from_json(self, obj):
        try:
            return bgn.Ciphertext(point_from_json(obj, self.pk.curve))
        except ValueError as exc:
            raise CodecError(str(exc)) from exc

    def cipher_bytes(self) -> int:
        return 2 * ((self.pk.curve.p.bit_length() + 7) // 8)

    def key_bits(self) -> int:
        return self.pk.curve.p.bit_length()


class PaillierBackend:
    name = "paillier"

    def __init__(self, pk: paillier.PaillierPublicKey, sk: Optional[paillier.PaillierPrivateKey] = None):
        self.pk = pk
        self.sk = sk
        self._width = len(str(pk.nsquare))

    @classmethod
    def generate(cls, t: int, rng: random.Random) -> "PaillierBackend":
        return cls(*paillier.generate_keys(t, rng))

    @property
    def has_private_key(self) -> bool:
        return self.sk is not None

    @property
    def capacity(self) -> int:
        return self.pk.n

    def public(self) -> "PaillierBackend":
        return PaillierBackend(self.pk)

    def encrypt(self, m, rng):
        return paillier.encrypt(self.pk, m, paillier.random_randomizer(self.pk, rng))

    def encode(self, m):
        return paillier.encode(self.pk, m)

    def hom_add(self, c1, c2, rng):
        return paillier.hom_add(self.pk, c1, c2, paillier.random_randomizer(self.pk, rng))

    def hom_neg(self, c):
        return paillier.hom_neg(self.pk, c)

    def decrypt(self, c, window):
        if self.sk is None:
            raise ValueError("decryption needs the private key")
        m = paillier.decrypt(self.sk, self.pk, c, signed=True)
        if m not in window:
            raise PlaintextOutOfWindow(f"{m} outside [{window.lo}, {window.hi}]")
        return m

    def ciphertext_to_json(self, c):
        return str(c).zfill(self._width)

    def ciphertext_from_json(self, obj):
        if not (isinstance(obj, str) and obj.isdigit()):
            raise CodecError("Paillier ciphertext must be a decimal string")
        c = int(obj)
        if not 0 < c < self.pk.nsquare:
            raise CodecError("Paillier ciphertext out of range")
        return c

    def cipher_bytes(self) -> int:
        return (self.pk.nsquare.bit_length() + 7) // 8

    def key_bits(self) -> int:
        return self.pk.n.bit_length()


BACKENDS = {"bgn": BgnBackend, "paillier": PaillierBackend}


def generate_backend(name: str, t: int, rng: random.Random) -> HomomorphicBackend:
    try:
        cls = BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown backend {name!r}") from None
    return cls.generate(t, rng)
