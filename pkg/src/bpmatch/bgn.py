"""Additively homomorphic encryption on the supersingular curve y^2 = x^3 + 1.

Keys come from two t-bit primes q1, q2 with n = q1*q2 and a field prime
p = l*n - 1, p = 2 mod 3, so the curve has exactly p + 1 = l*n points and a
cyclic subgroup G of order n.  A ciphertext is the point m*g + r*h with
h = q2*u of order q1; multiplying by q1 erases the r*h term and leaves
m*(q1*g), from which m is recovered by a bounded discrete log.

Since q1*g has order q2, plaintexts are residues mod q2.  Decryption returns
the representative inside a caller-chosen :class:`PlaintextWindow`; windows
wider than q2 are clipped to a width-q2 range (centred on zero when the
window contains zero) so the answer is unique.
"""
import math
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Tuple

from . import metering
from .errors import (
    BadRandomizer,
    DlogNotFound,
    KeyGenExhausted,
    PlaintextOutOfWindow,
)
from .field_curve import (
    INFINITY,
    CurveParams,
    CurvePoint,
    _add,
    _mul,
    _require_on_curve,
    point_from_json,
    point_neg,
    point_to_json,
    sample_point,
    supersingular_curve,
)
from .primes import distinct_primes, is_probable_prime

MIN_T = 8
DEFAULT_T = 16
L_SEARCH_BOUND = 2 ** 20
MAX_WINDOW_WIDTH = 2 ** 32
KEYGEN_ATTEMPTS = 64


@dataclass(frozen=True)
class PlaintextWindow:
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty window [{self.lo}, {self.hi}]")
        if self.width > MAX_WINDOW_WIDTH:
            raise ValueError(f"window width {self.width} exceeds 2^32")

    @property
    def width(self) -> int:
        return self.hi - self.lo + 1

    def __contains__(self, m: int) -> bool:
        return self.lo <= m <= self.hi

    @classmethod
    def symmetric(cls, bound: int) -> "PlaintextWindow":
        return cls(-bound, bound)


DEFAULT_WINDOW = PlaintextWindow(-(2 ** 20), 2 ** 20)


@dataclass(frozen=True)
class PublicKey:
    n: int
    curve: CurveParams
    g: CurvePoint
    h: CurvePoint
    t: int = 0


@dataclass(frozen=True)
class PrivateKey:
    q1: int
    q2: int
    l: int
    u: CurvePoint = field(default=INFINITY)


@dataclass(frozen=True)
class Ciphertext:
    point: CurvePoint


def _find_cofactor(n: int, bound: int = L_SEARCH_BOUND) -> int:
    for l in range(1, bound):
        p = l * n - 1
        if p > 3 and p % 3 == 2 and is_probable_prime(p):
            return l
    raise KeyGenExhausted(f"no l < {bound} gives a prime p = l*n - 1 = 2 mod 3")


def _subgroup_generator(curve: CurveParams, l: int, q1: int, q2: int, rng) -> CurvePoint:
    while True:
        P = _mul(l, sample_point(curve, rng), curve)
        if not _mul(q1, P, curve).is_infinity and not _mul(q2, P, curve).is_infinity:
            return P


def keys_from_primes(
    q1: int,
    q2: int,
    rng: Optional[random.Random] = None,
    g: Optional[CurvePoint] = None,
    u: Optional[CurvePoint] = None,
    t: int = 0,
) -> Tuple[PublicKey, PrivateKey]:
    """Build a key pair from fixed primes; ``g``/``u`` may be pinned for fixtures."""
    if q1 == q2:
        raise ValueError("q1 and q2 must be distinct")
    n = q1 * q2
    l = _find_cofactor(n)
    curve = supersingular_curve(l * n - 1)
    if g is None or u is None:
        if rng is None:
            raise ValueError("rng required to sample generators")
    if g is None:
        g = _subgroup_generator(curve, l, q1, q2, rng)
    if u is None:
        u = _subgroup_generator(curve, l, q1, q2, rng)
    for P in (g, u):
        _require_on_curve(P, curve)
        if not _mul(n, P, curve).is_infinity:
            raise ValueError(f"{P!r} is not in the order-n subgroup")
        if _mul(q1, P, curve).is_infinity or _mul(q2, P, curve).is_infinity:
            raise ValueError(f"{P!r} does not have order exactly n")
    h = _mul(q2, u, curve)
    return PublicKey(n, curve, g, h, t), PrivateKey(q1, q2, l, u)


def generate_keys(t: int, rng: random.Random) -> Tuple[PublicKey, PrivateKey]:
    if t < MIN_T:
        raise ValueError(f"security parameter t={t} below floor {MIN_T}")
    for _ in range(KEYGEN_ATTEMPTS):
        q1, q2 = distinct_primes(t, rng)
        try:
            return keys_from_primes(q1, q2, rng, t=t)
        except KeyGenExhausted:
            continue
    raise KeyGenExhausted(f"gave up after {KEYGEN_ATTEMPTS} prime pairs")


def toy_keys() -> Tuple[PublicKey, PrivateKey]:
    """q1=2, q2=3 over F_5: the six-point group with g = u = (2, 2)."""
    P = CurvePoint(2, 2)
    return keys_from_primes(2, 3, g=P, u=P, t=2)


def _check_randomizer(pk: PublicKey, r: int) -> None:
    if not 0 <= r < pk.n:
        raise BadRandomizer(f"randomizer {r} outside [0, {pk.n - 1}]")


def encrypt(pk: PublicKey, m: int, r: int) -> Ciphertext:
    """C = m*g + r*h, with m taken mod n."""
    _check_randomizer(pk, r)
    with metering.operation("encrypt"):
        C = _add(_mul(m % pk.n, pk.g, pk.curve), _mul(r, pk.h, pk.curve), pk.curve)
    return Ciphertext(C)


def encode(pk: PublicKey, m: int) -> Ciphertext:
    """Randomizer-free encryption m*g; used for public constants."""
    with metering.operation("encode"):
        return Ciphertext(_mul(m % pk.n, pk.g, pk.curve))


def hom_add(pk: PublicKey, C1: Ciphertext, C2: Ciphertext, r: int) -> Ciphertext:
    _check_randomizer(pk, r)
    with metering.operation("hom_add"):
        S = _add(C1.point, C2.point, pk.curve)
        S = _add(S, _mul(r, pk.h, pk.curve), pk.curve)
    return Ciphertext(S)


def hom_neg(pk: PublicKey, C: Ciphertext) -> Ciphertext:
    with metering.operation("hom_neg"):
        return Ciphertext(point_neg(C.point, pk.curve))


@lru_cache(maxsize=64)
def _baby_steps(curve: CurveParams, base: CurvePoint, m: int) -> dict:
    table = {}
    P = INFINITY
    for i in range(m):
        table.setdefault(P, i)
        P = _add(P, base, curve)
    return table


def clear_caches() -> None:
    _baby_steps.cache_clear()
    _decryption_base.cache_clear()


def bsgs_dlog(base: CurvePoint, target: CurvePoint, window: PlaintextWindow, curve: CurveParams) -> int:
    """Smallest k in ``window`` with k*base = target, by baby-step/giant-step."""
    m = math.isqrt(window.width - 1) + 1
    table = _baby_steps(curve, base, m)
    giant = _mul(-m, base, curve)
    gamma = _add(target, _mul(-window.lo, base, curve), curve)
    for k in range(m + 1):
        i = table.get(gamma)
        if i is not None:
            j = k * m + i
            if j < window.width:
                return window.lo + j
        gamma = _add(gamma, giant, curve)
    raise DlogNotFound(f"no discrete log in [{window.lo}, {window.hi}]")


@lru_cache(maxsize=64)
def _decryption_base(curve: CurveParams, g: CurvePoint, q1: int) -> CurvePoint:
    return _mul(q1, g, curve)


def effective_window(sk: PrivateKey, window: PlaintextWindow) -> PlaintextWindow:
    """Clip ``window`` so that it holds at most one residue class mod q2."""
    if window.width <= sk.q2:
        return window
    if window.lo <= 0 <= window.hi:
        lo = max(window.lo, -((sk.q2 - 1) // 2))
        return PlaintextWindow(lo, min(window.hi, lo + sk.q2 - 1))
    return PlaintextWindow(window.lo, window.lo + sk.q2 - 1)


def decrypt(sk: PrivateKey, pk: PublicKey, C: Ciphertext, window: PlaintextWindow = DEFAULT_WINDOW) -> int:
    with metering.operation("decrypt"):
        base = _decryption_base(pk.curve, pk.g, sk.q1)
        target = _mul(sk.q1, C.point, pk.curve)
        try:
            return bsgs_dlog(base, target, effective_window(sk, window), pk.curve)
        except DlogNotFound as exc:
            raise PlaintextOutOfWindow(str(exc)) from exc


# --- key files -------------------------------------------------------------

def public_key_to_json(pk: PublicKey) -> dict:
    return {
        "scheme": "bgn",
        "t": str(pk.t),
        "n": str(pk.n),
        "p": str(pk.curve.p),
        "g": point_to_json(pk.g),
        "h": point_to_json(pk.h),
    }


def keys_to_json(pk: PublicKey, sk: PrivateKey) -> dict:
    return {
        "scheme": "bgn",
        "t": str(pk.t),
        "q1": str(sk.q1),
        "q2": str(sk.q2),
        "n": str(pk.n),
        "l": str(sk.l),
        "p": str(pk.curve.p),
        "g": point_to_json(pk.g),
        "u": point_to_json(sk.u),
        "h": point_to_json(pk.h),
    }


def public_key_from_json(obj: dict) -> PublicKey:
    curve = supersingular_curve(int(obj["p"]))
    pk = PublicKey(
        int(obj["n"]),
        curve,
        point_from_json(obj["g"], curve),
        point_from_json(obj["h"], curve),
        int(obj.get("t", "0")),
    )
    if (curve.p + 1) % pk.n:
        raise ValueError("n does not divide p + 1")
    return pk


def keys_from_json(obj: dict) -> Tuple[PublicKey, PrivateKey]:
    pk = public_key_from_json(obj)
    sk = PrivateKey(int(obj["q1"]), int(obj["q2"]), int(obj["l"]), point_from_json(obj["u"], pk.curve))
    if sk.q1 * sk.q2 != pk.n or sk.l * pk.n - 1 != pk.curve.p:
        raise ValueError("inconsistent key file")
    if _mul(sk.q2, sk.u, pk.curve) != pk.h:
        raise ValueError("h != q2*u")
    return pk, sk
