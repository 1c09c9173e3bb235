"""Blind-and-Permute over an additively homomorphic backend.

A sequence S is split as S = S' + S'' between parties A and B.  In a half
run the key holder (A) sends E_A(S'); the permuter (B) blinds every entry
with -r_i, permutes with its own pi_B, and returns the ciphertexts while
keeping pi_B(S'' + R).  The key holder decrypts and ends up with
pi_B(S' - R).  A full run repeats this with the roles swapped, so the final
split is of (pi_A o pi_B)(S) and neither party knows the composition.

Parties are small state machines exchanging JSON bytes over a
:class:`Channel`; every message and every crypto call is logged in a
:class:`BpTranscript`.
"""
import json
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from . import metering
from .backends import HomomorphicBackend
from .bgn import PlaintextWindow
from .errors import CodecError, PlaintextOutOfWindow, ProtocolAbort, ShareOutOfRange

SHARE_BOUND = 2 ** 16
BLIND_BOUND = 2 ** 16
CRYPTO_OPS = ("encrypt", "encode", "hom_neg", "hom_add", "decrypt")


@dataclass(frozen=True)
class BpConfig:
    """Share and blinding bounds; they fix the decryption window +-(share + blind)."""

    share_bound: int = SHARE_BOUND
    blind_bound: int = BLIND_BOUND

    @property
    def window(self) -> PlaintextWindow:
        return PlaintextWindow.symmetric(self.share_bound + self.blind_bound)

    def fits(self, capacity: int) -> bool:
        return self.window.width <= capacity

    @classmethod
    def for_capacity(cls, capacity: int) -> "BpConfig":
        """Largest default-shaped config (equal power-of-two bounds) whose window fits."""
        bound = SHARE_BOUND
        while bound > 1 and not cls(bound, bound).fits(capacity):
            bound //= 2
        config = cls(bound, bound)
        if not config.fits(capacity):
            raise ValueError(f"plaintext capacity {capacity} too small for BP")
        return config


@dataclass(frozen=True)
class ShareVector:
    values: Tuple[int, ...]
    owner: str

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))

    def __len__(self):
        return len(self.values)


def recombine(a: ShareVector, b: ShareVector) -> Tuple[int, ...]:
    if len(a) != len(b):
        raise ValueError("share vectors differ in length")
    return tuple(x + y for x, y in zip(a.values, b.values))


def additive_split(
    S: Sequence[int],
    rng: random.Random,
    share_bound: int = SHARE_BOUND,
    forced_b: Optional[Sequence[int]] = None,
) -> Tuple[ShareVector, ShareVector]:
    """Split S into (S', S'') with S'' uniform in [-share_bound/2, share_bound/2]."""
    half = share_bound // 2
    for s in S:
        if abs(s) > half:
            raise ShareOutOfRange(f"|{s}| exceeds {half}")
    if forced_b is None:
        b = [rng.randint(-half, half) for _ in S]
    else:
        b = list(forced_b)
        if len(b) != len(S):
            raise ValueError("forced share has the wrong length")
    return ShareVector([s - x for s, x in zip(S, b)], "A"), ShareVector(b, "B")


@dataclass(frozen=True)
class Permutation:
    """Bijection on positions; ``apply`` yields out[j] = seq[mapping[j]]."""

    mapping: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "mapping", tuple(self.mapping))
        if sorted(self.mapping) != list(range(len(self.mapping))):
            raise ValueError(f"not a permutation: {self.mapping}")

    def __len__(self):
        return len(self.mapping)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(range(n))

    @classmethod
    def random(cls, n: int, rng: random.Random) -> "Permutation":
        mapping = list(range(n))
        rng.shuffle(mapping)
        return cls(mapping)

    def apply(self, seq: Sequence) -> list:
        if len(seq) != len(self.mapping):
            raise ValueError("length mismatch")
        return [seq[i] for i in self.mapping]

    def after(self, first: "Permutation") -> "Permutation":
        """self o first: apply ``first``, then ``self``."""
        return Permutation(first.mapping[i] for i in self.mapping)

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.mapping)
        for j, i in enumerate(self.mapping):
            inv[i] = j
        return Permutation(inv)


# --- transcript and channel ------------------------------------------------

@dataclass
class MessageRecord:
    half: int
    direction: str
    step: int
    kind: str
    bytes: int
    payload_bytes: int
    message: bytes

    def to_json(self) -> dict:
        return {
            "half": self.half,
            "direction": self.direction,
            "step": self.step,
            "kind": self.kind,
            "bytes": self.bytes,
            "payload_bytes": self.payload_bytes,
            "message": json.loads(self.message),
        }


@dataclass
class BpTranscript:
    messages: List[MessageRecord] = field(default_factory=list)
    # (half, step) -> crypto calls made while executing that step
    step_ops: Dict[Tuple[int, int], Counter] = field(default_factory=dict)

    def record_ops(self, half: int, step: int, calls: Counter) -> None:
        self.step_ops.setdefault((half, step), Counter()).update(calls)

    def half_ops(self, half: int) -> Counter:
        total = Counter()
        for (h, _), calls in self.step_ops.items():
            if h == half:
                total.update(calls)
        return total

    def total_ops(self) -> Counter:
        total = Counter()
        for calls in self.step_ops.values():
            total.update(calls)
        return total

    @property
    def total_bytes(self) -> int:
        return sum(m.bytes for m in self.messages)

    def extend(self, other: "BpTranscript") -> None:
        self.messages.extend(other.messages)
        for key, calls in other.step_ops.items():
            self.step_ops.setdefault(key, Counter()).update(calls)

    def summary(self) -> dict:
        halves = sorted({h for h, _ in self.step_ops} | {m.half for m in self.messages})
        return {
            "messages": len(self.messages),
            "bytes": self.total_bytes,
            "ops": {str(h): {op: self.half_ops(h)[op] for op in CRYPTO_OPS} for h in halves},
        }

    def to_jsonl(self) -> str:
        return "".join(json.dumps(m.to_json(), sort_keys=True) + "\n" for m in self.messages)


class Channel:
    """Reliable in-order delivery between two named endpoints, with a byte log."""

    def __init__(self, transcript: Optional[BpTranscript] = None):
        self.transcript = transcript if transcript is not None else BpTranscript()
        self._queues: Dict[str, List[bytes]] = {}
        self.half = 1

    def send(self, src: str, dst: str, message: dict) -> None:
        data = encode_message(message)
        payload = json.dumps(message["payload"], separators=(",", ":")).encode()
        self.transcript.messages.append(
            MessageRecord(self.half, f"{src}->{dst}", message["step"], message["kind"], len(data), len(payload), data)
        )
        self._queues.setdefault(dst, []).append(data)

    def receive(self, dst: str) -> bytes:
        queue = self._queues.get(dst)
        if not queue:
            raise ProtocolAbort("Codec", f"no message waiting for {dst}")
        return queue.pop(0)


def encode_message(message: dict) -> bytes:
    return json.dumps(message, sort_keys=True, separators=(",", ":")).encode()


def decode_cipher_vector(data: bytes, backend: HomomorphicBackend, step: int, length: int) -> list:
    try:
        msg = json.loads(data)
    except (ValueError, UnicodeDecodeError) as exc:
        raise CodecError(f"undecodable message: {exc}") from exc
    if not isinstance(msg, dict) or set(msg) != {"backend", "kind", "payload", "step"}:
        raise CodecError("unexpected message fields")
    if msg["step"] != step or msg["kind"] != "cipher_vector" or msg["backend"] != backend.name:
        raise CodecError(f"expected step {step} {backend.name} cipher_vector")
    payload = msg["payload"]
    if not isinstance(payload, list) or len(payload) != length:
        raise CodecError(f"expected {length} ciphertexts")
    return [backend.ciphertext_from_json(c) for c in payload]


def _cipher_message(step: int, backend: HomomorphicBackend, ciphertexts: list) -> dict:
    return {
        "step": step,
        "kind": "cipher_vector",
        "backend": backend.name,
        "payload": [backend.ciphertext_to_json(c) for c in ciphertexts],
    }


# --- party state machines --------------------------------------------------

class KeyHolder:
    """Owns the key pair for this half run; never sees the permutation or blinding."""

    def __init__(self, label: str, backend: HomomorphicBackend, shares: ShareVector,
                 window: PlaintextWindow, rng: random.Random):
        if not backend.has_private_key:
            raise ValueError("key holder needs a private key")
        self.label = label
        self.backend = backend
        self.shares = shares
        self.window = window
        self.rng = rng
        self.state = "start"
        self.output: Optional[ShareVector] = None

    def start(self) -> dict:
        """Step 1: encrypt own shares."""
        assert self.state == "start"
        cts = [self.backend.encrypt(s, self.rng) for s in self.shares.values]
        self.state = "sent"
        return _cipher_message(1, self.backend, cts)

    def finish(self, data: bytes) -> ShareVector:
        """Step 4: decrypt the blinded, permuted vector."""
        assert self.state == "sent"
        cts = decode_cipher_vector(data, self.backend, 3, len(self.shares))
        self.output = ShareVector([self.backend.decrypt(c, self.window) for c in cts], self.label)
        self.state = "done"
        return self.output


class Permuter:
    """Holds only the peer's public key, its own shares, pi and the blinding values."""

    def __init__(self, label: str, peer_backend: HomomorphicBackend, shares: ShareVector,
                 blind_bound: int, rng: random.Random, protocol_rng: random.Random,
                 permutation: Optional[Permutation] = None, blinding: Optional[Sequence[int]] = None):
        if peer_backend.has_private_key:
            raise ValueError("permuter must only hold the peer's public key")
        ell = len(shares)
        self.label = label
        self.peer_backend = peer_backend
        self.shares = shares
        self.rng = rng
        self.permutation = permutation if permutation is not None else Permutation.random(ell, protocol_rng)
        if blinding is None:
            blinding = [protocol_rng.randrange(blind_bound) for _ in range(ell)]
        self.blinding = tuple(blinding)
        if len(self.permutation) != ell or len(self.blinding) != ell:
            raise ValueError("permutation/blinding length mismatch")
        self.state = "waiting"
        self.output: Optional[ShareVector] = None

    def respond(self, data: bytes) -> dict:
        """Steps 2 and 3: blind with -r_i under the peer's key, then permute."""
        assert self.state == "waiting"
        be = self.peer_backend
        received = decode_cipher_vector(data, be, 1, len(self.shares))
        blinded = [be.hom_add(c, be.hom_neg(be.encode(r)), self.rng) for c, r in zip(received, self.blinding)]
        kept = [s + r for s, r in zip(self.shares.values, self.blinding)]
        self.output = ShareVector(self.permutation.apply(kept), self.label)
        self.state = "done"
        return _cipher_message(3, be, self.permutation.apply(blinded))


# --- runs ------------------------------------------------------------------

@dataclass
class HalfRunResult:
    keyholder_shares: ShareVector
    permuter_shares: ShareVector
    transcript: BpTranscript
    # harness-only record; neither party state machine exposes the other's choice
    permutation: Permutation
    blinding: Tuple[int, ...]


def _abort_on(exc: Exception) -> ProtocolAbort:
    if isinstance(exc, PlaintextOutOfWindow):
        return ProtocolAbort("PlaintextOutOfWindow", str(exc))
    return ProtocolAbort("Codec", str(exc))


def bp_half_run(
    key_backend: HomomorphicBackend,
    keyholder_shares: ShareVector,
    permuter_shares: ShareVector,
    rng: random.Random,
    protocol_rng: Optional[random.Random] = None,
    *,
    permutation: Optional[Permutation] = None,
    blinding: Optional[Sequence[int]] = None,
    config: Optional[BpConfig] = None,
    channel: Optional[Channel] = None,
    labels: Tuple[str, str] = ("A", "B"),
    half: int = 1,
) -> HalfRunResult:
    """Run steps 1-4 with ``labels[0]`` holding the key and ``labels[1]`` permuting.

    ``rng`` feeds encryption randomizers; ``protocol_rng`` (default ``rng``)
    feeds the permuter's permutation and blinding unless they are given.
    """
    config = config or BpConfig.for_capacity(key_backend.capacity)
    if protocol_rng is None:
        protocol_rng = rng
    if len(keyholder_shares) != len(permuter_shares):
        raise ValueError("share vectors differ in length")
    window = config.window
    if not config.fits(key_backend.capacity):
        raise ValueError(f"window width {window.width} exceeds plaintext capacity")
    if keyholder_shares.values:
        lo = min(keyholder_shares.values) - (config.blind_bound - 1)
        hi = max(keyholder_shares.values)
        if lo < window.lo or hi > window.hi:
            raise ShareOutOfRange(f"key-holder shares leave window [{window.lo}, {window.hi}]")
    if blinding is not None and any(not 0 <= r < config.blind_bound for r in blinding):
        raise ShareOutOfRange("blinding values must lie in [0, blind_bound)")

    a, b = labels
    channel = channel if channel is not None else Channel()
    channel.half = half
    transcript = BpTranscript()
    outer = channel.transcript
    channel.transcript = transcript

    holder = KeyHolder(a, key_backend, keyholder_shares, window, rng)
    permuter = Permuter(b, key_backend.public(), permuter_shares, config.blind_bound, rng, protocol_rng,
                        permutation, blinding)
    try:
        with metering.metering() as m:
            msg = holder.start()
        transcript.record_ops(half, 1, m.calls)
        channel.send(a, b, msg)

        with metering.metering() as m:
            reply = permuter.respond(channel.receive(b))
        transcript.record_ops(half, 2, m.calls)
        channel.send(b, a, reply)

        with metering.metering() as m:
            holder.finish(channel.receive(a))
        transcript.record_ops(half, 4, m.calls)
    except (CodecError, PlaintextOutOfWindow) as exc:
        raise _abort_on(exc) from exc
    finally:
        channel.transcript = outer
        outer.extend(transcript)

    return HalfRunResult(holder.output, permuter.output, transcript, permuter.permutation, permuter.blinding)


@dataclass
class FullRunResult:
    shares_a: ShareVector
    shares_b: ShareVector
    transcript: BpTranscript
    pi_b: Permutation
    pi_a: Permutation

    @property
    def composed(self) -> Permutation:
        """pi_A o pi_B, the permutation relating the output to the input."""
        return self.pi_a.after(self.pi_b)

    def recombined(self) -> Tuple[int, ...]:
        return recombine(self.shares_a, self.shares_b)


def bp_full_run(
    backend_a: HomomorphicBackend,
    backend_b: HomomorphicBackend,
    shares_a: ShareVector,
    shares_b: ShareVector,
    rng: random.Random,
    config: Optional[BpConfig] = None,
    channel: Optional[Channel] = None,
    *,
    pi_b: Optional[Permutation] = None,
    pi_a: Optional[Permutation] = None,
) -> FullRunResult:
    """Two half runs: B permutes under A's key, then A permutes under B's key.

    Permutations and blinding come from a stream derived from ``rng`` that is
    independent of the encryption randomizers, so two backends driven by the
    same seed shuffle and blind identically.  ``pi_b``/``pi_a`` pin the
    permutations for tests.
    """
    if config is None:
        config = BpConfig.for_capacity(min(backend_a.capacity, backend_b.capacity))
    protocol_rng = random.Random(rng.getrandbits(64))
    crypto_rng = random.Random(rng.getrandbits(64))
    channel = channel if channel is not None else Channel()

    first = bp_half_run(backend_a, shares_a, shares_b, crypto_rng, protocol_rng,
                        permutation=pi_b, config=config, channel=channel, labels=("A", "B"), half=1)
    second = bp_half_run(backend_b, first.permuter_shares, first.keyholder_shares, crypto_rng, protocol_rng,
                         permutation=pi_a, config=config, channel=channel, labels=("B", "A"), half=2)
    return FullRunResult(
        shares_a=second.permuter_shares,
        shares_b=second.keyholder_shares,
        transcript=channel.transcript,
        pi_b=first.permutation,
        pi_a=second.permutation,
    )
