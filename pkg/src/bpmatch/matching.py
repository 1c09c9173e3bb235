"""Profile matching sessions at privacy levels PL-1 and PL-2.

PL-1 reveals each candidate's intersection with the initiator's query set.
PL-2 reveals only intersection sizes: a dealer inside the harness splits the
size vector between the initiator (A) and a candidate-side aggregator (B),
the two run a full Blind-and-Permute, and the sizes are reconstructed in
shuffled order.  The dealer stands in for the share-producing sub-protocol,
which is not implemented here.
"""
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .backends import generate_backend
from .bp import BpConfig, BpTranscript, ShareVector, additive_split, bp_full_run
from .errors import NoCandidates

MAX_ATTRIBUTE_BYTES = 64


class PrivacyLevel(str, Enum):
    PL1 = "PL1"
    PL2 = "PL2"

    @classmethod
    def parse(cls, text: str) -> "PrivacyLevel":
        key = text.upper().replace("-", "")
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unsupported privacy level {text!r} (use pl1 or pl2)") from None


@dataclass(frozen=True)
class Profile:
    party_id: str
    attributes: FrozenSet[str]

    def __post_init__(self):
        object.__setattr__(self, "attributes", frozenset(self.attributes))
        for a in self.attributes:
            if not isinstance(a, str):
                raise ValueError(f"attribute {a!r} is not a string")
            if len(a.encode()) > MAX_ATTRIBUTE_BYTES:
                raise ValueError(f"attribute {a[:16]!r}... longer than {MAX_ATTRIBUTE_BYTES} bytes")


class AttributeDictionary:
    """Bijection between attribute strings and ids, in sorted order of the vocabulary."""

    def __init__(self, vocabulary: Iterable[str]):
        self.words: Tuple[str, ...] = tuple(sorted(set(vocabulary)))
        self.ids: Dict[str, int] = {w: i for i, w in enumerate(self.words)}

    @classmethod
    def from_profiles(cls, profiles: Sequence[Profile]) -> "AttributeDictionary":
        return cls(a for p in profiles for a in p.attributes)

    def encode(self, attributes: Iterable[str]) -> FrozenSet[int]:
        return frozenset(self.ids[a] for a in attributes)

    def decode(self, ids: Iterable[int]) -> FrozenSet[str]:
        return frozenset(self.words[i] for i in ids)


def intersection_cardinality(s1: Profile, si: Profile) -> int:
    return len(s1.attributes & si.attributes)


def best_match(sizes: Sequence[int]) -> int:
    """Index into ``sizes`` of the largest value; ties go to the earliest index."""
    if not sizes:
        raise NoCandidates("no candidates to match against")
    best = 0
    for i, s in enumerate(sizes):
        if s > sizes[best]:
            best = i
    return best


@dataclass
class InitiatorView:
    """Everything the initiator's side holds after a PL-2 run."""

    party_id: str
    query_ids: FrozenSet[int]
    shares_in: ShareVector
    shares_out: ShareVector
    revealed: Tuple[int, ...]


@dataclass
class MatchReport:
    level: PrivacyLevel
    backend: Optional[str]
    initiator: str
    candidates: List[str]
    sizes: Dict[str, int]
    best_match: str
    intersections: Optional[Dict[str, List[str]]] = None
    revealed: Optional[List[int]] = None
    transcript: Optional[dict] = None
    # interpretation: the best match is shown the size multiset
    best_match_view: List[int] = field(default_factory=list)

    @property
    def size_multiset(self) -> List[int]:
        return sorted(self.sizes.values())

    def to_json(self) -> dict:
        out = {
            "level": self.level.value,
            "backend": self.backend,
            "initiator": self.initiator,
            "candidates": self.candidates,
            "sizes": self.sizes,
            "size_multiset": self.size_multiset,
            "best_match": self.best_match,
            "best_match_view": self.best_match_view,
        }
        if self.intersections is not None:
            out["intersections"] = self.intersections
        if self.revealed is not None:
            out["revealed_permuted_sizes"] = self.revealed
        if self.transcript is not None:
            out["transcript"] = self.transcript
        return out


@dataclass
class SessionResult:
    report: MatchReport
    transcript: Optional[BpTranscript] = None
    initiator_view: Optional[InitiatorView] = None


def run_session(
    profiles: Sequence[Profile],
    level: PrivacyLevel,
    backend: str = "bgn",
    rng: Optional[random.Random] = None,
    t: int = 16,
) -> SessionResult:
    """Match ``profiles[0]`` (the initiator) against every other profile."""
    if rng is None:
        rng = random.Random()
    if len(profiles) < 2:
        raise NoCandidates("a session needs an initiator and at least one candidate")
    ids = [p.party_id for p in profiles]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate party ids")
    initiator, candidates = profiles[0], list(profiles[1:])
    cand_ids = [c.party_id for c in candidates]

    if level is PrivacyLevel.PL1:
        sizes = [intersection_cardinality(initiator, c) for c in candidates]
        report = MatchReport(
            level=level,
            backend=None,
            initiator=initiator.party_id,
            candidates=cand_ids,
            sizes=dict(zip(cand_ids, sizes)),
            best_match=cand_ids[best_match(sizes)],
            intersections={c.party_id: sorted(initiator.attributes & c.attributes) for c in candidates},
        )
        report.best_match_view = report.size_multiset
        return SessionResult(report)

    dictionary = AttributeDictionary.from_profiles(profiles)
    query = dictionary.encode(initiator.attributes)

    # dealer seam: the plaintext sizes exist only here, never in a party state
    dealt = [len(query & dictionary.encode(c.attributes)) for c in candidates]

    backend_a = generate_backend(backend, t, rng)
    backend_b = generate_backend(backend, t, rng)
    config = BpConfig.for_capacity(min(backend_a.capacity, backend_b.capacity))
    shares_a, shares_b = additive_split(dealt, rng, config.share_bound)
    run = bp_full_run(backend_a, backend_b, shares_a, shares_b, rng, config)
    revealed = run.recombined()

    # harness-only: undo the logged composition to attribute sizes to parties
    pi = run.composed
    sizes_by_index = [0] * len(candidates)
    for j, value in enumerate(revealed):
        sizes_by_index[pi.mapping[j]] = value
    sizes = dict(zip(cand_ids, sizes_by_index))

    report = MatchReport(
        level=level,
        backend=backend,
        initiator=initiator.party_id,
        candidates=cand_ids,
        sizes=sizes,
        best_match=cand_ids[best_match(sizes_by_index)],
        revealed=list(revealed),
        transcript=run.transcript.summary(),
    )
    report.best_match_view = report.size_multiset
    view = InitiatorView(initiator.party_id, query, shares_a, run.shares_a, revealed)
    return SessionResult(report, run.transcript, view)


def load_profiles(obj: dict) -> List[Profile]:
    """Parse ``{"parties": [{"id": ..., "attributes": [...]}, ...]}``."""
    if not isinstance(obj, dict) or not isinstance(obj.get("parties"), list):
        raise ValueError('profile file must be an object with a "parties" list')
    profiles = []
    for entry in obj["parties"]:
        if not isinstance(entry, dict) or not isinstance(entry.get("id"), str):
            raise ValueError("each party needs a string id")
        attrs = entry.get("attributes")
        if not isinstance(attrs, list):
            raise ValueError(f"party {entry['id']}: attributes must be a list")
        if len(set(attrs)) != len(attrs):
            raise ValueError(f"party {entry['id']}: duplicate attributes")
        profiles.append(Profile(entry["id"], attrs))
    return profiles
