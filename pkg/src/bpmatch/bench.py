"""Measurement harness comparing the curve scheme with Paillier.

Operation counts use each scheme's natural unit: curve group additions
(doublings included) for ``bgn`` and modular multiplications for
``paillier`` (exponentiations counted as binary square-and-multiply steps).
All columns except the ``*_us`` timings are functions of the seed.
"""
import csv
import io
import random
import statistics
import time
from dataclasses import asdict, dataclass, field
from typing import Dict, Iterable, List, Sequence

from . import bgn
from .backends import generate_backend
from .bp import BpConfig, additive_split, bp_full_run
from .metering import metering

CSV_COLUMNS = [
    "backend", "t", "ell", "key_bits", "cipher_bytes",
    "enc_ops", "add_ops", "dec_ops", "enc_us", "add_us", "dec_us", "bp_wire_bytes",
]
UNITS = {"bgn": "group additions", "paillier": "modular multiplications"}
WARMUP = 5

# Published comparison figures, shown next to measurements and never checked.
REFERENCE_FIGURES = [
    ("RSA key size at the lowest compared security level", "472 bits"),
    ("ECC key size at the same level", "46 bits"),
    ("Paillier-type (CDRC) encryption cost", "5120 elementary operations"),
    ("RSA encryption cost at equal key size", "17 elementary operations"),
]


@dataclass
class BenchRecord:
    backend: str
    t: int
    ell: int
    key_bits: int
    cipher_bytes: int
    enc_ops: int
    add_ops: int
    dec_ops: int
    enc_us: float
    add_us: float
    dec_us: float
    bp_wire_bytes: int
    # crypto calls per half run, straight from the BP transcript
    bp_ops: Dict[str, Dict[str, int]] = field(default_factory=dict)

    def row(self) -> dict:
        d = asdict(self)
        d.pop("bp_ops")
        return d


def _median_us(fn, reps: int) -> float:
    for _ in range(WARMUP):
        fn()
    samples = []
    for _ in range(reps):
        start = time.perf_counter_ns()
        fn()
        samples.append(time.perf_counter_ns() - start)
    return round(statistics.median(samples) / 1000, 1)


def bench_backend(name: str, t: int, ells: Sequence[int], reps: int = 30, seed: int = 0) -> List[BenchRecord]:
    rng = random.Random(f"{seed}:{name}:{t}")
    backend = generate_backend(name, t, rng)
    config = BpConfig.for_capacity(backend.capacity)
    window = config.window
    m = rng.randint(-config.share_bound, config.share_bound)

    bgn.clear_caches()
    with metering() as meter:
        c = backend.encrypt(m, rng)
    enc_ops = meter.units_for("encrypt")
    c0 = backend.encrypt(0, rng)
    with metering() as meter:
        c2 = backend.hom_add(c, c0, rng)
    add_ops = meter.units_for("hom_add")
    with metering() as meter:
        backend.decrypt(c2, window)
    dec_ops = meter.units_for("decrypt")

    enc_us = _median_us(lambda: backend.encrypt(m, rng), reps)
    add_us = _median_us(lambda: backend.hom_add(c, c, rng), reps)
    dec_us = _median_us(lambda: backend.decrypt(c, window), reps)

    peer = generate_backend(name, t, rng)
    bp_config = BpConfig.for_capacity(min(backend.capacity, peer.capacity))
    records = []
    for ell in ells:
        values = [rng.randint(-bp_config.share_bound // 2, bp_config.share_bound // 2) for _ in range(ell)]
        sa, sb = additive_split(values, rng, bp_config.share_bound)
        run = bp_full_run(backend, peer, sa, sb, rng, bp_config)
        summary = run.transcript.summary()
        records.append(BenchRecord(
            backend=name, t=t, ell=ell,
            key_bits=backend.key_bits(), cipher_bytes=backend.cipher_bytes(),
            enc_ops=enc_ops, add_ops=add_ops, dec_ops=dec_ops,
            enc_us=enc_us, add_us=add_us, dec_us=dec_us,
            bp_wire_bytes=run.transcript.total_bytes,
            bp_ops=summary["ops"],
        ))
    return records


def run_bench(ts: Iterable[int], ells: Sequence[int], reps: int = 30, seed: int = 0) -> List[BenchRecord]:
    records = []
    for t in ts:
        if t < bgn.MIN_T:
            raise ValueError(f"t={t} below floor {bgn.MIN_T}")
        for name in ("bgn", "paillier"):
            records.extend(bench_backend(name, t, ells, reps, seed))
    return records


def to_csv(records: Sequence[BenchRecord]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in records:
        writer.writerow(r.row())
    return buf.getvalue()


def render_report(records: Sequence[BenchRecord]) -> str:
    units = ", ".join(f"{k} = {v}" for k, v in UNITS.items())
    lines = [f"Measured (ops: {units})", ""]
    header = f"{'backend':<9} {'t':>4} {'ell':>4} {'key_bits':>8} {'ct_bytes':>8} " \
             f"{'enc_ops':>8} {'add_ops':>8} {'dec_ops':>8} {'enc_us':>9} {'dec_us':>9} {'wire_B':>8}"
    lines.append(header)
    lines.append("-" * len(header))
    for r in records:
        lines.append(
            f"{r.backend:<9} {r.t:>4} {r.ell:>4} {r.key_bits:>8} {r.cipher_bytes:>8} "
            f"{r.enc_ops:>8} {r.add_ops:>8} {r.dec_ops:>8} {r.enc_us:>9.1f} {r.dec_us:>9.1f} {r.bp_wire_bytes:>8}"
        )
    lines += ["", "Reference figures (cited, not reproduced by this harness):"]
    for label, value in REFERENCE_FIGURES:
        lines.append(f"  {label:<52} {value}")
    lines.append("  These figures use an undefined operation unit and key-equivalence basis;")
    lines.append("  compare them to the measured columns above only qualitatively.")
    return "\n".join(lines) + "\n"
