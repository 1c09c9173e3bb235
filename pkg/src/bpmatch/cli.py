"""Command-line entry point: ``bpmatch keygen|match|bench``."""
import argparse
import json
import os
import random
import sys
from pathlib import Path

from . import bench, bgn, paillier
from .errors import BpMatchError, ProtocolAbort
from .matching import PrivacyLevel, load_profiles, run_session


def _int_list(text: str):
    return [int(x) for x in text.split(",") if x.strip()]


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def cmd_keygen(args) -> int:
    rng = random.Random(args.seed)
    out = Path(args.out)
    if args.backend == "bgn":
        if os.environ.get("BPMATCH_TOY") == "1":
            pk, sk = bgn.toy_keys()
        else:
            pk, sk = bgn.generate_keys(args.t, rng)
        private, public = bgn.keys_to_json(pk, sk), bgn.public_key_to_json(pk)
        print(f"n: {pk.n.bit_length()} bits, p: {pk.curve.p.bit_length()} bits (l = {sk.l})")
    else:
        pk, sk = paillier.generate_keys(args.t, rng)
        private, public = paillier.keys_to_json(pk, sk), paillier.public_key_to_json(pk)
        print(f"N: {pk.n.bit_length()} bits")
    out.write_text(_dump(private))
    out.with_suffix(".pub.json").write_text(_dump(public))
    return 0


def cmd_match(args) -> int:
    try:
        profiles = load_profiles(json.loads(Path(args.profiles).read_text()))
        level = PrivacyLevel.parse(args.level)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        result = run_session(profiles, level, args.backend, random.Random(args.seed), args.t)
    except ProtocolAbort as exc:
        print(f"protocol aborted: {exc}", file=sys.stderr)
        return 2
    except (BpMatchError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    report = _dump(result.report.to_json())
    if args.out:
        out = Path(args.out)
        out.write_text(report)
        if result.transcript is not None:
            transcript_path = Path(args.transcript) if args.transcript else out.with_suffix(".transcript.jsonl")
            transcript_path.write_text(result.transcript.to_jsonl())
    else:
        sys.stdout.write(report)
    return 0


def cmd_bench(args) -> int:
    records = bench.run_bench(args.t, args.ell, args.reps, args.seed)
    text = bench.to_csv(records)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    sys.stdout.write(bench.render_report(records))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bpmatch", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    kg = sub.add_parser("keygen", help="generate a key pair")
    kg.add_argument("--backend", choices=["bgn", "paillier"], default="bgn")
    kg.add_argument("--t", type=int, default=bgn.DEFAULT_T, help="bits per prime")
    kg.add_argument("--seed", type=int, default=None)
    kg.add_argument("--out", required=True, help="private key path; public half goes to <stem>.pub.json")
    kg.set_defaults(func=cmd_keygen)

    m = sub.add_parser("match", help="run a profile matching session")
    m.add_argument("profiles", help='JSON file {"parties": [{"id": ..., "attributes": [...]}]}')
    m.add_argument("--level", default="pl2")
    m.add_argument("--backend", choices=["bgn", "paillier"], default="bgn")
    m.add_argument("--t", type=int, default=bgn.DEFAULT_T)
    m.add_argument("--seed", type=int, default=None)
    m.add_argument("--out", help="report path (default: stdout)")
    m.add_argument("--transcript", help="transcript path (default: <out stem>.transcript.jsonl)")
    m.set_defaults(func=cmd_match)

    b = sub.add_parser("bench", help="measure both backends")
    b.add_argument("--t", type=_int_list, default=[16, 64, 128], help="comma-separated bit sizes")
    b.add_argument("--ell", type=_int_list, default=[8, 16], help="comma-separated BP lengths")
    b.add_argument("--reps", type=int, default=30)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", help="CSV path (default: stdout)")
    b.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    ts = args.t if isinstance(args.t, list) else [args.t]
    toy = args.command == "keygen" and os.environ.get("BPMATCH_TOY") == "1"
    if any(t < bgn.MIN_T for t in ts) and not toy:
        print(f"error: --t must be >= {bgn.MIN_T}", file=sys.stderr)
        return 1
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
