"""Command-line entry point: ``bccradio <codegen|simulate|bench|estimate|topo>``."""

from __future__ import annotations

import argparse
import json
import sys

from ..bcc import build_greedy, build_powermap, codebook_text
from ..channel import scripted_text, stream, topology_text
from .batch import records_csv, run_batch, run_one, run_seeds
from .config import PROTOCOLS, ConfigError, config_from_dict
from .topologies import TopologySpecError, generate_topology, make_provider

_OVERRIDES = ("protocol", "n", "N", "a", "ell", "d_bound", "construction")


def _add_overrides(p: argparse.ArgumentParser, protocol=True) -> None:
    p.add_argument("--config", help="JSON experiment config")
    p.add_argument("--seed", type=int, help="seed (master seed for bench)")
    p.add_argument("--out", help="output path (default: stdout)")
    if protocol:
        p.add_argument("--protocol", choices=PROTOCOLS)
    p.add_argument("--n", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--a", type=int)
    p.add_argument("--ell", type=int)
    p.add_argument("--d-bound", dest="d_bound", type=int)
    p.add_argument("--construction", choices=("auto", "greedy", "powermap"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bccradio", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("codegen", help="emit a codebook file")
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--construction", choices=("greedy", "powermap"), default="greedy")
    p.add_argument("--out")

    p = sub.add_parser("simulate", help="run one simulation and print its metrics record")
    _add_overrides(p)
    p.add_argument("--transcript", help="write the per-slot transcript here")

    p = sub.add_parser("bench", help="run a seeded batch and write CSV")
    _add_overrides(p)
    p.add_argument("--seeds", type=int, help="number of seeds")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--summary", action="store_true", help="print the aggregate summary to stderr")

    p = sub.add_parser("estimate", help="run contention estimation and report sender sets")
    _add_overrides(p, protocol=False)

    p = sub.add_parser("topo", help="emit a topology edge-list file")
    p.add_argument("--config")
    p.add_argument("--kind")
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--width", type=int)
    p.add_argument("--height", type=int)
    p.add_argument("--adversary")
    p.add_argument("--rounds", type=int, default=1, help="rounds to emit for dynamic topologies")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    return parser


def _load_raw(args) -> dict:
    raw: dict = {}
    if args.config:
        try:
            with open(args.config) as fh:
                raw = json.load(fh)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{args.config}: not valid JSON ({e})") from None
    for name in _OVERRIDES:
        value = getattr(args, name, None)
        if value is not None:
            raw[name] = value
    return raw


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_codegen(args) -> int:
    build = build_greedy if args.construction == "greedy" else build_powermap
    _emit(codebook_text(build(args.M, args.a)), args.out)
    return 0


def cmd_simulate(args) -> int:
    cfg = config_from_dict(_load_raw(args))
    seed = args.seed if args.seed is not None else run_seeds(cfg.master_seed, 1)[0]
    rec, metrics = run_one(cfg, seed, transcript=bool(args.transcript or cfg.transcript))
    if args.transcript or cfg.transcript:
        _emit("\n".join(metrics.transcript) + "\n", args.transcript or cfg.transcript)
    out = {**rec.__dict__, "per_node_success": metrics.success}
    _emit(json.dumps(out, sort_keys=True) + "\n", args.out)
    return 0


def cmd_bench(args) -> int:
    raw = _load_raw(args)
    if args.seed is not None or args.seeds is not None:
        seeds = dict(raw.get("seeds") or {})
        if args.seed is not None:
            seeds["master"] = args.seed
        if args.seeds is not None:
            seeds["count"] = args.seeds
        raw["seeds"] = seeds
    cfg = config_from_dict(raw)
    records, summary = run_batch(cfg, workers=args.workers)
    _emit(records_csv(records), args.out or cfg.out)
    if args.summary:
        print(json.dumps(summary, sort_keys=True), file=sys.stderr)
    return 0


def cmd_estimate(args) -> int:
    raw = _load_raw(args)
    raw["protocol"] = "estimation"
    cfg = config_from_dict(raw)
    seed = args.seed if args.seed is not None else run_seeds(cfg.master_seed, 1)[0]
    rec, metrics = run_one(cfg, seed)
    out = {
        "seed": seed,
        "success": rec.success,
        "channel_bits": rec.channel_bits,
        "rounds": rec.rounds,
        "final_k": metrics.extras["final_k"],
        "sender_sets": metrics.extras["sender_sets"],
        "diverged": metrics.extras["diverged"],
    }
    _emit(json.dumps(out, sort_keys=True) + "\n", args.out)
    return 0


def cmd_topo(args) -> int:
    if args.config:
        raw = _load_raw(argparse.Namespace(config=args.config))
        spec = dict(raw.get("topology") or {})
        n = raw.get("n")
        if spec.get("kind") is None:
            raise ConfigError("missing required field 'topology.kind'")
    else:
        if not args.kind:
            raise ConfigError("missing required field 'kind' (or pass --config)")
        spec = {"kind": args.kind}
        for key in ("p", "width", "height", "adversary"):
            if getattr(args, key) is not None:
                spec[key] = getattr(args, key)
        n = args.n
    rng = stream(args.seed, "topology")
    if spec.get("kind") == "dynamic":
        provider = make_provider(spec, n, rng)
        graphs = [provider.topology(r, None) for r in range(args.rounds)]
        _emit(scripted_text(graphs), args.out)
    else:
        _emit(topology_text(generate_topology(spec, n, rng)), args.out)
    return 0


COMMANDS = {
    "codegen": cmd_codegen,
    "simulate": cmd_simulate,
    "bench": cmd_bench,
    "estimate": cmd_estimate,
    "topo": cmd_topo,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, TopologySpecError) as e:
        print(f"bccradio {args.command}: config error: {e}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as e:
        print(f"bccradio {args.command}: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
