"""Command-line entry point.

Subcommands: ``reduce`` (emit a reduction descriptor), ``brute`` (exhaustive
oracle), ``bo`` (one BO run over the full reduced domain), ``bounds``
(closed-form calculators as JSON), ``search`` (the full prior-queried cell
search), ``serve`` (standalone expert bridge), and ``bench`` (the
verification suites).

Every emitted artifact embeds the master seed, a canonical config hash and
the tool version; reruns with equal hashes produce equal artifacts modulo
the timestamp fields.  A search waiting on a remote expert that times out
exits with code 75 and writes a resume state file; pass it back via
``--resume`` to continue.  The ``HITLBO_LOG`` environment variable sets the
log level.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__, bench, bo, gp
from .concentration import (mcdiarmid_bound, mean_concentration_bound,
                            path_success, required_samples)
from .expert import MLEExpert, RemoteExpert, SimulatedExpert
from .problems import brute_force_optimum, parse_cnf, parse_graph, vertex_cover_instance
from .reduction import build_reduction, descriptor
from .search import SearchConfig, SearchDriver, SearchSuspended

log = logging.getLogger("hitlbo.cli")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_SUSPENDED = 75


def _canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _config_hash(doc) -> str:
    payload = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def _now_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


def _load_instance(path: str, fmt: str, kind: str | None = None):
    text = Path(path).read_text()
    instance = parse_cnf(text) if fmt == "cnf" else parse_graph(text)
    if kind == "min_vertex_cover":
        instance = vertex_cover_instance(instance.n, instance.edges)
    return instance


def _instance_ref(path: str, fmt: str, kind: str | None = None) -> dict:
    digest = hashlib.sha256(Path(path).read_bytes()).hexdigest()
    ref = {"path": str(path), "format": fmt, "sha256": digest}
    if kind:
        ref["kind"] = kind
    return ref


def _stamp(doc: dict, seed: int, config_doc: dict) -> dict:
    doc["tool_version"] = __version__
    doc["master_seed"] = seed
    doc["config_hash"] = _config_hash(config_doc)
    return doc


def cmd_reduce(args) -> int:
    instance = _load_instance(args.instance, args.format, args.kind)
    rf = build_reduction(instance, seed=args.seed, scale=args.scale)
    doc = descriptor(rf, instance_ref=_instance_ref(args.instance, args.format, args.kind))
    _stamp(doc, args.seed, doc)
    out = Path(args.out or f"reduction-{_config_hash(doc)[:12]}.json")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(_canonical_json(doc))
    print(out)
    return EXIT_OK


def cmd_brute(args) -> int:
    instance = _load_instance(args.instance, args.format, args.kind)
    result = brute_force_optimum(instance, epsilon=args.epsilon)
    doc = {
        "value": result.value,
        "witness": list(result.witness),
        "epsilon": result.epsilon,
        "epsilon_optimal_count": result.epsilon_optimal_count,
        "instance": _instance_ref(args.instance, args.format, args.kind),
    }
    print(_canonical_json(doc), end="")
    return EXIT_OK


def cmd_bo(args) -> int:
    instance = _load_instance(args.instance, args.format, args.kind)
    rf = build_reduction(instance, seed=args.seed, scale=args.scale)
    prior = gp.wiener(args.prior_variance)
    cfg = bo.BOConfig(budget=args.x, acquisition=args.acquisition, seed=args.seed)
    result = bo.run_bo(rf, (rf.d0, rf.d1), prior, cfg)
    doc = result.to_dict()
    doc["instance"] = _instance_ref(args.instance, args.format, args.kind)
    config_doc = {"x": args.x, "acquisition": args.acquisition,
                  "seed": args.seed, "scale": args.scale,
                  "prior_variance": args.prior_variance,
                  "instance": doc["instance"]}
    _stamp(doc, args.seed, config_doc)
    text = _canonical_json(doc)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text)
        print(args.out)
    else:
        print(text, end="")
    return EXIT_OK


def cmd_bounds(args) -> int:
    doc: dict = {"T": args.t_evals, "N": args.n_domain, "epsilon": args.epsilon}
    doc["report"] = bo.make_bound_report(args.t_evals, args.n_domain, args.epsilon).to_dict()
    if args.val is not None:
        doc["cell_ub"] = bo.cell_ub(args.val, args.x, args.n_domain)
    conc = {"m": args.m, "t": args.dev, "a": args.lo, "b": args.hi, "h": args.depth}
    conc["mean_concentration_bound"] = mean_concentration_bound(
        args.m, args.dev, args.lo, args.hi)
    conc["mcdiarmid_uniform_c"] = mcdiarmid_bound(
        [(args.hi - args.lo) / args.m] * args.m, args.dev)
    conc["path_success"] = path_success(args.m, args.dev, args.lo, args.hi, args.depth)
    if args.target is not None:
        conc["required_samples"] = required_samples(
            args.depth, args.dev, args.lo, args.hi, args.target)
        conc["target"] = args.target
    doc["concentration"] = conc
    print(_canonical_json(doc), end="")
    return EXIT_OK


def _search_config(args) -> SearchConfig:
    return SearchConfig(s=args.s, x=args.x, max_expansions=args.max_expansions,
                        epsilon=args.epsilon, acquisition=args.acquisition,
                        scale=args.scale, seed=args.seed)


def _write_run_record(outdir: Path, result, config_doc, seed) -> Path:
    doc = result.to_dict()
    doc["config"] = config_doc
    doc["created_at"] = _now_iso()
    _stamp(doc, seed, config_doc)
    record = outdir / f"{result.run_id}.record.json"
    record.write_text(_canonical_json(doc))
    trace_path = outdir / f"{result.run_id}.trace.csv"
    with trace_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["run_id", "cell_lo", "cell_hi", "sample", "iteration",
                         "point", "value"])
        for lo, hi, s, i, x, v in result.eval_trace:
            writer.writerow([result.run_id, lo, hi, s, i, x, v])
    return record


def cmd_search(args) -> int:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)

    server = None
    registry = None
    if args.resume:
        state = json.loads(Path(args.resume).read_text())
        instance_ref = state["instance_ref"]
        instance = _load_instance(instance_ref["path"], instance_ref["format"],
                                  instance_ref.get("kind"))
        digest = hashlib.sha256(Path(instance_ref["path"]).read_bytes()).hexdigest()
        if digest != instance_ref["sha256"]:
            print("error: instance file changed since suspension", file=sys.stderr)
            return EXIT_ERROR
        expert_mode = state["expert_mode"]
        cfg = SearchConfig.from_dict(state["search"]["config"])
        seed = cfg.seed
        config_doc = state["config_doc"]
    else:
        instance = _load_instance(args.instance, args.format, args.kind)
        instance_ref = _instance_ref(args.instance, args.format, args.kind)
        expert_mode = args.expert
        cfg = _search_config(args)
        seed = args.seed
        config_doc = {"instance": instance_ref, "search": cfg.to_dict(),
                      "expert": expert_mode}
        if expert_mode == "sim":
            config_doc["truth_variance"] = args.truth_variance

    if expert_mode == "sim":
        expert = SimulatedExpert(gp.wiener(config_doc.get("truth_variance", 1.0)))
    elif expert_mode == "mle":
        expert = MLEExpert(gp.wiener(1.0), tolerance=cfg.ledger_tolerance)
    elif expert_mode == "remote":
        from .server import BridgeServer, RunRegistry

        if not args.bind:
            print("error: --expert remote needs --bind host:port", file=sys.stderr)
            return EXIT_USAGE
        host, _, port = args.bind.partition(":")
        registry = RunRegistry()
        server = BridgeServer(registry, host=host or "127.0.0.1", port=int(port or 8732))
        expert = RemoteExpert(registry.bridge, timeout=args.expert_timeout)
    else:
        print(f"error: unknown expert mode {expert_mode!r}", file=sys.stderr)
        return EXIT_USAGE

    run_id = f"run-{_config_hash(config_doc)[:12]}"
    if args.resume:
        driver = SearchDriver.from_state(instance, expert, state["search"])
    else:
        driver = SearchDriver(instance, expert, cfg, run_id=run_id)

    if server is not None:
        registry.attach(driver)
        server.start()
        print(f"expert bridge listening on http://{args.bind}", file=sys.stderr)
    try:
        result = driver.run()
    except SearchSuspended as exc:
        state_doc = {"instance_ref": instance_ref, "expert_mode": expert_mode,
                     "config_doc": config_doc, "search": exc.state,
                     "suspended_at": _now_iso(), "token": exc.token}
        _stamp(state_doc, seed, config_doc)
        state_path = outdir / f"{driver.run_id}.suspended.json"
        state_path.write_text(_canonical_json(state_doc))
        print(f"suspended: {exc.reason}", file=sys.stderr)
        print(f"resume token: {exc.token}", file=sys.stderr)
        print(f"resume state: {state_path}", file=sys.stderr)
        print(state_path)
        return EXIT_SUSPENDED
    finally:
        if server is not None:
            server.stop()

    record = _write_run_record(outdir, result, config_doc, seed)
    print(record)
    log.info("best value %s at point %s after %s evaluations",
             result.best_value, result.best_point, result.total_evaluations)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .server import RunRegistry, create_app

    host, _, port = args.bind.partition(":")
    registry = RunRegistry(expert_timeout=args.expert_timeout)
    app = create_app(registry, console_dir=args.console)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8732),
                log_level=(os.environ.get("HITLBO_LOG") or "info").lower())
    return EXIT_OK


def cmd_bench(args) -> int:
    names = bench.available_suites() if args.suite == "all" else [args.suite]
    unknown = [n for n in names if n not in bench.available_suites()]
    if unknown:
        print(f"error: unknown suite {unknown[0]!r}; valid suites: "
              f"{', '.join(bench.available_suites())} or 'all'", file=sys.stderr)
        return EXIT_USAGE
    all_passed = True
    for name in names:
        result = bench.run_suite(name)
        print(result.line())
        all_passed &= result.passed
    return EXIT_OK if all_passed else EXIT_ERROR


def _add_instance_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--instance", required=True, help="instance file path")
    p.add_argument("--format", choices=("graph", "cnf"), default="graph")
    p.add_argument("--kind", choices=("min_vertex_cover",), default=None,
                   help="reinterpret a graph instance as minimum vertex cover")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hitlbo",
                                     description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", help="emit a reduction descriptor")
    _add_instance_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("brute", help="exhaustive oracle")
    _add_instance_args(p)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.set_defaults(func=cmd_brute)

    p = sub.add_parser("bo", help="one BO run over the full reduced domain")
    _add_instance_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--x", type=int, default=64, help="evaluation budget")
    p.add_argument("--acquisition", choices=("ucb", "ei", "prs"), default="ucb")
    p.add_argument("--prior-variance", type=float, default=1.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bo)

    p = sub.add_parser("bounds", help="closed-form bound calculators")
    p.add_argument("--t-evals", type=int, default=10 ** 7, help="T, evaluations")
    p.add_argument("--n-domain", type=int, default=1 << 100, help="N, domain size")
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--val", type=float, default=None, help="cell value for the ub")
    p.add_argument("--x", type=int, default=256, help="cell budget for the ub")
    p.add_argument("--m", type=int, default=4, help="re-sample count")
    p.add_argument("--dev", type=float, default=0.5, help="deviation t")
    p.add_argument("--lo", type=float, default=0.0, help="value range lower bound a")
    p.add_argument("--hi", type=float, default=1.0, help="value range upper bound b")
    p.add_argument("--depth", type=int, default=10, help="tree depth h")
    p.add_argument("--target", type=float, default=None,
                   help="solve for the m reaching this path-success probability")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("search", help="prior-queried cell-tree search")
    p.add_argument("--instance", help="instance file path")
    p.add_argument("--format", choices=("graph", "cnf"), default="graph")
    p.add_argument("--kind", choices=("min_vertex_cover",), default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--s", type=int, default=4, help="re-samples per cell")
    p.add_argument("--x", type=int, default=32, help="BO budget per re-sample")
    p.add_argument("--max-expansions", type=int, default=16)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--acquisition", choices=("ucb", "ei", "prs"), default="ucb")
    p.add_argument("--expert", choices=("sim", "mle", "remote"), default="sim")
    p.add_argument("--truth-variance", type=float, default=1.0,
                   help="ground-truth prior variance for the simulated expert")
    p.add_argument("--bind", default=None, help="host:port for the remote bridge")
    p.add_argument("--expert-timeout", type=float, default=600.0)
    p.add_argument("--resume", default=None, help="suspended-state file to resume")
    p.add_argument("--out", default="hitlbo-out")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("serve", help="standalone expert bridge server")
    p.add_argument("--bind", default="127.0.0.1:8732")
    p.add_argument("--expert-timeout", type=float, default=None,
                   help="per-query timeout for server-hosted runs (default: wait)")
    p.add_argument("--console", default=None,
                   help="directory with the built console to serve at /")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("bench", help="verification suites")
    p.add_argument("suite", nargs="?", default="all")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    level = (os.environ.get("HITLBO_LOG") or "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "search" and not args.resume and not args.instance:
        parser.error("search needs --instance (or --resume)")
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
