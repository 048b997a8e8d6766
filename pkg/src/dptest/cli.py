"""Command line entry point and the config-driven experiment runner.

Exit codes: 0 on success, 2 for invalid input or configuration, 3 for a
numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path

from . import formats
from .adversary import CorruptionSpec, random_string
from .amplify import (amplification_ratio, boundary_domain, random_regular_graph,
                      vertex_expansion)
from .certify import certify_coordinate_expansion
from .codec import conflict_profile, majority_decode
from .core import dp_distance, to_fraction
from .errors import DPTestError, NumericFailure, UnsupportedSize
from .spectral import lambda_of
from .tester import rejection_probability_exact, run_test_monte_carlo
from .testgraph import build_family

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3

CLIQUE_LOCAL_FAMILIES = ("sliding", "sliding-sparse", "clique-slice", "j-2-1")
CSV_COLUMNS = ("family", "n", "k", "t", "seed", "corruption", "delta_planted",
               "epsilon", "beta", "bound", "pass")


class StageError(Exception):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.code = EXIT_NUMERIC if isinstance(cause, NumericFailure) else EXIT_INVALID


@contextmanager
def stage(name: str):
    try:
        yield
    except (DPTestError, OSError, ValueError, KeyError, TypeError) as exc:
        raise StageError(name, exc) from exc


def _fraction_text(x) -> str:
    return str(x) if isinstance(x, Fraction) else repr(float(x))


def _instance_bound(family: str, epsilon, certificate) -> tuple[object, str]:
    """Closeness bound implied by the test outcome, if one applies."""
    if family in CLIQUE_LOCAL_FAMILIES:
        return 4 * epsilon, "4eps"
    if certificate is not None and certificate.overall and certificate.soundness \
            and certificate.soundness.positive:
        return float(epsilon) / certificate.soundness.K, "eps/K"
    return None, ""


def _row_passes(beta: Fraction, bound) -> bool | None:
    if bound is None:
        return None
    if isinstance(bound, Fraction):
        return beta <= bound
    return float(beta) <= bound + 1e-12


def _expand_instances(config: dict) -> list[dict]:
    base = {k: v for k, v in config.items() if k != "instances"}
    items = config.get("instances") or [{}]
    out = []
    for item in items:
        merged = {**base, **item}
        seeds = merged.get("seeds", merged.get("seed"))
        if seeds is None:
            raise ValueError("every randomised instance needs 'seed' or 'seeds'")
        if isinstance(seeds, int) and "seeds" in merged:
            seeds = list(range(seeds))
        elif isinstance(seeds, int):
            seeds = [seeds]
        for s in seeds:
            out.append({**merged, "seed": int(s)})
    return out


def run_instance(cfg: dict) -> dict:
    family = cfg["family"]
    n, k, t = int(cfg["n"]), cfg.get("k"), cfg.get("t")
    seed = cfg["seed"]
    with stage("build-domain"):
        dom, graph = build_family(family, n, k, t)
    corruption = cfg.get("corruption", {"kind": "random-set-corruption", "delta": 0})
    with stage("adversary"):
        spec = CorruptionSpec(kind=corruption["kind"], delta=corruption.get("delta"),
                              coordinate=corruption.get("coordinate"),
                              cluster_fraction=corruption.get("fraction"), seed=seed)
        a = random_string(n, seed)
        F = spec.apply(a, dom)
    with stage("decode"):
        _, decoded = majority_decode(F)
        beta = dp_distance(F, decoded)
    tester = cfg.get("tester", {"mode": "exact"})
    with stage("test"):
        if tester.get("mode", "exact") == "exact":
            epsilon = rejection_probability_exact(F, graph).rejection
        else:
            epsilon = run_test_monte_carlo(F, graph, int(tester.get("trials", 10_000)),
                                           seed).rejection
    certificate = None
    if cfg.get("certify"):
        c = cfg["certify"]
        with stage("certify"):
            certificate = certify_coordinate_expansion(
                graph, to_fraction(c["lambda"]), to_fraction(c["rho"]),
                c.get("strategy", "exhaustive"), int(c.get("samples", 64)), seed,
                to_fraction(c.get("c", Fraction(3, 40))))
    bound, _ = _instance_bound(family, epsilon, certificate)
    passed = _row_passes(beta, bound)
    delta = corruption.get("delta")
    return {
        "family": family, "n": n, "k": "" if k is None else k, "t": "" if t is None else t,
        "seed": seed, "corruption": corruption["kind"],
        "delta_planted": "" if delta is None else str(to_fraction(delta)),
        "epsilon": _fraction_text(epsilon), "beta": str(beta),
        "bound": "" if bound is None else _fraction_text(bound),
        "pass": "" if passed is None else str(passed).lower(),
    }


def run_experiment(config: dict) -> list[dict]:
    """Run every instance of ``config`` in seed order and return the CSV rows."""
    with stage("config"):
        instances = _expand_instances(config)
    return [run_instance(cfg) for cfg in instances]


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _flatten(prefix: str, obj, out: list):
    if isinstance(obj, dict):
        for key in sorted(obj):
            _flatten(f"{prefix}.{key}" if prefix else str(key), obj[key], out)
    else:
        out.append((prefix, json.dumps(obj) if isinstance(obj, (list, tuple)) else obj))


def _emit(report: dict, out: str | None, fmt: str) -> None:
    if fmt == "csv":
        pairs: list = []
        _flatten("", report, pairs)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("key", "value"))
        writer.writerows(pairs)
        text = buf.getvalue()
    else:
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_graph(path):
    return formats.graph_from_json(formats.load_json(path))


def cmd_build_domain(args) -> None:
    if args.family == "boundary":
        with stage("build-domain"):
            if args.graph:
                simple = formats.simple_graph_from_json(formats.load_json(args.graph))
            else:
                if args.n is None or args.d is None:
                    raise StageError("build-domain", ValueError(
                        "boundary needs --graph or both --n and --d"))
                simple = random_regular_graph(args.n, args.d, args.seed)
                if args.graph_out:
                    formats.dump_json(formats.simple_graph_to_json(simple), args.graph_out)
            from .amplify import simple_graph_test_graph
            graph = simple_graph_test_graph(simple)
    else:
        with stage("build-domain"):
            if args.n is None:
                raise ValueError("--n is required")
            _, graph = build_family(args.family, args.n, args.k, args.t)
    with stage("write"):
        formats.dump_json(formats.graph_to_json(graph), args.out)
        if args.domain_out:
            formats.dump_json(formats.domain_to_json(graph.dom), args.domain_out)


def cmd_spectrum(args) -> None:
    with stage("load"):
        graph = _load_graph(args.graph)
    with stage("spectrum"):
        report = lambda_of(graph, args.method)
    with stage("write"):
        _emit({"num_vertices": graph.num_vertices, **report.as_dict()}, args.out, args.format)


def cmd_certify(args) -> None:
    with stage("load"):
        graph = _load_graph(args.graph)
    with stage("certify"):
        cert = certify_coordinate_expansion(
            graph, to_fraction(args.lam), to_fraction(args.rho), args.strategy,
            args.samples, args.seed, to_fraction(args.c))
    with stage("write"):
        _emit(cert.as_dict(), args.out, args.format)


def _load_table(args):
    dom = None
    if getattr(args, "graph", None):
        dom = _load_graph(args.graph).dom
    elif getattr(args, "domain", None):
        dom = formats.domain_from_json(formats.load_json(args.domain))
    return formats.table_from_json(formats.load_json(args.table), dom)


def cmd_decode(args) -> None:
    with stage("load"):
        F = _load_table(args)
    with stage("decode"):
        a, decoded = majority_decode(F)
        profile = conflict_profile(F, to_fraction(args.c), to_fraction(args.rho))
    with stage("write"):
        formats.dump_json({**formats.bits_to_json(a),
                           "distance_to_decoding": str(dp_distance(F, decoded))}, args.out)
        if args.profile:
            formats.dump_json(profile.as_dict(), args.profile)


def cmd_test(args) -> None:
    with stage("load"):
        graph = _load_graph(args.graph)
        F = formats.table_from_json(formats.load_json(args.table), graph.dom)
    with stage("test"):
        if args.mode == "exact":
            report = rejection_probability_exact(F, graph)
        else:
            report = run_test_monte_carlo(F, graph, args.trials, args.seed)
    with stage("write"):
        _emit(report.as_dict(), args.out, args.format)


def cmd_adversary(args) -> None:
    with stage("load"):
        if args.graph:
            dom = _load_graph(args.graph).dom
        elif args.domain:
            dom = formats.domain_from_json(formats.load_json(args.domain))
        else:
            raise ValueError("pass --domain or --graph")
        if args.a:
            a = formats.bits_from_json(formats.load_json(args.a), dom.n)
        else:
            a = random_string(dom.n, args.seed)
    with stage("adversary"):
        spec = CorruptionSpec(kind=args.kind, delta=args.delta, coordinate=args.coordinate,
                              cluster_fraction=args.fraction, seed=args.seed)
        F = spec.apply(a, dom)
    with stage("write"):
        formats.dump_json(formats.table_to_json(F), args.out)


def cmd_amplify(args) -> None:
    with stage("load"):
        simple = formats.simple_graph_from_json(formats.load_json(args.graph))
        dom = boundary_domain(simple)
        x = formats.bits_from_json(formats.load_json(args.x), dom.n)
        y = formats.bits_from_json(formats.load_json(args.y), dom.n)
    with stage("amplify"):
        result = amplification_ratio(dom, x, y)
        try:
            est = vertex_expansion(simple, "brute-force")
        except UnsupportedSize:
            est = vertex_expansion(simple, "sampled", samples=args.samples, seed=args.seed)
        d = simple.regular_degree()
        report = {**result.as_dict(), "h": str(est.h), "h_mode": est.mode,
                  "h_witness": sorted(v + 1 for v in est.witness),
                  "claimed_lower_bound": str(est.h * result.delta * d),
                  "claim_holds": result.encoded_distance >= est.h * result.delta * d}
    with stage("write"):
        _emit(report, args.out, args.format)


def cmd_run(args) -> None:
    with stage("config"):
        config = formats.load_json(args.config)
        if args.seed_override is not None:
            config["seeds"] = [args.seed_override]
    rows = run_experiment(config)
    out = args.out or config.get("out")
    with stage("write"):
        if args.format == "json":
            text = json.dumps(rows, indent=2, sort_keys=True) + "\n"
        else:
            text = rows_to_csv(rows)
        if out:
            Path(out).write_text(text)
        else:
            sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--format", choices=("csv", "json"), default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="dptest", parents=[common],
                                     description="Direct product testing laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-domain", parents=[common], help="build a domain and test graph")
    p.add_argument("--family", required=True,
                   choices=("johnson", "sliding", "sliding-sparse", "clique-slice",
                            "j-2-1", "boundary"))
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--d", type=int, help="degree of the random regular graph (boundary)")
    p.add_argument("--graph", help="simple graph JSON for the boundary family")
    p.add_argument("--graph-out", help="where to save a generated random regular graph")
    p.add_argument("--domain-out")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build_domain)

    p = sub.add_parser("spectrum", parents=[common], help="normalised adjacency spectrum")
    p.add_argument("--graph", required=True)
    p.add_argument("--method", choices=("dense", "iterative"))
    p.add_argument("--out")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("certify", parents=[common], help="check coordinate expansion")
    p.add_argument("--graph", required=True)
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--rho", required=True)
    p.add_argument("--strategy", choices=("exhaustive", "sampled"), default="exhaustive")
    p.add_argument("--samples", type=int, default=64)
    p.add_argument("--c", default="3/40")
    p.add_argument("--out")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("decode", parents=[common], help="majority decode a table")
    p.add_argument("--table", required=True)
    p.add_argument("--domain")
    p.add_argument("--graph")
    p.add_argument("--c", default="3/40")
    p.add_argument("--rho", default="1/2")
    p.add_argument("--out", required=True)
    p.add_argument("--profile")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("test", parents=[common], help="rejection probability of a table")
    p.add_argument("--table", required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--mode", choices=("exact", "mc"), default="exact")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("adversary", parents=[common], help="generate a corrupted table")
    p.add_argument("--kind", required=True,
                   choices=("random-set-corruption", "per-set-single-flip",
                            "coordinate-cluster-flip"))
    p.add_argument("--a", help="string JSON; random from --seed when omitted")
    p.add_argument("--domain")
    p.add_argument("--graph")
    p.add_argument("--delta")
    p.add_argument("--coordinate", type=int)
    p.add_argument("--fraction")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_adversary)

    p = sub.add_parser("amplify", parents=[common], help="distance amplification of S_G")
    p.add_argument("--graph", required=True, help="simple regular graph JSON")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--samples", type=int, default=5000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_amplify)

    p = sub.add_parser("run", parents=[common], help="run a JSON experiment config")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_run)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.seed_override = getattr(args, "seed", None)
    if not hasattr(args, "seed"):
        args.seed = 0
    if not hasattr(args, "format"):
        args.format = "csv" if args.command == "run" else "json"
    try:
        args.func(args)
    except StageError as exc:
        print(f"dptest: error in stage {exc}", file=sys.stderr)
        return exc.code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
