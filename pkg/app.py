# app.py: patcover command line
# -------------------------------
# Subcommands:
# - sample                  -> one covering sample (A, decomposition, trace); --replay re-feeds a trace
# - cluster                 -> one ball-carving run with its certificate check
# - duality                 -> separator chain or path family between s and t
# - solve                   -> k-path / k-cycle by repeated sampling + DP
# - family                  -> covering family and coverage of supplied patterns
# - validate-decomposition  -> check a PACE .td against a graph
# - estimate                -> Monte-Carlo claim with Hoeffding interval
# - gen                     -> fixture graphs and planted patterns
# Every command prints one JSON envelope and exits with the error's exit code on failure.

import argparse
import json
import sys

from src import config
from src.audit import configure_logging, log_error, log_info
from src.clustering import cluster, verify_cluster
from src.config import RunConfig
from src.corpus import KINDS, PLANTS, gen_corpus
from src.decisions import LiveDecisions, ReplayDecisions, trace_log_probability, trial_generator
from src.errors import BadParams, PatcoverError, ReplayMismatch, ValidationFailed
from src.graph_adapter import (
    dumps,
    format_edgelist,
    read_decomposition,
    read_graph,
    read_json,
    read_vertex_set,
    write_decomposition,
    write_json,
)
from src.harness import CLAIMS, estimate
from src.instance import Constants
from src.path_dp import KINDS as QUERY_KINDS
from src.path_dp import OBJECTIVES
from src.pattern_cover import PatternProbe, sample_cover
from src.separator_duality import duality, validate_chain, validate_paths
from src.solvers import PathQuery, covering_family, family_coverage, solve_with_repetition
from src.tree_decomposition import validate


# -----------------------------
# Helpers
# -----------------------------
def ok(data=None, message="success"):
    return {"schema": config.SCHEMA, "status": "success", "message": message, "data": data or {}}


def fail(message="Something went wrong", error=None):
    payload = {"schema": config.SCHEMA, "status": "error", "message": message}
    if error:
        payload["error"] = str(error)
    return payload


def _constants(cfg):
    return Constants.from_config(cfg)


def _recorded_trace(payload):
    """A trace file is either the trace list or a saved sample envelope."""
    if isinstance(payload, list):
        return payload, None
    body = payload.get("data", payload)
    if "trace" not in body:
        raise BadParams("replay file holds no trace")
    return body["trace"], body.get("A")


# -----------------------------
# Commands
# -----------------------------
def cmd_sample(args, cfg):
    g = read_graph(cfg.graph_path)
    constants = _constants(cfg)
    recorded_a = None
    if args.replay:
        trace, recorded_a = _recorded_trace(read_json(args.replay))
        source = ReplayDecisions(trace)
    else:
        source = LiveDecisions(trial_generator(cfg.seed, 0))
    probe = PatternProbe(read_vertex_set(args.pattern), constants.with_k(cfg.k)) if args.pattern else None
    result = sample_cover(g, cfg.k, constants, source, probe=probe, root=args.root)
    if recorded_a is not None and sorted(result.vertices) != list(recorded_a):
        raise ReplayMismatch("replayed run produced a different set A")
    if args.td_out:
        write_decomposition(args.td_out, result.td, g.n)
    data = result.to_dict()
    data["log_probability"] = trace_log_probability(result.trace)
    data["constants"] = constants.with_k(cfg.k).to_dict()
    return data, "Sample replayed" if args.replay else "Sample drawn"


def cmd_cluster(args, cfg):
    g = read_graph(cfg.graph_path)
    ghosts = read_vertex_set(args.ghosts) if args.ghosts else frozenset()
    result = cluster(g, ghosts, cfg.k, LiveDecisions(trial_generator(cfg.seed, 0)))
    report = verify_cluster(g, result, cfg.k, ghosts)
    if not report.ok:
        raise ValidationFailed(f"clustering certificate failed: {report.first}")
    return {**result.to_dict(), "check": report.to_dict()}, "Clustering done"


def cmd_duality(args, cfg):
    g = read_graph(cfg.graph_path)
    outcome = duality(g, args.s, args.t, args.p, args.q)
    if outcome.kind == "chain":
        report = validate_chain(g, args.s, args.t, outcome.chain.chain, args.q)
    else:
        report = validate_paths(g, args.s, args.t, outcome.paths.paths, args.p)
    return {"kind": outcome.kind, **outcome.to_dict(), "check": report.to_dict()}, f"Duality gave {outcome.kind}"


def cmd_solve(args, cfg):
    g = read_graph(cfg.graph_path)
    query = PathQuery(args.kind, cfg.k, directed=args.directed, objective=args.objective)
    report = solve_with_repetition(g, query, cfg.trials, _constants(cfg), cfg.seed, workers=cfg.workers)
    return {"query": query.to_dict(), **report.to_dict()}, "Found" if report.found else "Not found"


def cmd_family(args, cfg):
    g = read_graph(cfg.graph_path)
    family = covering_family(g, cfg.k, cfg.trials, _constants(cfg), cfg.seed, workers=cfg.workers)
    data = {"members": [{"A": sorted(c.vertices), "width": c.width} for c in family]}
    if args.patterns:
        table = family_coverage(family, [frozenset(p) for p in read_json(args.patterns)])
        if args.csv:
            table.to_csv(args.csv, index=False)
        data["coverage"] = json.loads(table.to_json(orient="records"))
        data["covered_fraction"] = float(table["covered"].mean()) if len(table) else None
    return data, f"Family of {len(family)} sets"


def cmd_validate_decomposition(args, cfg):
    g = read_graph(cfg.graph_path)
    td = read_decomposition(args.td)
    report = validate(g, td)
    if not report.ok:
        raise ValidationFailed(f"invalid decomposition: {report.first}")
    return {"width": td.width, "bags": len(td.bags), "check": report.to_dict()}, "Decomposition is valid"


def cmd_estimate(args, cfg):
    g = read_graph(cfg.graph_path)
    X = read_vertex_set(args.pattern) if args.pattern else frozenset()
    constants = _constants(cfg) if args.claim == "sampler-coverage" else None
    report, frame = estimate(
        args.claim, g, cfg.k, X, cfg.trials, cfg.seed, cfg.confidence,
        constants=constants, workers=cfg.workers, with_records=True,
    )
    if args.csv:
        frame.to_csv(args.csv, index=False)
    return report.to_dict(), f"Estimate {report.verdict or 'reported'}"


def cmd_gen(args, cfg):
    params = {name: getattr(args, name) for name in ("rows", "cols", "n") if getattr(args, name) is not None}
    item = gen_corpus(args.kind, params, trial_generator(cfg.seed, 0), k=cfg.k, plant=args.plant)
    text = format_edgelist(item.graph)
    data = item.to_dict()
    if args.graph_out:
        with open(args.graph_out, "w") as fh:
            fh.write(text)
    else:
        data["edgelist"] = text
    if args.pattern_out and item.pattern is not None:
        write_json(args.pattern_out, sorted(item.pattern))
    return data, f"Generated {args.kind}"


COMMANDS = {
    "sample": cmd_sample,
    "cluster": cmd_cluster,
    "duality": cmd_duality,
    "solve": cmd_solve,
    "family": cmd_family,
    "validate-decomposition": cmd_validate_decomposition,
    "estimate": cmd_estimate,
    "gen": cmd_gen,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="patcover", description="Low-treewidth pattern covering sampler")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, k=True, seed=True):
        p.add_argument("--graph", required=True, help="edge-list file")
        if k:
            p.add_argument("--k", type=int, required=True)
        if seed:
            p.add_argument("--seed", type=int)
        p.add_argument("--scale", type=float)
        p.add_argument("--ctw", type=int)
        p.add_argument("--out", help="also write the JSON envelope here")
        return p

    p = common(sub.add_parser("sample"))
    p.add_argument("--pattern", help="vertex set to thread through the run")
    p.add_argument("--root", type=int, help="condition the run on this root")
    p.add_argument("--replay", help="trace JSON (or saved sample output) to re-feed")
    p.add_argument("--td-out", dest="td_out", help="write the decomposition as PACE .td")

    p = common(sub.add_parser("cluster"))
    p.add_argument("--ghosts", help="ghost vertex set")

    p = common(sub.add_parser("duality"), k=False, seed=False)
    for name in ("s", "t", "p", "q"):
        p.add_argument(f"--{name}", type=int, required=True)

    p = common(sub.add_parser("solve"))
    p.add_argument("--kind", choices=QUERY_KINDS, default="path")
    p.add_argument("--directed", action="store_true")
    p.add_argument("--objective", choices=OBJECTIVES, default="exists")
    p.add_argument("--trials", type=int)
    p.add_argument("--workers", type=int)

    p = common(sub.add_parser("family"))
    p.add_argument("--trials", type=int)
    p.add_argument("--patterns", help="JSON list of vertex lists")
    p.add_argument("--csv", help="write the coverage table as CSV")
    p.add_argument("--workers", type=int)

    p = common(sub.add_parser("validate-decomposition"), k=False, seed=False)
    p.add_argument("--td", required=True)

    p = common(sub.add_parser("estimate"))
    p.add_argument("claim", choices=CLAIMS)
    p.add_argument("--pattern")
    p.add_argument("--trials", type=int)
    p.add_argument("--confidence", type=float)
    p.add_argument("--csv", help="write per-trial records as CSV")
    p.add_argument("--workers", type=int)

    p = sub.add_parser("gen")
    p.add_argument("kind", choices=KINDS)
    p.add_argument("--rows", type=int)
    p.add_argument("--cols", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--plant", choices=PLANTS)
    p.add_argument("--seed", type=int)
    p.add_argument("--graph-out", dest="graph_out")
    p.add_argument("--pattern-out", dest="pattern_out")
    p.add_argument("--out")
    return parser


def run(argv=None, stdout=None):
    """Parse, dispatch and print one envelope; returns the exit status."""
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    configure_logging(config.AUDIT_LOG, config.LOG_LEVEL)
    try:
        cfg = RunConfig.from_args(args)
        data, message = COMMANDS[args.command](args, cfg)
        payload, status = ok(data, message), 0
        log_info(f"{args.command}: {message}")
    except PatcoverError as e:
        log_error(f"{args.command} failed: {e}")
        payload, status = fail(f"{args.command} failed", e), e.exit_code
    text = dumps(payload)
    if getattr(args, "out", None):
        write_json(args.out, payload)
    stdout.write(text + "\n")
    return status


# -----------------------------
# Entrypoint
# -----------------------------
if __name__ == "__main__":
    sys.exit(run())
