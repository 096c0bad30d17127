"""k-path / k-cycle solvers built on the covering sampler.

``solve_with_repetition`` samples a low-treewidth set A, runs the exact tree
decomposition DP on G[A] and repeats; a found witness is always re-validated
against the input graph. ``brute_force_paths`` is the exhaustive oracle the DP
is tested against.
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial

import pandas as pd

from src import config
from src.audit import log_info, log_warning
from src.decisions import trial_generator
from src.errors import InvariantViolation, TooLarge, WidthTooLarge
from src.harness import run_trials
from src.instance import lb_value
from src.path_dp import DPResult, PathQuery, dp_longest_path
from src.pattern_cover import sample_cover
from src.validation import ValidationReport

__all__ = [
    "PathQuery",
    "SolveReport",
    "brute_force_paths",
    "covering_family",
    "dp_longest_path",
    "family_coverage",
    "family_size_log",
    "path_weight",
    "solve_with_repetition",
    "validate_witness",
]


@dataclass(frozen=True)
class SolveReport:
    found: bool
    witness: tuple = ()
    trials_used: int = 0
    widths: list = field(default_factory=list)
    weight: Fraction = None

    def to_dict(self):
        return {
            "found": self.found,
            "witness": list(self.witness),
            "trials_used": self.trials_used,
            "widths": list(self.widths),
            "weight": None if self.weight is None else str(self.weight),
        }


def _steps(witness, query):
    pairs = list(zip(witness, witness[1:]))
    if query.kind == "cycle" and witness:
        pairs.append((witness[-1], witness[0]))
    return pairs


def path_weight(g, query, witness):
    return sum((g.weight(u, v) for u, v in _steps(witness, query)), Fraction(0))


def _joined(g, query, u, v):
    return g.has_arc(u, v) if query.directed else g.has_edge(u, v)


def validate_witness(g, query, witness, weight=None):
    report = ValidationReport()
    witness = list(witness)
    if len(witness) != query.k:
        report.fail(f"witness has {len(witness)} vertices, expected {query.k}")
    if len(set(witness)) != len(witness):
        report.fail("witness repeats a vertex")
    missing = [v for v in witness if not g.has_vertex(v)]
    if missing:
        report.fail(f"witness vertices not in the graph: {missing}")
        return report
    for u, v in _steps(witness, query):
        if not _joined(g, query, u, v):
            report.fail(f"{u}->{v} is not {'an arc' if query.directed else 'an edge'}")
    if report.ok and weight is not None and path_weight(g, query, witness) != weight:
        report.fail(f"witness weighs {path_weight(g, query, witness)}, reported {weight}")
    return report


def _successors(g, query, v):
    return [w for w in sorted(g.neighbors(v)) if _joined(g, query, v, w)]


def _walks(g, query):
    """Every simple k-vertex path (or k-cycle listed from its smallest vertex), with weight."""
    for start in g.sorted_vertices():
        stack = [(start, [start], Fraction(0))]
        while stack:
            v, seq, weight = stack.pop()
            if len(seq) == query.k:
                if query.kind == "path":
                    yield seq, weight
                elif _joined(g, query, v, start):
                    yield seq, weight + g.weight(v, start)
                continue
            for w in reversed(_successors(g, query, v)):
                if w in seq or (query.kind == "cycle" and w < start):
                    continue
                stack.append((w, seq + [w], weight + g.weight(v, w)))


def brute_force_paths(g, query, cap=None):
    cap = config.BRUTE_FORCE_CAP if cap is None else cap
    if g.n > cap:
        raise TooLarge(f"brute force is capped at {cap} vertices, graph has {g.n}")
    best = None
    for seq, weight in _walks(g, query):
        if best is None:
            best = (seq, weight)
            if query.objective == "exists":
                break
        elif query.better(weight, best[1]):
            best = (seq, weight)
    if best is None:
        return DPResult(found=False)
    return DPResult(found=True, witness=tuple(best[0]), weight=best[1])


def _solve_trial(g0, query, constants, master_seed, trial):
    rng = trial_generator(master_seed, trial)
    cover = sample_cover(g0.underlying(), query.k, constants, rng)
    record = {"trial": trial, "found": False, "size": len(cover.vertices), "width": cover.width}
    try:
        answer = dp_longest_path(g0.induced(cover.vertices), cover.td, query)
    except WidthTooLarge as exc:
        log_warning(f"trial {trial} (seed {master_seed}): {exc}")
        return {**record, "status": "width"}
    record.update(found=answer.found, witness=answer.witness, weight=answer.weight, status="ok")
    log_info(f"trial {trial} (seed {master_seed}): |A|={record['size']} width={record['width']} found={answer.found}")
    return record


def solve_with_repetition(g0, query, trials, constants, master_seed, workers=1):
    fn = partial(_solve_trial, g0, query, constants)
    records = run_trials(fn, master_seed, trials, workers=workers, stop_on_found=True)
    widths = [r["width"] for r in records]
    hit = next((r for r in records if r["found"]), None)
    if hit is None:
        return SolveReport(found=False, trials_used=len(records), widths=widths)
    report = validate_witness(g0, query, hit["witness"], hit["weight"])
    if not report.ok:
        raise InvariantViolation(f"trial {hit['trial']} produced an invalid witness: {report.first}")
    return SolveReport(True, tuple(hit["witness"]), len(records), widths, hit["weight"])


def _family_trial(g0, k, constants, master_seed, trial):
    cover = sample_cover(g0, k, constants, trial_generator(master_seed, trial))
    return {"trial": trial, "found": False, "cover": cover}


def covering_family(g0, k, trials, constants, master_seed, workers=1):
    fn = partial(_family_trial, g0, k, constants)
    return [r["cover"] for r in run_trials(fn, master_seed, trials, workers=workers)]


def family_coverage(family, patterns):
    rows = []
    for i, X in enumerate(patterns):
        X = frozenset(X)
        members = [j for j, cover in enumerate(family) if X <= cover.vertices]
        rows.append(
            {
                "pattern": i,
                "size": len(X),
                "covered_by": len(members),
                "first_member": members[0] if members else -1,
                "covered": bool(members),
            }
        )
    return pd.DataFrame(rows, columns=["pattern", "size", "covered_by", "first_member", "covered"])


def family_size_log(n, k, constants):
    """Natural log of the repetition count that covers every k-pattern of an n-vertex graph w.h.p."""
    constants = constants.with_k(k)
    log_lb = lb_value(n, max(k - 1, 0), n, k, constants)
    return -log_lb + math.log(2 * k * max(math.log(n), 1.0))
