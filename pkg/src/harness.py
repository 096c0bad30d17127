"""Seeded trial driver and Monte-Carlo estimates with Hoeffding intervals."""
import concurrent.futures
from dataclasses import dataclass
from fractions import Fraction
from functools import partial
from typing import Optional

import numpy as np
import pandas as pd

from src.audit import log_info
from src.clustering import cluster, verify_cluster
from src.decisions import LiveDecisions, trial_generator
from src.errors import BadParams
from src.pattern_cover import sample_cover

CLAIMS = ("cluster-coverage", "cluster-abort", "cluster-radius", "sampler-coverage")


def hoeffding_half_width(n_trials, confidence):
    """sqrt(ln(2/delta) / 2N) with delta = 1 - confidence."""
    delta = 1.0 - confidence
    return float(np.sqrt(np.log(2.0 / delta) / (2.0 * n_trials)))


@dataclass(frozen=True)
class StatReport:
    claim: str
    estimate: Fraction
    n_trials: int
    half_width: float
    confidence: float
    bound: Optional[Fraction] = None
    direction: Optional[str] = None  # lower | upper | zero
    verdict: Optional[str] = None

    @property
    def passed(self):
        return self.verdict == "pass"

    def to_dict(self):
        return {
            "claim": self.claim,
            "estimate": str(self.estimate),
            "estimate_float": float(self.estimate),
            "n_trials": self.n_trials,
            "half_width": self.half_width,
            "confidence": self.confidence,
            "bound": None if self.bound is None else str(self.bound),
            "direction": self.direction,
            "verdict": self.verdict,
        }


def run_trials(fn, master_seed, trials, workers=1, stop_on_found=False):
    """Run fn(master_seed, trial) for trial = 0..trials-1 and return the records by trial index.

    With stop_on_found the records end at the lowest-index record whose
    ``found`` is true, whatever the worker count.
    """
    if trials < 1:
        raise BadParams(f"trials must be positive, got {trials}")
    records = []
    if workers <= 1:
        for trial in range(trials):
            record = fn(master_seed, trial)
            records.append(record)
            if stop_on_found and record.get("found"):
                break
        return records

    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as executor:
        futures = [executor.submit(fn, master_seed, trial) for trial in range(trials)]
        for future in futures:
            record = future.result()
            records.append(record)
            if stop_on_found and record.get("found"):
                for pending in futures:
                    pending.cancel()
                break
    return records


def records_frame(records):
    """Per-trial records as a table; non-scalar columns are dropped."""
    scalar = (bool, int, float, str, Fraction, type(None))
    rows = [{key: v for key, v in r.items() if isinstance(v, scalar)} for r in records]
    frame = pd.DataFrame(rows)
    if "trial" in frame.columns:
        frame = frame.sort_values("trial").reset_index(drop=True)
    return frame


def _estimate_trial(claim, g, k, X, constants, master_seed, trial):
    rng = trial_generator(master_seed, trial)
    if claim == "sampler-coverage":
        cover = sample_cover(g, k, constants, rng)
        return {"trial": trial, "hit": X <= cover.vertices, "size": len(cover.vertices), "width": cover.width}
    result = cluster(g, frozenset(), k, LiveDecisions(rng))
    if claim == "cluster-coverage":
        return {"trial": trial, "hit": X <= result.kept, "aborted": result.aborted}
    if claim == "cluster-abort":
        return {"trial": trial, "hit": result.aborted}
    report = verify_cluster(g, result, k)
    return {"trial": trial, "hit": not report.ok, "aborted": result.aborted, "violation": report.first}


def _verdict(claim, estimate, half_width, k, hits):
    if claim == "cluster-coverage":
        bound = 1 - Fraction(1, k)
        return bound, "lower", "pass" if float(estimate) - half_width >= bound else "fail"
    if claim == "cluster-abort":
        bound = Fraction(1, 2 * k)
        return bound, "upper", "pass" if float(estimate) <= bound + half_width else "fail"
    if claim == "cluster-radius":
        return Fraction(0), "zero", "pass" if hits == 0 else "fail"
    return None, None, None


def estimate(claim, g, k, X, trials, master_seed, confidence, constants=None, workers=1, with_records=False):
    """Monte-Carlo estimate of a claim's event frequency.

    cluster-coverage is P(X kept), cluster-abort the abort rate,
    cluster-radius the fraction of runs whose kept components break the
    radius certificate, sampler-coverage P(X inside the sampled set).
    """
    if claim not in CLAIMS:
        raise BadParams(f"claim must be one of {CLAIMS}, got {claim!r}")
    if claim == "sampler-coverage" and constants is None:
        raise BadParams("sampler-coverage needs sampler constants")
    fn = partial(_estimate_trial, claim, g, k, frozenset(X or ()), constants)
    records = run_trials(fn, master_seed, trials, workers=workers)
    hits = sum(1 for r in records if r["hit"])
    value = Fraction(hits, len(records))
    half = hoeffding_half_width(len(records), confidence)
    bound, direction, verdict = _verdict(claim, value, half, k, hits)
    report = StatReport(claim, value, len(records), half, confidence, bound, direction, verdict)
    log_info(f"estimate {claim}: {hits}/{len(records)} +- {half:.4f} verdict={verdict}")
    if with_records:
        return report, records_frame(records)
    return report
