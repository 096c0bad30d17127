"""Seeded random decisions and their trace.

Generator identity: numpy PCG64 seeded by ``SeedSequence(master_seed,
spawn_key=(trial,))``. Every draw goes through a decision source, which
appends ``{"kind", "value", "log_prob", "params"}`` to the trace, so a trace
both accounts for the probability of the run and replays it.
"""
import math

import numpy as np

from src.clustering import geometric_radius
from src.errors import ReplayMismatch


def trial_generator(master_seed, trial=0):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(master_seed, spawn_key=(trial,))))


def trace_log_probability(trace):
    return sum(entry["log_prob"] for entry in trace)


class LiveDecisions:
    def __init__(self, rng):
        self.rng = rng
        self.trace = []

    def _record(self, kind, value, log_prob, params):
        self.trace.append({"kind": kind, "value": value, "log_prob": log_prob, "params": params})
        return value

    def uniform_index(self, kind, n):
        value = int(self.rng.integers(n))
        return self._record(kind, value, -math.log(n), {"n": n})

    def coin(self, kind, p_true):
        value = bool(self.rng.random() < p_true)
        prob = p_true if value else 1.0 - p_true
        return self._record(kind, value, math.log(prob) if prob > 0 else -math.inf, {"p": p_true})

    def geometric(self, kind, p):
        u = 1.0 - float(self.rng.random())
        value = geometric_radius(u, p)
        log_prob = math.log(p) + (value - 1) * math.log1p(-p) if p < 1 else 0.0
        return self._record(kind, value, log_prob, {"p": p})

    def subset(self, kind, items, size):
        items = list(items)
        picked = sorted(int(i) for i in self.rng.choice(len(items), size=size, replace=False))
        value = [items[i] for i in picked]
        return self._record(kind, value, -math.log(math.comb(len(items), size)), {"n": len(items), "size": size})

    def note(self, kind, **info):
        return self._record(kind, info, 0.0, {})


class ReplayDecisions:
    """Re-feeds a recorded trace; diverging from it raises ReplayMismatch."""

    def __init__(self, recorded):
        self.recorded = list(recorded)
        self.position = 0
        self.trace = []

    def _next(self, kind, params):
        if self.position >= len(self.recorded):
            raise ReplayMismatch(f"trace exhausted at draw {self.position} ({kind})")
        entry = self.recorded[self.position]
        if entry["kind"] != kind or entry["params"] != params:
            raise ReplayMismatch(
                f"draw {self.position}: recorded {entry['kind']} {entry['params']}, requested {kind} {params}"
            )
        self.position += 1
        self.trace.append(entry)
        return entry["value"]

    def uniform_index(self, kind, n):
        return self._next(kind, {"n": n})

    def coin(self, kind, p_true):
        return self._next(kind, {"p": p_true})

    def geometric(self, kind, p):
        return self._next(kind, {"p": p})

    def subset(self, kind, items, size):
        return list(self._next(kind, {"n": len(list(items)), "size": size}))

    def note(self, kind, **info):
        return self._next(kind, {})


def as_decisions(source):
    """Accept a decision source or a bare numpy Generator."""
    if isinstance(source, (LiveDecisions, ReplayDecisions)):
        return source
    return LiveDecisions(source)
