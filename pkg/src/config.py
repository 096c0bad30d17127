import os
from dataclasses import dataclass
from typing import Optional

from src.errors import BadParams

SCHEMA = "patcover/1"

# Defaults (env vars override, CLI flags override both)
DEFAULT_SCALE = float(os.getenv("PATCOVER_SCALE", "1.0"))
DEFAULT_CTW = int(os.getenv("PATCOVER_CTW", "10"))
DP_WIDTH_BUDGET = int(os.getenv("PATCOVER_DP_WIDTH_BUDGET", "14"))
BRUTE_FORCE_CAP = int(os.getenv("PATCOVER_BRUTE_FORCE_CAP", "16"))
DEFAULT_CONFIDENCE = float(os.getenv("PATCOVER_CONFIDENCE", "0.99"))
DEFAULT_WORKERS = int(os.getenv("PATCOVER_WORKERS", "1"))
MIN_FILL_LIMIT = int(os.getenv("PATCOVER_MIN_FILL_LIMIT", "1500"))
TRIVIAL_K = os.getenv("PATCOVER_TRIVIAL_K")
AUDIT_LOG = os.getenv("PATCOVER_AUDIT_LOG")
LOG_LEVEL = os.getenv("PATCOVER_LOG_LEVEL", "INFO")

RANDOMIZED = {"sample", "cluster", "solve", "family", "estimate", "gen"}


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    graph_path: Optional[str] = None
    k: Optional[int] = None
    seed: Optional[int] = None
    scale: float = DEFAULT_SCALE
    c_tw: int = DEFAULT_CTW
    trials: int = 1
    out_path: Optional[str] = None
    confidence: float = DEFAULT_CONFIDENCE
    workers: int = DEFAULT_WORKERS

    def __post_init__(self):
        if self.subcommand in RANDOMIZED and self.seed is None:
            raise BadParams(f"'{self.subcommand}' is randomized: --seed is required")
        if not 0 < self.scale <= 1:
            raise BadParams(f"scale must lie in (0, 1], got {self.scale}")
        if self.k is not None and self.k < 1:
            raise BadParams(f"k must be positive, got {self.k}")
        if self.trials < 1:
            raise BadParams(f"trials must be positive, got {self.trials}")
        if not 0 < self.confidence < 1:
            raise BadParams(f"confidence must lie in (0, 1), got {self.confidence}")
        if self.c_tw < 1:
            raise BadParams(f"c_tw must be positive, got {self.c_tw}")
        if self.workers < 1:
            raise BadParams(f"workers must be positive, got {self.workers}")

    @classmethod
    def from_args(cls, args):
        def pick(name, default):
            value = getattr(args, name, None)
            return default if value is None else value

        return cls(
            subcommand=args.command,
            graph_path=pick("graph", None),
            k=pick("k", None),
            seed=pick("seed", None),
            scale=pick("scale", DEFAULT_SCALE),
            c_tw=pick("ctw", DEFAULT_CTW),
            trials=pick("trials", 1),
            out_path=pick("out", None),
            confidence=pick("confidence", DEFAULT_CONFIDENCE),
            workers=pick("workers", DEFAULT_WORKERS),
        )
