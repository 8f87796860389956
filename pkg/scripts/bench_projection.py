"""Time project() against the brute-force oracle on random (query, target) pairs.

Prints one line per target size: pairs, mean matches, and mean milliseconds
per pair for each engine.  Counts are cross-checked on every pair.
"""

from __future__ import annotations

import argparse
import random
import sys
import time
from dataclasses import dataclass, fields
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from generators import random_dag_vocabulary, random_query_pair  # noqa: E402
from pci.projection import ORACLE_MAX_NODES, count_projections_oracle, project  # noqa: E402


@dataclass(frozen=True)
class BenchConfig:
    seed: int = 7
    pairs: int = 200
    min_nodes: int = 2
    max_nodes: int = 8
    nest_depth: int = 1
    themes: int = 10
    relations: int = 4
    nestings: int = 2


def parse_config(argv: list[str] | None = None) -> BenchConfig:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f in fields(BenchConfig):
        parser.add_argument(f"--{f.name.replace('_', '-')}", type=int, default=f.default)
    return BenchConfig(**vars(parser.parse_args(argv)))


def run(cfg: BenchConfig) -> list[str]:
    if cfg.max_nodes > ORACLE_MAX_NODES:
        raise SystemExit(f"--max-nodes above the oracle limit ({ORACLE_MAX_NODES})")
    rng = random.Random(cfg.seed)
    lines = [f"{'nodes':>5} {'pairs':>6} {'matches':>8} {'project ms':>11} {'oracle ms':>10}"]
    for size in range(cfg.min_nodes, cfg.max_nodes + 1):
        t_fast = t_slow = 0.0
        total = 0
        for _ in range(cfg.pairs):
            v = random_dag_vocabulary(rng, cfg.themes, cfg.relations, cfg.nestings)
            q, t = random_query_pair(rng, v, size, cfg.nest_depth)
            s = time.perf_counter()
            fast = len(project(q, t, v))
            t_fast += time.perf_counter() - s
            s = time.perf_counter()
            slow = count_projections_oracle(q, t, v)
            t_slow += time.perf_counter() - s
            if fast != slow:
                raise SystemExit(f"disagreement at size {size}: project={fast} oracle={slow}")
            total += fast
        n = cfg.pairs
        lines.append(f"{size:>5} {n:>6} {total / n:>8.2f} {1000 * t_fast / n:>11.3f} {1000 * t_slow / n:>10.3f}")
    return lines


if __name__ == "__main__":
    print("\n".join(run(parse_config())))
