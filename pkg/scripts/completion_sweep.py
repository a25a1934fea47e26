"""Build and re-validate completion certificates over a random graph corpus."""

from __future__ import annotations

import argparse
import random
import time
from dataclasses import dataclass

from shiftgroups.completion import build_completion, format_certificate, graph_from_matrix, validate_certificate
from shiftgroups.exact_linalg import IntMatrix
from shiftgroups.homology import determinant_of
from shiftgroups.multigraph import is_admissible
from shiftgroups.shift_space import full_space


@dataclass(frozen=True)
class SweepConfig:
    graphs: int = 20
    seed: int = 0
    max_vertices: int = 4
    max_entry: int = 3
    prime_sets: tuple[tuple[int, ...], ...] = ((), (2,), (3,), (2, 3), (2, 3, 5))
    revalidate: bool = True


def corpus(cfg: SweepConfig):
    rng = random.Random(cfg.seed)
    while True:
        n = rng.randint(1, cfg.max_vertices)
        m = IntMatrix.from_rows([[rng.randint(0, cfg.max_entry) for _ in range(n)] for _ in range(n)])
        g = graph_from_matrix(m, name=f"g{rng.randrange(10**6)}")
        if is_admissible(g) and determinant_of(g) != 0:
            yield g


def main(cfg: SweepConfig) -> int:
    start = time.perf_counter()
    failures = 0
    for _, g in zip(range(cfg.graphs), corpus(cfg)):
        for primes in cfg.prime_sets:
            cert = build_completion(g, full_space(g), primes)
            ok = cert.passed
            if cfg.revalidate:
                ok = ok and validate_certificate(format_certificate(cert))[0]
            failures += not ok
            print(f"{g.name} P={set(primes) or '{}'} size={cert.A.rows} edges={len(cert.tilde_graph.edges)} "
                  f"{'ok' if ok else 'FAILED'}")
    print(f"{failures} failures, {time.perf_counter() - start:.2f}s")
    return 1 if failures else 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--graphs", type=int, default=SweepConfig.graphs)
    ap.add_argument("--seed", type=int, default=SweepConfig.seed)
    ap.add_argument("--no-revalidate", action="store_true")
    ns = ap.parse_args()
    raise SystemExit(main(SweepConfig(graphs=ns.graphs, seed=ns.seed, revalidate=not ns.no_revalidate)))
