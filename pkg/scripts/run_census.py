"""Run one class census from a named seed and print its report.

    python3 scripts/run_census.py double24 --mode Q --store /tmp/c24
"""

import argparse
import json
import time
from dataclasses import asdict, dataclass

from hadswitch.enumeration import run

from seeds import SEEDS


@dataclass(frozen=True)
class CensusConfig:
    seed: str
    store: str
    mode: str = "Q"
    limit: int | None = None
    threads: int = 1
    orbits: bool = True


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("seed", choices=sorted(SEEDS))
    ap.add_argument("--store", required=True)
    ap.add_argument("--mode", default="Q")
    ap.add_argument("--limit", type=int)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--no-orbits", dest="orbits", action="store_false")
    cfg = CensusConfig(**vars(ap.parse_args()))
    print("# config", json.dumps(asdict(cfg)))
    t0 = time.perf_counter()
    rep = run(SEEDS[cfg.seed](), cfg.mode, cfg.store, limit=cfg.limit, threads=cfg.threads, orbits=cfg.orbits)
    print(f"{rep.class_count} classes, exhausted={rep.exhausted}, {rep.switches} switches, "
          f"{time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
