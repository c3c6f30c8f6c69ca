"""Bounded runs at orders 32 and 36: a capped census and the Smith class of switched matrices."""

import argparse
import tempfile
import time
from dataclasses import dataclass

from hadswitch.canonical import decode_key
from hadswitch.enumeration import ClassStore, run
from hadswitch.invariants import smith_class

from seeds import SEEDS


@dataclass(frozen=True)
class SmokeConfig:
    limit32: int = 1000
    limit36: int = 50
    threads: int = 1


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--limit32", type=int, default=SmokeConfig.limit32)
    ap.add_argument("--limit36", type=int, default=SmokeConfig.limit36)
    ap.add_argument("--threads", type=int, default=SmokeConfig.threads)
    cfg = SmokeConfig(**vars(ap.parse_args()))
    with tempfile.TemporaryDirectory() as tmp:
        t0 = time.perf_counter()
        rep = run(SEEDS["double32"](), "Q", f"{tmp}/s32", limit=cfg.limit32, threads=cfg.threads)
        print(f"order 32: {rep.class_count} classes, exhausted={rep.exhausted} ({time.perf_counter() - t0:.0f}s)")
        t0 = time.perf_counter()
        rep = run(SEEDS["paley2_36"](), "Q", f"{tmp}/s36", limit=cfg.limit36, threads=cfg.threads)
        alphas = sorted({smith_class(decode_key(k.data)) for k in ClassStore.open(f"{tmp}/s36").keys()})
        print(f"order 36: {rep.class_count} classes, Smith classes {alphas} ({time.perf_counter() - t0:.0f}s)")


if __name__ == "__main__":
    main()
