"""Split the 60 order-24 classes into QR-classes grouped by weight-4 word count.

Prints one line per weight-4 count with the sizes of the QR-classes inside it.
"""

import argparse
import tempfile
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path

from hadswitch.canonical import canonical_key, decode_key
from hadswitch.enumeration import ClassStore, EnumerationMode, enumerate_classes, run
from hadswitch.invariants import binary_code_summary

from seeds import SEEDS


@dataclass(frozen=True)
class Table1Config:
    workdir: str


def order24_keys(workdir: Path) -> list[bytes]:
    run(SEEDS["double24"](), "Q", workdir / "q24")
    keys = [k.data for k in ClassStore.open(workdir / "q24").keys()]
    return keys + [canonical_key(SEEDS["paley24"]()).data]


def qr_split(keys: list[bytes], workdir: Path) -> dict[int, list[int]]:
    groups = defaultdict(set)
    for k in keys:
        groups[binary_code_summary(decode_key(k)).weight4_count].add(k)
    out, runs = {}, 0
    for w, left in groups.items():
        sizes = []
        while left:
            runs += 1
            with ClassStore.create(workdir / f"qr{runs}", EnumerationMode.QR, 24) as store:
                enumerate_classes(decode_key(min(left)), "QR", store)
                cls = {r.key for r in store.records}
            sizes.append(len(cls))
            left -= cls
        out[w] = sorted(sizes)
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--workdir", help="scratch directory (default: a temporary one)")
    args = ap.parse_args()
    with tempfile.TemporaryDirectory() as tmp:
        cfg = Table1Config(args.workdir or tmp)
        wd = Path(cfg.workdir)
        keys = order24_keys(wd)
        print(f"{len(keys)} order-24 classes")
        print("w4   classes  QR-class sizes")
        for w, sizes in sorted(qr_split(keys, wd).items(), reverse=True):
            print(f"{w:3d}  {sum(sizes):7d}  {' + '.join(map(str, sizes))}")


if __name__ == "__main__":
    main()
