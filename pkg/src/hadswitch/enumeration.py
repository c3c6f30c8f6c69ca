"""Breadth-first generation of Q-, QR- and QC-classes with a resumable on-disk store.

The store is a directory:

``meta.json``
    format tag, version, mode, order, record size and the seed keys.
``keys.log``
    append-only fixed-size records ``(fingerprint u64, flags u8, dual i32, key)``.
    ``dual`` is the record index of the transpose's class (-1 if unknown).
    Flag bit 0 marks a record appended as the transpose of the record just
    before it.
``state.json``
    the frontier pointer ``ctr`` (every record before it has been expanded)
    plus counters; replaced atomically after an fsync of the log.

The frontier is ``records[ctr:]``, so reloading reproduces it exactly.
"""

from __future__ import annotations

import enum
import json
import logging
import os
import struct
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

from .canonical import CanonicalKey, canonical_form, canonical_key, decode_key, fingerprint
from .core import HadamardMatrix, MatrixError, transpose
from .structure import COLUMNS, ROWS, find_closed_quadruples, find_hall_sets
from .switching import switch_closed_quadruple, switch_hall_set

log = logging.getLogger(__name__)

FORMAT = "hadswitch-store"
VERSION = 1
_HEAD = struct.Struct(">QBi")
DUAL_OF_PREV = 1


class StoreError(Exception):
    """Store missing, corrupt, or written by an incompatible run."""


class EnumerationMode(str, enum.Enum):
    Q = "Q"
    QR = "QR"
    QC = "QC"

    @classmethod
    def parse(cls, text: str) -> "EnumerationMode":
        try:
            return cls(text.upper())
        except ValueError as exc:
            raise MatrixError(f"unknown mode {text!r}; expected q, qr or qc") from exc


def switch_kind(mode: EnumerationMode, n: int) -> str:
    """``closed-rows``, ``closed-columns`` or ``hall`` for the given mode and order."""
    if n < 8 or n % 4:
        raise MatrixError(f"switching classes need n >= 8 with n = 0 (mod 4), got {n}")
    if mode is EnumerationMode.Q:
        return "closed-rows" if n % 8 == 0 else "hall"
    if n % 8:
        raise MatrixError(f"{mode.value} mode needs n = 0 (mod 8), got {n}")
    return "closed-rows" if mode is EnumerationMode.QR else "closed-columns"


# ---------------------------------------------------------------------------
# store


@dataclass
class _Record:
    key: bytes
    flags: int
    dual: int


class ClassStore:
    """Directory-backed insertion-ordered set of canonical keys."""

    def __init__(self, path, meta: dict, records: list[_Record], state: dict):
        self.path = Path(path)
        self.meta = meta
        self.records = records
        self.state = state
        self._index: dict[bytes, int] = {r.key: i for i, r in enumerate(records)}
        self._fh = None

    # -- creation / loading -------------------------------------------------

    @classmethod
    def create(cls, path, mode: EnumerationMode, n: int) -> "ClassStore":
        p = Path(path)
        p.mkdir(parents=True, exist_ok=True)
        if (p / "meta.json").exists():
            raise StoreError(f"{p} already holds a store")
        key_bytes = 2 + n * ((n + 7) // 8)
        meta = {"format": FORMAT, "version": VERSION, "mode": mode.value, "n": n,
                "key_bytes": key_bytes, "seed_keys": []}
        _atomic_json(p / "meta.json", meta)
        (p / "keys.log").touch()
        state = {"ctr": 0, "switches": 0, "limited": False}
        _atomic_json(p / "state.json", state)
        return cls(p, meta, [], state)

    @classmethod
    def open(cls, path) -> "ClassStore":
        p = Path(path)
        try:
            meta = json.loads((p / "meta.json").read_text())
            state = json.loads((p / "state.json").read_text())
            raw = (p / "keys.log").read_bytes()
        except FileNotFoundError as exc:
            raise StoreError(f"{p} is not a store: {exc.filename} missing") from exc
        except json.JSONDecodeError as exc:
            raise StoreError(f"{p}: corrupt metadata ({exc})") from exc
        if meta.get("format") != FORMAT or meta.get("version") != VERSION:
            raise StoreError(f"{p}: unsupported store format {meta.get('format')!r} v{meta.get('version')}")
        size = _HEAD.size + meta["key_bytes"]
        whole = len(raw) - len(raw) % size
        if whole != len(raw):
            log.warning("dropping a partial trailing record in %s", p / "keys.log")
            with open(p / "keys.log", "r+b") as fh:
                fh.truncate(whole)
        records = []
        for off in range(0, whole, size):
            fp, flags, dual = _HEAD.unpack_from(raw, off)
            key = raw[off + _HEAD.size: off + size]
            if fingerprint(key) != fp:
                raise StoreError(f"{p}: fingerprint mismatch in record {off // size}")
            records.append(_Record(key, flags, dual))
        if state.get("ctr", 0) > len(records):
            raise StoreError(f"{p}: frontier pointer beyond the end of the log")
        return cls(p, meta, records, state)

    # -- basic accessors ----------------------------------------------------

    @property
    def mode(self) -> EnumerationMode:
        return EnumerationMode(self.meta["mode"])

    @property
    def n(self) -> int:
        return self.meta["n"]

    def __len__(self) -> int:
        return len(self.records)

    def __contains__(self, key) -> bool:
        return _raw(key) in self._index

    def index(self, key) -> int | None:
        return self._index.get(_raw(key))

    def keys(self) -> list[CanonicalKey]:
        return [CanonicalKey(r.key) for r in self.records]

    @property
    def ctr(self) -> int:
        return self.state["ctr"]

    def frontier(self) -> list[CanonicalKey]:
        return [CanonicalKey(r.key) for r in self.records[self.ctr:]]

    @property
    def exhausted(self) -> bool:
        return self.ctr == len(self.records) and not self.state.get("limited", False)

    # -- mutation -----------------------------------------------------------

    def _log(self):
        if self._fh is None:
            self._fh = open(self.path / "keys.log", "ab")
        return self._fh

    def insert(self, key, flags: int = 0, dual: int = -1) -> tuple[int, bool]:
        """Insert if absent; returns ``(index, inserted)``."""
        raw = _raw(key)
        if len(raw) != self.meta["key_bytes"]:
            raise StoreError("key length does not match the store order")
        i = self._index.get(raw)
        if i is not None:
            return i, False
        i = len(self.records)
        self.records.append(_Record(raw, flags, dual))
        self._index[raw] = i
        self._log().write(_HEAD.pack(fingerprint(raw), flags, dual) + raw)
        return i, True

    def snapshot(self) -> None:
        """Flush the log to disk, then atomically publish the frontier pointer."""
        if self._fh is not None:
            self._fh.flush()
            os.fsync(self._fh.fileno())
        _atomic_json(self.path / "state.json", self.state)
        _atomic_json(self.path / "meta.json", self.meta)

    def close(self) -> None:
        self.snapshot()
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def _raw(key) -> bytes:
    return key.data if isinstance(key, CanonicalKey) else bytes(key)


def _atomic_json(path: Path, obj) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def resume(path, mode: EnumerationMode | str | None = None) -> ClassStore:
    """Reopen a store; ``mode``, when given, must match the stored one."""
    store = ClassStore.open(path)
    if mode is not None:
        mode = EnumerationMode.parse(mode) if isinstance(mode, str) else mode
        if mode is not store.mode:
            raise StoreError(f"store was written in mode {store.mode.value}, not {mode.value}")
    return store


# ---------------------------------------------------------------------------
# expansion of one class


def _quadruples(m: HadamardMatrix, kind: str) -> list[tuple[int, ...]]:
    if kind == "hall":
        return [q.indices for q in find_hall_sets(m, ROWS)]
    axis = ROWS if kind == "closed-rows" else COLUMNS
    return [q.indices for q in find_closed_quadruples(m, axis)]


def _switch(m: HadamardMatrix, q, kind: str) -> HadamardMatrix:
    if kind == "hall":
        return switch_hall_set(m, q, 1)
    return switch_closed_quadruple(m, q, 1, ROWS if kind == "closed-rows" else COLUMNS)


def quadruple_orbit_representatives(m: HadamardMatrix, quads, kind: str, generators) -> list[tuple[int, ...]]:
    """Lexicographically least quadruple of each orbit under the automorphisms.

    An automorphism ``(R, C)`` sends row ``R.perm[i]`` to row ``i`` (and
    likewise for columns); switching quadruples in one orbit gives
    equivalent matrices.
    """
    qset = {tuple(q) for q in quads}
    maps = []
    for r, c in generators:
        perm = r.perm if kind in ("hall", "closed-rows") else c.perm
        inv = [0] * len(perm)
        for i, p in enumerate(perm):
            inv[p] = i
        maps.append(inv)
    reps = []
    seen: set[tuple[int, ...]] = set()
    for q in sorted(qset):
        if q in seen:
            continue
        reps.append(q)
        stack = [q]
        seen.add(q)
        while stack:
            x = stack.pop()
            for g in maps:
                y = tuple(sorted(g[i] for i in x))
                if y not in seen and y in qset:
                    seen.add(y)
                    stack.append(y)
    return reps


def expand(key: bytes, kind: str, orbits: bool = True) -> tuple[list[bytes], int]:
    """Canonical keys of every single switch of the class (first occurrence order)."""
    m = decode_key(key)
    quads = _quadruples(m, kind)
    if orbits and len(quads) > 1:
        quads = quadruple_orbit_representatives(m, quads, kind, canonical_form(m).generators)
    out: dict[bytes, None] = {}
    for q in quads:
        out.setdefault(canonical_key(_switch(m, q, kind)).data, None)
    return list(out), len(quads)


def _expand_task(args):
    return expand(*args)


# ---------------------------------------------------------------------------
# the search


@dataclass
class EnumerationReport:
    class_count: int
    exhausted: bool
    mode: str
    n: int
    dual_pairing: list[tuple[str, str]] | None = None
    per_class_stats: list[dict] | None = None
    switches: int = 0

    def as_dict(self) -> dict:
        return asdict(self)


def _insert_with_dual(store: ClassStore, key: bytes, limit: int | None) -> None:
    """Q-mode insertion of a new class and its transpose's class."""
    t = canonical_key(transpose(decode_key(key))).data
    if t == key:
        i = len(store.records)
        store.insert(key, dual=i)
        return
    j = store.index(t)
    if j is not None:
        store.insert(key, dual=j)
        return
    if limit is not None and len(store) + 2 > limit:
        store.insert(key)
        return
    i, _ = store.insert(key, dual=len(store.records) + 1)
    store.insert(t, flags=DUAL_OF_PREV, dual=i)


def enumerate_classes(
    seed: HadamardMatrix | None,
    mode: EnumerationMode | str,
    store: ClassStore,
    limit: int | None = None,
    threads: int = 1,
    no_skip: bool = False,
    orbits: bool = True,
    snapshot_every: float = 30.0,
    details: bool = False,
    progress=None,
) -> EnumerationReport:
    """Run (or continue) the breadth-first class generation into ``store``."""
    mode = EnumerationMode.parse(mode) if isinstance(mode, str) else mode
    if mode is not store.mode:
        raise StoreError(f"store was written in mode {store.mode.value}, not {mode.value}")
    n = store.n
    kind = switch_kind(mode, n)
    if seed is not None:
        if seed.n != n:
            raise StoreError(f"seed order {seed.n} does not match store order {n}")
        if not seed.is_valid:
            raise MatrixError("seed is not a Hadamard matrix")
        sk = canonical_key(seed).data
        if len(store) == 0:
            store.meta["seed_keys"] = [sk.hex()]
            if mode is EnumerationMode.Q:
                _insert_with_dual(store, sk, limit)
            else:
                store.insert(sk)
        elif sk not in store:
            raise StoreError("seed class is not in the existing store; use a fresh store directory")
    elif len(store) == 0:
        raise StoreError("an empty store needs a seed")

    skip_ok = mode is EnumerationMode.Q and n % 8 == 4 and not no_skip and threads <= 1
    store.state["limited"] = False
    last_snap = time.monotonic()
    pool = ProcessPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        while store.ctr < len(store):
            if limit is not None and len(store) >= limit:
                store.state["limited"] = True
                break
            batch_end = min(len(store), store.ctr + (4 * threads if pool else 1))
            todo = []
            for i in range(store.ctr, batch_end):
                rec = store.records[i]
                if skip_ok and rec.flags & DUAL_OF_PREV:
                    todo.append((i, None))
                else:
                    todo.append((i, (rec.key, kind, orbits)))
            work = [t for _, t in todo if t is not None]
            results = iter(pool.map(_expand_task, work) if pool else map(_expand_task, work))
            stopped = False
            for i, task in todo:
                if task is not None:
                    keys, nsw = next(results)
                    store.state["switches"] += nsw
                    for k in keys:
                        if k in store:
                            continue
                        if limit is not None and len(store) >= limit:
                            stopped = True
                            break
                        if mode is EnumerationMode.Q:
                            _insert_with_dual(store, k, limit)
                        else:
                            store.insert(k)
                if stopped:
                    store.state["limited"] = True
                    break
                store.state["ctr"] = i + 1
            if progress is not None:
                progress(store)
            if stopped:
                break
            if time.monotonic() - last_snap > snapshot_every:
                store.snapshot()
                last_snap = time.monotonic()
    finally:
        if pool is not None:
            pool.shutdown()
        store.snapshot()
    return build_report(store, details=details)


# ---------------------------------------------------------------------------
# reporting


@dataclass(frozen=True)
class DualGroup:
    keys: tuple[str, ...]  # hex keys; one entry for self-dual classes
    dual_in_store: bool


def dual_key(store: ClassStore, i: int) -> bytes:
    rec = store.records[i]
    if 0 <= rec.dual < len(store.records):
        return store.records[rec.dual].key
    return canonical_key(transpose(decode_key(rec.key))).data


def partition_dual_pairs(store: ClassStore) -> list[DualGroup]:
    """Group the classes into self-dual singletons and transpose pairs, sorted by key."""
    groups = {}
    for i, rec in enumerate(store.records):
        d = dual_key(store, i)
        if d == rec.key:
            groups[(rec.key,)] = DualGroup((rec.key.hex(),), True)
        else:
            pair = tuple(sorted((rec.key, d)))
            groups[pair] = DualGroup(tuple(k.hex() for k in pair), d in store)
    return [groups[k] for k in sorted(groups)]


def class_stats(key: bytes) -> dict:
    m = decode_key(key)
    stats = {
        "key": key.hex(),
        "closed_row_quadruples": len(find_closed_quadruples(m, ROWS)),
        "closed_column_quadruples": len(find_closed_quadruples(m, COLUMNS)),
    }
    if m.n % 8 == 4:
        stats["hall_sets"] = len(find_hall_sets(m, ROWS))
    return stats


def build_report(store: ClassStore, details: bool = True) -> EnumerationReport:
    rep = EnumerationReport(len(store), store.exhausted, store.mode.value, store.n,
                            switches=store.state.get("switches", 0))
    if details:
        pairs = []
        for i, rec in enumerate(store.records):
            d = dual_key(store, i)
            pairs.append((rec.key.hex(), d.hex()))
        rep.dual_pairing = sorted(pairs)
        rep.per_class_stats = sorted((class_stats(r.key) for r in store.records), key=lambda s: s["key"])
    return rep


def open_or_create(path, mode: EnumerationMode | str, n: int) -> ClassStore:
    mode = EnumerationMode.parse(mode) if isinstance(mode, str) else mode
    if (Path(path) / "meta.json").exists():
        store = resume(path, mode)
        if store.n != n:
            raise StoreError(f"store order {store.n} does not match {n}")
        return store
    return ClassStore.create(path, mode, n)


def run(seed: HadamardMatrix, mode, path, **kw) -> EnumerationReport:
    """Convenience wrapper: open or create the store at ``path`` and enumerate."""
    with open_or_create(path, mode, seed.n) as store:
        return enumerate_classes(seed, mode, store, **kw)
