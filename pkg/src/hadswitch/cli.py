"""Command-line entry point: gen, analyze, switch, canon, enumerate, report, selftest."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .canonical import CanonicalKey, canonical_key, decode_key, to_graph
from .constructions import double, load_seed, paley, sylvester
from .core import HadamardMatrix, MatrixError, SignedPermutation, apply, from_text, to_text, transpose, verify
from .enumeration import EnumerationMode, StoreError, build_report, open_or_create, enumerate_classes, resume
from .invariants import InvariantViolation, binary_code_summary, smith_form
from .structure import COLUMNS, ROWS, find_closed_quadruples, find_hall_sets, type_histogram
from .switching import switch_closed_quadruple, switch_hall_set

log = logging.getLogger("hadswitch")

EXIT_OK, EXIT_DOMAIN, EXIT_IO = 0, 1, 2


class IOFailure(Exception):
    pass


# ---------------------------------------------------------------------------
# helpers


def _read_matrix(path: str | None) -> HadamardMatrix:
    try:
        text = sys.stdin.read() if path in (None, "-") else Path(path).read_text()
    except OSError as exc:
        raise IOFailure(f"cannot read {path}: {exc.strerror}") from exc
    return from_text(text)


def _read_valid(path: str | None) -> HadamardMatrix:
    m = _read_matrix(path)
    if not m.is_valid:
        raise MatrixError(f"{path or 'stdin'}: rows are not mutually orthogonal; not a Hadamard matrix")
    return m


def _write_matrix(m: HadamardMatrix, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(to_text(m))
        return
    try:
        Path(path).write_text(to_text(m))
    except OSError as exc:
        raise IOFailure(f"cannot write {path}: {exc.strerror}") from exc


def _emit(obj, as_json: bool, text: str) -> None:
    if as_json:
        sys.stdout.write(json.dumps(obj, indent=1, sort_keys=True) + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _header(args) -> None:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    print("# config " + json.dumps(cfg, sort_keys=True), file=sys.stderr)


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen(args) -> int:
    if args.kind == "sylvester":
        m = sylvester(int(args.params[0]))
    elif args.kind in ("paley1", "paley2"):
        m = paley(int(args.params[0]), 1 if args.kind == "paley1" else 2)
    else:
        if len(args.params) != 2:
            raise MatrixError("gen double needs two input files")
        a = load_seed(args.params[0])
        b = load_seed(args.params[1])
        perm = None
        if args.perm:
            try:
                perm = [int(x) for x in Path(args.perm).read_text().split()]
            except OSError as exc:
                raise IOFailure(f"cannot read {args.perm}: {exc.strerror}") from exc
        m = double(a, b, perm, "Htilde" if args.tilde else "H")
    _write_matrix(m, args.out)
    return EXIT_OK


def analysis(m: HadamardMatrix) -> dict:
    n = m.n
    out: dict = {
        "order": n,
        "closed_quadruples": {"rows": len(find_closed_quadruples(m, ROWS)),
                              "columns": len(find_closed_quadruples(m, COLUMNS))},
        "hall_sets": {"rows": len(find_hall_sets(m, ROWS)), "columns": len(find_hall_sets(m, COLUMNS))},
    }
    if 4 <= n <= 28:
        out["type_histogram"] = {str(k): v for k, v in type_histogram(m).items()}
    sf = smith_form(m)
    out["smith_factors"] = list(sf.factors)
    if sf.alpha is not None:
        out["smith_class"] = sf.alpha
    code = binary_code_summary(m, COLUMNS)
    out["column_code"] = {"dimension": code.dimension, "self_dual": code.self_dual,
                          "weight4_count": code.weight4_count}
    return out


def _analysis_text(a: dict) -> str:
    lines = [
        f"order {a['order']}",
        f"closed quadruples: rows {a['closed_quadruples']['rows']}, columns {a['closed_quadruples']['columns']}",
        f"Hall sets: rows {a['hall_sets']['rows']}, columns {a['hall_sets']['columns']}",
    ]
    if "type_histogram" in a:
        lines.append("quadruple types: " + ", ".join(f"r={k}: {v}" for k, v in a["type_histogram"].items()))
    lines.append("Smith factors: " + " ".join(map(str, a["smith_factors"])))
    if "smith_class" in a:
        lines.append(f"Smith class alpha = {a['smith_class']}")
    c = a["column_code"]
    lines.append(f"column code: dimension {c['dimension']}, self-dual {'yes' if c['self_dual'] else 'no'}, "
                 f"weight-4 words {c['weight4_count']}")
    return "\n".join(lines)


def cmd_analyze(args) -> int:
    m = _read_valid(args.input)
    a = analysis(m)
    _emit(a, args.json, _analysis_text(a))
    return EXIT_OK


def cmd_switch(args) -> int:
    m = _read_valid(args.input)
    try:
        idx = [int(x) for x in args.rows.split(",")]
    except ValueError as exc:
        raise MatrixError(f"--rows must be four comma-separated integers, got {args.rows!r}") from exc
    if len(idx) != 4:
        raise MatrixError("--rows needs exactly four indices")
    if args.hall:
        out = switch_hall_set(m, idx, args.field)
    else:
        out = switch_closed_quadruple(m, idx, args.field, COLUMNS if args.columns else ROWS)
    _write_matrix(out, args.out)
    return EXIT_OK


def cmd_canon(args) -> int:
    if args.decode:
        try:
            key = CanonicalKey.fromhex(args.decode)
        except ValueError as exc:
            raise MatrixError(f"not a hex key: {exc}") from exc
        _write_matrix(decode_key(key), args.out)
        return EXIT_OK
    m = _read_valid(args.input)
    key = canonical_key(m)
    _emit({"key": key.hex(), "fingerprint": f"{key.fingerprint():016x}"}, args.json, key.hex())
    return EXIT_OK


def _report_dict(rep) -> dict:
    return rep.as_dict()


def _report_text(rep) -> str:
    lines = [
        f"mode {rep.mode}, order {rep.n}",
        f"{rep.class_count} classes, {'exhausted' if rep.exhausted else 'not exhausted'}",
    ]
    if rep.per_class_stats is not None:
        duals = dict(rep.dual_pairing)
        for s in rep.per_class_stats:
            k = s["key"]
            fp = f"{CanonicalKey(bytes.fromhex(k)).fingerprint():016x}"
            d = duals[k]
            dual = "self" if d == k else f"{CanonicalKey(bytes.fromhex(d)).fingerprint():016x}"
            extra = f" hall={s['hall_sets']}" if "hall_sets" in s else ""
            lines.append(f"{fp} rows={s['closed_row_quadruples']} cols={s['closed_column_quadruples']}"
                         f"{extra} dual={dual}")
    return "\n".join(lines)


def cmd_enumerate(args) -> int:
    _header(args)
    mode = EnumerationMode.parse(args.mode)
    store_dir = Path(args.store)
    seed = _read_valid(args.seed) if args.seed else None
    if seed is None and not (store_dir / "meta.json").exists():
        raise MatrixError("--seed is required when the store does not exist yet")
    try:
        n = seed.n if seed is not None else resume(store_dir).n
        store = open_or_create(store_dir, mode, n)
    except OSError as exc:
        raise IOFailure(f"store {store_dir}: {exc}") from exc

    def progress(st):
        log.info("expanded %d / %d classes", st.ctr, len(st))

    with store:
        rep = enumerate_classes(seed, mode, store, limit=args.limit, threads=args.threads,
                                no_skip=args.no_skip, orbits=not args.no_orbits, progress=progress)
    _emit(_report_dict(rep), args.json, _report_text(rep))
    return EXIT_OK


def cmd_report(args) -> int:
    if not Path(args.store, "meta.json").exists():
        raise IOFailure(f"no store at {args.store}")
    try:
        store = resume(args.store)
    except OSError as exc:
        raise IOFailure(str(exc)) from exc
    rep = build_report(store, details=True)
    _emit(_report_dict(rep), args.json, _report_text(rep))
    return EXIT_OK


def selftest_checks():
    """Offline sanity checks, each a ``(name, bool)`` pair."""
    rng = np.random.default_rng(0)
    s2, s8, s16 = sylvester(1), sylvester(3), sylvester(4)
    yield "sylvester 2 is Hadamard", verify(s2)
    yield "all-ones 4x4 is not Hadamard", not verify(HadamardMatrix.from_array(np.ones((4, 4), dtype=int)))
    ident = SignedPermutation.identity(16)
    yield "identity moves", apply(s16, ident, ident) == s16
    p = SignedPermutation.from_perm(rng.permutation(16), rng.choice([-1, 1], 16))
    q = SignedPermutation.from_perm(rng.permutation(16), rng.choice([-1, 1], 16))
    moved = apply(s16, p, q)
    yield "moves preserve validity", verify(moved)
    yield "transpose twice", transpose(transpose(moved)) == moved
    g = to_graph(s8)
    yield "graph size", g.num_vertices == 32 and len(g.edges()) == 2 * 64 + 16
    yield "canonical key invariance", canonical_key(moved) == canonical_key(s16)
    quad = find_closed_quadruples(s16)[0]
    sw = switch_closed_quadruple(s16, quad, 2)
    yield "closed switch involution", switch_closed_quadruple(sw, quad, 2) == s16
    p20 = paley(19)
    hall = find_hall_sets(p20)[0]
    hs = switch_hall_set(p20, hall, 3)
    yield "Hall switch validity and involution", verify(hs) and switch_hall_set(hs, hall, 3) == p20
    yield "closed quadruple count of sylvester 16", len(find_closed_quadruples(s16)) == 140


def cmd_selftest(args) -> int:
    ok = True
    for name, passed in selftest_checks():
        print(f"{'PASS' if passed else 'FAIL'} {name}")
        ok &= bool(passed)
    return EXIT_OK if ok else EXIT_DOMAIN


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker processes (enumerate only)")
    common.add_argument("--verbose", "-v", action="store_true", default=argparse.SUPPRESS)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable output")

    p = argparse.ArgumentParser(prog="hadswitch", description="Hadamard matrix switching toolkit", parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="write a seed matrix")
    g.add_argument("kind", choices=["sylvester", "paley1", "paley2", "double"])
    g.add_argument("params", nargs="+", help="K, Q, or two .had files for double")
    g.add_argument("--perm", help="file with the permutation P for double")
    g.add_argument("--tilde", action="store_true", help="use the [[A, A], [BP, -BP]] shape")
    g.add_argument("--out", help="output file (default stdout)")
    g.set_defaults(func=cmd_gen)

    a = sub.add_parser("analyze", parents=[common], help="quadruple, Smith and code invariants")
    a.add_argument("--in", dest="input", help="input .had (default stdin)")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("switch", parents=[common], help="switch a closed quadruple or Hall set")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--rows", required=True, help="four comma-separated indices")
    s.add_argument("--field", type=int, default=1)
    s.add_argument("--hall", action="store_true", help="Hall-set switch (n = 4 mod 8)")
    s.add_argument("--columns", action="store_true", help="indices name columns")
    s.add_argument("--out")
    s.set_defaults(func=cmd_switch)

    c = sub.add_parser("canon", parents=[common], help="canonical key, or decode one")
    c.add_argument("--in", dest="input")
    c.add_argument("--decode", metavar="HEX")
    c.add_argument("--out")
    c.set_defaults(func=cmd_canon)

    e = sub.add_parser("enumerate", parents=[common], help="breadth-first class generation")
    e.add_argument("--seed")
    e.add_argument("--mode", required=True, choices=["q", "qr", "qc", "Q", "QR", "QC"])
    e.add_argument("--store", required=True)
    e.add_argument("--limit", type=int)
    e.add_argument("--no-skip", action="store_true", help="disable the transpose-repeat shortcut")
    e.add_argument("--no-orbits", action="store_true", help="switch every quadruple, not one per orbit")
    e.set_defaults(func=cmd_enumerate)

    r = sub.add_parser("report", parents=[common], help="summarize a store")
    r.add_argument("--store", required=True)
    r.set_defaults(func=cmd_report)

    t = sub.add_parser("selftest", parents=[common], help="run offline sanity checks")
    t.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    for k, v in (("threads", 1), ("verbose", False), ("json", False)):
        if not hasattr(args, k):
            setattr(args, k, v)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except IOFailure as exc:
        print(f"hadswitch: {exc}", file=sys.stderr)
        return EXIT_IO
    except (MatrixError, StoreError, InvariantViolation) as exc:
        print(f"hadswitch: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"hadswitch: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
