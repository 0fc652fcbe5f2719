"""Command-line front end.

Subcommands: table, cocycles, cup, compare, check.  Results are rendered
as text tables or deterministic JSON; computed cells can be cached on disk
(content-addressed by algebra, module, convention, cell coordinates and
tool version), so reruns are byte-identical with or without the cache.

Exit codes: 0 success, 2 parse/usage error, 3 resource-cap abort,
4 internal consistency or check failure, 5 file/serialization error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import re
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor

from . import CONVENTION, __version__
from .algebra import parse_algebra_spec
from .checks import run_check_suites
from .cochains import MODULES, TRIVIAL, Cochain
from .engine import DEFAULT_MAX_CELL, CellRecord, CohomologyEngine, CohomologyReport
from .errors import (
    ConsistencyError,
    ResourceCapExceeded,
    SerializationError,
    SpecParseError,
    SuperCohomError,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CAP = 3
EXIT_CONSISTENCY = 4
EXIT_IO = 5

CACHE_ENV = "SUPERCOHOM_CACHE_DIR"

_RANGE_RE = re.compile(r"^(-?\d+)\.\.(-?\d+)$")


class CliError(Exception):
    def __init__(self, code, category, message):
        super().__init__(message)
        self.code = code
        self.category = category


def _fail(code, category, message):
    raise CliError(code, category, message)


def parse_range(text, what):
    match = _RANGE_RE.match(text.strip())
    if not match:
        _fail(EXIT_USAGE, "parse", f"bad {what} range {text!r}, expected a..b")
    lo, hi = int(match.group(1)), int(match.group(2))
    if lo > hi:
        _fail(EXIT_USAGE, "parse", f"empty {what} range {text!r}")
    return lo, hi


def _parse_spec(text):
    try:
        return parse_algebra_spec(text)
    except SpecParseError as exc:
        _fail(EXIT_USAGE, "parse", str(exc))


# ----- cell cache ------------------------------------------------------


def cache_key(spec, module, k, g):
    payload = json.dumps(
        {
            "tool": "supercohom",
            "version": __version__,
            "algebra": spec.display(),
            "module": module,
            "convention": CONVENTION,
            "degree": k,
            "grade": g,
        },
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode()).hexdigest()


def cache_load(cache_dir, key):
    path = os.path.join(cache_dir, key + ".json")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        return None
    except (OSError, json.JSONDecodeError):
        return None
    if data.get("tool_version") != __version__:
        return None
    return CellRecord.from_dict(data["record"])


def cache_store(cache_dir, key, record):
    os.makedirs(cache_dir, exist_ok=True)
    payload = json.dumps(
        {"key": key, "tool_version": __version__, "record": record.to_dict()},
        indent=2,
    )
    fd, tmp = tempfile.mkstemp(dir=cache_dir, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(payload)
        os.replace(tmp, path := os.path.join(cache_dir, key + ".json"))
    except OSError:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
    return path


# ----- shared computation glue ----------------------------------------


def _sanitized(spec, module):
    return re.sub(r"[^A-Za-z0-9]+", "_", f"{spec.display()}_{module}").strip("_")


def _dump_cell_matrices(engine, k, g, directory):
    os.makedirs(directory, exist_ok=True)
    base = _sanitized(engine.spec, engine.module)
    for name, mat in (("Z", engine.dmatrix(k, g)), ("b", engine.dmatrix(k - 1, g))):
        path = os.path.join(directory, f"{base}_k{k}_g{g}_{name}.mtx")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(mat.dump_lines()) + "\n")


def compute_records(spec, module, cells, max_cell, jobs, cache_dir, engine=None,
                    dump_dir=None):
    """Compute (or load from cache) the requested cells, returning a dict."""
    records = {}
    missing = []
    for k, g in cells:
        if cache_dir:
            rec = cache_load(cache_dir, cache_key(spec, module, k, g))
            if rec is not None:
                records[(k, g)] = rec
                continue
        missing.append((k, g))
    if missing:
        if jobs > 1 and not dump_dir:
            by_grade = {}
            for k, g in missing:
                by_grade.setdefault(g, []).append(k)
            args = [
                (spec.display(), module, ks, g, max_cell)
                for g, ks in sorted(by_grade.items())
            ]
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                for chunk in pool.map(_cells_task, args):
                    for rec in chunk:
                        records[(rec.degree, rec.grade)] = rec
        else:
            engine = engine or CohomologyEngine(spec, module, max_cell=max_cell)
            for k, g in sorted(missing, key=lambda c: (c[1], c[0])):
                try:
                    rec = engine.compute_cell(k, g)
                except ResourceCapExceeded as exc:
                    rec = engine.capped_record(k, g, exc.size)
                records[(k, g)] = rec
                if dump_dir:
                    _dump_cell_matrices(engine, k, g, dump_dir)
        if cache_dir:
            for k, g in missing:
                cache_store(
                    cache_dir, cache_key(spec, module, k, g), records[(k, g)]
                )
    return records


def _cells_task(args):
    spec_str, module, ks, g, max_cell = args
    engine = CohomologyEngine(spec_str, module, max_cell=max_cell)
    out = []
    for k in ks:
        try:
            out.append(engine.compute_cell(k, g))
        except ResourceCapExceeded as exc:
            out.append(engine.capped_record(k, g, exc.size))
    return out


def _emit(text, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_cochain(path, expect_spec=None):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        _fail(EXIT_IO, "io", f"cannot read {path}: {exc}")
    try:
        return Cochain.deserialize(text, expect_spec=expect_spec)
    except SerializationError as exc:
        _fail(EXIT_IO, "deserialize", f"{path}: {exc}")


# ----- subcommands -----------------------------------------------------


def cmd_table(args):
    spec = _parse_spec(args.algebra)
    degrees = parse_range(args.degrees, "degree")
    grades = parse_range(args.grades, "grade")
    cells = [
        (k, g)
        for g in range(grades[0], grades[1] + 1)
        for k in range(degrees[0], degrees[1] + 1)
    ]
    dump_dir = args.dump_dir if args.dump_matrices else None
    records = compute_records(
        spec, args.module, cells, args.max_cell, args.jobs, args.cache_dir,
        dump_dir=dump_dir,
    )
    report = CohomologyReport(
        spec=spec,
        module=args.module,
        degrees=degrees,
        grades=grades,
        cells=sorted(records.values(), key=lambda r: (r.degree, r.grade)),
    )
    _emit(
        report.to_json() if args.format == "json" else report.render_text(),
        args.out,
    )
    if any(rec.capped for rec in records.values()):
        print(
            "supercohom: resource-cap: some cells exceeded the cell cap "
            f"({args.max_cell}); narrow the ranges or raise --max-cell",
            file=sys.stderr,
        )
        return EXIT_CAP
    return EXIT_OK


def cmd_cocycles(args):
    spec = _parse_spec(args.algebra)
    k, g = args.degree, args.grade
    if k < 0:
        _fail(EXIT_USAGE, "parse", "--degree must be >= 0")
    dump_dir = args.dump_dir if args.dump_matrices else None
    engine = CohomologyEngine(spec, args.module, max_cell=args.max_cell)
    records = compute_records(
        spec, args.module, [(k, g)], args.max_cell, 1, args.cache_dir,
        engine=engine, dump_dir=dump_dir,
    )
    rec = records[(k, g)]
    if rec.capped:
        print(
            f"supercohom: resource-cap: cell ({k}, {g}) has dimension "
            f"{rec.dim_C} > cap {args.max_cell}",
            file=sys.stderr,
        )
        return EXIT_CAP
    print(
        f"H^{k}_{g}({spec.display()}) module={args.module}: "
        f"dim_C={rec.dim_C} rank_Z={rec.rank_Z} rank_b={rec.rank_b} "
        f"dim_H={rec.dim_H}"
    )
    if not rec.representatives:
        print("0")
        return EXIT_OK
    for i, c in enumerate(rec.representatives):
        print(f"cocycle {i}: {c.pretty(engine.basis)}")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        base = _sanitized(spec, args.module)
        for i, c in enumerate(rec.representatives):
            path = os.path.join(args.out, f"{base}_k{k}_g{g}_rep{i}.cochain")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(c.serialize())
            print(f"wrote {path}")
    return EXIT_OK


def cmd_cup(args):
    expect = _parse_spec(args.algebra) if args.algebra else None
    c1 = _load_cochain(args.file1, expect)
    c2 = _load_cochain(args.file2, expect or None)
    if c1.spec != c2.spec:
        _fail(
            EXIT_IO,
            "spec-mismatch",
            f"cochains live over {c1.spec.display()} and {c2.spec.display()}",
        )
    if c1.module != TRIVIAL or c2.module != TRIVIAL:
        _fail(EXIT_IO, "module", "cup products need trivial coefficients")
    engine = CohomologyEngine(c1.spec, TRIVIAL, max_cell=args.max_cell)
    prod = engine.cup(c1, c2)
    print(f"product: {prod.pretty(engine.basis)}")
    if prod.is_zero():
        print("cocycle: yes")
        print("coboundary: yes (zero cochain)")
    else:
        is_cocycle = engine.verify_cocycle(prod)
        print(f"cocycle: {'yes' if is_cocycle else 'no'}")
        if is_cocycle:
            witness = engine.is_coboundary(prod)
            print(f"coboundary: {'yes' if witness is not None else 'no'}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(prod.serialize())
        print(f"wrote {args.out}")
    return EXIT_OK


def cmd_compare(args):
    expect = _parse_spec(args.algebra) if args.algebra else None
    c1 = _load_cochain(args.file1, expect)
    c2 = _load_cochain(args.file2, expect or None)
    if c1.spec != c2.spec:
        _fail(
            EXIT_IO,
            "spec-mismatch",
            f"cochains live over {c1.spec.display()} and {c2.spec.display()}",
        )
    engine = CohomologyEngine(c1.spec, c1.module, max_cell=args.max_cell)
    try:
        equal, lam = engine.equal_mod_coboundaries(c1, c2)
    except ValueError as exc:
        _fail(EXIT_IO, "precondition", str(exc))
    if equal and lam is not None:
        print(f"equal modulo coboundaries: yes (lambda = {lam})")
    elif equal:
        print("equal modulo coboundaries: yes (both classes zero)")
    else:
        print("equal modulo coboundaries: no")
    return EXIT_OK


def cmd_check(args):
    spec = _parse_spec(args.algebra)
    degrees = parse_range(args.degrees, "degree") if args.degrees else (0, 3)
    grades = parse_range(args.grades, "grade") if args.grades else (-3, 3)
    results = run_check_suites(
        spec,
        module=args.module,
        degrees=degrees,
        grades=grades,
        samples=args.samples,
        max_cell=args.max_cell,
    )
    failed = False
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        failed = failed or not ok
    if failed:
        print("supercohom: consistency: invariant suite failed", file=sys.stderr)
        return EXIT_CONSISTENCY
    return EXIT_OK


# ----- argument parsing -------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"supercohom: parse: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _add_common(sub, cache=True):
    sub.add_argument(
        "--module", choices=MODULES, default=TRIVIAL, help="coefficient module"
    )
    sub.add_argument(
        "--max-cell",
        type=int,
        default=DEFAULT_MAX_CELL,
        help="abort cells with more basis tuples than this",
    )
    if cache:
        sub.add_argument(
            "--cache-dir",
            default=os.environ.get(CACHE_ENV) or None,
            help=f"cell cache directory (default: ${CACHE_ENV})",
        )


def build_parser():
    parser = _Parser(
        prog="supercohom",
        description=(
            "Exact cohomology of graded Lie superalgebras of Hamiltonian "
            "vector fields: Po(2n|m), H(2n|m), SH(0|m) and the grading-"
            "element extensions PoHat/HHat."
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    t = subs.add_parser("table", help="cohomology dimensions over a grid")
    t.add_argument("--algebra", required=True, help='e.g. "SH(0|4)"')
    t.add_argument("--degrees", required=True, help="inclusive range a..b")
    t.add_argument("--grades", required=True, help="inclusive range a..b")
    t.add_argument("--format", choices=("text", "json"), default="text")
    t.add_argument("--out", help="write the report here instead of stdout")
    t.add_argument("--jobs", type=int, default=1, help="worker processes")
    t.add_argument(
        "--dump-matrices",
        action="store_true",
        help="dump Z and b matrices of computed cells (see --dump-dir)",
    )
    t.add_argument(
        "--dump-dir", default="matrix_dumps", help="directory for matrix dumps"
    )
    _add_common(t)
    t.set_defaults(func=cmd_table)

    c = subs.add_parser("cocycles", help="representative cocycles of one cell")
    c.add_argument("--algebra", required=True)
    c.add_argument("--degree", type=int, required=True)
    c.add_argument("--grade", type=int, required=True)
    c.add_argument("--out", help="directory for serialized cocycle files")
    c.add_argument("--dump-matrices", action="store_true")
    c.add_argument("--dump-dir", default="matrix_dumps")
    _add_common(c)
    c.set_defaults(func=cmd_cocycles)

    u = subs.add_parser("cup", help="cup product of two serialized cochains")
    u.add_argument("file1")
    u.add_argument("file2")
    u.add_argument("--algebra", help="cross-check the files' algebra")
    u.add_argument("--out", help="write the serialized product here")
    _add_common(u, cache=False)
    u.set_defaults(func=cmd_cup)

    p = subs.add_parser(
        "compare", help="compare two cocycles modulo coboundaries"
    )
    p.add_argument("file1")
    p.add_argument("file2")
    p.add_argument("--algebra")
    _add_common(p, cache=False)
    p.set_defaults(func=cmd_compare)

    k = subs.add_parser("check", help="run the invariant suites")
    k.add_argument("--algebra", required=True)
    k.add_argument("--degrees", help="d² / dimension window (default 0..3)")
    k.add_argument("--grades", help="d² / dimension window (default -3..3)")
    k.add_argument(
        "--samples",
        type=int,
        default=1000,
        help="random triples for infinite-dimensional algebras",
    )
    _add_common(k, cache=False)
    k.set_defaults(func=cmd_check)
    return parser


_RANGE_FLAGS = ("--degrees", "--grades", "--grade", "--degree")


def _join_range_values(argv):
    """Fold "--grades -6..6" into "--grades=-6..6" so argparse does not
    mistake negative range bounds for option flags."""
    out = []
    i = 0
    while i < len(argv):
        item = argv[i]
        if item in _RANGE_FLAGS and i + 1 < len(argv):
            out.append(f"{item}={argv[i + 1]}")
            i += 2
        else:
            out.append(item)
            i += 1
    return out


def main(argv=None):
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    try:
        args = parser.parse_args(_join_range_values(list(argv)))
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_USAGE
    try:
        return args.func(args)
    except CliError as exc:
        print(f"supercohom: {exc.category}: {exc}", file=sys.stderr)
        return exc.code
    except ResourceCapExceeded as exc:
        print(f"supercohom: resource-cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except ConsistencyError as exc:
        print(f"supercohom: consistency: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY
    except SerializationError as exc:
        print(f"supercohom: deserialize: {exc}", file=sys.stderr)
        return EXIT_IO
    except SpecParseError as exc:
        print(f"supercohom: parse: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SuperCohomError as exc:
        print(f"supercohom: error: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY
    except OSError as exc:
        print(f"supercohom: io: {exc}", file=sys.stderr)
        return EXIT_IO


def console_main():
    sys.exit(main())


if __name__ == "__main__":
    console_main()
