"""Command-line front end: ``apc {count,embed,gram,validate,bench}``.

Exit codes: 0 success, 1 usage error, 2 validation mismatch, 3 precision
budget violation.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .coding import CodeScheme, DecodeError, decode_exact, decode_power, default_power_base, make_weight_assignment, precision_budget, strip_start_code
from .counting import Domain, collect_subgraphs, count_all, write_counts_csv, write_counts_json
from .embedding import embed_dataset, feature_cut, feature_index, gram, knn_classify
from .export import (
    write_decoded_csv,
    write_embedding_dense,
    write_embedding_sparse,
    write_gram,
    write_json,
    write_manifest,
)
from .graph import compact_labels, parse_tu_dataset, remap_labels_topk

log = logging.getLogger("apckernel")

EXIT_OK, EXIT_USAGE, EXIT_MISMATCH, EXIT_BUDGET = 0, 1, 2, 3
DATA_ROOT_ENV = "APC_DATA_ROOT"

# Per-dataset settings; power coding with 3 labels throughout.
PRESETS = {
    "mutag-paper": dict(max_length=4, cut=1e-5, kernel="rbf", gamma="auto", standardize=True, scheme="power", remap_topk=3),
    "ptc-mr-paper": dict(max_length=5, cut=1e-5, kernel="rbf", gamma="auto", standardize=True, scheme="power", remap_topk=3),
    "nci1-paper": dict(max_length=3, cut=1e-5, kernel="rbf", gamma="auto", standardize=True, scheme="power", remap_topk=3),
    "nci109-paper": dict(max_length=3, cut=1e-5, kernel="rbf", gamma="auto", standardize=True, scheme="power", remap_topk=3),
    "enzymes-paper": dict(max_length=3, cut=1e-6, kernel="rbf", gamma="auto", standardize=True, scheme="power", remap_topk=None),
}


class UsageError(Exception):
    pass


class BudgetViolation(Exception):
    pass


@dataclass
class RunConfig:
    dataset: str | None = None
    name: str | None = None
    max_length: int = 4
    scheme: str = "power"
    base: int | None = None
    arithmetic: str | None = None
    remap_topk: int | None = None
    cut: float = 0.0
    kernel: str = "linear"
    gamma: str = "auto"
    standardize: bool = False
    normalize: bool = False
    include_l2_cycles: bool = False
    tolerance: float = 1e-6
    threads: int = 1
    seed: int = 0
    folds: int = 10
    out: str = "apc-out"
    format: str = "csv"
    force: bool = False
    preset: str | None = None

    def hashed(self) -> dict:
        d = asdict(self)
        for volatile in ("threads", "out"):
            d.pop(volatile)
        return d

    def domain(self) -> Domain:
        return Domain(self.arithmetic)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dataset", help=f"TU dataset directory, or a name under ${DATA_ROOT_ENV}")
    p.add_argument("--name", help="file prefix inside the dataset directory (default: directory name)")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--max-length", type=int, help="longest path/cycle length L")
    p.add_argument("--scheme", choices=["none", "exact", "power"])
    p.add_argument("--base", type=int, help="power-scheme base a")
    p.add_argument("--arithmetic", choices=["float", "bigint", "exactint"])
    p.add_argument("--remap-topk", type=int, help="keep the k-1 commonest labels plus an 'other' bucket")
    p.add_argument("--no-remap", dest="remap_topk", action="store_const", const=0)
    p.add_argument("--cut", type=float, help="variance cut as a fraction of total variance")
    p.add_argument("--kernel", choices=["none", "linear", "rbf"])
    p.add_argument("--gamma", help="rbf gamma or 'auto'")
    p.add_argument("--standardize", action="store_true", default=None)
    p.add_argument("--normalize", action="store_true", default=None, help="divide each embedding by its sum")
    p.add_argument("--include-l2-cycles", action="store_true", default=None)
    p.add_argument("--tolerance", type=float, help="relative tolerance of exact decoding")
    p.add_argument("--threads", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--folds", type=int)
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--force", action="store_true", default=None, help="run float coding beyond the precision budget")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="apc", description="All-paths-and-cycles counting and graph kernel embeddings.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_ in (
        ("count", "count paths and cycles per graph"),
        ("embed", "compute APC feature vectors"),
        ("gram", "compute feature vectors, Gram matrix and a 1-NN baseline"),
    ):
        _common(sub.add_parser(name, help=help_))

    v = sub.add_parser("validate", help="compare the counting engine against brute-force DFS")
    _common(v)
    v.add_argument("--graphs", type=int, default=200)
    v.add_argument("--max-n", type=int, default=10)
    v.add_argument("--labels", type=int, default=0, help="label count for labelled checks (0: unlabelled only)")
    v.add_argument("--inject-fault", type=int, default=0, help=argparse.SUPPRESS)

    b = sub.add_parser("bench", help="runtime scaling tables and plots")
    b.add_argument("--out", default="apc-bench")
    b.add_argument("--sizes", default="50,100,200,400")
    b.add_argument("--size-length", type=int, default=6)
    b.add_argument("--degree", type=float, default=4.0)
    b.add_argument("--vertices-per-size", type=int, default=800)
    b.add_argument("--lengths", default="3-7")
    b.add_argument("--fixed-n", type=int, default=30)
    b.add_argument("--decode-lengths", default="1-5")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--skip-size", action="store_true", help="skip the (slow) graph-size scan")
    return parser


def make_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(threads=os.cpu_count() or 1)
    if args.preset:
        for k, val in PRESETS[args.preset].items():
            setattr(cfg, k, val)
        cfg.preset = args.preset
    for f in fields(RunConfig):
        val = getattr(args, f.name, None)
        if val is not None and f.name != "preset":
            setattr(cfg, f.name, val)
    if cfg.remap_topk == 0:
        cfg.remap_topk = None
    if cfg.arithmetic is None:
        cfg.arithmetic = {"none": "exactint", "exact": "float", "power": "bigint"}[cfg.scheme]
    if cfg.scheme == "exact" and cfg.arithmetic != "float":
        raise UsageError("the exact scheme runs in float arithmetic only")
    if cfg.scheme == "power" and cfg.arithmetic == "exactint":
        raise UsageError("the power scheme needs float or bigint arithmetic")
    if cfg.max_length < 1:
        raise UsageError("--max-length must be >= 1")
    if cfg.threads < 1:
        raise UsageError("--threads must be >= 1")
    if cfg.remap_topk is not None and cfg.remap_topk < 2:
        raise UsageError("--remap-topk must be >= 2")
    if cfg.gamma != "auto":
        try:
            float(cfg.gamma)
        except ValueError:
            raise UsageError(f"--gamma must be a number or 'auto', got {cfg.gamma!r}") from None
    return cfg


def resolve_dataset(cfg: RunConfig) -> tuple[Path, str]:
    if not cfg.dataset:
        raise UsageError("--dataset is required")
    p = Path(cfg.dataset)
    if not p.is_dir():
        root = os.environ.get(DATA_ROOT_ENV)
        if root and (Path(root) / cfg.dataset).is_dir():
            p = Path(root) / cfg.dataset
        else:
            raise UsageError(f"dataset {cfg.dataset!r} not found (set ${DATA_ROOT_ENV} or pass a directory)")
    return p, cfg.name or p.name


def load(cfg: RunConfig):
    path, name = resolve_dataset(cfg)
    try:
        ds = parse_tu_dataset(path, name)
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    if cfg.remap_topk:
        ds, alphabet = remap_labels_topk(ds, cfg.remap_topk)
    else:
        ds, alphabet = compact_labels(ds)
    return ds, alphabet


def make_scheme(cfg: RunConfig, k: int) -> CodeScheme | None:
    if cfg.scheme == "none":
        return None
    if cfg.scheme == "exact":
        return CodeScheme.exact(k)
    domain = cfg.domain()
    coded_length = cfg.max_length - 1
    if domain is Domain.FLOAT64:
        if cfg.base is None:
            try:
                base = default_power_base(k, coded_length, domain)
            except DecodeError as exc:
                if not cfg.force:
                    raise BudgetViolation(str(exc)) from exc
                base = 2
        else:
            base = cfg.base
        report = precision_budget(k, coded_length, base, domain)
        if not report.fits and not cfg.force:
            raise BudgetViolation(
                f"power codes need {report.bits:.1f} bits (k={k}, coded length {coded_length}, a={base}); "
                "float arithmetic holds 52. Use --arithmetic bigint or --force."
            )
        return CodeScheme.power(k, base)
    return CodeScheme.power(k, cfg.base or default_power_base(k, coded_length, domain))


def _prepare_out(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# -- commands ------------------------------------------------------------------


def cmd_count(cfg: RunConfig) -> int:
    ds, alphabet = load(cfg)
    scheme = make_scheme(cfg, alphabet.k)
    out = _prepare_out(cfg)
    domain = cfg.domain()
    t0 = time.perf_counter()
    tables = []
    decoded = []
    failures = 0
    for gid, g in enumerate(ds.graphs):
        subs = collect_subgraphs(g, cfg.max_length + 1)
        plain = count_all(g, None, cfg.max_length, subgraphs=subs)
        tables.append((gid, plain))
        if scheme is None:
            continue
        if scheme.kind == "power" and domain is not Domain.FLOAT64:
            biggest = int(plain.data.max()) if plain.data.size else 0
            if biggest >= scheme.base:
                scheme_g = CodeScheme.power(scheme.k, default_power_base(scheme.k, 0, domain, biggest))
            else:
                scheme_g = scheme
        else:
            scheme_g = scheme
        coded = count_all(g, make_weight_assignment(g, scheme_g, domain), cfg.max_length, subgraphs=subs)
        for (u, v, l), total in plain.items():
            kind = "cycle" if u == v else "path"
            try:
                value = strip_start_code(coded[u, v, l], g.labels[u], scheme_g)
                if scheme_g.kind == "power":
                    dec = decode_power(value, scheme_g.base, scheme_g.max_class(l - 1), total=total)
                else:
                    dec = decode_exact(value, scheme_g, l - 1, cfg.tolerance, total=total)
            except DecodeError:
                failures += 1
                continue
            for c in sorted(dec.counts):
                decoded.append((gid, u, v, l, kind, c, dec.counts[c]))
    log.info("counted %d graphs in %.2fs", len(ds), time.perf_counter() - t0)

    files = []
    if cfg.format == "csv":
        with open(out / "counts.csv", "w") as fh:
            write_counts_csv(tables, fh)
        files.append("counts.csv")
    else:
        with open(out / "counts.json", "w") as fh:
            write_counts_json(tables, fh)
        files.append("counts.json")
    if scheme is not None:
        write_decoded_csv(out / "decoded.csv", decoded)
        files.append("decoded.csv")
    totals: dict = {}
    for _, t in tables:
        for l, d in t.totals().items():
            agg = totals.setdefault(str(l), {"paths": 0, "cycles": 0})
            agg["paths"] += d["paths"]
            agg["cycles"] += d["cycles"]
    totals = {l: {k: int(v) for k, v in d.items()} for l, d in totals.items()}
    write_json(out / "summary.json", {"graphs": len(ds), "totals_by_length": totals, "decode_failures": failures})
    files.append("summary.json")
    write_manifest(out, cfg.hashed(), files + ["manifest.json"])
    return EXIT_OK


def _embed(cfg: RunConfig):
    ds, alphabet = load(cfg)
    scheme = make_scheme(cfg, alphabet.k)
    t0 = time.perf_counter()
    embs = embed_dataset(
        ds, cfg.max_length, scheme, workers=cfg.threads, include_l2_cycles=cfg.include_l2_cycles,
        domain=None if scheme is None else cfg.domain(), tolerance=cfg.tolerance,
    )
    log.info("embedded %d graphs in %.2fs", len(ds), time.perf_counter() - t0)
    return ds, alphabet, scheme, embs


def _write_embedding(cfg, out, ds, alphabet, scheme, embs) -> tuple[list, list]:
    index = feature_cut(embs, cfg.cut) if cfg.cut > 0 else feature_index(embs)
    write_embedding_sparse(out / "embedding_sparse.csv", embs)
    write_embedding_dense(out / "embedding_dense.csv", embs, index)
    skipped = {}
    for e in embs:
        for *_, reason in e.skipped:
            skipped[reason] = skipped.get(reason, 0) + 1
    write_json(
        out / "embedding.json",
        {
            "dataset": ds.name,
            "graphs": len(ds),
            "alphabet": alphabet.to_dict(),
            "scheme": None if scheme is None else {"kind": scheme.kind, "k": scheme.k, "codes": [repr(c) for c in scheme.codes], "base": scheme.base},
            "max_length": cfg.max_length,
            "features_total": len(feature_index(embs)),
            "features_retained": len(index),
            "cut": cfg.cut,
            "undecodable_entries": skipped,
        },
    )
    return index, ["embedding_sparse.csv", "embedding_dense.csv", "embedding.json"]


def cmd_embed(cfg: RunConfig) -> int:
    ds, alphabet, scheme, embs = _embed(cfg)
    out = _prepare_out(cfg)
    _, files = _write_embedding(cfg, out, ds, alphabet, scheme, embs)
    write_manifest(out, cfg.hashed(), files + ["manifest.json"])
    return EXIT_OK


def cmd_gram(cfg: RunConfig) -> int:
    ds, alphabet, scheme, embs = _embed(cfg)
    out = _prepare_out(cfg)
    index, files = _write_embedding(cfg, out, ds, alphabet, scheme, embs)
    gamma = cfg.gamma if cfg.gamma == "auto" else float(cfg.gamma)
    g = gram(embs, index, cfg.kernel, gamma, cfg.standardize, cfg.normalize)
    write_gram(out / "gram.csv", g)
    meta = dict(g.metadata(), cut=cfg.cut, scheme=cfg.scheme, max_length=cfg.max_length, seed=cfg.seed,
                arithmetic=cfg.arithmetic, preset=cfg.preset)
    write_json(out / "gram.json", meta)
    summary = {"graphs": len(ds), "features": len(index)}
    if len(ds) >= cfg.folds and len(set(ds.class_labels)) > 1:
        summary["knn_accuracy"] = knn_classify(g, ds.class_labels, cfg.folds, cfg.seed)
        summary["folds"] = cfg.folds
        log.info("1-NN %d-fold accuracy: %.1f%%", cfg.folds, summary["knn_accuracy"])
    write_json(out / "summary.json", summary)
    files += ["gram.csv", "gram.json", "summary.json"]
    write_manifest(out, cfg.hashed(), files + ["manifest.json"])
    return EXIT_OK


def cmd_validate(cfg: RunConfig, args: argparse.Namespace) -> int:
    from .validate import ValidationResult, random_graphs, validate_graph

    k = args.labels or None
    if cfg.dataset:
        ds, alphabet = load(cfg)
        small = sorted((g.n, i) for i, g in enumerate(ds.graphs) if g.n <= args.max_n)[: args.graphs]
        graphs = [(i, ds.graphs[i]) for _, i in sorted(small)]
        if k:
            k = alphabet.k
    else:
        graphs = list(enumerate(random_graphs(args.graphs, args.max_n, cfg.seed, k)))
    total = ValidationResult()
    for gid, g in graphs:
        total.merge(validate_graph(g, cfg.max_length, k, tolerance=cfg.tolerance, graph_id=gid, _fault=args.inject_fault))
    summary = total.summary()
    out = _prepare_out(cfg)
    write_json(out / "validation.json", summary)
    write_manifest(out, dict(cfg.hashed(), graphs=args.graphs, max_n=args.max_n, labels=args.labels), ["validation.json", "manifest.json"])
    print(f"{summary['status']}: {summary['graphs']} graphs, {summary['entries_checked']} entries, "
          f"{summary['mismatches']} mismatches, skipped {summary['skipped']}")
    if not total.ok:
        m = summary["first_mismatch"]
        print(f"first mismatch: graph {m['graph']} {m['check']} (u={m['u']}, v={m['v']}, l={m['length']}): "
              f"got {m['got']}, expected {m['expected']}")
        return EXIT_MISMATCH
    return EXIT_OK


def _int_range(text: str) -> list[int]:
    if "-" in text:
        a, b = text.split("-")
        return list(range(int(a), int(b) + 1))
    return [int(x) for x in text.split(",")]


def cmd_bench(args: argparse.Namespace) -> int:
    import csv

    from . import bench

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    summary = {}
    if not args.skip_size:
        sizes = _int_range(args.sizes)
        s = bench.runtime_vs_size(sizes, args.size_length, args.degree, args.vertices_per_size, args.seed)
        with open(out / "bench_size.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["n", "graphs", "mean_seconds", "mean_subgraphs"])
            w.writerows(s.rows)
        bench.plot(out / "bench_size.png", [r[0] for r in s.rows], [r[2] for r in s.rows],
                   "vertices", "seconds per graph", f"paths/cycles up to L={args.size_length}", loglog=True)
        files += ["bench_size.csv", "bench_size.png"]
        summary["size_loglog_slope"] = s.slope
        summary["size_per_subgraph_slope"] = s.per_subgraph_slope
        print(f"runtime vs n: log-log slope {s.slope:.3f} (per connected subgraph: {s.per_subgraph_slope:.3f})")
    ln = bench.runtime_vs_length(_int_range(args.lengths), args.fixed_n, args.seed)
    with open(out / "bench_length.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["max_length", "seconds", "subgraphs"])
        w.writerows(ln.rows)
    bench.plot(out / "bench_length.png", [r[0] for r in ln.rows], [r[1] for r in ln.rows],
               "maximum length L", "seconds", f"{args.fixed_n}-vertex molecule-like graph")
    files += ["bench_length.csv", "bench_length.png"]
    summary["length_ratios"] = ln.ratios
    summary["length_median_ratio"] = ln.median_ratio
    print(f"runtime vs L: successive ratios {[round(r, 2) for r in ln.ratios]}, median {ln.median_ratio:.2f}")
    dt = bench.exact_decode_time(_int_range(args.decode_lengths), args.fixed_n, args.seed)
    with open(out / "bench_decode.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["coded_length", "entries", "seconds", "seconds_per_entry", "failures"])
        w.writerows(dt.rows)
    bench.plot(out / "bench_decode.png", [r[0] for r in dt.rows], [r[3] for r in dt.rows],
               "coded length", "seconds per entry", "exact decoding")
    files += ["bench_decode.csv", "bench_decode.png"]
    summary["decode_seconds_per_entry"] = {r[0]: r[3] for r in dt.rows}
    write_json(out / "bench_summary.json", summary)
    files.append("bench_summary.json")
    write_manifest(out, {k: v for k, v in vars(args).items() if k not in ("out", "verbose")}, files + ["manifest.json"])
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "bench":
            return cmd_bench(args)
        cfg = make_config(args)
        if args.command == "count":
            return cmd_count(cfg)
        if args.command == "embed":
            return cmd_embed(cfg)
        if args.command == "gram":
            return cmd_gram(cfg)
        if args.command == "validate":
            return cmd_validate(cfg, args)
    except UsageError as exc:
        print(f"apc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetViolation as exc:
        print(f"apc: precision budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
