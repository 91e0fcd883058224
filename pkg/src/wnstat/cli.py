"""Command-line front end.

Every subcommand writes plain tables (CSV by default, JSON on request)
into ``--out-dir`` together with a ``manifest.json``.  Tables are sorted
on stable keys and floats are printed with 12 significant digits, so
identical inputs and flags give byte-identical tables.

Exit codes: 0 success, 2 input error, 1 internal error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .bilayer import (
    EmptyPairSet,
    build_bilayer,
    mismatch_report,
    monte_carlo_null,
    null_model_matrix,
    supremacy_pairs,
)
from .graph import (
    check_acyclicity,
    in_component,
    supremacy_all,
    undirected_cycle_rank,
    weak_components,
)
from .ingest import export_generic_tsv, file_digest, input_files, load_layer, parse_ilinks_tsv
from .model import LinkType, PartOfSpeech, RelationType, SupremacyConfig, WordnetError, HYPERNYM, HYPONYM
from .stats import (
    InsufficientBins,
    InsufficientClasses,
    fit_exponential_scaling,
    fit_power_law,
    log_bin,
    polysemy_histogram,
    relation_census,
    supremacy_size_profile,
    synset_size_histogram,
)

log = logging.getLogger("wnstat")


class InputError(WordnetError):
    pass


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        if math.isnan(value):
            return "NA"
        return format(float(value), ".12g")
    if value is None:
        return "NA"
    return str(value)


def _json_value(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return None if math.isnan(value) else float(format(float(value), ".12g"))
    return value


class Tables:
    """Collects output tables; nothing touches the disk until :meth:`write`."""

    def __init__(self, fmt: str):
        self.fmt = fmt
        # in-component subgraph exported alongside the tables
        self.subgraph = None
        self.tables: dict[str, tuple[list[str], list[list]]] = {}

    def add(self, name: str, header: list[str], rows) -> None:
        self.tables[name] = (header, [list(r) for r in rows])

    def add_kv(self, name: str, items) -> None:
        self.add(name, ["key", "value"], list(items))

    def render(self, name: str) -> str:
        header, rows = self.tables[name]
        if self.fmt == "json":
            doc = {"table": name, "columns": header, "rows": [[_json_value(v) for v in r] for r in rows]}
            return json.dumps(doc, indent=1, ensure_ascii=False) + "\n"
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) for v in r])
        return buf.getvalue()

    def write(self, out_dir: Path) -> list[Path]:
        rendered = {name: self.render(name) for name in self.tables}
        out_dir.mkdir(parents=True, exist_ok=True)
        paths = []
        for name, text in rendered.items():
            path = out_dir / f"{name}.{self.fmt}"
            path.write_text(text, encoding="utf-8")
            paths.append(path)
        return paths


# --------------------------------------------------------------------------
# argument helpers


def _relations(text: str) -> frozenset[RelationType] | None:
    if text.strip() == "all":
        return None
    out = frozenset(RelationType.parse(t) for t in text.split(",") if t.strip())
    if not out:
        raise argparse.ArgumentTypeError("empty relation list")
    return out


def _supremacy_relations(rels) -> frozenset[RelationType]:
    if rels is None:
        raise InputError("supremacy needs an explicit relation list, not 'all'")
    if HYPERNYM in rels:
        rels = rels | {HYPONYM}
    return frozenset(rels)


def _tsv_pair(text: str) -> tuple[str, str]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected SYNSETS.tsv,RELATIONS.tsv")
    return parts[0], parts[1]


def _add_layer_args(p: argparse.ArgumentParser, prefix: str = "", label: str = "") -> None:
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument(f"--{prefix}pwn-dir", metavar="DIR", help=f"Princeton WordNet database directory{label}")
    group.add_argument(f"--{prefix}tsv", metavar="SYNSETS,RELATIONS", type=_tsv_pair, help=f"exchange-format files{label}")
    p.add_argument(f"--{prefix}lang", default=None, help="language tag of the layer")


def _load(args, prefix: str = ""):
    a = prefix.replace("-", "_")
    pwn = getattr(args, f"{a}pwn_dir")
    tsv = getattr(args, f"{a}tsv")
    lang = getattr(args, f"{a}lang") or (prefix.rstrip("-") or None)
    graph = load_layer(pwn, tsv, lang, args.instance_as_hypernym)
    return graph, input_files(pwn, tsv)


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    try:
        return max(1, int(os.environ.get("WN_THREADS", "1")))
    except ValueError:
        return 1


def _binned_rows(dist):
    return [(b.k, b.lower, b.upper, b.midpoint, b.count, b.density) for b in dist.bins]


BINNED_HEADER = ["bin", "lower", "upper", "midpoint", "count", "density"]


def _power_law_rows(dist, s_min):
    try:
        fit = fit_power_law(dist, s_min)
    except InsufficientBins as exc:
        return [("status", "insufficient_bins"), ("detail", str(exc))]
    return [("status", "ok"), ("exponent", fit.exponent), ("s_min", fit.s_min), ("s_max", fit.s_max),
            ("r_squared", fit.r_squared), ("bins_used", fit.n_bins), ("intercept_log10", fit.intercept)]


# --------------------------------------------------------------------------
# subcommands


def cmd_stats(args, tables: Tables) -> list[Path]:
    graph, files = _load(args)
    groups = [PartOfSpeech.from_name(args.pos)] if args.pos else [
        PartOfSpeech.NOUN, PartOfSpeech.VERB, PartOfSpeech.ADJECTIVE, PartOfSpeech.ADVERB, None]
    for pos in groups:
        key = pos.label if pos else "all"
        tables.add(f"synset_size_{key}", ["size", "synsets"], synset_size_histogram(graph, pos).rows())
        tables.add(f"polysemy_{key}", ["senses", "lexemes"], polysemy_histogram(graph, pos).rows())
    tables.add("relation_census", ["relation", "edges"], relation_census(graph).items())
    lexemes = sum(ss.size for ss in graph.synsets)
    tables.add_kv("summary", [
        ("synsets", graph.node_count),
        ("lexemes_in_synsets", lexemes),
        ("edges", graph.edge_count),
        ("duplicate_edges_dropped", graph.report.duplicate_edges),
        ("self_loops_dropped", graph.report.self_loops),
    ])
    return files


def cmd_components(args, tables: Tables) -> list[Path]:
    graph, files = _load(args)
    rels = args.relations
    comps = weak_components(graph, rels)
    reps: dict[int, str] = {}
    for sid, c in zip(graph.ids, comps.component_of.tolist()):
        reps.setdefault(c, sid)
    tables.add("components", ["component", "smallest_id", "size"],
               [(c, reps[c], int(s)) for c, s in enumerate(comps.sizes_by_component.tolist())])
    hist: dict[int, int] = {}
    for s in comps.sizes:
        hist[s] = hist.get(s, 0) + 1
    tables.add("cluster_size_histogram", ["size", "clusters"], sorted(hist.items()))
    if comps.count:
        tables.add("cluster_size_distribution", BINNED_HEADER,
                   _binned_rows(log_bin(np.array(comps.sizes, dtype=np.int64), args.bins_per_decade)))
    acyc = check_acyclicity(graph, rels)
    tables.add_kv("summary", [
        ("relations", "all" if rels is None else ",".join(sorted(str(r) for r in rels))),
        ("synsets", graph.node_count),
        ("components", comps.count),
        ("largest_component", comps.largest),
        ("largest_share", comps.largest_share),
        ("undirected_cycle_rank", undirected_cycle_rank(graph, rels)),
        ("acyclic", acyc.acyclic),
        ("cycle_witness", " ".join(acyc.witness) if acyc.witness else None),
    ])
    return files


def _read_values(path) -> np.ndarray:
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                values.append(float(line))
            except ValueError:
                raise InputError(f"{path}: line {lineno}: not a number: {line!r}") from None
    arr = np.array(values)
    if arr.size and np.all(arr == np.round(arr)):
        arr = arr.astype(np.int64)
    return arr


def cmd_supremacy(args, tables: Tables) -> list[Path]:
    if args.values:
        values = _read_values(args.values)
        dist = log_bin(values, args.bins_per_decade)
        tables.add("supremacy_distribution", BINNED_HEADER, _binned_rows(dist))
        tables.add_kv("power_law_fit", _power_law_rows(dist, args.fit_smin))
        return [Path(args.values)]
    if args.pwn_dir is None and args.tsv is None:
        raise InputError("give --pwn-dir, --tsv or --values")
    graph, files = _load(args)
    config = SupremacyConfig(_supremacy_relations(args.relations), include_self=args.include_self)
    table = supremacy_all(graph, config, threads=_threads(args))
    sizes = {ss.id: ss.size for ss in graph.synsets}
    pos = {ss.id: ss.part_of_speech.value for ss in graph.synsets}
    tables.add("supremacy", ["id", "pos", "size", "supremacy"],
               [(sid, pos[sid], sizes[sid], s) for sid, s in table.items()])
    positive = table.values[table.values >= 1]
    dist = log_bin(positive, args.bins_per_decade)
    tables.add("supremacy_distribution", BINNED_HEADER, _binned_rows(dist))
    tables.add_kv("power_law_fit", _power_law_rows(dist, args.fit_smin))
    if not args.include_self:
        tables.add_kv("exponential_fit", [("status", "requires_include_self")])
        return files
    profile = supremacy_size_profile(graph, table)
    tables.add("size_profile", ["size", "geometric_mean_supremacy", "synsets"],
               [(r.size, r.geometric_mean, r.count) for r in profile])
    try:
        fit = fit_exponential_scaling(profile, args.coverage)
        rows = [("status", "ok"), ("exponent", fit.exponent), ("intercept_ln", fit.intercept),
                ("l_min", fit.l_min), ("l_max", fit.l_max), ("coverage", fit.coverage), ("r_squared", fit.r_squared)]
    except InsufficientClasses as exc:
        rows = [("status", "insufficient_classes"), ("detail", str(exc))]
    tables.add_kv("exponential_fit", rows)
    return files


def cmd_bilayer(args, tables: Tables) -> list[Path]:
    layer_a, files_a = _load(args, "a-")
    layer_b, files_b = _load(args, "b-")
    links = parse_ilinks_tsv(args.ilinks)
    bilayer = build_bilayer(layer_a, layer_b, links)
    link_type = LinkType.parse(args.link_type)
    rels = _supremacy_relations(args.relations)
    config = SupremacyConfig(rels)
    pairs = supremacy_pairs(bilayer, link_type, config, config, threads=_threads(args))
    if not pairs.pairs:
        raise EmptyPairSet(f"no links of requested type {link_type}")
    tables.add("pairs", ["source", "target", "s_source", "s_target"],
               [(p.link.source_id, p.link.target_id, p.s_source, p.s_target) for p in pairs])
    rm = null_model_matrix(pairs, args.bins_per_decade, args.marginals)
    tables.add("rmatrix", ["bin_a", "lower_a", "upper_a", "bin_b", "lower_b", "upper_b", "observed", "expected", "R"],
               [(ba.k, ba.lower, ba.upper, bb.k, bb.lower, bb.upper, o, e, r) for ba, bb, o, e, r in rm.cells()])
    rep = mismatch_report(pairs, args.threshold)
    tables.add("mismatches", ["source", "target", "source_lexemes", "target_lexemes", "s_source", "s_target", "score"],
               [(m.source_id, m.target_id, "|".join(m.source_lemmas), "|".join(m.target_lemmas),
                 m.s_source, m.s_target, m.score) for m in rep])
    summary = [
        ("links_read", len(links)),
        ("links_dropped_unresolved", bilayer.dropped_links),
        ("link_type", str(link_type)),
        ("pairs", len(pairs)),
        ("marginals", args.marginals),
        ("threshold", args.threshold),
        ("mismatches", len(rep)),
        ("seed", args.seed),
    ]
    if args.mc_trials > 0:
        mc = monte_carlo_null(bilayer, link_type, args.mc_trials, args.seed, args.bins_per_decade, pairs=pairs)
        rows = []
        for i, ba in enumerate(mc.axis_a.bins):
            for j, bb in enumerate(mc.axis_b.bins):
                rows.append((ba.k, bb.k, rm.expected[i, j], mc.mean[i, j], mc.std[i, j]))
        tables.add("mc_null", ["bin_a", "bin_b", "expected", "mc_mean", "mc_std"], rows)
        summary.append(("mc_trials", args.mc_trials))
    tables.add_kv("summary", summary)
    return files_a + files_b + [Path(args.ilinks)]


def cmd_incomponent(args, tables: Tables) -> list[Path]:
    graph, files = _load(args)
    config = SupremacyConfig(_supremacy_relations(args.relations), include_self=args.include_self)
    sub = in_component(graph, args.synset, config)
    tables.add_kv("summary", [("synset", args.synset), ("nodes", sub.node_count), ("edges", sub.edge_count)])
    tables.subgraph = sub
    return files


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--out-dir", required=True, type=Path, help="directory for output tables")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--instance-as-hypernym", action="store_true",
                        help="treat PWN instance hypernym pointers (@i/~i) as hypernymy")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="wnstat", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", parents=[common], help="synset size, polysemy and relation tables")
    _add_layer_args(p)
    p.add_argument("--pos", choices=["noun", "verb", "adjective", "adverb", "other"])
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("components", parents=[common], help="weak components and cluster sizes")
    _add_layer_args(p)
    p.add_argument("--relations", type=_relations, default=frozenset({HYPERNYM}),
                   help="comma-separated relation types, or 'all' (default: hypernym)")
    p.add_argument("--bins-per-decade", type=int, default=5)
    p.set_defaults(func=cmd_components)

    p = sub.add_parser("supremacy", parents=[common], help="supremacy table, distribution and fits")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--pwn-dir", metavar="DIR")
    group.add_argument("--tsv", metavar="SYNSETS,RELATIONS", type=_tsv_pair)
    group.add_argument("--values", metavar="FILE", help="fit a file of values (one per line) instead of a graph")
    p.add_argument("--lang", default=None)
    p.add_argument("--relations", type=_relations, default=frozenset({HYPERNYM}))
    p.add_argument("--include-self", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--fit-smin", type=float, default=1.0)
    p.add_argument("--bins-per-decade", type=int, default=5)
    p.add_argument("--coverage", type=float, default=0.99)
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: $WN_THREADS or 1)")
    p.set_defaults(func=cmd_supremacy)

    p = sub.add_parser("bilayer", parents=[common], help="inter-lingual null model and mismatches")
    _add_layer_args(p, "a-", " (layer A)")
    _add_layer_args(p, "b-", " (layer B)")
    p.add_argument("--ilinks", required=True, metavar="FILE")
    p.add_argument("--link-type", default="i_synonymy")
    p.add_argument("--relations", type=_relations, default=frozenset({HYPERNYM}))
    p.add_argument("--threshold", type=float, default=2.0)
    p.add_argument("--marginals", choices=("all", "linked"), default="all")
    p.add_argument("--bins-per-decade", type=int, default=5)
    p.add_argument("--mc-trials", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_bilayer)

    p = sub.add_parser("incomponent", parents=[common], help="export the in-component of one synset")
    _add_layer_args(p)
    p.add_argument("--synset", required=True)
    p.add_argument("--relations", type=_relations, default=frozenset({HYPERNYM}))
    p.add_argument("--include-self", action=argparse.BooleanOptionalAction, default=True)
    p.set_defaults(func=cmd_incomponent)
    return parser


def _flag_record(args) -> dict:
    out = {}
    for key, value in sorted(vars(args).items()):
        if key == "func":
            continue
        if isinstance(value, frozenset):
            value = sorted(str(v) for v in value)
        elif isinstance(value, (Path, tuple)):
            value = [str(v) for v in value] if isinstance(value, tuple) else str(value)
        out[key] = value
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    started = time.perf_counter()
    tables = Tables(args.format)
    try:
        inputs = args.func(args, tables)
        digests = {str(p): file_digest(p) for p in inputs}
    except (WordnetError, OSError) as exc:
        print(f"wnstat: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error")
        print(f"wnstat: internal error: {exc}", file=sys.stderr)
        return 1
    try:
        written = tables.write(args.out_dir)
        if tables.subgraph is not None:
            written += export_generic_tsv(tables.subgraph, args.out_dir)
        manifest = {
            "tool": "wnstat",
            "version": __version__,
            "command": args.command,
            "flags": _flag_record(args),
            "inputs": digests,
            "outputs": sorted(p.name for p in written),
            "duration_seconds": round(time.perf_counter() - started, 3),
        }
        (args.out_dir / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        print(f"wnstat: cannot write output: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
