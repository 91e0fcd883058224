"""Readers and writers for wordnet data.

Two input formats are supported:

* Princeton WordNet ``data.noun`` / ``data.verb`` / ``data.adj`` /
  ``data.adv`` database files (wndb format; ``index.*`` is not needed).
* A tab-separated exchange format (``synsets.tsv``, ``relations.tsv`` and
  optionally ``ilinks.tsv``), used for every other wordnet and for fixtures.

Both readers apply the same normalization: lemmas are canonicalized,
hyponym edges are flipped into hypernym edges, self-relations are dropped
and duplicate edges collapsed.  The counts of what was dropped end up in
``graph.report``.
"""
from __future__ import annotations

import hashlib
import logging
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .model import (
    HYPERNYM,
    HOLONYM,
    HYPONYM,
    MERONYM,
    ANTONYM,
    IngestReport,
    InterlingualLink,
    Lexeme,
    LinkType,
    ParseError,
    PartOfSpeech,
    RelationEdge,
    RelationType,
    Synset,
    Violation,
    WordnetError,
    WordnetGraph,
)

log = logging.getLogger(__name__)

SYNSETS_HEADER = ("id", "pos", "lexemes", "gloss")
RELATIONS_HEADER = ("source", "target", "type")
ILINKS_HEADER = ("source", "target", "type")

PWN_FILES = {"noun": "n", "verb": "v", "adj": "a", "adv": "r"}

INSTANCE_HYPERNYM = RelationType.other("instance_hypernym")

# pointer symbol -> relation, from the point of view of the synset holding
# the pointer.  "~" and "~i" are flipped afterwards.
_PWN_POINTERS: dict[str, RelationType] = {
    "@": HYPERNYM,
    "~": HYPONYM,
    "#m": HOLONYM,
    "#s": HOLONYM,
    "#p": HOLONYM,
    "%m": MERONYM,
    "%s": MERONYM,
    "%p": MERONYM,
    "!": ANTONYM,
}
_PWN_OTHER_NAMES = {
    "+": "derivationally_related_form",
    "=": "attribute",
    ";c": "domain_topic",
    "-c": "member_of_domain_topic",
    ";r": "domain_region",
    "-r": "member_of_domain_region",
    ";u": "domain_usage",
    "-u": "member_of_domain_usage",
    "*": "entailment",
    ">": "cause",
    "^": "also_see",
    "$": "verb_group",
    "&": "similar_to",
    "<": "participle",
    "\\": "pertainym",
}

_ADJ_MARKER = re.compile(r"\((?:a|p|ip)\)$")


class NotFound(WordnetError, FileNotFoundError):
    pass


def pwn_relation(symbol: str, instance_as_hypernym: bool = False) -> RelationType:
    """Map a wndb pointer symbol to a relation type."""
    if symbol in _PWN_POINTERS:
        return _PWN_POINTERS[symbol]
    if symbol in ("@i", "~i"):
        if instance_as_hypernym:
            return HYPERNYM if symbol == "@i" else HYPONYM
        return INSTANCE_HYPERNYM if symbol == "@i" else RelationType.other("instance_hyponym")
    return RelationType.other(_PWN_OTHER_NAMES.get(symbol, symbol))


def _normalize_edge(edge: RelationEdge) -> RelationEdge:
    edge = edge.normalized()
    if edge.relation_type.tag == "instance_hyponym":
        return RelationEdge(edge.target, edge.source, INSTANCE_HYPERNYM)
    return edge


class _EdgeCollector:
    """Normalizes, deduplicates and counts edges in first-seen order."""

    def __init__(self):
        self.edges: dict[RelationEdge, None] = {}
        self.duplicates = 0
        self.self_loops = 0

    def add(self, edge: RelationEdge) -> None:
        edge = _normalize_edge(edge)
        if edge.source == edge.target:
            self.self_loops += 1
        elif edge in self.edges:
            self.duplicates += 1
        else:
            self.edges[edge] = None


def _dedupe_lexemes(lexemes: Iterable[Lexeme]) -> tuple[tuple[Lexeme, ...], int]:
    seen: dict[tuple, Lexeme] = {}
    dropped = 0
    for lx in lexemes:
        if lx.identity in seen:
            dropped += 1
        else:
            seen[lx.identity] = lx
    return tuple(seen.values()), dropped


# --------------------------------------------------------------------------
# Princeton data files


@dataclass(frozen=True)
class PwnReport(IngestReport):
    files: tuple[str, ...] = ()
    dangling: tuple[Violation, ...] = ()


def _byte_col(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8")) + 1


def _parse_pwn_line(text: str, offset: int, path: Path, lineno: int, file_pos: str, instance_as_hypernym: bool):
    head, bar, gloss = text.partition("|")
    tokens = [(m.group(), m.start()) for m in re.finditer(r"\S+", head)]

    def fail(msg: str, tok_index: int | None = None):
        col = _byte_col(text, tokens[tok_index][1]) if tok_index is not None and tok_index < len(tokens) else _byte_col(text, len(head))
        raise ParseError(msg, path, lineno, col)

    def take(i: int, what: str) -> str:
        if i >= len(tokens):
            fail(f"line ends before {what}")
        return tokens[i][0]

    off_tok = take(0, "synset offset")
    if not (len(off_tok) == 8 and off_tok.isdigit()):
        fail(f"bad synset offset {off_tok!r}", 0)
    if int(off_tok) != offset:
        fail(f"synset offset {off_tok} does not match byte offset {offset}", 0)
    if not take(1, "lex_filenum").isdigit():
        fail("bad lex_filenum", 1)
    ss_type = take(2, "ss_type")
    if ss_type not in ("n", "v", "a", "s", "r"):
        fail(f"bad ss_type {ss_type!r}", 2)
    if PartOfSpeech.from_code(ss_type) is not PartOfSpeech.from_code(file_pos):
        fail(f"ss_type {ss_type!r} in a {file_pos!r} data file", 2)
    pos = PartOfSpeech.from_code(ss_type)
    try:
        w_cnt = int(take(3, "w_cnt"), 16)
    except ValueError:
        fail("bad w_cnt", 3)
    if w_cnt < 1:
        fail("synset has no words", 3)
    i = 4
    words = []
    for _ in range(w_cnt):
        word = take(i, "word")
        lex_id = take(i + 1, "lex_id")
        try:
            int(lex_id, 16)
        except ValueError:
            fail(f"bad lex_id {lex_id!r}", i + 1)
        if pos is PartOfSpeech.ADJECTIVE:
            word = _ADJ_MARKER.sub("", word)
        try:
            words.append(Lexeme.make(word, pos))
        except ValueError as exc:
            fail(str(exc), i)
        i += 2
    p_cnt_tok = take(i, "p_cnt")
    if not (len(p_cnt_tok) == 3 and p_cnt_tok.isdigit()):
        fail(f"bad p_cnt {p_cnt_tok!r}", i)
    i += 1
    synset_id = f"{PartOfSpeech.from_code(file_pos).value}{off_tok}"
    pointers = []
    for _ in range(int(p_cnt_tok)):
        symbol = take(i, "pointer symbol")
        target = take(i + 1, "pointer offset")
        tpos = take(i + 2, "pointer pos")
        st = take(i + 3, "pointer source/target")
        if not (len(target) == 8 and target.isdigit()):
            fail(f"bad pointer offset {target!r}", i + 1)
        if tpos not in ("n", "v", "a", "s", "r"):
            fail(f"bad pointer pos {tpos!r}", i + 2)
        if len(st) != 4:
            fail(f"bad pointer source/target {st!r}", i + 3)
        target_id = f"{PartOfSpeech.from_code(tpos).value}{target}"
        pointers.append(RelationEdge(synset_id, target_id, pwn_relation(symbol, instance_as_hypernym)))
        i += 4
    if file_pos == "v" and i < len(tokens):
        # verb frames: f_cnt then "+ f_num w_num" triples
        try:
            f_cnt = int(tokens[i][0])
        except ValueError:
            fail("bad f_cnt", i)
        i += 1 + 3 * f_cnt
    if i != len(tokens):
        fail("unexpected trailing fields", min(i, len(tokens) - 1))
    if not bar:
        fail("missing gloss separator '|'")
    lexemes, dup = _dedupe_lexemes(words)
    return Synset(synset_id, pos, lexemes, gloss.strip() or None), pointers, dup


def parse_pwn_database(directory, language_tag: str = "eng", instance_as_hypernym: bool = False) -> WordnetGraph:
    """Read Princeton ``data.*`` files from *directory*.

    Synset ids are the POS letter followed by the 8-digit byte offset,
    e.g. ``n00001740``.  Instance hypernym pointers (``@i``/``~i``) become
    the separate ``instance_hypernym`` relation unless
    *instance_as_hypernym* folds them into ordinary hypernymy.

    Edges pointing at synsets that are not present (typically because the
    data file for that POS was not supplied) are left out of the graph and
    listed in ``graph.report.dangling``.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise NotFound(f"no such directory: {directory}")
    present = [(name, code) for name, code in PWN_FILES.items() if (directory / f"data.{name}").is_file()]
    if not present:
        raise NotFound(f"no data.noun/verb/adj/adv files in {directory}")

    synsets: list[Synset] = []
    raw_edges: list[RelationEdge] = []
    dup_lexemes = 0
    for name, code in present:
        path = directory / f"data.{name}"
        offset = 0
        with open(path, "rb") as fh:
            for lineno, raw in enumerate(fh, 1):
                # offsets are defined for LF files; a CRLF copy shifts every line
                start, offset = offset, offset + len(raw.rstrip(b"\r\n")) + 1
                if raw.startswith(b"  "):
                    continue
                try:
                    text = raw.decode("utf-8").rstrip("\r\n")
                except UnicodeDecodeError as exc:
                    raise ParseError("invalid UTF-8", path, lineno, exc.start + 1) from None
                if not text.strip():
                    continue
                ss, pointers, dup = _parse_pwn_line(text, start, path, lineno, code, instance_as_hypernym)
                synsets.append(ss)
                raw_edges.extend(pointers)
                dup_lexemes += dup

    known = {ss.id for ss in synsets}
    collector = _EdgeCollector()
    dangling = []
    for e in raw_edges:
        if e.target not in known:
            dangling.append(Violation("dangling edge endpoint", (e.target,), f"{e.source} -> {e.target} ({e.relation_type})"))
            continue
        collector.add(e)
    if dangling:
        log.warning("%d pointers refer to synsets outside the parsed files", len(dangling))
    report = PwnReport(
        duplicate_edges=collector.duplicates,
        self_loops=collector.self_loops,
        duplicate_lexemes=dup_lexemes,
        files=tuple(f"data.{name}" for name, _ in present),
        dangling=tuple(dangling),
    )
    return WordnetGraph(language_tag, synsets, collector.edges, report)


# --------------------------------------------------------------------------
# Tab-separated exchange format


@dataclass(frozen=True)
class GenericTsvBundle:
    synsets_path: Path
    relations_path: Path
    ilinks_path: Path | None = None

    @classmethod
    def from_directory(cls, directory, with_ilinks: bool | None = None) -> "GenericTsvBundle":
        """Bundle for the standard file names inside *directory*.

        ``ilinks.tsv`` is picked up when present unless *with_ilinks* is
        False.
        """
        d = Path(directory)
        ilinks = d / "ilinks.tsv"
        if with_ilinks is None:
            with_ilinks = ilinks.is_file()
        return cls(d / "synsets.tsv", d / "relations.tsv", ilinks if with_ilinks else None)


def _read_tsv(path: Path, header: Sequence[str]):
    """Yield (line number, fields) for data lines, checking the header."""
    path = Path(path)
    if not path.is_file():
        raise NotFound(f"no such file: {path}")
    with open(path, "rb") as fh:
        for lineno, raw in enumerate(fh, 1):
            try:
                line = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise ParseError("invalid UTF-8", path, lineno, exc.start + 1) from None
            line = line.rstrip("\n").rstrip("\r")
            fields = line.split("\t")
            if lineno == 1:
                if tuple(fields) != tuple(header):
                    raise ParseError(f"expected header {'<TAB>'.join(header)!r}", path, 1)
                continue
            if not line:
                continue
            if len(fields) != len(header):
                raise ParseError(f"expected {len(header)} columns, found {len(fields)}", path, lineno)
            yield lineno, fields
        else:
            if fh.tell() == 0:
                raise ParseError("empty file, header missing", path, 1)


_TSV_POS = {"n": PartOfSpeech.NOUN, "v": PartOfSpeech.VERB, "a": PartOfSpeech.ADJECTIVE,
            "r": PartOfSpeech.ADVERB, "x": PartOfSpeech.OTHER}


def _parse_synsets_tsv(path: Path) -> tuple[list[Synset], int]:
    synsets: list[Synset] = []
    seen: set[str] = set()
    dup_lexemes = 0
    for lineno, (sid, pos_code, lexemes, gloss) in _read_tsv(path, SYNSETS_HEADER):
        if not sid:
            raise ParseError("empty synset id", path, lineno)
        if sid in seen:
            raise ParseError(f"duplicate synset id {sid!r}", path, lineno)
        pos = _TSV_POS.get(pos_code)
        if pos is None:
            raise ParseError(f"unknown POS code {pos_code!r}", path, lineno)
        try:
            items = [Lexeme.make(t, pos) for t in lexemes.split("|")]
        except ValueError as exc:
            raise ParseError(str(exc), path, lineno) from None
        items, dup = _dedupe_lexemes(items)
        dup_lexemes += dup
        seen.add(sid)
        synsets.append(Synset(sid, pos, items, gloss or None))
    return synsets, dup_lexemes


def parse_relations_tsv(path, known_ids) -> _EdgeCollector:
    collector = _EdgeCollector()
    for lineno, (src, dst, rtype) in _read_tsv(Path(path), RELATIONS_HEADER):
        for end in (src, dst):
            if end not in known_ids:
                raise ParseError(f"relation endpoint {end!r} is not a known synset", path, lineno)
        if not rtype:
            raise ParseError("empty relation type", path, lineno)
        collector.add(RelationEdge(src, dst, RelationType.parse(rtype)))
    return collector


class LinkParseResult(list):
    """List of links that also remembers which type tags were unknown."""

    def __init__(self, links: Iterable[InterlingualLink] = ()):
        super().__init__(links)
        self.unknown_types: Counter = Counter()


def parse_ilinks_tsv(path) -> LinkParseResult:
    """Read inter-lingual links.  Endpoints are checked later, by ``build_bilayer``."""
    out = LinkParseResult()
    for lineno, (src, dst, ltype) in _read_tsv(Path(path), ILINKS_HEADER):
        if not src or not dst or not ltype:
            raise ParseError("empty field", path, lineno)
        lt = LinkType.parse(ltype)
        if lt.is_other:
            out.unknown_types[ltype] += 1
        out.append(InterlingualLink(src, dst, lt))
    if out.unknown_types:
        log.warning("%s: %d links with unrecognized type tags", path, sum(out.unknown_types.values()))
    return out


def parse_generic_tsv(bundle: GenericTsvBundle, language_tag: str = "und"):
    """Return ``(graph, links)``; *links* is None when the bundle has no ilinks file."""
    synsets, dup_lexemes = _parse_synsets_tsv(bundle.synsets_path)
    collector = parse_relations_tsv(bundle.relations_path, {s.id for s in synsets})
    report = IngestReport(collector.duplicates, collector.self_loops, dup_lexemes)
    graph = WordnetGraph(language_tag, synsets, collector.edges, report)
    links = parse_ilinks_tsv(bundle.ilinks_path) if bundle.ilinks_path is not None else None
    return graph, links


def _clean(text: str) -> str:
    return " ".join(text.split())


def export_generic_tsv(graph: WordnetGraph, directory, links: Iterable[InterlingualLink] | None = None) -> list[Path]:
    """Write *graph* (and *links*) in the exchange format; returns the paths written.

    Rows are sorted (synsets by id, edges by source, target, type) so the
    output depends only on the graph's content.
    """
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    written = []
    path = d / "synsets.tsv"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\t".join(SYNSETS_HEADER) + "\n")
        for ss in sorted(graph.synsets, key=lambda s: s.id):
            lex = "|".join(lx.lemma for lx in ss.lexemes)
            fh.write(f"{ss.id}\t{ss.part_of_speech.value}\t{lex}\t{_clean(ss.gloss or '')}\n")
    written.append(path)
    path = d / "relations.tsv"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\t".join(RELATIONS_HEADER) + "\n")
        for e in sorted(graph.edges):
            fh.write(f"{e.source}\t{e.target}\t{e.relation_type}\n")
    written.append(path)
    if links is not None:
        path = d / "ilinks.tsv"
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\t".join(ILINKS_HEADER) + "\n")
            for lk in sorted(links, key=lambda k: (k.source_id, k.target_id, str(k.link_type))):
                fh.write(f"{lk.source_id}\t{lk.target_id}\t{lk.link_type}\n")
        written.append(path)
    return written


def load_layer(pwn_dir=None, tsv=None, language_tag: str | None = None, instance_as_hypernym: bool = False) -> WordnetGraph:
    """Load one layer from either a PWN directory or a (synsets, relations) pair."""
    if (pwn_dir is None) == (tsv is None):
        raise ValueError("give exactly one of pwn_dir or tsv")
    if pwn_dir is not None:
        return parse_pwn_database(pwn_dir, language_tag or "eng", instance_as_hypernym)
    synsets_path, relations_path = (Path(p) for p in tsv)
    graph, _ = parse_generic_tsv(GenericTsvBundle(synsets_path, relations_path), language_tag or "und")
    return graph


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def input_files(pwn_dir=None, tsv=None) -> list[Path]:
    if pwn_dir is not None:
        return [Path(pwn_dir) / f"data.{n}" for n in PWN_FILES if (Path(pwn_dir) / f"data.{n}").is_file()]
    return [Path(p) for p in tsv]


__all__ = [
    "GenericTsvBundle",
    "INSTANCE_HYPERNYM",
    "LinkParseResult",
    "NotFound",
    "PwnReport",
    "export_generic_tsv",
    "file_digest",
    "input_files",
    "load_layer",
    "parse_generic_tsv",
    "parse_ilinks_tsv",
    "parse_pwn_database",
    "pwn_relation",
]
