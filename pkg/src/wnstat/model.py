"""Domain types shared by every part of the toolkit.

A :class:`WordnetGraph` is one language layer: synsets (nodes) plus typed,
directed relation edges.  Graphs are immutable once built; the integer
index arrays used by the graph algorithms are derived lazily and cached.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping

import numpy as np


class WordnetError(Exception):
    """Base class for all toolkit errors."""


class ParseError(WordnetError):
    def __init__(self, message: str, path=None, line: int | None = None, column: int | None = None):
        self.path = path
        self.line = line
        self.column = column
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        super().__init__(f"{': '.join([', '.join(where), message]) if where else message}")


class UnknownSynset(WordnetError, KeyError):
    def __str__(self) -> str:
        return f"unknown synset {self.args[0]!r}"


class PartOfSpeech(enum.Enum):
    NOUN = "n"
    VERB = "v"
    ADJECTIVE = "a"
    ADVERB = "r"
    OTHER = "x"

    @classmethod
    def from_code(cls, code: str) -> "PartOfSpeech":
        # adjective satellites share the adjective category
        if code == "s":
            return cls.ADJECTIVE
        return cls(code)

    @classmethod
    def from_name(cls, name: str) -> "PartOfSpeech":
        """Accept either a one-letter code or a full name such as ``"noun"``."""
        name = name.strip().lower()
        for pos in cls:
            if name in (pos.value, pos.label):
                return pos
        if name in ("s", "adj", "adjective_satellite"):
            return cls.ADJECTIVE
        if name == "adv":
            return cls.ADVERB
        raise ValueError(f"unknown part of speech {name!r}")

    @property
    def label(self) -> str:
        return self.name.lower()


def normalize_lemma(text: str) -> str:
    """Lowercase, turn underscores into single spaces, trim."""
    return " ".join(text.replace("_", " ").split()).lower()


@dataclass(frozen=True)
class Lexeme:
    lemma: str
    part_of_speech: PartOfSpeech

    @classmethod
    def make(cls, text: str, pos: PartOfSpeech) -> "Lexeme":
        lemma = normalize_lemma(text)
        if not lemma:
            raise ValueError(f"empty lemma after normalization: {text!r}")
        return cls(lemma, pos)

    @property
    def identity(self) -> tuple[str, PartOfSpeech]:
        return (self.lemma, self.part_of_speech)


@dataclass(frozen=True)
class Synset:
    id: str
    part_of_speech: PartOfSpeech
    lexemes: tuple[Lexeme, ...]
    gloss: str | None = None

    @property
    def size(self) -> int:
        return len(self.lexemes)

    @property
    def lemmas(self) -> tuple[str, ...]:
        return tuple(lx.lemma for lx in self.lexemes)


class RelationKind(enum.Enum):
    HYPERNYM = "hypernym"
    HYPONYM = "hyponym"
    MERONYM = "meronym"
    HOLONYM = "holonym"
    ANTONYM = "antonym"
    OTHER = "other"


_KIND_VALUES = {k.value for k in RelationKind}

_INVERSE_KIND = {
    RelationKind.HYPERNYM: RelationKind.HYPONYM,
    RelationKind.HYPONYM: RelationKind.HYPERNYM,
    RelationKind.MERONYM: RelationKind.HOLONYM,
    RelationKind.HOLONYM: RelationKind.MERONYM,
}


@dataclass(frozen=True, order=True)
class RelationType:
    """A relation label; unrecognized source labels survive as ``other(tag)``."""

    kind: RelationKind = field(compare=False)
    tag: str | None = field(default=None, compare=False)
    # equality, hashing and ordering all go through the label
    label: str = field(init=False, repr=False)

    def __post_init__(self):
        if (self.kind is RelationKind.OTHER) != (self.tag is not None):
            raise ValueError("tag is required for, and only for, other relations")
        if self.tag is not None and self.tag in _KIND_VALUES:
            raise ValueError(f"tag {self.tag!r} names a known relation type")
        object.__setattr__(self, "label", self.tag if self.tag is not None else self.kind.value)

    def __str__(self) -> str:
        return self.label

    @classmethod
    def parse(cls, text: str) -> "RelationType":
        text = text.strip()
        try:
            kind = RelationKind(text)
        except ValueError:
            return cls(RelationKind.OTHER, text)
        if kind is RelationKind.OTHER:
            return cls(RelationKind.OTHER, text)
        return cls(kind)

    @classmethod
    def other(cls, tag: str) -> "RelationType":
        return cls(RelationKind.OTHER, tag)

    @property
    def inverse(self) -> "RelationType | None":
        kind = _INVERSE_KIND.get(self.kind)
        return RelationType(kind) if kind is not None else None


HYPERNYM = RelationType(RelationKind.HYPERNYM)
HYPONYM = RelationType(RelationKind.HYPONYM)
MERONYM = RelationType(RelationKind.MERONYM)
HOLONYM = RelationType(RelationKind.HOLONYM)
ANTONYM = RelationType(RelationKind.ANTONYM)


@dataclass(frozen=True, order=True)
class RelationEdge:
    source: str
    target: str
    relation_type: RelationType

    def normalized(self) -> "RelationEdge":
        """Store hyponym edges as the equivalent specific->general hypernym edge."""
        if self.relation_type == HYPONYM:
            return RelationEdge(self.target, self.source, HYPERNYM)
        return self


class LinkKind(enum.Enum):
    I_SYNONYMY = "i_synonymy"
    I_HYPONYMY = "i_hyponymy"
    I_HYPERNYMY = "i_hypernymy"
    I_MERONYMY = "i_meronymy"
    I_HOLONYMY = "i_holonymy"
    OTHER = "other"


@dataclass(frozen=True)
class LinkType:
    kind: LinkKind
    tag: str | None = None

    def __str__(self) -> str:
        return self.tag if self.tag is not None else self.kind.value

    @classmethod
    def parse(cls, text: str) -> "LinkType":
        text = text.strip()
        try:
            kind = LinkKind(text)
        except ValueError:
            return cls(LinkKind.OTHER, text)
        if kind is LinkKind.OTHER:
            return cls(LinkKind.OTHER, text)
        return cls(kind)

    @property
    def is_other(self) -> bool:
        return self.kind is LinkKind.OTHER


I_SYNONYMY = LinkType(LinkKind.I_SYNONYMY)


@dataclass(frozen=True)
class InterlingualLink:
    source_id: str
    target_id: str
    link_type: LinkType = I_SYNONYMY


@dataclass(frozen=True)
class IngestReport:
    """Counts of edges dropped while building a graph."""

    duplicate_edges: int = 0
    self_loops: int = 0
    duplicate_lexemes: int = 0


class WordnetGraph:
    """One wordnet layer.  Immutable after construction.

    Construction does not enforce structural invariants; use
    :func:`validate_graph` to list violations.  Graphs produced by the
    parsers always validate cleanly.
    """

    def __init__(
        self,
        language_tag: str,
        synsets: Iterable[Synset],
        edges: Iterable[RelationEdge],
        report: IngestReport | None = None,
    ):
        self._language_tag = language_tag
        self._synsets = tuple(synsets)
        self._edges = tuple(edges)
        self.report = report or IngestReport()
        self._by_id: dict[str, Synset] = {}
        for ss in self._synsets:
            self._by_id.setdefault(ss.id, ss)

    @property
    def language_tag(self) -> str:
        return self._language_tag

    @property
    def synsets(self) -> tuple[Synset, ...]:
        return self._synsets

    @property
    def edges(self) -> tuple[RelationEdge, ...]:
        return self._edges

    @property
    def node_count(self) -> int:
        return len(self._by_id)

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    def __len__(self) -> int:
        return self.node_count

    def __contains__(self, synset_id: str) -> bool:
        return synset_id in self._by_id

    def __iter__(self) -> Iterator[Synset]:
        return iter(self._synsets)

    def __getitem__(self, synset_id: str) -> Synset:
        try:
            return self._by_id[synset_id]
        except KeyError:
            raise UnknownSynset(synset_id) from None

    def __eq__(self, other):
        if not isinstance(other, WordnetGraph):
            return NotImplemented
        return (
            self.language_tag == other.language_tag
            and sorted(self._synsets, key=lambda s: s.id) == sorted(other._synsets, key=lambda s: s.id)
            and sorted(self._edges) == sorted(other._edges)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"WordnetGraph({self.language_tag!r}, nodes={self.node_count}, edges={self.edge_count})"

    @cached_property
    def ids(self) -> tuple[str, ...]:
        """Synset ids in sorted order; position is the node's integer index."""
        return tuple(sorted(self._by_id))

    @cached_property
    def index(self) -> Mapping[str, int]:
        return {sid: i for i, sid in enumerate(self.ids)}

    @cached_property
    def forward(self) -> Mapping[RelationType, Mapping[str, tuple[str, ...]]]:
        """relation type -> source id -> target ids."""
        return self._adjacency(reverse=False)

    @cached_property
    def reverse(self) -> Mapping[RelationType, Mapping[str, tuple[str, ...]]]:
        """relation type -> target id -> source ids."""
        return self._adjacency(reverse=True)

    def _adjacency(self, reverse: bool):
        out: dict[RelationType, dict[str, list[str]]] = {}
        for e in self._edges:
            a, b = (e.target, e.source) if reverse else (e.source, e.target)
            out.setdefault(e.relation_type, {}).setdefault(a, []).append(b)
        return {rt: {k: tuple(v) for k, v in m.items()} for rt, m in out.items()}

    def relation_types(self) -> set[RelationType]:
        return {e.relation_type for e in self._edges}

    def edge_arrays(self, relation_types: Iterable[RelationType] | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Integer (source, target) index arrays for the filtered edges.

        Edges are oriented specific->general: a hyponym edge is flipped.
        Edges with an endpoint outside the graph are skipped.  ``None``
        selects every relation type.
        """
        wanted = None if relation_types is None else set(relation_types)
        idx = self.index
        src, dst = [], []
        for e in self._edges:
            if wanted is not None and e.relation_type not in wanted:
                continue
            e = e.normalized()
            a = idx.get(e.source)
            b = idx.get(e.target)
            if a is None or b is None:
                continue
            src.append(a)
            dst.append(b)
        return np.asarray(src, dtype=np.int64), np.asarray(dst, dtype=np.int64)


@dataclass(frozen=True)
class Violation:
    kind: str
    ids: tuple[str, ...]
    detail: str = ""


def validate_graph(graph: WordnetGraph) -> list[Violation]:
    """List every violated structural invariant; an empty list means valid."""
    out: list[Violation] = []
    seen: set[str] = set()
    for ss in graph.synsets:
        if ss.id in seen:
            out.append(Violation("duplicate synset id", (ss.id,)))
        seen.add(ss.id)
        if not ss.lexemes:
            out.append(Violation("empty synset", (ss.id,)))
        identities = [lx.identity for lx in ss.lexemes]
        if len(set(identities)) != len(identities):
            out.append(Violation("duplicate lexeme", (ss.id,)))
        for lx in ss.lexemes:
            if not lx.lemma:
                out.append(Violation("empty lemma", (ss.id,)))
    for e in graph.edges:
        for end in (e.source, e.target):
            if end not in seen:
                out.append(Violation("dangling edge endpoint", (end,), f"{e.source} -> {e.target} ({e.relation_type})"))
        if e.source == e.target:
            out.append(Violation("self-loop", (e.source,), str(e.relation_type)))
    # adjacency indexes are derived from the edge tuple, so they can only
    # disagree if the edge tuple itself changed under us
    n_fwd = sum(len(v) for m in graph.forward.values() for v in m.values())
    if n_fwd != graph.edge_count:
        out.append(Violation("adjacency mismatch", (), f"{n_fwd} indexed vs {graph.edge_count} edges"))
    return out


@dataclass(frozen=True)
class BilayerNetwork:
    layer_a: WordnetGraph
    layer_b: WordnetGraph
    links: tuple[InterlingualLink, ...]
    dropped_links: int = 0


class Orientation(enum.Enum):
    SPECIFIC_TO_GENERAL = "specific_to_general"


@dataclass(frozen=True)
class SupremacyConfig:
    relation_types: frozenset[RelationType] = frozenset({HYPERNYM, HYPONYM})
    orientation: Orientation = Orientation.SPECIFIC_TO_GENERAL
    include_self: bool = True

    def __post_init__(self):
        if not self.relation_types:
            raise ValueError("relation_types must be non-empty")
        object.__setattr__(self, "relation_types", frozenset(self.relation_types))
