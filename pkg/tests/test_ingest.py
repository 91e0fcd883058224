import shutil

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from conftest import write_tsv
from wnstat.ingest import (
    INSTANCE_HYPERNYM,
    GenericTsvBundle,
    NotFound,
    export_generic_tsv,
    parse_generic_tsv,
    parse_ilinks_tsv,
    parse_pwn_database,
    pwn_relation,
)
from wnstat.model import (
    ANTONYM,
    HOLONYM,
    HYPERNYM,
    MERONYM,
    LinkKind,
    ParseError,
    PartOfSpeech,
    RelationEdge,
    RelationType,
    validate_graph,
)


# ---------------------------------------------------------------- PWN format


def test_two_line_pwn_fixture(data_dir):
    g = parse_pwn_database(data_dir / "pwn_two")
    assert g.node_count == 2
    # "@" in widget and "~" in thing describe the same link
    assert g.edges == (RelationEdge("n00000114", "n00000026", HYPERNYM),)
    assert g.report.duplicate_edges == 1
    widget = g["n00000114"]
    assert widget.lemmas == ("widget", "gizmo")
    assert widget.gloss == "a small mechanical device"
    assert validate_graph(g) == []


def test_header_only_data_noun(tmp_path):
    (tmp_path / "data.noun").write_text("  1 header only  \n  2 still header  \n")
    g = parse_pwn_database(tmp_path)
    assert (g.node_count, g.edge_count) == (0, 0)


def test_missing_directory(tmp_path):
    with pytest.raises(NotFound):
        parse_pwn_database(tmp_path / "nope")


def test_offset_mismatch_reports_line_and_column(tmp_path, data_dir):
    text = (data_dir / "pwn_two" / "data.noun").read_text()
    (tmp_path / "data.noun").write_text(text.replace("00000114 03 n 02", "00000115 03 n 02"))
    with pytest.raises(ParseError) as info:
        parse_pwn_database(tmp_path)
    assert info.value.line == 3 and info.value.column == 1
    assert "data.noun" in str(info.value)


def test_bad_pointer_count_column(tmp_path):
    line = "00000000 03 n 01 thing 0 0x1 | gloss  \n"
    (tmp_path / "data.noun").write_text(line)
    with pytest.raises(ParseError) as info:
        parse_pwn_database(tmp_path)
    assert info.value.line == 1
    assert info.value.column == line.index("0x1") + 1


def test_truncated_pointer_is_a_parse_error(tmp_path):
    (tmp_path / "data.noun").write_text("00000000 03 n 01 thing 0 001 @ 00000000 | gloss  \n")
    with pytest.raises(ParseError):
        parse_pwn_database(tmp_path)


def test_crlf_copy_parses_like_lf(tmp_path, data_dir):
    raw = (data_dir / "pwn_two" / "data.noun").read_bytes()
    (tmp_path / "data.noun").write_bytes(raw.replace(b"\n", b"\r\n"))
    assert parse_pwn_database(tmp_path) == parse_pwn_database(data_dir / "pwn_two")


def test_cross_pos_pointer_to_missing_file(tmp_path):
    line = "00000000 03 n 01 run 0 001 + 00000042 v 0101 | gloss  \n"
    (tmp_path / "data.noun").write_text(line)
    g = parse_pwn_database(tmp_path)
    assert g.edge_count == 0
    assert [v.ids for v in g.report.dangling] == [("v00000042",)]
    assert validate_graph(g) == []


def test_adjective_markers_and_satellites(tmp_path):
    a = "00000000 00 a 01 big(a) 0 000 | large  \n"
    s = f"{len(a):08d} 00 s 01 galore(ip) 0 001 & 00000000 a 0000 | plentiful  \n"
    (tmp_path / "data.adj").write_text(a + s)
    g = parse_pwn_database(tmp_path)
    assert g["a00000000"].lemmas == ("big",)
    sat = g[f"a{len(a):08d}"]
    assert sat.part_of_speech is PartOfSpeech.ADJECTIVE and sat.lemmas == ("galore",)
    assert g.edges[0].relation_type == RelationType.other("similar_to")


def test_verb_frames_are_skipped(tmp_path):
    line = "00000000 29 v 01 breathe 0 000 02 + 02 00 + 08 00 | draw air  \n"
    (tmp_path / "data.verb").write_text(line)
    g = parse_pwn_database(tmp_path)
    assert g["v00000000"].lemmas == ("breathe",)


@pytest.mark.parametrize(
    "symbol, expected",
    [("@", HYPERNYM), ("#p", HOLONYM), ("%m", MERONYM), ("!", ANTONYM),
     ("@i", INSTANCE_HYPERNYM), ("&", RelationType.other("similar_to")), ("?", RelationType.other("?"))],
)
def test_pointer_symbol_mapping(symbol, expected):
    assert pwn_relation(symbol) == expected


def test_instance_pointers_can_fold_into_hypernymy():
    assert pwn_relation("@i", instance_as_hypernym=True) == HYPERNYM


# ---------------------------------------------------------------- TSV format


def test_three_synset_fixture(tmp_path):
    d = write_tsv(tmp_path, [("a", "n", ["x"]), ("b", "n", ["y"]), ("c", "v", ["z"])],
                  [("a", "b", "hypernym"), ("b", "c", "antonym")])
    g, links = parse_generic_tsv(GenericTsvBundle.from_directory(d))
    assert (g.node_count, g.edge_count) == (3, 2)
    assert links is None


def test_duplicate_edge_dropped_and_counted(tmp_path):
    d = write_tsv(tmp_path, [("a", "n", ["x"]), ("b", "n", ["y"])],
                  [("a", "b", "hypernym"), ("a", "b", "hypernym")])
    g, _ = parse_generic_tsv(GenericTsvBundle.from_directory(d))
    assert g.edge_count == 1 and g.report.duplicate_edges == 1


def test_hyponym_row_collapses_with_hypernym_row(tiny_graph):
    assert sorted(tiny_graph.edges) == [RelationEdge("s1", "s2", ANTONYM), RelationEdge("s1", "s2", HYPERNYM)]


def test_self_loop_dropped(tmp_path):
    d = write_tsv(tmp_path, [("a", "n", ["x"])], [("a", "a", "hypernym")])
    g, _ = parse_generic_tsv(GenericTsvBundle.from_directory(d))
    assert g.edge_count == 0 and g.report.self_loops == 1


def test_wrong_column_count(tmp_path):
    d = write_tsv(tmp_path, [("a", "n", ["x"])])
    with open(d / "synsets.tsv", "a") as fh:
        fh.write("b\tn\ty\n")
    with pytest.raises(ParseError) as info:
        parse_generic_tsv(GenericTsvBundle.from_directory(d))
    assert info.value.line == 3


def test_unknown_pos(tmp_path):
    d = write_tsv(tmp_path, [("a", "q", ["x"])])
    with pytest.raises(ParseError, match="POS"):
        parse_generic_tsv(GenericTsvBundle.from_directory(d))


def test_dangling_relation_names_id(tmp_path):
    d = write_tsv(tmp_path, [("a", "n", ["x"])], [("a", "zz9", "hypernym")])
    with pytest.raises(ParseError, match="zz9"):
        parse_generic_tsv(GenericTsvBundle.from_directory(d))


def test_missing_header(tmp_path):
    d = write_tsv(tmp_path, [("a", "n", ["x"])])
    (d / "relations.tsv").write_text("a\ta\thypernym\n")
    with pytest.raises(ParseError) as info:
        parse_generic_tsv(GenericTsvBundle.from_directory(d))
    assert info.value.line == 1


def test_polish_lexemes_survive(tmp_path):
    d = write_tsv(tmp_path, [("p1", "n", ["Wiedza", "źródło_wiedzy"])])
    g, _ = parse_generic_tsv(GenericTsvBundle.from_directory(d))
    assert g["p1"].lemmas == ("wiedza", "źródło wiedzy")


def test_ilinks_two_lines(tmp_path):
    p = tmp_path / "ilinks.tsv"
    p.write_text("source\ttarget\ttype\np1\te1\ti_synonymy\np2\te2\ti_hyponymy\n")
    links = parse_ilinks_tsv(p)
    assert [(lk.source_id, lk.target_id) for lk in links] == [("p1", "e1"), ("p2", "e2")]
    assert links[1].link_type.kind is LinkKind.I_HYPONYMY


def test_ilinks_unknown_type_is_kept(tmp_path):
    p = tmp_path / "ilinks.tsv"
    p.write_text("source\ttarget\ttype\np1\te1\ti_near_synonymy\n")
    links = parse_ilinks_tsv(p)
    assert links[0].link_type.tag == "i_near_synonymy"
    assert links.unknown_types == {"i_near_synonymy": 1}


def test_ilinks_malformed(tmp_path):
    p = tmp_path / "ilinks.tsv"
    p.write_text("source\ttarget\ttype\np1\te1\n")
    with pytest.raises(ParseError):
        parse_ilinks_tsv(p)


def test_ilinks_at_full_scale(tmp_path):
    p = tmp_path / "ilinks.tsv"
    rows = "".join(f"p{i}\te{i}\ti_synonymy\n" for i in range(13336))
    p.write_text("source\ttarget\ttype\n" + rows)
    assert len(parse_ilinks_tsv(p)) == 13336


# ---------------------------------------------------------------- round trips


def test_round_trip_fixture(tmp_path, crossing_graph):
    export_generic_tsv(crossing_graph, tmp_path)
    again, _ = parse_generic_tsv(GenericTsvBundle.from_directory(tmp_path), "crossing")
    assert again == crossing_graph


def test_empty_graph_export(tmp_path, data_dir):
    d = tmp_path / "pwn"
    d.mkdir()
    (d / "data.noun").write_text("  1 header  \n")
    g = parse_pwn_database(d)
    export_generic_tsv(g, tmp_path / "out")
    assert (tmp_path / "out" / "synsets.tsv").read_text() == "id\tpos\tlexemes\tgloss\n"
    assert (tmp_path / "out" / "relations.tsv").read_text() == "source\ttarget\ttype\n"
    again, _ = parse_generic_tsv(GenericTsvBundle.from_directory(tmp_path / "out"), "eng")
    assert again == g


def test_export_is_sorted_and_deterministic(tmp_path, crossing_graph):
    a = export_generic_tsv(crossing_graph, tmp_path / "a")
    b = export_generic_tsv(crossing_graph, tmp_path / "b")
    assert [p.read_bytes() for p in a] == [p.read_bytes() for p in b]
    rows = (tmp_path / "a" / "relations.tsv").read_text().splitlines()[1:]
    assert rows == sorted(rows, key=lambda r: tuple(r.split("\t")))


def test_export_with_links(tmp_path, crossing_graph):
    from wnstat.model import InterlingualLink

    export_generic_tsv(crossing_graph, tmp_path, links=[InterlingualLink("t", "e9")])
    assert parse_ilinks_tsv(tmp_path / "ilinks.tsv")[0].target_id == "e9"


def test_pwn_round_trip(tmp_path, data_dir):
    g = parse_pwn_database(data_dir / "pwn_two")
    export_generic_tsv(g, tmp_path)
    again, _ = parse_generic_tsv(GenericTsvBundle.from_directory(tmp_path), "eng")
    assert again == g


lemma_text = st.text(alphabet="abcżółXYZ_ -", min_size=1, max_size=8).filter(lambda s: s.replace("_", " ").strip())


@st.composite
def random_bundles(draw):
    n = draw(st.integers(1, 8))
    synsets = []
    for i in range(n):
        lemmas = draw(st.lists(lemma_text, min_size=1, max_size=3))
        synsets.append((f"s{i}", draw(st.sampled_from("nvarx")), lemmas))
    types = st.sampled_from(["hypernym", "hyponym", "meronym", "holonym", "antonym", "similar_to"])
    rels = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1), types), max_size=15))
    return synsets, [(f"s{a}", f"s{b}", t) for a, b, t in rels]


@given(random_bundles())
@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
def test_round_trip_property(tmp_path, bundle):
    synsets, rels = bundle
    src = tmp_path / "src"
    out = tmp_path / "out"
    for d in (src, out):
        shutil.rmtree(d, ignore_errors=True)
    write_tsv(src, synsets, rels)
    g, _ = parse_generic_tsv(GenericTsvBundle.from_directory(src))
    assert validate_graph(g) == []
    export_generic_tsv(g, out)
    again, _ = parse_generic_tsv(GenericTsvBundle.from_directory(out))
    assert again == g
    assert {s.id: s.lemmas for s in again.synsets} == {s.id: s.lemmas for s in g.synsets}
    # parsing the same bytes twice gives the same graph
    assert parse_generic_tsv(GenericTsvBundle.from_directory(src))[0] == g
