import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from wnstat.ingest import GenericTsvBundle, parse_generic_tsv  # noqa: E402

DATA = Path(__file__).parent / "data"

# synset id -> supremacy (self included); t has fewer direct hyponyms than c yet more descendants
CROSSING_SUPREMACY = {"t": 9, "a": 5, "b": 3, "c": 4, "d": 1, "e": 1, "f": 1, "g": 1, "h": 1, "x": 3, "y": 2}


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def crossing_graph():
    graph, _ = parse_generic_tsv(GenericTsvBundle.from_directory(DATA / "crossing"), "crossing")
    return graph


@pytest.fixture
def tiny_graph():
    graph, _ = parse_generic_tsv(GenericTsvBundle.from_directory(DATA / "tiny"), "tiny")
    return graph


def _pwn_dir():
    d = os.environ.get("WN_PWN30_DIR")
    if d and (Path(d) / "data.noun").is_file():
        return Path(d)
    return None


@pytest.fixture(scope="session")
def pwn_dir():
    d = _pwn_dir()
    if d is None:
        pytest.skip("set WN_PWN30_DIR to a WordNet 3.0 dict/ directory")
    return d


@pytest.fixture(scope="session")
def pwn_graph(pwn_dir):
    from wnstat.ingest import parse_pwn_database

    return parse_pwn_database(pwn_dir)


def write_tsv(directory: Path, synsets, relations=(), ilinks=None):
    """Write an exchange-format bundle; synsets are (id, pos, lemmas) triples."""
    directory.mkdir(parents=True, exist_ok=True)
    with open(directory / "synsets.tsv", "w", encoding="utf-8") as fh:
        fh.write("id\tpos\tlexemes\tgloss\n")
        for sid, pos, lemmas in synsets:
            fh.write(f"{sid}\t{pos}\t{'|'.join(lemmas)}\t\n")
    with open(directory / "relations.tsv", "w", encoding="utf-8") as fh:
        fh.write("source\ttarget\ttype\n")
        for src, dst, rtype in relations:
            fh.write(f"{src}\t{dst}\t{rtype}\n")
    if ilinks is not None:
        with open(directory / "ilinks.tsv", "w", encoding="utf-8") as fh:
            fh.write("source\ttarget\ttype\n")
            for src, dst, ltype in ilinks:
                fh.write(f"{src}\t{dst}\t{ltype}\n")
    return directory


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
