import pytest
from hypothesis import given, strategies as st

from litcapture.exceptions import EmptyTitle, ParseError, UnsupportedFormat
from litcapture.records import (
    ArticleRecord, RankedList, dedup_prefix, family_name, normalize_key, parse_export, write_csv,
)


def rec(title, authors=("A. Author",)):
    return ArticleRecord(title, authors)


def test_key_ignores_case_punctuation_and_author_format():
    a = normalize_key(rec("Community Detection in Graphs!", ["S. Fortunato"]))
    b = normalize_key(rec("community detection in graphs", ["Fortunato, S."]))
    assert a == b


def test_key_differs_on_authors():
    assert normalize_key(rec("Same", ["A. Smith"])) != normalize_key(rec("Same", ["B. Jones"]))


def test_key_author_order_and_diacritics():
    a = normalize_key(rec("Über Graphen", ["Müller, K.", "Erdős, P."]))
    b = normalize_key(rec("uber graphen", ["P. Erdos", "K. Muller"]))
    assert a == b


def test_empty_title():
    with pytest.raises(EmptyTitle):
        normalize_key(rec("!!!"))


@pytest.mark.parametrize(
    "name,family",
    [
        ("Fortunato, S.", "fortunato"),
        ("S. Fortunato", "fortunato"),
        ("Fortunato S", "fortunato"),
        ("Santo Fortunato", "fortunato"),
        ("van der Berg, J.", "vanderberg"),
        ("Newman", "newman"),
    ],
)
def test_family_name(name, family):
    assert family_name(name) == family


titles = st.text(min_size=1, max_size=40).filter(lambda t: any(c.isalnum() for c in t))
names = st.lists(st.text(min_size=1, max_size=20), max_size=4)


@given(titles, names)
def test_key_idempotent(title, authors):
    try:
        key = normalize_key(rec(title, authors))
    except EmptyTitle:
        return
    again = normalize_key(rec(key.normalized_title, sorted(key.normalized_authors)))
    assert again == key


def lst(titles):
    return RankedList.from_records([rec(t) for t in titles])


def test_dedup_prefix_examples():
    keys = dedup_prefix(lst(["a", "b", "a", "c"]), 4)
    assert [k.normalized_title for k in keys] == ["a", "b", "c"]
    assert [k.normalized_title for k in dedup_prefix(lst(["a", "b", "c"]), 2)] == ["a", "b"]
    assert len(dedup_prefix(lst(["a", "b"]), 10)) == 2


def test_dedup_prefix_constructed_fixture():
    unique = [f"paper {i}" for i in range(470)]
    dup_positions = range(100, 500, 13)[:30]
    titles = list(unique)
    for k, pos in enumerate(dup_positions):
        titles.insert(pos, unique[k].upper() + "!")
    assert len(titles) == 500
    keys = dedup_prefix(lst(titles), 500)
    assert len(keys) == len({t.lower().rstrip("!") for t in titles}) == 470


@given(st.lists(st.sampled_from("abcdefgh"), min_size=1, max_size=30))
def test_dedup_prefix_monotone(titles):
    ranked = lst(titles)
    prev = []
    for n in range(1, len(titles) + 2):
        cur = dedup_prefix(ranked, n)
        assert cur[: len(prev)] == prev
        assert len(prev) <= len(cur) <= n
        prev = cur


CSV = b"\xef\xbb\xbftitle,authors,year\nFirst paper,\"Fortunato, S.; Newman, M.\",2010\nSecond,Doe J,\nThird,,2007\n"


def test_parse_csv():
    ranked = parse_export(CSV, "csv", "GS")
    assert [r.rank for r in ranked] == [1, 2, 3]
    assert ranked.entries[0].authors == ("Fortunato, S.", "Newman, M.")
    assert ranked.entries[1].year is None
    assert ranked.entries[2].authors == ()
    assert ranked.label == "GS" and ranked.entries[0].source_label == "GS"


def test_parse_csv_errors():
    with pytest.raises(ParseError, match="header"):
        parse_export(b"name,year\nx,1\n", "csv")
    with pytest.raises(ParseError) as exc:
        parse_export(b"title,authors,year\nok,a,2000\n,b,2001\n", "csv")
    assert exc.value.record == 2
    with pytest.raises(ParseError, match="year"):
        parse_export(b"title,authors,year\nok,a,soon\n", "csv")


RIS = """TY  - JOUR
TI  - Community detection in graphs
AU  - Fortunato, Santo
PY  - 2010
JO  - Physics Reports
ER  -

TY  - JOUR
T1  - Communities in networks
AU  - Porter, Mason A.
AU  - Onnela, Jukka-Pekka
AU  - Mucha, Peter J.
PY  - 2009///
UR  - http://example.org
ER  -
"""


def test_parse_ris():
    ranked = parse_export(RIS.encode(), "ris")
    assert len(ranked) == 2
    first, second = ranked.entries
    assert first.title == "Community detection in graphs"
    assert first.venue == "Physics Reports"
    assert second.authors == ("Porter, Mason A.", "Onnela, Jukka-Pekka", "Mucha, Peter J.")
    assert second.year == 2009 and second.rank == 2


def test_parse_ris_truncated():
    broken = RIS.rsplit("ER  -", 1)[0]
    with pytest.raises(ParseError) as exc:
        parse_export(broken.encode(), "ris")
    assert exc.value.record == 2


BIB = r"""
@comment{exported list}
@article{fortunato2010,
  title = {Community detection in {G}raphs},
  author = {Fortunato, Santo},
  journal = "Physics Reports",
  year = 2010,
}
@inproceedings{x,
  author = {Girvan, M. and Newman, M. E. J.},
  title = "Community structure in social " # "and biological networks",
  booktitle = {PNAS},
  year = {2002}
}
"""


def test_parse_bibtex():
    ranked = parse_export(BIB.encode(), "bibtex")
    assert len(ranked) == 2
    first, second = ranked.entries
    assert first.title == "Community detection in Graphs"
    assert first.year == 2010 and first.venue == "Physics Reports"
    assert second.authors == ("Girvan, M.", "Newman, M. E. J.")
    assert second.title == "Community structure in social and biological networks"
    assert normalize_key(second).normalized_authors == {"girvan", "newman"}


def test_parse_bibtex_unbalanced():
    with pytest.raises(ParseError) as exc:
        parse_export(b"@article{a, title={ok}}\n@article{b, title = {never closed", "bibtex")
    assert exc.value.record == 2


def test_unsupported_format():
    with pytest.raises(UnsupportedFormat):
        parse_export(b"", "endnote")


def test_invalid_utf8():
    with pytest.raises(ParseError, match="UTF-8"):
        parse_export(b"title,authors,year\n\xff\xfe,a,1\n", "csv")


safe_text = st.text(
    alphabet=st.characters(blacklist_categories=("Cs", "Cc"), blacklist_characters=";\r\n\x85  "),
    min_size=1, max_size=30,
).map(str.strip).filter(bool)


@given(st.lists(st.tuples(safe_text, st.lists(safe_text, max_size=3), st.none() | st.integers(1000, 2999)),
                min_size=1, max_size=10))
def test_csv_round_trip(rows):
    ranked = RankedList.from_records(
        [ArticleRecord(t, tuple(a), y) for t, a, y in rows], "x"
    )
    again = parse_export(write_csv(ranked).encode(), "csv", "x")
    assert [(r.title, r.authors, r.year) for r in again] == [(r.title, r.authors, r.year) for r in ranked]
    assert parse_export(write_csv(again).encode(), "csv", "x") == again
