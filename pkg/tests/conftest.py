import pytest

from litcapture.records import ArticleRecord, RankedList


def make_list(titles, label="", authors=("A. Author",)):
    return RankedList.from_records(
        [ArticleRecord(t, authors) for t in titles], label
    )


def fig2_titles(length=100):
    """Two result lists whose overlap stays at 1 until n=20, grows by one
    per step until n=50, then stays flat."""
    head = ["shared seed"]
    tail1 = [f"only one {i}" for i in range(length)]
    tail2 = [f"only two {i}" for i in range(length)]
    middle = [f"common {i}" for i in range(30)]
    l1 = head + tail1[:19] + middle + tail1[19:]
    l2 = head + tail2[:19] + middle + tail2[19:]
    return l1[:length], l2[:length]


@pytest.fixture
def disjoint_lists():
    return (
        make_list([f"alpha {i}" for i in range(500)], "E1"),
        make_list([f"beta {i}" for i in range(500)], "E2"),
    )


@pytest.fixture
def fig2_lists():
    l1, l2 = fig2_titles()
    return make_list(l1, "E1"), make_list(l2, "E2")
