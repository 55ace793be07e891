import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from mafkernel import PhyloTree, TreeSet, parse_newick
from mafkernel.generate import random_instance, random_tree

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

# Figures, transcribed as Newick
FIG1 = "((a,b),(c,d),(e,(f,(g,((h,i),(j,(k,(l,m))))))));"
FIG2 = ("((a,b),(c,d),(e,f));", "((a,e),(c,d),(b,f));")
FIG3 = "((g,(f,(e,((a,b),(c,d))))),(h,(i,(j,k))));"
FIG4 = ("((a,((d,e),b)),c);", "((a,b),((d,e),c));")
FIG5 = FIG2
FIG5_REDUCED = ("((a,b),c,(e,f));", "((a,e),c,(b,f));")
FIG6 = ("(a,b,(c,(d,(e,(f,g)))));", "(g,b,(c,(d,(e,(f,a)))));")
FIG6_REDUCED = ("((a,b),c,(d,g));", "((g,b),c,(d,a));")


def treeset(newicks, rooted=False) -> TreeSet:
    return TreeSet(tuple(parse_newick(s, rooted) for s in newicks))


@pytest.fixture
def fig1():
    return parse_newick(FIG1, rooted=False)


@pytest.fixture
def fig2():
    return treeset(FIG2)


@pytest.fixture
def fig3():
    return parse_newick(FIG3, rooted=True)


@pytest.fixture
def fig4():
    return treeset(FIG4, rooted=True)


@pytest.fixture
def fig6():
    return treeset(FIG6)


def labels(n):
    return [chr(ord("a") + i) for i in range(n)]


@st.composite
def trees(draw, min_n=1, max_n=9, rooted=None):
    n = draw(st.integers(min_n, max_n))
    r = draw(st.booleans()) if rooted is None else rooted
    seed = draw(st.integers(0, 2**32 - 1))
    return random_tree(labels(n), r, random.Random(seed))


@st.composite
def treesets(draw, min_n=1, max_n=8, t_values=(2, 3), rooted=None):
    n = draw(st.integers(min_n, max_n))
    t = draw(st.sampled_from(t_values))
    r = draw(st.booleans()) if rooted is None else rooted
    seed = draw(st.integers(0, 2**32 - 1))
    return random_instance(n, t, r, seed, labels=labels(n))


@st.composite
def partitions(draw, taxa):
    taxa = sorted(taxa)
    ids = [draw(st.integers(0, i)) for i in range(len(taxa))]
    groups = {}
    for x, b in zip(taxa, ids):
        groups.setdefault(b, []).append(x)
    return list(groups.values())


def identical_set(tree: PhyloTree, t: int = 3) -> TreeSet:
    return TreeSet(tuple([tree] * t))


# -- acceptance summary ----------------------------------------------------------

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}")
