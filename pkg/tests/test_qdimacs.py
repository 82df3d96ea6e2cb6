import random

import pytest

from qexpand import qdimacs
from qexpand.formula import EXISTS, FORALL, Qbf
from qexpand.qdimacs import (
    DuplicateQuantification,
    LiteralOutOfRange,
    MalformedHeader,
    ParseError,
    QuantifierAfterClauses,
    UnterminatedClause,
)

BASIC = """\
c a small instance
p cnf 4 3
a 1 0
e 2 0
a 3 0
e 4 0
1 2 4 0
-1 -2 4 0
3 -4 0
"""


def test_parse_basic():
    q, diag = qdimacs.parse(BASIC)
    assert q.universals == (1, 3)
    assert q.existentials == (2, 4)
    assert q.matrix == ((1, 2, 4), (-1, -2, 4), (3, -4))
    assert diag.declared_vars == 4
    assert diag.declared_clauses == 3
    assert diag.warnings == []


def test_parse_clause_spanning_lines_and_shared_line():
    q, _ = qdimacs.parse("p cnf 3 3\ne 1 2 3 0\n1 2\n3 0 -1 0\n-2 -3 0\n")
    assert q.matrix == ((1, 2, 3), (-1,), (-2, -3))


def test_parse_crlf_and_blank_lines():
    q, diag = qdimacs.parse("c x\r\np cnf 2 1\r\n\r\ne 1 2 0\r\n1 -2 0\r\n")
    assert q.matrix == ((1, -2),)
    assert diag.warnings == []


def test_parse_free_variables():
    q, diag = qdimacs.parse("p cnf 3 2\na 1 0\n1 2 0\n-3 0\n")
    assert diag.free_vars == (2, 3)
    assert q.blocks[0].quantifier == EXISTS
    assert q.blocks[0].variables == (2, 3)
    assert q.blocks[1].quantifier == FORALL
    assert any("free variable" in w for w in diag.warnings)


def test_parse_header_mismatch_is_warning():
    _, diag = qdimacs.parse("p cnf 2 5\ne 1 2 0\n1 2 0\n")
    assert any("declares 5 clauses, found 1" in w for w in diag.warnings)


def test_parse_empty_clause():
    q, _ = qdimacs.parse("p cnf 1 1\ne 1 0\n0\n")
    assert q.matrix == ((),)


def test_parse_empty_quantifier_block_warns():
    q, diag = qdimacs.parse("p cnf 1 1\ne 0\ne 1 0\n1 0\n")
    assert len(q.blocks) == 1
    assert any("empty quantifier block" in w for w in diag.warnings)


@pytest.mark.parametrize(
    "text,exc,line",
    [
        ("p cnf x 1\n", MalformedHeader, 1),
        ("p cnf 1\n", MalformedHeader, 1),
        ("p dnf 1 1\n", MalformedHeader, 1),
        ("c only comments\n", MalformedHeader, 1),
        ("1 2 0\n", MalformedHeader, 1),
        ("e 1 0\np cnf 1 0\n", MalformedHeader, 1),
        ("p cnf 1 0\np cnf 1 0\n", MalformedHeader, 2),
        ("p cnf 2 1\ne 1 2\n1 0\n", UnterminatedClause, 2),
        ("p cnf 2 1\ne 1 2 0\n1 2\n", UnterminatedClause, 3),
        ("p cnf 2 1\ne 1 2 0\n1\n2\n", UnterminatedClause, 3),
        ("p cnf 2 1\ne 1 2 0\n1 3 0\n", LiteralOutOfRange, 3),
        ("p cnf 2 1\ne 1 3 0\n1 0\n", LiteralOutOfRange, 2),
        ("p cnf 2 1\ne 1 -2 0\n1 0\n", LiteralOutOfRange, 2),
        ("p cnf 2 1\ne 1 0\n1 0\na 2 0\n", QuantifierAfterClauses, 4),
        ("p cnf 2 1\ne 1 0\na 1 0\n1 0\n", DuplicateQuantification, 3),
        ("p cnf 2 1\ne 1 0 2 0\n1 0\n", ParseError, 2),
        ("p cnf 2 1\ne 1 zz 0\n", ParseError, 2),
    ],
)
def test_parse_errors(text, exc, line):
    with pytest.raises(exc) as ei:
        qdimacs.parse(text)
    assert ei.value.line == line


def test_error_hierarchy():
    assert issubclass(LiteralOutOfRange, ParseError)
    assert issubclass(MalformedHeader, ParseError)


def test_write_basic():
    q, _ = qdimacs.parse(BASIC)
    out = qdimacs.write(q)
    assert out.splitlines()[0] == "p cnf 4 3"
    assert "a 1 0" in out
    assert out.endswith("3 -4 0\n")


def test_write_empty_clause_and_no_clauses():
    q = Qbf([(EXISTS, [1])], [[]])
    assert qdimacs.write(q).splitlines()[-1] == "0"
    q2 = Qbf([(FORALL, [2, 1])], [])
    assert qdimacs.write(q2) == "p cnf 2 0\na 2 1 0\n"


def test_roundtrip_files(tmp_path):
    p = tmp_path / "f.qdimacs"
    q, _ = qdimacs.parse(BASIC)
    qdimacs.write_file(q, p)
    q2, _ = qdimacs.parse_file(p)
    assert q2 == q


def random_qbf(rng):
    nvars = rng.randint(1, 10)
    vids = list(range(1, nvars + 1))
    rng.shuffle(vids)
    blocks = []
    kind = rng.choice([FORALL, EXISTS])
    i = 0
    while i < nvars:
        take = rng.randint(1, nvars - i)
        blocks.append((kind, vids[i : i + take]))
        kind = EXISTS if kind == FORALL else FORALL
        i += take
    clauses = []
    for _ in range(rng.randint(0, 12)):
        k = rng.randint(1, min(4, nvars))
        vs = rng.sample(range(1, nvars + 1), k)
        clauses.append([v if rng.random() < 0.5 else -v for v in vs])
    return Qbf(blocks, clauses)


def test_roundtrip_random():
    rng = random.Random(31)
    for _ in range(300):
        q = random_qbf(rng)
        q2, diag = qdimacs.parse(qdimacs.write(q))
        assert q2 == q
        assert not diag.warnings
