"""QDIMACS reader and writer.

Accepted shape: optional comment lines (leading 'c'), one header
`p cnf <vars> <clauses>`, quantifier lines `a ...vars... 0` /
`e ...vars... 0`, then clauses as 0-terminated literal runs.  Clauses
may span lines and several may share a line.  Parsing is tolerant where
the format is sloppy in the wild: header count mismatches and free
variables are warnings, not errors; free variables are bound in a fresh
outermost existential block.
"""

from dataclasses import dataclass, field

from .formula import EXISTS, Qbf


class ParseError(Exception):
    """Base for QDIMACS parse failures; .line is 1-based."""

    def __init__(self, message, line):
        super().__init__("line %d: %s" % (line, message))
        self.line = line


class MalformedHeader(ParseError):
    pass


class UnterminatedClause(ParseError):
    pass


class LiteralOutOfRange(ParseError):
    pass


class QuantifierAfterClauses(ParseError):
    pass


class DuplicateQuantification(ParseError):
    pass


@dataclass
class ParseDiagnostics:
    declared_vars: int = 0
    declared_clauses: int = 0
    free_vars: tuple = ()
    dropped_tautologies: int = 0
    warnings: list = field(default_factory=list)


def _ints(tokens, lineno):
    out = []
    for t in tokens:
        try:
            out.append(int(t))
        except ValueError:
            raise ParseError("bad token %r" % t, lineno) from None
    return out


def parse(text):
    """Parse QDIMACS text into (Qbf, ParseDiagnostics)."""
    diag = ParseDiagnostics()
    header = None
    blocks = []
    quantified = set()
    clauses = []
    cur = []
    cur_start = 0
    in_clauses = False
    lineno = 0
    for raw in text.splitlines():
        lineno += 1
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            if header is not None:
                raise MalformedHeader("duplicate header", lineno)
            parts = line.split()
            if len(parts) != 4 or parts[0] != "p" or parts[1] != "cnf":
                raise MalformedHeader("expected 'p cnf <vars> <clauses>'", lineno)
            try:
                nums = _ints(parts[2:], lineno)
            except ParseError:
                raise MalformedHeader("expected 'p cnf <vars> <clauses>'", lineno) from None
            if nums[0] < 0 or nums[1] < 0:
                raise MalformedHeader("negative count", lineno)
            header = tuple(nums)
            diag.declared_vars, diag.declared_clauses = header
            continue
        if line[0] in "ae" and line.split()[0] in ("a", "e"):
            if header is None:
                raise MalformedHeader("quantifier line before header", lineno)
            if in_clauses:
                raise QuantifierAfterClauses("quantifier line after clauses", lineno)
            toks = _ints(line.split()[1:], lineno)
            if not toks or toks[-1] != 0:
                raise UnterminatedClause("quantifier line not 0-terminated", lineno)
            if 0 in toks[:-1]:
                raise ParseError("tokens after terminator", lineno)
            vids = toks[:-1]
            for v in vids:
                if v < 0 or v > header[0]:
                    raise LiteralOutOfRange("variable %d out of range" % v, lineno)
                if v in quantified:
                    raise DuplicateQuantification("variable %d quantified twice" % v, lineno)
                quantified.add(v)
            if not vids:
                diag.warnings.append("line %d: empty quantifier block" % lineno)
                continue
            blocks.append((line.split()[0], vids))
            continue
        # clause literals
        if header is None:
            raise MalformedHeader("clause before header", lineno)
        if not in_clauses:
            in_clauses = True
        for l in _ints(line.split(), lineno):
            if l == 0:
                clauses.append(cur)
                cur = []
            else:
                if abs(l) > header[0]:
                    raise LiteralOutOfRange("literal %d out of range" % l, lineno)
                if not cur:
                    cur_start = lineno
                cur.append(l)
    if header is None:
        raise MalformedHeader("missing header", lineno or 1)
    if cur:
        raise UnterminatedClause("clause not 0-terminated", cur_start)
    used = {abs(l) for c in clauses for l in c}
    free = tuple(sorted(used - quantified))
    if free:
        blocks.insert(0, (EXISTS, list(free)))
        diag.free_vars = free
        diag.warnings.append(
            "%d free variable(s) bound in an outermost existential block" % len(free)
        )
    if len(clauses) != header[1]:
        diag.warnings.append(
            "header declares %d clauses, found %d" % (header[1], len(clauses))
        )
    q = Qbf(blocks, clauses)
    diag.dropped_tautologies = q.dropped_tautologies
    if q.dropped_tautologies:
        diag.warnings.append("%d tautological clause(s) dropped" % q.dropped_tautologies)
    return q, diag


def parse_file(path):
    with open(path, "r", encoding="utf-8", errors="replace") as f:
        return parse(f.read())


def write(q):
    """Render a formula as QDIMACS; inverse of parse up to ordering."""
    lines = ["p cnf %d %d" % (q.max_id, len(q.matrix))]
    for b in q.blocks:
        lines.append(" ".join([b.quantifier] + [str(v) for v in b.variables] + ["0"]))
    for c in q.matrix:
        lines.append(" ".join([str(l) for l in c] + ["0"]))
    return "\n".join(lines) + "\n"


def write_file(q, path):
    with open(path, "w", encoding="utf-8") as f:
        f.write(write(q))
