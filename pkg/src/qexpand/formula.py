"""Prenex CNF formulas: quantifier prefixes, clause matrices, partial assignments.

Literals are nonzero ints in the QDIMACS convention: v is the positive
literal of variable v, -v the negative one.  Clauses are sorted,
duplicate-free tuples of literals; the empty tuple is the empty clause.
Tautological clauses are dropped when a formula is built.
"""

from dataclasses import dataclass

FORALL = "a"
EXISTS = "e"


class ConflictingAssignments(Exception):
    """Composed assignments disagree on some variable."""


@dataclass(frozen=True)
class Variable:
    id: int
    quantifier: str  # FORALL or EXISTS
    block: int  # 0-based index into the prefix
    position: int  # 0-based position in prefix order


@dataclass(frozen=True)
class Block:
    quantifier: str
    variables: tuple


def canonical_clause(lits):
    """Sort literals by variable id (negative first) and drop duplicates."""
    return tuple(sorted(set(lits), key=lambda l: (abs(l), l > 0)))


def is_tautology(clause):
    s = set(clause)
    return any(-l in s for l in s)


class Qbf:
    """A prenex CNF formula.

    blocks: iterable of (quantifier, variable-id list) pairs, outermost
    first.  Adjacent blocks with the same quantifier are legal; use
    normalize_prefix to merge them.  clauses: iterable of literal lists.
    Clause order is preserved (certificates index into it); tautologies
    are dropped and counted in dropped_tautologies.
    """

    def __init__(self, blocks, clauses):
        blk = []
        variables = {}
        order = []
        for bi, (quant, vids) in enumerate(blocks):
            if quant not in (FORALL, EXISTS):
                raise ValueError("bad quantifier %r" % (quant,))
            if not vids:
                raise ValueError("empty quantifier block %d" % bi)
            vids = tuple(vids)
            for v in vids:
                if not isinstance(v, int) or v <= 0:
                    raise ValueError("bad variable id %r" % (v,))
                if v in variables:
                    raise ValueError("variable %d quantified twice" % v)
                variables[v] = Variable(v, quant, bi, len(order))
                order.append(v)
            blk.append(Block(quant, vids))
        matrix = []
        dropped = 0
        for c in clauses:
            cc = canonical_clause(c)
            for l in cc:
                if abs(l) not in variables:
                    raise ValueError("clause uses unquantified variable %d" % abs(l))
            if is_tautology(cc):
                dropped += 1
                continue
            matrix.append(cc)
        self.blocks = tuple(blk)
        self.matrix = tuple(matrix)
        self.variables = variables
        self.prefix_order = tuple(order)
        self.dropped_tautologies = dropped
        self.universals = tuple(v for v in order if variables[v].quantifier == FORALL)
        self.existentials = tuple(v for v in order if variables[v].quantifier == EXISTS)
        self.max_id = max(order) if order else 0

    @property
    def num_vars(self):
        return len(self.prefix_order)

    @property
    def num_clauses(self):
        return len(self.matrix)

    def var(self, vid):
        return self.variables[vid]

    def quantifier(self, vid):
        return self.variables[vid].quantifier

    def is_universal(self, vid):
        return self.variables[vid].quantifier == FORALL

    def position(self, vid):
        return self.variables[vid].position

    def normalize_prefix(self, drop_unused=False):
        """Merge adjacent same-quantifier blocks; optionally drop variables
        that never occur in the matrix (empty blocks disappear with them)."""
        used = set()
        for c in self.matrix:
            for l in c:
                used.add(abs(l))
        merged = []
        for b in self.blocks:
            vids = [v for v in b.variables if not drop_unused or v in used]
            if not vids:
                continue
            if merged and merged[-1][0] == b.quantifier:
                merged[-1][1].extend(vids)
            else:
                merged.append([b.quantifier, vids])
        return Qbf(merged, self.matrix)

    def __eq__(self, other):
        if not isinstance(other, Qbf):
            return NotImplemented
        return self.blocks == other.blocks and sorted(self.matrix) == sorted(other.matrix)

    __hash__ = None

    def __repr__(self):
        shape = " ".join("%s%d" % (b.quantifier, len(b.variables)) for b in self.blocks)
        return "<Qbf [%s] %d clauses>" % (shape, len(self.matrix))


class Assignment:
    """Partial assignment over a formula's variables.

    Stored densely by prefix position; values are True, False, or None
    (unassigned).  Immutable after construction: restrict/compose return
    new objects, so instances can be shared freely across threads.
    """

    __slots__ = ("qbf", "values", "_by_id", "_key")

    def __init__(self, qbf, values):
        if len(values) != qbf.num_vars:
            raise ValueError("expected %d values" % qbf.num_vars)
        self.qbf = qbf
        self.values = tuple(values)
        by_id = [None] * (qbf.max_id + 1)
        for vid, val in zip(qbf.prefix_order, self.values):
            by_id[vid] = val
        self._by_id = by_id
        self._key = None

    @classmethod
    def empty(cls, qbf):
        return cls(qbf, (None,) * qbf.num_vars)

    @classmethod
    def from_pairs(cls, qbf, pairs):
        if isinstance(pairs, dict):
            pairs = pairs.items()
        vals = [None] * qbf.num_vars
        for vid, val in pairs:
            vals[qbf.position(vid)] = bool(val)
        return cls(qbf, vals)

    def value(self, vid):
        return self._by_id[vid]

    def assigned_ids(self):
        return tuple(v for v, x in zip(self.qbf.prefix_order, self.values) if x is not None)

    def count(self):
        return sum(1 for x in self.values if x is not None)

    def is_full_over(self, var_ids):
        return all(self._by_id[v] is not None for v in var_ids)

    @property
    def domain_tag(self):
        kinds = {self.qbf.quantifier(v) for v in self.assigned_ids()}
        if not kinds:
            return "empty"
        if kinds == {FORALL}:
            return "universal-only"
        if kinds == {EXISTS}:
            return "existential-only"
        return "mixed"

    def restrict(self, var_ids):
        """Keep the values of var_ids, unassign everything else."""
        keep = set(var_ids)
        vals = [x if v in keep else None for v, x in zip(self.qbf.prefix_order, self.values)]
        return Assignment(self.qbf, vals)

    def compose(self, other):
        """Union of two assignments over the same formula."""
        if other.qbf is not self.qbf:
            raise ValueError("assignments over different formulas")
        vals = list(self.values)
        for i, x in enumerate(other.values):
            if x is None:
                continue
            if vals[i] is None:
                vals[i] = x
            elif vals[i] != x:
                raise ConflictingAssignments(
                    "variable %d" % self.qbf.prefix_order[i]
                )
        return Assignment(self.qbf, vals)

    def key(self):
        """Packed byte form, usable as a dict key for dedup."""
        if self._key is None:
            self._key = bytes(
                0 if x is None else (1 if x else 2) for x in self.values
            )
        return self._key

    def literals(self):
        """Assigned variables as signed literals in prefix order."""
        return tuple(
            v if x else -v
            for v, x in zip(self.qbf.prefix_order, self.values)
            if x is not None
        )

    def as_dict(self):
        return {v: x for v, x in zip(self.qbf.prefix_order, self.values) if x is not None}

    def __eq__(self, other):
        if not isinstance(other, Assignment):
            return NotImplemented
        return self.qbf is other.qbf and self.values == other.values

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        parts = ["%d=%s" % (v, "T" if x else "F") for v, x in zip(self.qbf.prefix_order, self.values) if x is not None]
        return "{%s}" % " ".join(parts)


def apply_assignment(a, clauses):
    """Simplify a clause set under a partial assignment.

    Satisfied clauses are dropped, falsified literals removed.  An empty
    clause in the result means the set is falsified; an empty result
    means it is satisfied.
    """
    by_id = a._by_id
    out = []
    for c in clauses:
        reduced = []
        sat = False
        for l in c:
            val = by_id[abs(l)]
            if val is None:
                reduced.append(l)
            elif val == (l > 0):
                sat = True
                break
        if not sat:
            out.append(tuple(reduced))
    return out


def matrix_value(a, clauses):
    """Truth value of a clause set under a, or None if undecided."""
    by_id = a._by_id
    undecided = False
    for c in clauses:
        sat = False
        open_lit = False
        for l in c:
            val = by_id[abs(l)]
            if val is None:
                open_lit = True
            elif val == (l > 0):
                sat = True
                break
        if sat:
            continue
        if open_lit:
            undecided = True
        else:
            return False
    return None if undecided else True
