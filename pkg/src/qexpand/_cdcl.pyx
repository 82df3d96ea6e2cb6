# cython: language_level=3
"""Incremental CDCL SAT kernel, compiled edition.

Same algorithm as qexpand._cdcl_py operation for operation: identical
decisions, models, counters, and proof traces.  Keep the two in lock
step; any behavior change must land in both files.
"""

import time

from libcpp.vector cimport vector

SAT = 1
UNSAT = -1
UNKNOWN = 0

cdef double _RESCALE_LIMIT = 1e100
cdef double _RESCALE = 1e-100
cdef double _ACT_BUMP_DECAY = 1.0 / 0.95


cdef inline int _intern(int l) nogil:
    return (l << 1) if l > 0 else (((-l) << 1) | 1)


cdef inline int _extern(int p) nogil:
    return -(p >> 1) if p & 1 else (p >> 1)


cdef class Kernel:
    cdef public int nvars
    cdef public bint ok
    cdef public bint record_trace
    cdef public double random_freq
    cdef public long long conflicts
    cdef public long long decisions
    cdef public long long propagations
    cdef public long long restarts
    cdef public long long num_clauses
    cdef public list model
    cdef public list failed
    cdef public int last_status
    cdef unsigned long long _rand
    cdef vector[char] _assigns
    cdef vector[int] _level
    cdef vector[int] _reason
    cdef vector[double] _act
    cdef vector[char] _seen
    cdef vector[int] _hpos
    cdef vector[int] _heap
    cdef vector[vector[int]] _watches
    cdef vector[vector[int]] _clauses
    cdef vector[int] _trail
    cdef vector[int] _trail_lim
    cdef int _qhead
    cdef double _var_inc
    cdef list _trace

    def __init__(self, seed=0, record_trace=False):
        self.nvars = 0
        self.ok = True
        self.record_trace = record_trace
        self.random_freq = 0.0
        self.conflicts = 0
        self.decisions = 0
        self.propagations = 0
        self.restarts = 0
        self.num_clauses = 0
        self.model = []
        self.failed = []
        self.last_status = UNKNOWN
        self._rand = (<unsigned long long> seed) & 0xFFFFFFFFULL
        if self._rand == 0:
            self._rand = 1
        self._assigns.push_back(0)
        self._level.push_back(0)
        self._reason.push_back(-1)
        self._act.push_back(0.0)
        self._seen.push_back(0)
        self._hpos.push_back(-1)
        self._watches.resize(2)
        self._qhead = 0
        self._var_inc = 1.0
        self._trace = []

    # -- variables ----------------------------------------------------

    cpdef ensure_vars(self, int n):
        while self.nvars < n:
            self.nvars += 1
            self._assigns.push_back(0)
            self._level.push_back(0)
            self._reason.push_back(-1)
            self._act.push_back(0.0)
            self._seen.push_back(0)
            self._hpos.push_back(-1)
            self._watches.resize(self._watches.size() + 2)
            self._hinsert(self.nvars)

    cdef inline int _value(self, int p) nogil:
        cdef int va = self._assigns[p >> 1]
        if va == 0:
            return 0
        return 3 - va if p & 1 else va

    # -- branching heap (max-activity, ties to the smaller index) -----

    cdef inline bint _hbetter(self, int u, int v) nogil:
        cdef double au = self._act[u]
        cdef double av = self._act[v]
        return au > av or (au == av and u < v)

    cdef void _hup(self, int i) nogil:
        cdef int v = self._heap[i]
        cdef int pi, pv
        while i > 0:
            pi = (i - 1) >> 1
            pv = self._heap[pi]
            if not self._hbetter(v, pv):
                break
            self._heap[i] = pv
            self._hpos[pv] = i
            i = pi
        self._heap[i] = v
        self._hpos[v] = i

    cdef void _hdown(self, int i) nogil:
        cdef int v = self._heap[i]
        cdef int n = <int> self._heap.size()
        cdef int l, r, c, cv
        while True:
            l = 2 * i + 1
            if l >= n:
                break
            r = l + 1
            if r < n and self._hbetter(self._heap[r], self._heap[l]):
                c = r
            else:
                c = l
            cv = self._heap[c]
            if not self._hbetter(cv, v):
                break
            self._heap[i] = cv
            self._hpos[cv] = i
            i = c
        self._heap[i] = v
        self._hpos[v] = i

    cdef void _hinsert(self, int v) nogil:
        if self._hpos[v] != -1:
            return
        self._heap.push_back(v)
        self._hpos[v] = <int> self._heap.size() - 1
        self._hup(<int> self._heap.size() - 1)

    cdef int _hpop(self) nogil:
        cdef int v = self._heap[0]
        cdef int last
        self._hpos[v] = -1
        last = self._heap.back()
        self._heap.pop_back()
        if self._heap.size() > 0:
            self._heap[0] = last
            self._hpos[last] = 0
            self._hdown(0)
        return v

    cdef void _bump(self, int v) nogil:
        cdef int i
        self._act[v] += self._var_inc
        if self._act[v] > _RESCALE_LIMIT:
            for i in range(1, self.nvars + 1):
                self._act[i] *= _RESCALE
            self._var_inc *= _RESCALE
        if self._hpos[v] != -1:
            self._hup(self._hpos[v])

    # -- clauses ------------------------------------------------------

    def add_clause(self, lits):
        if not self.ok:
            return
        cdef int mx = 0
        cdef int l, a, p, v
        cdef list py = list(lits)
        for l in py:
            a = l if l > 0 else -l
            if a > mx:
                mx = a
        self.ensure_vars(mx)
        cdef vector[int] out
        cdef vector[char] have_pos
        cdef vector[char] have_neg
        have_pos.resize(self.nvars + 1)
        have_neg.resize(self.nvars + 1)
        for l in py:
            p = _intern(l)
            v = self._value(p)
            if v == 1:
                return  # satisfied at top level
            if v == 2:
                continue
            if (have_neg[p >> 1] if not (p & 1) else have_pos[p >> 1]):
                return  # tautology
            if not (have_pos[p >> 1] if not (p & 1) else have_neg[p >> 1]):
                if p & 1:
                    have_neg[p >> 1] = 1
                else:
                    have_pos[p >> 1] = 1
                out.push_back(p)
        self.num_clauses += 1
        if out.size() == 0:
            self.ok = False
            if self.record_trace:
                self._trace.append(())
            return
        if out.size() == 1:
            self._enqueue(out[0], -1)
            return
        cdef int ci = <int> self._clauses.size()
        self._clauses.push_back(out)
        self._watches[out[0]].push_back(ci)
        self._watches[out[1]].push_back(ci)

    # -- trail --------------------------------------------------------

    cdef inline void _enqueue(self, int p, int reason) nogil:
        cdef int v = p >> 1
        if p & 1:
            self._assigns[v] = 2
        else:
            self._assigns[v] = 1
        self._level[v] = <int> self._trail_lim.size()
        self._reason[v] = reason
        self._trail.push_back(p)

    cdef void _cancel_until(self, int lvl) nogil:
        if <int> self._trail_lim.size() <= lvl:
            return
        cdef int limit = self._trail_lim[lvl]
        cdef int i, v
        for i in range(<int> self._trail.size() - 1, limit - 1, -1):
            v = self._trail[i] >> 1
            self._assigns[v] = 0
            if self._hpos[v] == -1:
                self._hinsert(v)
        self._trail.resize(limit)
        self._trail_lim.resize(lvl)
        self._qhead = limit

    cdef int _propagate(self) nogil:
        cdef int pt, fp, i, j, n, ci, first, fv, k, q
        cdef int va
        cdef bint found
        cdef vector[int]* ws
        cdef vector[int]* c
        while self._qhead < <int> self._trail.size():
            pt = self._trail[self._qhead]
            self._qhead += 1
            self.propagations += 1
            fp = pt ^ 1  # literal that just became false
            ws = &self._watches[fp]
            i = 0
            j = 0
            n = <int> ws.size()
            while i < n:
                ci = ws[0][i]
                i += 1
                c = &self._clauses[ci]
                if c[0][0] == fp:
                    c[0][0] = c[0][1]
                    c[0][1] = fp
                first = c[0][0]
                va = self._assigns[first >> 1]
                fv = 0 if va == 0 else (3 - va if first & 1 else va)
                if fv == 1:
                    ws[0][j] = ci
                    j += 1
                    continue
                found = False
                for k in range(2, <int> c.size()):
                    q = c[0][k]
                    va = self._assigns[q >> 1]
                    if va == 0 or (3 - va if q & 1 else va) != 2:
                        c[0][1] = q
                        c[0][k] = fp
                        self._watches[q].push_back(ci)
                        found = True
                        break
                if found:
                    continue
                ws[0][j] = ci
                j += 1
                if fv == 2:
                    while i < n:
                        ws[0][j] = ws[0][i]
                        j += 1
                        i += 1
                    ws.resize(j)
                    self._qhead = <int> self._trail.size()
                    return ci
                self._enqueue(first, ci)
            ws.resize(j)
        return -1

    # -- learning -----------------------------------------------------

    cdef void _analyze(self, int confl, vector[int]* learnt, int* bt_out) nogil:
        cdef vector[int] to_clear
        cdef int cur = <int> self._trail_lim.size()
        cdef int pathc = 0
        cdef int p = -1
        cdef int idx = <int> self._trail.size() - 1
        cdef int k, q, v, start, i, mi, tmp
        cdef vector[int]* c
        learnt.push_back(0)
        while True:
            c = &self._clauses[confl]
            start = 0 if p == -1 else 1
            for k in range(start, <int> c.size()):
                q = c[0][k]
                v = q >> 1
                if not self._seen[v] and self._level[v] > 0:
                    self._seen[v] = 1
                    to_clear.push_back(v)
                    self._bump(v)
                    if self._level[v] >= cur:
                        pathc += 1
                    else:
                        learnt.push_back(q)
            while not self._seen[self._trail[idx] >> 1]:
                idx -= 1
            p = self._trail[idx]
            v = p >> 1
            self._seen[v] = 0
            pathc -= 1
            idx -= 1
            if pathc <= 0:
                break
            confl = self._reason[v]
        learnt[0][0] = p ^ 1
        cdef int bt
        if learnt.size() == 1:
            bt = 0
        else:
            mi = 1
            for i in range(2, <int> learnt.size()):
                if self._level[learnt[0][i] >> 1] > self._level[learnt[0][mi] >> 1]:
                    mi = i
            tmp = learnt[0][1]
            learnt[0][1] = learnt[0][mi]
            learnt[0][mi] = tmp
            bt = self._level[learnt[0][1] >> 1]
        for i in range(<int> to_clear.size()):
            self._seen[to_clear[i]] = 0
        bt_out[0] = bt

    cdef list _analyze_final(self, int p):
        # p: assumption literal found false; walk the trail and collect
        # the assumptions its negation depends on.
        cdef list out = [p]
        if self._trail_lim.size() == 0:
            return out
        cdef int i, lq, v, r, k, w
        cdef vector[int]* c
        self._seen[p >> 1] = 1
        for i in range(<int> self._trail.size() - 1, self._trail_lim[0] - 1, -1):
            lq = self._trail[i]
            v = lq >> 1
            if not self._seen[v]:
                continue
            r = self._reason[v]
            if r == -1:
                if self._level[v] > 0:
                    out.append(lq)
            else:
                c = &self._clauses[r]
                for k in range(1, <int> c.size()):
                    w = c[0][k] >> 1
                    if self._level[w] > 0:
                        self._seen[w] = 1
            self._seen[v] = 0
        self._seen[p >> 1] = 0
        return out

    cdef void _handle_conflict(self, int confl):
        cdef vector[int] learnt
        cdef int bt = 0
        cdef int ci, i
        cdef list tr
        self._analyze(confl, &learnt, &bt)
        self._cancel_until(bt)
        if learnt.size() == 1:
            self._enqueue(learnt[0], -1)
        else:
            ci = <int> self._clauses.size()
            self._clauses.push_back(learnt)
            self._watches[learnt[0]].push_back(ci)
            self._watches[learnt[1]].push_back(ci)
            self._enqueue(learnt[0], ci)
        if self.record_trace:
            tr = []
            for i in range(<int> learnt.size()):
                tr.append(_extern(learnt[i]))
            self._trace.append(tuple(tr))
        self._var_inc *= _ACT_BUMP_DECAY

    # -- branching ----------------------------------------------------

    cdef inline unsigned long long _next_rand(self) nogil:
        self._rand = (self._rand * 1664525ULL + 1013904223ULL) & 0xFFFFFFFFULL
        return self._rand

    cdef int _pick_branch(self) nogil:
        cdef int v
        if self.random_freq > 0.0 and self.nvars:
            if self._next_rand() / 4294967296.0 < self.random_freq:
                v = 1 + <int> (self._next_rand() % <unsigned long long> self.nvars)
                if self._assigns[v] == 0:
                    return v
        while self._heap.size() > 0:
            v = self._hpop()
            if self._assigns[v] == 0:
                return v
        return 0

    # -- main ---------------------------------------------------------

    def solve(self, assumptions=(), conflict_budget=-1, deadline=-1.0):
        self.model = []
        self.failed = []
        if not self.ok:
            self.last_status = UNSAT
            return UNSAT
        cdef vector[int] asum
        cdef int l
        for l in assumptions:
            self.ensure_vars(l if l > 0 else -l)
            asum.push_back(_intern(l))
        cdef long long budget = conflict_budget
        cdef double limit = deadline
        cdef long long restart_limit = 100
        cdef long long since_restart = 0
        cdef long long conflicts_here = 0
        cdef int confl, p, dl, q, vq, v, i
        while True:
            confl = self._propagate()
            if confl >= 0:
                self.conflicts += 1
                conflicts_here += 1
                since_restart += 1
                if self._trail_lim.size() == 0:
                    self.ok = False
                    if self.record_trace:
                        self._trace.append(())
                    self.last_status = UNSAT
                    return UNSAT
                self._handle_conflict(confl)
                if 0 <= budget <= conflicts_here:
                    self._cancel_until(0)
                    self.last_status = UNKNOWN
                    return UNKNOWN
                if (
                    limit > 0.0
                    and (conflicts_here & 63) == 0
                    and time.monotonic() > limit
                ):
                    self._cancel_until(0)
                    self.last_status = UNKNOWN
                    return UNKNOWN
                continue
            if since_restart >= restart_limit:
                restart_limit = restart_limit * 3 // 2
                since_restart = 0
                self.restarts += 1
                self._cancel_until(0)
                continue
            p = -1
            dl = <int> self._trail_lim.size()
            if dl < <int> asum.size():
                q = asum[dl]
                vq = self._value(q)
                if vq == 1:
                    self._trail_lim.push_back(<int> self._trail.size())
                    continue
                if vq == 2:
                    self.failed = [_extern(x) for x in self._analyze_final(q)]
                    self._cancel_until(0)
                    self.last_status = UNSAT
                    return UNSAT
                p = q
            if p == -1:
                v = self._pick_branch()
                if v == 0:
                    self.model = [None] + [
                        self._assigns[i] == 1 for i in range(1, self.nvars + 1)
                    ]
                    self._cancel_until(0)
                    self.last_status = SAT
                    return SAT
                self.decisions += 1
                p = (v << 1) | 1  # default phase: False
            self._trail_lim.push_back(<int> self._trail.size())
            self._enqueue(p, -1)

    def get_trace(self):
        return list(self._trace)
