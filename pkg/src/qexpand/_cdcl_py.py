"""Incremental CDCL SAT kernel, pure Python edition.

Two-watched-literal propagation, first-UIP learning, VSIDS branching
with a deterministic tie-break on variable index, geometric restarts,
fixed default phase False, and literal assumptions with
failed-assumption extraction.  qexpand._cdcl is the compiled twin;
the two must stay in lock step operation for operation so that both
produce identical models, counters, and proof traces.

Variables are 1-based ints.  Internally a literal is encoded as
2*v (positive) or 2*v+1 (negative); clause references are indices
into the clause list.  Learned clauses are never deleted: instances
here live for one expansion run, and keeping every learned clause
keeps the recorded trace checkable by plain unit propagation.
"""

import time

SAT = 1
UNSAT = -1
UNKNOWN = 0

_RESCALE_LIMIT = 1e100
_RESCALE = 1e-100
_ACT_BUMP_DECAY = 1.0 / 0.95


def _intern(l):
    return (l << 1) if l > 0 else ((-l) << 1 | 1)


def _extern(p):
    return -(p >> 1) if p & 1 else (p >> 1)


class Kernel:
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
        self._rand = (seed & 0xFFFFFFFF) or 1
        self._assigns = [0]  # 0 undef, 1 true, 2 false; index 0 unused
        self._level = [0]
        self._reason = [-1]
        self._act = [0.0]
        self._seen = bytearray(1)
        self._hpos = [-1]
        self._heap = []
        self._watches = [[], []]
        self._clauses = []
        self._trail = []
        self._trail_lim = []
        self._qhead = 0
        self._var_inc = 1.0
        self._trace = []

    # -- variables ----------------------------------------------------

    def ensure_vars(self, n):
        while self.nvars < n:
            self.nvars += 1
            self._assigns.append(0)
            self._level.append(0)
            self._reason.append(-1)
            self._act.append(0.0)
            self._seen.append(0)
            self._hpos.append(-1)
            self._watches.append([])
            self._watches.append([])
            self._hinsert(self.nvars)

    def _value(self, p):
        va = self._assigns[p >> 1]
        if va == 0:
            return 0
        return 3 - va if p & 1 else va

    # -- branching heap (max-activity, ties to the smaller index) -----

    def _hbetter(self, u, v):
        au = self._act[u]
        av = self._act[v]
        return au > av or (au == av and u < v)

    def _hup(self, i):
        heap = self._heap
        hpos = self._hpos
        v = heap[i]
        while i > 0:
            pi = (i - 1) >> 1
            pv = heap[pi]
            if not self._hbetter(v, pv):
                break
            heap[i] = pv
            hpos[pv] = i
            i = pi
        heap[i] = v
        hpos[v] = i

    def _hdown(self, i):
        heap = self._heap
        hpos = self._hpos
        v = heap[i]
        n = len(heap)
        while True:
            l = 2 * i + 1
            if l >= n:
                break
            r = l + 1
            c = r if r < n and self._hbetter(heap[r], heap[l]) else l
            cv = heap[c]
            if not self._hbetter(cv, v):
                break
            heap[i] = cv
            hpos[cv] = i
            i = c
        heap[i] = v
        hpos[v] = i

    def _hinsert(self, v):
        if self._hpos[v] != -1:
            return
        self._heap.append(v)
        self._hpos[v] = len(self._heap) - 1
        self._hup(len(self._heap) - 1)

    def _hpop(self):
        heap = self._heap
        v = heap[0]
        self._hpos[v] = -1
        last = heap.pop()
        if heap:
            heap[0] = last
            self._hpos[last] = 0
            self._hdown(0)
        return v

    def _bump(self, v):
        act = self._act
        act[v] += self._var_inc
        if act[v] > _RESCALE_LIMIT:
            for i in range(1, self.nvars + 1):
                act[i] *= _RESCALE
            self._var_inc *= _RESCALE
        if self._hpos[v] != -1:
            self._hup(self._hpos[v])

    # -- clauses ------------------------------------------------------

    def add_clause(self, lits):
        if not self.ok:
            return
        mx = 0
        for l in lits:
            a = l if l > 0 else -l
            if a > mx:
                mx = a
        self.ensure_vars(mx)
        out = []
        have = set()
        for l in lits:
            p = _intern(l)
            v = self._value(p)
            if v == 1:
                return  # satisfied at top level
            if v == 2:
                continue
            if p ^ 1 in have:
                return  # tautology
            if p not in have:
                have.add(p)
                out.append(p)
        self.num_clauses += 1
        if not out:
            self.ok = False
            if self.record_trace:
                self._trace.append(())
            return
        if len(out) == 1:
            self._enqueue(out[0], -1)
            return
        ci = len(self._clauses)
        self._clauses.append(out)
        self._watches[out[0]].append(ci)
        self._watches[out[1]].append(ci)

    # -- trail --------------------------------------------------------

    def _enqueue(self, p, reason):
        v = p >> 1
        self._assigns[v] = 2 if p & 1 else 1
        self._level[v] = len(self._trail_lim)
        self._reason[v] = reason
        self._trail.append(p)

    def _cancel_until(self, lvl):
        if len(self._trail_lim) <= lvl:
            return
        trail = self._trail
        limit = self._trail_lim[lvl]
        assigns = self._assigns
        hpos = self._hpos
        for i in range(len(trail) - 1, limit - 1, -1):
            v = trail[i] >> 1
            assigns[v] = 0
            if hpos[v] == -1:
                self._hinsert(v)
        del trail[limit:]
        del self._trail_lim[lvl:]
        self._qhead = limit

    def _propagate(self):
        trail = self._trail
        clauses = self._clauses
        watches = self._watches
        assigns = self._assigns
        while self._qhead < len(trail):
            pt = trail[self._qhead]
            self._qhead += 1
            self.propagations += 1
            fp = pt ^ 1  # literal that just became false
            ws = watches[fp]
            i = j = 0
            n = len(ws)
            while i < n:
                ci = ws[i]
                i += 1
                c = clauses[ci]
                if c[0] == fp:
                    c[0] = c[1]
                    c[1] = fp
                first = c[0]
                va = assigns[first >> 1]
                fv = 0 if va == 0 else (3 - va if first & 1 else va)
                if fv == 1:
                    ws[j] = ci
                    j += 1
                    continue
                found = False
                for k in range(2, len(c)):
                    q = c[k]
                    va = assigns[q >> 1]
                    if va == 0 or (3 - va if q & 1 else va) != 2:
                        c[1] = q
                        c[k] = fp
                        watches[q].append(ci)
                        found = True
                        break
                if found:
                    continue
                ws[j] = ci
                j += 1
                if fv == 2:
                    while i < n:
                        ws[j] = ws[i]
                        j += 1
                        i += 1
                    del ws[j:]
                    self._qhead = len(trail)
                    return ci
                self._enqueue(first, ci)
            del ws[j:]
        return -1

    # -- learning -----------------------------------------------------

    def _analyze(self, confl):
        learnt = [0]
        trail = self._trail
        level = self._level
        seen = self._seen
        to_clear = []
        cur = len(self._trail_lim)
        pathc = 0
        p = -1
        idx = len(trail) - 1
        while True:
            c = self._clauses[confl]
            for k in range(0 if p == -1 else 1, len(c)):
                q = c[k]
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = 1
                    to_clear.append(v)
                    self._bump(v)
                    if level[v] >= cur:
                        pathc += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            v = p >> 1
            seen[v] = 0
            pathc -= 1
            idx -= 1
            if pathc <= 0:
                break
            confl = self._reason[v]
        learnt[0] = p ^ 1
        if len(learnt) == 1:
            bt = 0
        else:
            mi = 1
            for i in range(2, len(learnt)):
                if level[learnt[i] >> 1] > level[learnt[mi] >> 1]:
                    mi = i
            learnt[1], learnt[mi] = learnt[mi], learnt[1]
            bt = level[learnt[1] >> 1]
        for v in to_clear:
            seen[v] = 0
        return learnt, bt

    def _analyze_final(self, p):
        # p: assumption literal found false; walk the trail and collect
        # the assumptions its negation depends on.
        out = [p]
        if not self._trail_lim:
            return out
        seen = self._seen
        trail = self._trail
        seen[p >> 1] = 1
        for i in range(len(trail) - 1, self._trail_lim[0] - 1, -1):
            lq = trail[i]
            v = lq >> 1
            if not seen[v]:
                continue
            r = self._reason[v]
            if r == -1:
                if self._level[v] > 0:
                    out.append(lq)
            else:
                c = self._clauses[r]
                for k in range(1, len(c)):
                    w = c[k] >> 1
                    if self._level[w] > 0:
                        seen[w] = 1
            seen[v] = 0
        seen[p >> 1] = 0
        return out

    def _handle_conflict(self, confl):
        learnt, bt = self._analyze(confl)
        self._cancel_until(bt)
        if len(learnt) == 1:
            self._enqueue(learnt[0], -1)
        else:
            ci = len(self._clauses)
            self._clauses.append(learnt)
            self._watches[learnt[0]].append(ci)
            self._watches[learnt[1]].append(ci)
            self._enqueue(learnt[0], ci)
        if self.record_trace:
            self._trace.append(tuple(_extern(q) for q in learnt))
        self._var_inc *= _ACT_BUMP_DECAY

    # -- branching ----------------------------------------------------

    def _next_rand(self):
        self._rand = (self._rand * 1664525 + 1013904223) & 0xFFFFFFFF
        return self._rand

    def _pick_branch(self):
        if self.random_freq > 0.0 and self.nvars:
            if self._next_rand() / 4294967296.0 < self.random_freq:
                v = 1 + self._next_rand() % self.nvars
                if self._assigns[v] == 0:
                    return v
        while self._heap:
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
        asum = []
        for l in assumptions:
            self.ensure_vars(l if l > 0 else -l)
            asum.append(_intern(l))
        restart_limit = 100
        since_restart = 0
        conflicts_here = 0
        while True:
            confl = self._propagate()
            if confl >= 0:
                self.conflicts += 1
                conflicts_here += 1
                since_restart += 1
                if not self._trail_lim:
                    self.ok = False
                    if self.record_trace:
                        self._trace.append(())
                    self.last_status = UNSAT
                    return UNSAT
                self._handle_conflict(confl)
                if 0 <= conflict_budget <= conflicts_here:
                    self._cancel_until(0)
                    self.last_status = UNKNOWN
                    return UNKNOWN
                if (
                    deadline > 0.0
                    and conflicts_here & 63 == 0
                    and time.monotonic() > deadline
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
            dl = len(self._trail_lim)
            if dl < len(asum):
                q = asum[dl]
                vq = self._value(q)
                if vq == 1:
                    self._trail_lim.append(len(self._trail))
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
                    assigns = self._assigns
                    self.model = [None] + [
                        assigns[i] == 1 for i in range(1, self.nvars + 1)
                    ]
                    self._cancel_until(0)
                    self.last_status = SAT
                    return SAT
                self.decisions += 1
                p = (v << 1) | 1  # default phase: False
            self._trail_lim.append(len(self._trail))
            self._enqueue(p, -1)

    def get_trace(self):
        return list(self._trace)
