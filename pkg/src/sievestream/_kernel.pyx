# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled core of the sliding-grid streaming solver.

Mirrors the pure-Python engine in ``solvers.py`` step for step: same window
arithmetic (libm pow/log with the same relative slack), same strict/loose
comparisons, same tie-breaks, same oracle-call accounting.  The objective is
supplied as an array payload; per-sieve state lives in flat arrays indexed
by a circular slot map, and marginal gains are computed incrementally
instead of through a Python oracle call.
"""

from libc.math cimport ceil, floor, log, log1p, pow

import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef double GRID_REL = 1e-12
cdef double FEAS_REL = 1e-12
cdef long EXP_NONE = -(<long>1 << 62)


cdef class Evaluator:
    """Per-sieve incremental objective state."""

    cdef Py_ssize_t n_slots

    cdef void alloc(self, Py_ssize_t n_slots):
        self.n_slots = n_slots

    cdef void reset_slot(self, Py_ssize_t slot):
        pass

    cdef double singleton(self, Py_ssize_t j):
        return 0.0

    cdef double gain(self, Py_ssize_t slot, Py_ssize_t j):
        return 0.0

    cdef void commit(self, Py_ssize_t slot, Py_ssize_t j, double g):
        pass

    cdef double value(self, Py_ssize_t slot):
        return 0.0


cdef class CoverageEval(Evaluator):
    cdef cnp.int64_t[::1] indptr
    cdef cnp.int32_t[::1] ids
    cdef Py_ssize_t universe
    cdef cnp.uint8_t[:, ::1] covered
    cdef double[::1] counts

    def __init__(self, indptr, ids, universe):
        self.indptr = indptr
        self.ids = ids
        self.universe = universe

    cdef void alloc(self, Py_ssize_t n_slots):
        self.n_slots = n_slots
        self.covered = np.zeros((n_slots, max(self.universe, 1)), dtype=np.uint8)
        self.counts = np.zeros(n_slots)

    cdef void reset_slot(self, Py_ssize_t slot):
        cdef Py_ssize_t k
        for k in range(self.universe):
            self.covered[slot, k] = 0
        self.counts[slot] = 0.0

    cdef double singleton(self, Py_ssize_t j):
        return <double>(self.indptr[j] - self.indptr[j - 1])

    cdef double gain(self, Py_ssize_t slot, Py_ssize_t j):
        cdef Py_ssize_t k
        cdef long fresh = 0
        for k in range(self.indptr[j - 1], self.indptr[j]):
            if not self.covered[slot, self.ids[k]]:
                fresh += 1
        return <double>fresh

    cdef void commit(self, Py_ssize_t slot, Py_ssize_t j, double g):
        cdef Py_ssize_t k
        for k in range(self.indptr[j - 1], self.indptr[j]):
            self.covered[slot, self.ids[k]] = 1
        self.counts[slot] += g

    cdef double value(self, Py_ssize_t slot):
        return self.counts[slot]


cdef class LogFeatureEval(Evaluator):
    cdef cnp.int64_t[::1] indptr
    cdef cnp.int32_t[::1] ids
    cdef double[::1] w
    cdef cnp.int32_t[:, ::1] hits
    cdef double[::1] values
    cdef Py_ssize_t n_features

    def __init__(self, indptr, ids, w):
        self.indptr = indptr
        self.ids = ids
        self.w = w
        self.n_features = w.shape[0]

    cdef void alloc(self, Py_ssize_t n_slots):
        self.n_slots = n_slots
        self.hits = np.zeros((n_slots, max(self.n_features, 1)), dtype=np.int32)
        self.values = np.zeros(n_slots)

    cdef void reset_slot(self, Py_ssize_t slot):
        cdef Py_ssize_t k
        for k in range(self.n_features):
            self.hits[slot, k] = 0
        self.values[slot] = 0.0

    cdef double singleton(self, Py_ssize_t j):
        cdef Py_ssize_t k
        cdef double total = 0.0
        for k in range(self.indptr[j - 1], self.indptr[j]):
            total += self.w[self.ids[k]] * log1p(1.0)
        return total

    cdef double gain(self, Py_ssize_t slot, Py_ssize_t j):
        cdef Py_ssize_t k, t
        cdef double total = 0.0
        cdef double c
        for k in range(self.indptr[j - 1], self.indptr[j]):
            t = self.ids[k]
            c = <double>self.hits[slot, t]
            total += self.w[t] * (log1p(c + 1.0) - log1p(c))
        return total

    cdef void commit(self, Py_ssize_t slot, Py_ssize_t j, double g):
        cdef Py_ssize_t k
        for k in range(self.indptr[j - 1], self.indptr[j]):
            self.hits[slot, self.ids[k]] += 1
        self.values[slot] += g

    cdef double value(self, Py_ssize_t slot):
        return self.values[slot]


cdef class PenaltyEval(Evaluator):
    cdef double[:, ::1] dist  # (n, n_sources), clipped at t_max
    cdef double[::1] w
    cdef double t_max
    cdef double[:, ::1] cur
    cdef double[::1] values
    cdef Py_ssize_t n_sources

    def __init__(self, dist, w, t_max):
        self.dist = dist
        self.w = w
        self.t_max = t_max
        self.n_sources = w.shape[0]

    cdef void alloc(self, Py_ssize_t n_slots):
        self.n_slots = n_slots
        self.cur = np.full((n_slots, max(self.n_sources, 1)), self.t_max)
        self.values = np.zeros(n_slots)

    cdef void reset_slot(self, Py_ssize_t slot):
        cdef Py_ssize_t k
        for k in range(self.n_sources):
            self.cur[slot, k] = self.t_max
        self.values[slot] = 0.0

    cdef double singleton(self, Py_ssize_t j):
        cdef Py_ssize_t k
        cdef double total = 0.0
        for k in range(self.n_sources):
            total += self.w[k] * (self.t_max - self.dist[j - 1, k])
        return total

    cdef double gain(self, Py_ssize_t slot, Py_ssize_t j):
        cdef Py_ssize_t k
        cdef double total = 0.0
        cdef double c, dj
        for k in range(self.n_sources):
            c = self.cur[slot, k]
            dj = self.dist[j - 1, k]
            if dj < c:
                total += self.w[k] * (c - dj)
        return total

    cdef void commit(self, Py_ssize_t slot, Py_ssize_t j, double g):
        cdef Py_ssize_t k
        cdef double dj
        for k in range(self.n_sources):
            dj = self.dist[j - 1, k]
            if dj < self.cur[slot, k]:
                self.cur[slot, k] = dj
        self.values[slot] += g

    cdef double value(self, Py_ssize_t slot):
        return self.values[slot]


cdef class ModularEval(Evaluator):
    cdef double[::1] w
    cdef double[::1] values

    def __init__(self, w):
        self.w = w

    cdef void alloc(self, Py_ssize_t n_slots):
        self.n_slots = n_slots
        self.values = np.zeros(n_slots)

    cdef void reset_slot(self, Py_ssize_t slot):
        self.values[slot] = 0.0

    cdef double singleton(self, Py_ssize_t j):
        return self.w[j - 1]

    cdef double gain(self, Py_ssize_t slot, Py_ssize_t j):
        return self.w[j - 1]

    cdef void commit(self, Py_ssize_t slot, Py_ssize_t j, double g):
        self.values[slot] += g

    cdef double value(self, Py_ssize_t slot):
        return self.values[slot]


cdef Evaluator _make_evaluator(payload):
    kind = payload[0]
    if kind == "coverage":
        return CoverageEval(
            np.ascontiguousarray(payload[1], dtype=np.int64),
            np.ascontiguousarray(payload[2], dtype=np.int32),
            int(payload[3]),
        )
    if kind == "logfeatures":
        return LogFeatureEval(
            np.ascontiguousarray(payload[1], dtype=np.int64),
            np.ascontiguousarray(payload[2], dtype=np.int32),
            np.ascontiguousarray(payload[3], dtype=np.float64),
        )
    if kind == "penalty":
        return PenaltyEval(
            np.ascontiguousarray(payload[1], dtype=np.float64),
            np.ascontiguousarray(payload[2], dtype=np.float64),
            float(payload[3]),
        )
    if kind == "modular":
        return ModularEval(np.ascontiguousarray(payload[1], dtype=np.float64))
    raise ValueError(f"unknown kernel payload kind {kind!r}")


cdef inline long _window_lo(double m, double base) noexcept nogil:
    cdef double lo_edge = m / base
    cdef long lo = <long>floor(log(lo_edge) / log(base))
    while pow(base, lo) < lo_edge * (1.0 - GRID_REL):
        lo += 1
    while pow(base, lo - 1) >= lo_edge * (1.0 - GRID_REL):
        lo -= 1
    return lo


cdef inline long _window_hi(double m, double b, double base) noexcept nogil:
    cdef double hi_edge = 2.0 * b * m
    cdef long hi = <long>ceil(log(hi_edge) / log(base))
    while pow(base, hi) > hi_edge * (1.0 + GRID_REL):
        hi -= 1
    while pow(base, hi + 1) <= hi_edge * (1.0 + GRID_REL):
        hi += 1
    return hi


def run_stream(payload, double[:, ::1] weights, double b, double eps,
               cnp.int64_t[::1] stream, bint faithful_early_exit):
    """Sliding-grid streaming pass over ``stream``; returns a result dict.

    Semantics identical to the pure engine with ``m`` tracked online and the
    window [m/base, 2*b*m]: big elements are recorded (or returned
    immediately under ``faithful_early_exit``), each sieve tests arrivals
    against its own state, and the answer is the best sieve or big
    singleton.  Oracle calls are counted as the equivalent oracle-driven run
    would: one for the empty set, one per arriving singleton, one per
    feasibility-passing sieve test.
    """
    cdef Py_ssize_t d = weights.shape[0]
    cdef Py_ssize_t n = weights.shape[1]
    cdef int A = 1 + 2 * <int>d
    cdef double base = 1.0 + A * eps
    cdef double budget_cap = b * (1.0 + FEAS_REL)
    cdef double half = b / 2.0
    cdef double bA = b * A

    cdef Evaluator ev = _make_evaluator(payload)

    # slot capacity: the window never holds more than log_base(2*b*base^2)
    # thresholds (+1 for the tolerance slack at each edge)
    cdef Py_ssize_t max_slots = <Py_ssize_t>ceil(log(2.0 * b * base * base) / log(base)) + 3
    cdef Py_ssize_t member_cap = <Py_ssize_t>floor(b) + 1
    if member_cap > n:
        member_cap = n
    ev.alloc(max_slots)

    slot_exp_arr = np.full(max_slots, EXP_NONE, dtype=np.int64)
    cdef cnp.int64_t[::1] slot_exp = slot_exp_arr
    cdef double[::1] slot_v = np.zeros(max_slots)
    cdef cnp.int64_t[:, ::1] members = np.zeros((max_slots, max(member_cap, 1)), dtype=np.int64)
    cdef cnp.int64_t[::1] member_count = np.zeros(max_slots, dtype=np.int64)
    cdef double[:, ::1] row_totals = np.zeros((max_slots, max(d, 1)))

    cdef double m = 0.0
    cdef long lo = 0, hi = -1, new_lo, new_hi, l
    cdef bint have_grid = False
    cdef Py_ssize_t t, i, s, jj, count
    cdef long j
    cdef double singleton, r, m_new, g, cut, v
    cdef long oracle_calls = 1  # empty-set evaluation
    cdef long elements_seen = 0
    cdef long stored = 0, peak_stored = 0, max_grid = 0
    cdef double big_best = -1.0
    cdef long big_elem = 0
    cdef bint feasible, ok, big_found

    for t in range(stream.shape[0]):
        j = stream[t]
        elements_seen += 1
        singleton = ev.singleton(j)
        oracle_calls += 1

        m_new = m
        for i in range(d):
            r = singleton / weights[i, j - 1]
            if r > m_new:
                m_new = r
        if m_new > m:
            m = m_new
            new_lo = _window_lo(m, base)
            new_hi = _window_hi(m, b, base)
            if new_hi - new_lo + 1 > max_slots:
                raise RuntimeError("threshold window exceeded its slot capacity")
            if not have_grid:
                lo = new_lo
                hi = new_lo - 1
            # reclaim slots of thresholds that fell out of the window
            for l in range(lo, new_lo):
                if l > hi:
                    break
                s = ((l % max_slots) + max_slots) % max_slots
                if slot_exp[s] == l:
                    stored -= member_count[s]
                    slot_exp[s] = EXP_NONE
            # instantiate thresholds entering the window
            for l in range(new_lo, new_hi + 1):
                s = ((l % max_slots) + max_slots) % max_slots
                if slot_exp[s] != l:
                    slot_exp[s] = l
                    slot_v[s] = pow(base, l)
                    member_count[s] = 0
                    for i in range(d):
                        row_totals[s, i] = 0.0
                    ev.reset_slot(s)
            lo = new_lo
            hi = new_hi
            have_grid = True
        if have_grid and hi - lo + 1 > max_grid:
            max_grid = hi - lo + 1

        if have_grid and lo <= hi:
            # big-element rule at the easiest live threshold
            s = ((lo % max_slots) + max_slots) % max_slots
            cut = 2.0 * slot_v[s] / bA
            big_found = False
            for i in range(d):
                if weights[i, j - 1] > half and singleton / weights[i, j - 1] >= cut:
                    big_found = True
                    break
            if big_found:
                if faithful_early_exit:
                    return _finish(ev, slot_exp, slot_v, members, member_count,
                                   max_slots, lo, hi, singleton, j, True,
                                   elements_seen, oracle_calls, peak_stored, max_grid)
                if singleton > big_best:
                    big_best = singleton
                    big_elem = j

            for l in range(lo, hi + 1):
                s = ((l % max_slots) + max_slots) % max_slots
                feasible = True
                for i in range(d):
                    if row_totals[s, i] + weights[i, j - 1] > budget_cap:
                        feasible = False
                        break
                if not feasible:
                    continue
                g = ev.gain(s, j)
                oracle_calls += 1
                cut = 2.0 * slot_v[s] / bA
                ok = True
                for i in range(d):
                    if g / weights[i, j - 1] < cut:
                        ok = False
                        break
                if ok:
                    count = member_count[s]
                    members[s, count] = j
                    member_count[s] = count + 1
                    for i in range(d):
                        row_totals[s, i] += weights[i, j - 1]
                    ev.commit(s, j, g)
                    stored += 1
        if stored > peak_stored:
            peak_stored = stored

    return _finish(ev, slot_exp, slot_v, members, member_count, max_slots,
                   lo if have_grid else 0, hi if have_grid else -1,
                   big_best, big_elem, False,
                   elements_seen, oracle_calls, peak_stored, max_grid)


cdef _finish(Evaluator ev, cnp.int64_t[::1] slot_exp, double[::1] slot_v,
             cnp.int64_t[:, ::1] members, cnp.int64_t[::1] member_count,
             Py_ssize_t max_slots, long lo, long hi,
             double big_value, long big_elem, bint forced_big,
             long elements_seen, long oracle_calls, long peak_stored, long max_grid):
    cdef long l
    cdef Py_ssize_t s, k
    cdef double best_value
    cdef list exps = [], sizes = [], values = []
    if forced_big:
        return {
            "selected": np.asarray([big_elem], dtype=np.int64),
            "value": big_value,
            "big_element": big_elem,
            "big_value": big_value,
            "sieve_exponents": np.asarray(exps, dtype=np.int64),
            "sieve_sizes": np.asarray(sizes, dtype=np.int64),
            "sieve_values": np.asarray(values),
            "elements_seen": elements_seen,
            "oracle_calls": oracle_calls,
            "peak_stored_elements": peak_stored,
            "max_grid_size": max_grid,
        }
    cdef Py_ssize_t best_slot = -1
    cdef object selected
    best_value = -np.inf
    for l in range(lo, hi + 1):
        s = ((l % max_slots) + max_slots) % max_slots
        if slot_exp[s] != l:
            continue
        exps.append(l)
        sizes.append(member_count[s])
        values.append(ev.value(s))
        if member_count[s] > 0 and ev.value(s) > best_value:
            best_value = ev.value(s)
            best_slot = s
    if big_elem > 0 and big_value > best_value:
        selected = np.asarray([big_elem], dtype=np.int64)
        best_value = big_value
    elif best_slot >= 0:
        selected = np.asarray(
            [members[best_slot, k] for k in range(member_count[best_slot])],
            dtype=np.int64,
        )
    else:
        selected = np.zeros(0, dtype=np.int64)
        best_value = 0.0
    return {
        "selected": selected,
        "value": best_value,
        "big_element": big_elem if big_elem > 0 else 0,
        "big_value": big_value,
        "sieve_exponents": np.asarray(exps, dtype=np.int64),
        "sieve_sizes": np.asarray(sizes, dtype=np.int64),
        "sieve_values": np.asarray(values),
        "elements_seen": elements_seen,
        "oracle_calls": oracle_calls,
        "peak_stored_elements": peak_stored,
        "max_grid_size": max_grid,
    }
