# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Markov chain over (k, g).

Mirrors ``_pychain.Chain`` expression for expression; keep the two in sync.
"""

from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport exp, log
from libc.stdlib cimport free, malloc, realloc
from libc.string cimport memset
from numpy.random cimport bitgen_t

import numpy as np

cimport numpy as cnp

cnp.import_array()

ctypedef long long i64


cdef inline bitgen_t* _bitgen(object rng) except NULL:
    return <bitgen_t*> PyCapsule_GetPointer(rng.bit_generator.capsule, "BitGenerator")


cdef class Chain:
    cdef readonly Py_ssize_t n, k, k_max
    cdef Py_ssize_t cap
    cdef double p, q
    cdef bint dc, swap_shrink
    cdef object _keep            # owns the arrays behind the raw pointers below
    cdef i64* indptr
    cdef i64* indices
    cdef i64* mult
    cdef i64* loops
    cdef i64* deg
    cdef double* lf
    cdef i64* g
    cdef i64* sizes
    cdef i64* kappa
    cdef i64* M          # cap x cap, row-major
    cdef i64* e          # scratch, length cap
    cdef double* lp      # scratch, length cap

    def __cinit__(self):
        self.g = NULL
        self.sizes = NULL
        self.kappa = NULL
        self.M = NULL
        self.e = NULL
        self.lp = NULL

    def __init__(self, indptr, indices, mult, self_loops, degrees, g, k, k_max, p, degree_corrected, q, logfact,
                 swap_shrink=False):
        cdef Py_ssize_t i
        cdef cnp.ndarray a_indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        cdef cnp.ndarray a_indices = np.ascontiguousarray(indices, dtype=np.int64)
        cdef cnp.ndarray a_mult = np.ascontiguousarray(mult, dtype=np.int64)
        cdef cnp.ndarray a_loops = np.ascontiguousarray(self_loops, dtype=np.int64)
        cdef cnp.ndarray a_deg = np.ascontiguousarray(degrees, dtype=np.int64)
        cdef cnp.ndarray a_lf = np.ascontiguousarray(logfact, dtype=np.float64)
        self._keep = (a_indptr, a_indices, a_mult, a_loops, a_deg, a_lf)
        self.indptr = <i64*> cnp.PyArray_DATA(a_indptr)
        self.indices = <i64*> cnp.PyArray_DATA(a_indices)
        self.mult = <i64*> cnp.PyArray_DATA(a_mult)
        self.loops = <i64*> cnp.PyArray_DATA(a_loops)
        self.deg = <i64*> cnp.PyArray_DATA(a_deg)
        self.lf = <double*> cnp.PyArray_DATA(a_lf)
        self.n = a_deg.shape[0]
        if a_indptr.shape[0] != self.n + 1 or a_loops.shape[0] != self.n:
            raise ValueError("inconsistent graph arrays")
        self.p = p
        self.q = q
        self.dc = degree_corrected
        self.swap_shrink = swap_shrink
        self.k_max = k_max
        self.k = k
        garr = np.ascontiguousarray(g, dtype=np.int64)
        if self.k < 1 or self.k > self.k_max or garr.shape[0] != self.n:
            raise ValueError("initial state outside 1 <= k <= k_max")
        if self.n and (garr.min() < 0 or garr.max() >= self.k):
            raise ValueError("labels outside 0..k-1")
        self.g = <i64*> malloc(max(self.n, 1) * sizeof(i64))
        if self.g == NULL:
            raise MemoryError()
        for i in range(self.n):
            self.g[i] = garr[i]
        self.cap = 0
        self._reserve(max(self.k, 8))
        self._rebuild()

    def __dealloc__(self):
        free(self.g)
        free(self.sizes)
        free(self.kappa)
        free(self.M)
        free(self.e)
        free(self.lp)

    cdef int _reserve(self, Py_ssize_t cap) except -1:
        cdef Py_ssize_t r, s, old = self.cap
        if cap <= old:
            return 0
        cdef i64* M2 = <i64*> malloc(cap * cap * sizeof(i64))
        if M2 == NULL:
            raise MemoryError()
        memset(M2, 0, cap * cap * sizeof(i64))
        for r in range(old):
            for s in range(old):
                M2[r * cap + s] = self.M[r * old + s]
        free(self.M)
        self.M = M2
        self.sizes = <i64*> realloc(self.sizes, cap * sizeof(i64))
        self.kappa = <i64*> realloc(self.kappa, cap * sizeof(i64))
        self.e = <i64*> realloc(self.e, cap * sizeof(i64))
        self.lp = <double*> realloc(self.lp, cap * sizeof(double))
        if self.sizes == NULL or self.kappa == NULL or self.e == NULL or self.lp == NULL:
            raise MemoryError()
        for r in range(old, cap):
            self.sizes[r] = 0
            self.kappa[r] = 0
        self.cap = cap
        return 0

    cdef void _rebuild(self):
        cdef Py_ssize_t i, j, idx, r, s, cap = self.cap
        memset(self.M, 0, cap * cap * sizeof(i64))
        for r in range(cap):
            self.sizes[r] = 0
            self.kappa[r] = 0
        for i in range(self.n):
            r = self.g[i]
            self.sizes[r] += 1
            self.kappa[r] += self.deg[i]
            self.M[r * cap + r] += self.loops[i]
            for idx in range(self.indptr[i], self.indptr[i + 1]):
                j = self.indices[idx]
                if j > i:
                    s = self.g[j]
                    self.M[r * cap + s] += self.mult[idx]
                    if r != s:
                        self.M[s * cap + r] += self.mult[idx]

    cdef inline void _neighbor_counts(self, Py_ssize_t i) noexcept nogil:
        cdef Py_ssize_t idx
        cdef i64* e = self.e
        for idx in range(self.k):
            e[idx] = 0
        for idx in range(self.indptr[i], self.indptr[i + 1]):
            e[self.g[self.indices[idx]]] += self.mult[idx]

    cdef inline void _detach(self, Py_ssize_t i) noexcept nogil:
        cdef Py_ssize_t s, cap = self.cap, a = self.g[i]
        cdef i64* e = self.e
        self.sizes[a] -= 1
        self.kappa[a] -= self.deg[i]
        for s in range(self.k):
            if e[s] != 0 and s != a:
                self.M[a * cap + s] -= e[s]
                self.M[s * cap + a] -= e[s]
        self.M[a * cap + a] -= e[a] + self.loops[i]

    cdef inline void _attach(self, Py_ssize_t i, Py_ssize_t r) noexcept nogil:
        cdef Py_ssize_t s, cap = self.cap
        cdef i64* e = self.e
        self.g[i] = r
        self.sizes[r] += 1
        self.kappa[r] += self.deg[i]
        for s in range(self.k):
            if e[s] != 0 and s != r:
                self.M[r * cap + s] += e[s]
                self.M[s * cap + r] += e[s]
        self.M[r * cap + r] += e[r] + self.loops[i]

    cdef void _insertion_logp(self, Py_ssize_t i) noexcept nogil:
        cdef Py_ssize_t r, s, cap = self.cap, k = self.k
        cdef i64 nr, ns, mrr, mrs, x, kr
        cdef i64 sl = self.loops[i]
        cdef i64 d = self.deg[i]
        cdef double v, p = self.p
        cdef i64* M = self.M
        cdef i64* sizes = self.sizes
        cdef i64* e = self.e
        cdef double* lf = self.lf
        for r in range(k):
            nr = sizes[r]
            v = lf[nr + 1] - lf[nr]
            mrr = M[r * cap + r]
            x = mrr + e[r] + sl
            v += (lf[x] - <double>(x + 1) * log(0.5 * p * <double>(nr + 1) * <double>(nr + 1) + 1.0)) - (
                lf[mrr] - <double>(mrr + 1) * log(0.5 * p * <double>nr * <double>nr + 1.0))
            for s in range(k):
                ns = sizes[s]
                if s == r or ns == 0:
                    continue
                mrs = M[r * cap + s]
                x = mrs + e[s]
                v += (lf[x] - <double>(x + 1) * log(p * <double>(nr + 1) * <double>ns + 1.0)) - (
                    lf[mrs] - <double>(mrs + 1) * log(p * <double>nr * <double>ns + 1.0))
            if self.dc:
                kr = self.kappa[r]
                v += <double>(kr + d) * log(<double>(nr + 1)) + lf[nr] - lf[nr + kr + d]
                if nr > 0:
                    v -= <double>kr * log(<double>nr) + lf[nr - 1] - lf[nr + kr - 1]
            self.lp[r] = v

    cdef inline void _heat_bath(self, bitgen_t* bg) noexcept nogil:
        cdef Py_ssize_t n = self.n, k = self.k, i, r, choice
        cdef double mx, tot, u, acc
        cdef double* lp = self.lp
        i = <Py_ssize_t> (bg.next_double(bg.state) * <double>n)
        if i >= n:
            i = n - 1
        if k == 1:
            return
        self._neighbor_counts(i)
        self._detach(i)
        self._insertion_logp(i)
        mx = lp[0]
        for r in range(k):
            if lp[r] > mx:
                mx = lp[r]
        tot = 0.0
        for r in range(k):
            lp[r] = exp(lp[r] - mx)
            tot += lp[r]
        u = bg.next_double(bg.state) * tot
        acc = 0.0
        choice = -1
        for r in range(k):
            if lp[r] > 0.0:
                choice = r
                acc += lp[r]
                if u < acc:
                    break
        self._attach(i, choice)

    cdef int _k_step(self, bitgen_t* bg) except -1:
        cdef Py_ssize_t k = self.k, r, cap, top, j
        if bg.next_double(bg.state) < 0.5:
            if k >= self.k_max:
                return 0
            if bg.next_double(bg.state) < <double>k / <double>(self.n + k):
                if k + 1 > self.cap:
                    self._reserve(2 * self.cap)
                cap = self.cap
                self.sizes[k] = 0
                self.kappa[k] = 0
                for r in range(k + 1):
                    self.M[k * cap + r] = 0
                    self.M[r * cap + k] = 0
                self.k = k + 1
                if not self.swap_shrink:
                    j = <Py_ssize_t>(bg.next_double(bg.state) * (k + 1))
                    if j > k:
                        j = k
                    self._move_label(k, j)
        elif k > 1:
            if not self.swap_shrink:
                j = <Py_ssize_t>(bg.next_double(bg.state) * k)
                if j >= k:
                    j = k - 1
                if self.sizes[j] != 0:
                    return 0
                self._move_label(j, k - 1)
            elif self.sizes[k - 1] != 0:
                top = -1
                for r in range(k - 1):
                    if self.sizes[r] == 0:
                        top = r
                if top < 0:
                    return 0
                self._swap_labels(top, k - 1)
            self.k = k - 1
        return 0

    cdef int _move_label(self, Py_ssize_t a, Py_ssize_t b) except -1:
        # relabel group a as b, shifting the labels in between by one (O(n + k^2))
        cdef Py_ssize_t i, r, s, k = self.k, cap = self.cap
        if a == b:
            return 0
        cdef i64* perm = <i64*> malloc(k * sizeof(i64))
        cdef i64* tmp = <i64*> malloc(k * k * sizeof(i64))
        if perm == NULL or tmp == NULL:
            free(perm)
            free(tmp)
            raise MemoryError()
        for r in range(k):
            perm[r] = r
            if a < b and a < r <= b:
                perm[r] = r - 1
            elif b < a and b <= r < a:
                perm[r] = r + 1
        perm[a] = b
        for i in range(self.n):
            self.g[i] = perm[self.g[i]]
        for r in range(k):
            for s in range(k):
                tmp[perm[r] * k + perm[s]] = self.M[r * cap + s]
        for r in range(k):
            for s in range(k):
                self.M[r * cap + s] = tmp[r * k + s]
        for r in range(k):
            tmp[perm[r]] = self.sizes[r]
            tmp[k + perm[r]] = self.kappa[r]
        for r in range(k):
            self.sizes[r] = tmp[r]
            self.kappa[r] = tmp[k + r]
        free(perm)
        free(tmp)
        return 0

    cdef void _swap_labels(self, Py_ssize_t a, Py_ssize_t b) noexcept nogil:
        cdef Py_ssize_t i, r, cap = self.cap
        cdef i64 t
        for i in range(self.n):
            if self.g[i] == a:
                self.g[i] = b
            elif self.g[i] == b:
                self.g[i] = a
        t = self.sizes[a]; self.sizes[a] = self.sizes[b]; self.sizes[b] = t
        t = self.kappa[a]; self.kappa[a] = self.kappa[b]; self.kappa[b] = t
        for r in range(self.k):
            t = self.M[a * cap + r]; self.M[a * cap + r] = self.M[b * cap + r]; self.M[b * cap + r] = t
        for r in range(self.k):
            t = self.M[r * cap + a]; self.M[r * cap + a] = self.M[r * cap + b]; self.M[r * cap + b] = t

    cdef int _sweeps(self, bitgen_t* bg, Py_ssize_t count) except -1:
        cdef Py_ssize_t c, t, steps = self.n + 1
        cdef double q = self.q
        for c in range(count):
            for t in range(steps):
                if bg.next_double(bg.state) < q:
                    self._k_step(bg)
                else:
                    self._heat_bath(bg)
        return 0

    # -- Python-facing API (same names as the fallback) -------------------
    def heat_bath_probs(self, Py_ssize_t i):
        cdef Py_ssize_t r
        if self.k == 1:
            return np.ones(1)
        self._neighbor_counts(i)
        self._detach(i)
        self._insertion_logp(i)
        self._attach(i, self.g[i])
        lp = np.array([self.lp[r] for r in range(self.k)])
        w = np.exp(lp - lp.max())
        return w / w.sum()

    def heat_bath_step(self, rng):
        cdef bitgen_t* bg = _bitgen(rng)
        with rng.bit_generator.lock:
            self._heat_bath(bg)

    def k_step(self, rng):
        cdef bitgen_t* bg = _bitgen(rng)
        with rng.bit_generator.lock:
            self._k_step(bg)

    def sweeps(self, rng, Py_ssize_t count):
        cdef bitgen_t* bg = _bitgen(rng)
        with rng.bit_generator.lock:
            self._sweeps(bg, count)

    def sample(self, rng, Py_ssize_t count, Py_ssize_t interval):
        cdef bitgen_t* bg = _bitgen(rng)
        cdef Py_ssize_t t
        ks = np.empty(count, dtype=np.int64)
        lw = np.empty(count, dtype=np.float64)
        ll = np.empty(count, dtype=np.float64)
        cdef i64[::1] ksv = ks
        cdef double[::1] lwv = lw
        cdef double[::1] llv = ll
        with rng.bit_generator.lock:
            for t in range(count):
                self._sweeps(bg, interval)
                ksv[t] = self.k
                llv[t] = self._log_likelihood()
                lwv[t] = self._log_prior() + llv[t]
        return ks, lw, ll

    cdef double _log_prior(self):
        cdef Py_ssize_t r, k = self.k
        cdef double v = self.lf[k - 1] - self.lf[self.n + k - 1]
        for r in range(k):
            v += self.lf[self.sizes[r]]
        return v

    cdef double _log_likelihood(self):
        cdef Py_ssize_t r, s, k = self.k, cap = self.cap
        cdef i64 nr, mrr, mrs, kr
        cdef double p = self.p
        cdef double* lf = self.lf
        cdef double v = 0.0
        for r in range(k):
            nr = self.sizes[r]
            mrr = self.M[r * cap + r]
            v += lf[mrr] - <double>(mrr + 1) * log(0.5 * p * <double>nr * <double>nr + 1.0)
            for s in range(r + 1, k):
                mrs = self.M[r * cap + s]
                v += lf[mrs] - <double>(mrs + 1) * log(p * <double>nr * <double>self.sizes[s] + 1.0)
        if self.dc:
            for r in range(k):
                nr = self.sizes[r]
                if nr > 0:
                    kr = self.kappa[r]
                    v += <double>kr * log(<double>nr) + lf[nr - 1] - lf[nr + kr - 1]
        return v

    def log_prior(self):
        return self._log_prior()

    def log_likelihood(self):
        return self._log_likelihood()

    def log_weight(self):
        return self._log_prior() + self._log_likelihood()

    def get_g(self):
        return np.array([self.g[i] for i in range(self.n)], dtype=np.int64)

    def get_sizes(self):
        return np.array([self.sizes[r] for r in range(self.k)], dtype=np.int64)

    def get_kappa(self):
        return np.array([self.kappa[r] for r in range(self.k)], dtype=np.int64)

    def get_m(self):
        cdef Py_ssize_t r, s
        return np.array([[self.M[r * self.cap + s] for s in range(self.k)] for r in range(self.k)],
                        dtype=np.int64).reshape(self.k, self.k)
