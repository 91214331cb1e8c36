"""Pure-Python Markov chain over (k, g); fallback for the compiled ``_chain``.

Both backends draw only ``next_double`` values from the same numpy bit
generator and evaluate the same floating-point expressions in the same
order, so for a given seed they produce identical trajectories.
"""

from __future__ import annotations

from math import exp, log

import numpy as np


class Chain:
    def __init__(
        self, indptr, indices, mult, self_loops, degrees, g, k, k_max, p, degree_corrected, q, logfact,
        swap_shrink=False,
    ):
        self.n = len(degrees)
        self.indptr = [int(x) for x in indptr]
        self.indices = [int(x) for x in indices]
        self.mult = [int(x) for x in mult]
        self.loops = [int(x) for x in self_loops]
        self.deg = [int(x) for x in degrees]
        self.lf = [float(x) for x in logfact]
        self.p = float(p)
        self.dc = bool(degree_corrected)
        self.q = float(q)
        self.k_max = int(k_max)
        self.swap_shrink = bool(swap_shrink)
        self.k = int(k)
        self.g = [int(x) for x in g]
        if self.k < 1 or self.k > self.k_max or any(not 0 <= x < self.k for x in self.g):
            raise ValueError("initial state outside 1 <= k <= k_max or labels outside 0..k-1")
        self._rebuild()

    def _rebuild(self):
        k = self.k
        self.sizes = [0] * k
        self.kappa = [0] * k
        self.M = [[0] * k for _ in range(k)]
        g = self.g
        for i in range(self.n):
            r = g[i]
            self.sizes[r] += 1
            self.kappa[r] += self.deg[i]
            self.M[r][r] += self.loops[i]
            for idx in range(self.indptr[i], self.indptr[i + 1]):
                j = self.indices[idx]
                if j > i:
                    s = g[j]
                    self.M[r][s] += self.mult[idx]
                    if r != s:
                        self.M[s][r] += self.mult[idx]

    # -- per-node helpers -------------------------------------------------
    def _neighbor_counts(self, i):
        e = [0] * self.k
        g = self.g
        for idx in range(self.indptr[i], self.indptr[i + 1]):
            e[g[self.indices[idx]]] += self.mult[idx]
        return e

    def _detach(self, i, e):
        a = self.g[i]
        M = self.M
        self.sizes[a] -= 1
        self.kappa[a] -= self.deg[i]
        for s in range(self.k):
            if e[s] and s != a:
                M[a][s] -= e[s]
                M[s][a] -= e[s]
        M[a][a] -= e[a] + self.loops[i]

    def _attach(self, i, r, e):
        M = self.M
        self.g[i] = r
        self.sizes[r] += 1
        self.kappa[r] += self.deg[i]
        for s in range(self.k):
            if e[s] and s != r:
                M[r][s] += e[s]
                M[s][r] += e[s]
        M[r][r] += e[r] + self.loops[i]

    def _insertion_logp(self, i, e):
        # log weight of placing the detached node i in each group, up to a constant
        lf = self.lf
        p = self.p
        sizes = self.sizes
        kappa = self.kappa
        M = self.M
        sl = self.loops[i]
        d = self.deg[i]
        k = self.k
        out = [0.0] * k
        for r in range(k):
            nr = sizes[r]
            v = lf[nr + 1] - lf[nr]
            mrr = M[r][r]
            x = mrr + e[r] + sl
            v += (lf[x] - (x + 1) * log(0.5 * p * (nr + 1) * (nr + 1) + 1.0)) - (
                lf[mrr] - (mrr + 1) * log(0.5 * p * nr * nr + 1.0)
            )
            row = M[r]
            for s in range(k):
                ns = sizes[s]
                if s == r or ns == 0:
                    continue
                mrs = row[s]
                x = mrs + e[s]
                v += (lf[x] - (x + 1) * log(p * (nr + 1) * ns + 1.0)) - (
                    lf[mrs] - (mrs + 1) * log(p * nr * ns + 1.0)
                )
            if self.dc:
                kr = kappa[r]
                v += (kr + d) * log(nr + 1) + lf[nr] - lf[nr + kr + d]
                if nr > 0:
                    v -= kr * log(nr) + lf[nr - 1] - lf[nr + kr - 1]
            out[r] = v
        return out

    # -- moves ------------------------------------------------------------
    def heat_bath_probs(self, i):
        """Conditional distribution over groups for node ``i`` (state unchanged)."""
        if self.k == 1:
            return np.ones(1)
        e = self._neighbor_counts(i)
        self._detach(i, e)
        lp = self._insertion_logp(i, e)
        self._attach(i, self.g[i], e)
        w = np.exp(np.array(lp) - max(lp))
        return w / w.sum()

    def heat_bath_step(self, rng):
        n = self.n
        i = int(rng.random() * n)
        if i >= n:
            i = n - 1
        if self.k == 1:
            return
        e = self._neighbor_counts(i)
        self._detach(i, e)
        lp = self._insertion_logp(i, e)
        mx = lp[0]
        for v in lp:
            if v > mx:
                mx = v
        w = [exp(v - mx) for v in lp]
        tot = 0.0
        for x in w:
            tot += x
        u = rng.random() * tot
        acc = 0.0
        choice = -1
        for r in range(self.k):
            if w[r] > 0.0:
                choice = r
                acc += w[r]
                if u < acc:
                    break
        self._attach(i, choice, e)

    def k_step(self, rng):
        k = self.k
        if rng.random() < 0.5:
            if k >= self.k_max:
                return
            if rng.random() < k / (self.n + k):
                self.k = k + 1
                self.sizes.append(0)
                self.kappa.append(0)
                for row in self.M:
                    row.append(0)
                self.M.append([0] * (k + 1))
                if not self.swap_shrink:
                    j = int(rng.random() * (k + 1))
                    self._move_label(k, min(j, k))
        elif k > 1:
            if not self.swap_shrink:
                j = min(int(rng.random() * k), k - 1)
                if self.sizes[j] != 0:
                    return
                self._move_label(j, k - 1)
            elif self.sizes[k - 1] != 0:
                top = -1
                for r in range(k - 1):
                    if self.sizes[r] == 0:
                        top = r
                if top < 0:
                    return
                self._swap_labels(top, k - 1)
            self.k = k - 1
            self.sizes.pop()
            self.kappa.pop()
            self.M.pop()
            for row in self.M:
                row.pop()

    def _move_label(self, a, b):
        # relabel group a as b, shifting the labels in between by one
        if a == b:
            return
        k = self.k
        perm = list(range(k))
        for r in range(k):
            if a < b and a < r <= b:
                perm[r] = r - 1
            elif b < a and b <= r < a:
                perm[r] = r + 1
        perm[a] = b
        self.g = [perm[x] for x in self.g]
        M = [[0] * k for _ in range(k)]
        sizes = [0] * k
        kappa = [0] * k
        for r in range(k):
            sizes[perm[r]] = self.sizes[r]
            kappa[perm[r]] = self.kappa[r]
            for s in range(k):
                M[perm[r]][perm[s]] = self.M[r][s]
        self.M, self.sizes, self.kappa = M, sizes, kappa

    def _swap_labels(self, a, b):
        # exchange group labels a and b everywhere (O(n + k))
        g = self.g
        for i in range(self.n):
            if g[i] == a:
                g[i] = b
            elif g[i] == b:
                g[i] = a
        self.sizes[a], self.sizes[b] = self.sizes[b], self.sizes[a]
        self.kappa[a], self.kappa[b] = self.kappa[b], self.kappa[a]
        M = self.M
        M[a], M[b] = M[b], M[a]
        for row in M:
            row[a], row[b] = row[b], row[a]

    def sweeps(self, rng, count):
        q = self.q
        steps = self.n + 1
        for _ in range(count):
            for _ in range(steps):
                if rng.random() < q:
                    self.k_step(rng)
                else:
                    self.heat_bath_step(rng)

    def sample(self, rng, count, interval):
        ks = np.empty(count, dtype=np.int64)
        lw = np.empty(count, dtype=np.float64)
        ll = np.empty(count, dtype=np.float64)
        for t in range(count):
            self.sweeps(rng, interval)
            ks[t] = self.k
            ll[t] = self.log_likelihood()
            lw[t] = self.log_prior() + ll[t]
        return ks, lw, ll

    def log_prior(self):
        """``log P(g | k)``."""
        lf = self.lf
        k = self.k
        v = lf[k - 1] - lf[self.n + k - 1]
        for r in range(k):
            v += lf[self.sizes[r]]
        return v

    def log_likelihood(self):
        """``log P(A | g)``, including the degree-correction factor when enabled."""
        lf = self.lf
        p = self.p
        k = self.k
        sizes = self.sizes
        M = self.M
        v = 0.0
        for r in range(k):
            nr = sizes[r]
            mrr = M[r][r]
            v += lf[mrr] - (mrr + 1) * log(0.5 * p * nr * nr + 1.0)
            for s in range(r + 1, k):
                mrs = M[r][s]
                v += lf[mrs] - (mrs + 1) * log(p * nr * sizes[s] + 1.0)
        if self.dc:
            for r in range(k):
                nr = sizes[r]
                if nr > 0:
                    kr = self.kappa[r]
                    v += kr * log(nr) + lf[nr - 1] - lf[nr + kr - 1]
        return v

    def log_weight(self):
        return self.log_prior() + self.log_likelihood()

    # -- inspection -------------------------------------------------------
    def get_g(self):
        return np.array(self.g, dtype=np.int64)

    def get_sizes(self):
        return np.array(self.sizes, dtype=np.int64)

    def get_kappa(self):
        return np.array(self.kappa, dtype=np.int64)

    def get_m(self):
        return np.array(self.M, dtype=np.int64).reshape(self.k, self.k)
