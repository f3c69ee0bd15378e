"""Compiled normalized-min-sum flooding kernel.

Processes one codeword at a time with the whole message state resident in
cache and releases the GIL, so the parallel backend scales across cores.
Inner loops run over the lifting dimension in branchless straight-line
form (cyclic shifts become two sequential sub-loops), which LLVM can
vectorize.  Per-codeword arithmetic order is fixed, making results
independent of batch partitioning and lane count.  ``min_sum_kernel`` is
None when numba is unavailable; callers then use the numpy path.
"""
from __future__ import annotations

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None


def _build():
    sat = np.float32(30.0)
    one = np.float32(1.0)
    zero = np.float32(0.0)

    @njit(cache=True, nogil=True, fastmath=False)
    def kernel(
        llr,         # (B, n_lift) float32, C-contiguous
        row_ptr,     # (base_rows + 1,) int64: entry ranges per base row
        ent_col,     # (nnz,) int32: base column per entry, row-major order
        ent_shift,   # (nnz,) int32: shift per entry (already mod Z)
        z,           # lifting size
        max_deg,     # largest check degree
        iters,       # iteration budget
        alpha,       # float32 normalization factor
        early_stop,  # skip remaining iterations once parity holds
        out_bits,    # (B, n_lift) uint8
        out_ok,      # (B,) bool
    ):
        n_cw, n_lift = llr.shape
        n_rows = row_ptr.size - 1
        ne = ent_col.size * z
        state = np.empty(ne, np.float32)     # c2v messages, entry-major
        tot = np.empty(n_lift, np.float32)
        v2c = np.empty((max_deg, z), np.float32)
        m1 = np.empty(z, np.float32)
        m2 = np.empty(z, np.float32)
        ps = np.empty(z, np.float32)
        iters_max = 0
        for b in range(n_cw):
            for e in range(ne):
                state[e] = zero
            for v in range(n_lift):
                x = llr[b, v]
                if x > sat:
                    x = sat
                elif x < -sat:
                    x = -sat
                tot[v] = x
            done = 0
            for _ in range(iters):
                # ---- check-node pass ----
                for r in range(n_rows):
                    p0 = row_ptr[r]
                    d = row_ptr[r + 1] - p0
                    if d == 0:
                        continue
                    for i in range(z):
                        m1[i] = np.float32(np.inf)
                        m2[i] = np.float32(np.inf)
                        ps[i] = one
                    for k in range(d):
                        p = p0 + k
                        base = ent_col[p] * z
                        s = ent_shift[p]
                        off = p * z
                        for i in range(z - s):
                            v2c[k, i] = tot[base + i + s] - state[off + i]
                        for i in range(z - s, z):
                            v2c[k, i] = tot[base + i + s - z] - state[off + i]
                        for i in range(z):
                            t = v2c[k, i]
                            if t > sat:
                                t = sat
                            elif t < -sat:
                                t = -sat
                            v2c[k, i] = t
                            a = abs(t)
                            ps[i] = ps[i] * (one if t >= zero else -one)
                            hi = m1[i] if m1[i] > a else a
                            lo = m1[i] if m1[i] < a else a
                            m1[i] = lo
                            m2[i] = m2[i] if m2[i] < hi else hi
                    for k in range(d):
                        off = (p0 + k) * z
                        for i in range(z):
                            t = v2c[k, i]
                            a = abs(t)
                            m = m2[i] if a == m1[i] else m1[i]
                            sgn = ps[i] * (one if t >= zero else -one)
                            out = alpha * m * sgn
                            state[off + i] = out
                # ---- variable-node pass ----
                for v in range(n_lift):
                    x = llr[b, v]
                    if x > sat:
                        x = sat
                    elif x < -sat:
                        x = -sat
                    tot[v] = x
                for p in range(ent_col.size):
                    base = ent_col[p] * z
                    s = ent_shift[p]
                    off = p * z
                    for i in range(z - s):
                        tot[base + i + s] += state[off + i]
                    for i in range(z - s, z):
                        tot[base + i + s - z] += state[off + i]
                done += 1
                if early_stop:
                    ok = True
                    for r in range(n_rows):
                        p0 = row_ptr[r]
                        d = row_ptr[r + 1] - p0
                        for i in range(z):
                            parity = False
                            for k in range(d):
                                p = p0 + k
                                j = i + ent_shift[p]
                                if j >= z:
                                    j -= z
                                if tot[ent_col[p] * z + j] < zero:
                                    parity = not parity
                            if parity:
                                ok = False
                                break
                        if not ok:
                            break
                    if ok:
                        break
            if done > iters_max:
                iters_max = done
            for v in range(n_lift):
                out_bits[b, v] = 1 if tot[v] < zero else 0
            ok = True
            for r in range(n_rows):
                p0 = row_ptr[r]
                d = row_ptr[r + 1] - p0
                for i in range(z):
                    parity = False
                    for k in range(d):
                        p = p0 + k
                        j = i + ent_shift[p]
                        if j >= z:
                            j -= z
                        if out_bits[b, ent_col[p] * z + j] == 1:
                            parity = not parity
                    if parity:
                        ok = False
                        break
                if not ok:
                    break
            out_ok[b] = ok
        return iters_max

    return kernel


min_sum_kernel = _build() if njit is not None else None
