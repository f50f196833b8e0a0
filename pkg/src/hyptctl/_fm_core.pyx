# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled Fourier-Motzkin kernel; same interface as ``_fm_py``.

Coefficients stay Python integers (they may grow past 64 bits), the gain
comes from typed loops and avoiding generator overhead.
"""

from fractions import Fraction
from math import gcd


cpdef tuple normalize(tuple coeffs, object const):
    cdef object g = 0
    cdef object a
    for a in coeffs:
        if a:
            g = gcd(g, a)
    if g == 0:
        return coeffs, const
    g = gcd(g, const)
    if g == 1:
        return coeffs, const
    return tuple([a // g for a in coeffs]), const // g


cpdef tuple norm_eq(tuple coeffs, object const):
    cdef object a
    coeffs, const = normalize(coeffs, const)
    for a in coeffs:
        if a:
            if a < 0:
                return tuple([-a for a in coeffs]), -const
            break
    return coeffs, const


cpdef bint is_zero(tuple coeffs):
    cdef object a
    for a in coeffs:
        if a:
            return False
    return True


cpdef list combine(list pos, list neg, Py_ssize_t j, long limit):
    cdef list out = []
    cdef tuple prow, nrow, pc, nc
    cdef object a, b, anc, const
    cdef Py_ssize_t i, n
    cdef list buf
    for prow in pos:
        pc = prow[0]
        a = pc[j]
        n = len(pc)
        for nrow in neg:
            anc = prow[3] | nrow[3]
            if limit >= 0 and bin(anc).count("1") > limit:
                continue
            nc = nrow[0]
            b = -nc[j]
            buf = [None] * n
            for i in range(n):
                buf[i] = b * pc[i] + a * nc[i]
            coeffs, const = normalize(tuple(buf), b * prow[1] + a * nrow[1])
            out.append((coeffs, const, prow[2] or nrow[2], anc))
    return out


cpdef object tidy(ineqs, eqs, bint make_eqs=True):
    cdef dict eq_map = {}
    cdef dict best = {}
    cdef list out = []
    cdef tuple c, ec
    cdef object k, ek, old, row, opp, lo, hi, val, lam
    cdef Py_ssize_t i
    for c, k in eqs:
        if is_zero(c):
            if k != 0:
                return None
            continue
        c, k = norm_eq(c, k)
        old = eq_map.get(c)
        if old is not None and old != k:
            return None
        eq_map[c] = k
    for row in ineqs:
        c = row[0]
        k = row[1]
        if is_zero(c):
            if k > 0 or (k == 0 and row[2]):
                return None
            continue
        old = best.get(c)
        if old is None or k > old[1] or (k == old[1] and row[2] and not old[2]):
            best[c] = row
    for c, row in best.items():
        opp = best.get(tuple([-k for k in c]))
        if opp is not None:
            lo = opp[1]
            hi = -row[1]
            if lo > hi or (lo == hi and (row[2] or opp[2])):
                return None
            if lo == hi and make_eqs:
                ec, ek = norm_eq(c, row[1])
                if eq_map.get(ec, ek) != ek:
                    return None
                eq_map[ec] = ek
                continue
        if eq_map:
            ec, _ = norm_eq(c, 0)
            if ec in eq_map:
                i = 0
                while not ec[i]:
                    i += 1
                lam = Fraction(c[i], ec[i])
                val = -lam * eq_map[ec] + row[1]
                if val > 0 or (val == 0 and row[2]):
                    return None
                continue
        out.append(row)
    return out, list(eq_map.items())
