"""Pure-Python Fourier-Motzkin pairing kernel.

A row is ``(coeffs, const, strict, anc)`` and stands for
``sum(coeffs[i] * x_i) + const < 0`` (strict) or ``<= 0``.  ``anc`` is the
bitmask of original rows the row was derived from (Chernikov history).
"""

from fractions import Fraction
from math import gcd


def normalize(coeffs, const):
    g = 0
    for a in coeffs:
        if a:
            g = gcd(g, a)
    if g == 0:
        return coeffs, const
    g = gcd(g, const)
    if g == 1:
        return coeffs, const
    return tuple(a // g for a in coeffs), const // g


def combine(pos, neg, j, limit):
    """Pair every row with a positive j-coefficient with every negative one."""
    out = []
    for pc, pk, ps, pa in pos:
        a = pc[j]
        for nc, nk, ns, na in neg:
            anc = pa | na
            if limit >= 0 and bin(anc).count("1") > limit:
                continue
            b = -nc[j]
            coeffs = tuple(b * x + a * y for x, y in zip(pc, nc))
            coeffs, const = normalize(coeffs, b * pk + a * nk)
            out.append((coeffs, const, ps or ns, anc))
    return out


def norm_eq(coeffs, const):
    coeffs, const = normalize(coeffs, const)
    for a in coeffs:
        if a:
            if a < 0:
                return tuple(-x for x in coeffs), -const
            break
    return coeffs, const


def is_zero(coeffs):
    for a in coeffs:
        if a:
            return False
    return True


def tidy(ineqs, eqs, make_eqs=True):
    eq_map = {}
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
    best = {}
    for row in ineqs:
        c, k, s = row[0], row[1], row[2]
        if is_zero(c):
            if k > 0 or (k == 0 and s):
                return None
            continue
        old = best.get(c)
        if old is None or k > old[1] or (k == old[1] and s and not old[2]):
            best[c] = row
    out = []
    for c, row in best.items():
        opp = best.get(tuple(-a for a in c))
        if opp is not None:
            # c.x <= -k  and  c.x >= opp_k
            lo, hi = opp[1], -row[1]
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
                # c = lam * ec and ec.x = -ek on the whole set
                i = next(i for i, a in enumerate(ec) if a)
                lam = Fraction(c[i], ec[i])
                val = -lam * eq_map[ec] + row[1]
                if val > 0 or (val == 0 and row[2]):
                    return None
                continue
        out.append(row)
    return out, list(eq_map.items())
