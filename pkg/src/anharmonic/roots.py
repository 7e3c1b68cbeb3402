"""Certified real-root isolation for polynomials with rational coefficients.

Polynomials are lists of coefficients, constant term first.  Isolation uses a
Sturm chain built from primitive integer pseudo-remainders; sign evaluation
happens only at dyadic rationals, so every count is exact.  Refinement is
bisection on the sign of the polynomial itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lcm

import mpmath
from gmpy2 import gcd, mpq, mpz

from ._numeric import to_mpf, to_mpq


@dataclass(frozen=True)
class RealRoot:
    """A real root bracketed by [lo, hi]; lo == hi when it was hit exactly."""

    value: mpmath.mpf
    lo: mpq
    hi: mpq
    multiplicity: int = 1

    @property
    def exact(self):
        return self.lo if self.lo == self.hi else None

    def __float__(self):
        return float(self.value)


# -- integer polynomial helpers ----------------------------------------------

def _trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def primitive(coeffs) -> list:
    """Integer polynomial with positive content removed (sign kept)."""
    c = [to_mpq(x) for x in _trim(coeffs)]
    if not c:
        return []
    den = 1
    for x in c:
        den = lcm(den, int(x.denominator))
    ints = [mpz(x * den) for x in c]
    g = mpz(0)
    for x in ints:
        g = gcd(g, x)
        if g == 1:
            break
    return [x // g for x in ints]


def _content_free(ints):
    g = mpz(0)
    for x in ints:
        g = gcd(g, x)
        if g == 1:
            return ints
    return [x // g for x in ints]


def _pseudo_remainder(a, b):
    # Multiplies by |lc(b)| only, so the remainder keeps the sign of the true remainder.
    a = list(a)
    db = len(b) - 1
    lb = b[-1]
    alb, sgn = abs(lb), (1 if lb > 0 else -1)
    while len(a) - 1 >= db:
        f = a[-1] * sgn
        shift = len(a) - 1 - db
        a = [alb * x for x in a]
        for i in range(db + 1):
            a[shift + i] -= f * b[i]
        a.pop()
        while a and a[-1] == 0:
            a.pop()
    return a


def _derivative(c):
    return [i * c[i] for i in range(1, len(c))]


def sturm_chain(coeffs) -> list:
    """Sturm sequence p, p', -rem(p, p'), ... up to positive scalar factors."""
    p = primitive(coeffs)
    if not p:
        raise ValueError("the zero polynomial has no Sturm chain")
    chain = [p]
    if len(p) == 1:
        return chain
    chain.append(_content_free(_derivative(p)))
    while len(chain[-1]) > 1:
        r = _pseudo_remainder(chain[-2], chain[-1])
        if not r:
            break
        chain.append([-x for x in _content_free(r)])
    return chain


def _sign_at_dyadic(c, num, shift):
    """Sign of c(num / 2**shift), computed exactly."""
    if not c:
        return 0
    d = len(c) - 1
    acc = c[d]
    for i in range(d - 1, -1, -1):
        acc = acc * num + (c[i] << (shift * (d - i)))
    return (acc > 0) - (acc < 0)


def _split_dyadic(x: mpq):
    den = int(x.denominator)
    shift = den.bit_length() - 1
    if den != 1 << shift:
        raise ValueError("evaluation points must be dyadic rationals")
    return mpz(x.numerator), shift


def sign_at(c, x) -> int:
    x = to_mpq(x)
    if int(x.denominator) & (int(x.denominator) - 1) == 0:
        num, shift = _split_dyadic(x)
        return _sign_at_dyadic(c, num, shift)
    acc = mpq(0)
    for a in reversed(c):
        acc = acc * x + a
    return (acc > 0) - (acc < 0)


def _variations(signs):
    signs = [s for s in signs if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def sign_variations(chain, x) -> int:
    if x == "+inf":
        return _variations([(1 if c[-1] > 0 else -1) for c in chain])
    if x == "-inf":
        return _variations([(1 if c[-1] > 0 else -1) * (-1) ** (len(c) - 1) for c in chain])
    num, shift = _split_dyadic(to_mpq(x))
    return _variations([_sign_at_dyadic(c, num, shift) for c in chain])


def cauchy_bound(c) -> mpq:
    """Power of two strictly above the modulus of every root."""
    lead = abs(c[-1])
    m = max((abs(a) for a in c[:-1]), default=0)
    bound = 1 + mpq(m, lead)
    k = 0
    while (1 << k) <= bound:
        k += 1
    return mpq(1 << k)


def _isolate_squarefree(c):
    """Disjoint intervals (lo, hi] each holding one root, plus exactly hit roots."""
    chain = sturm_chain(c)
    total = sign_variations(chain, "-inf") - sign_variations(chain, "+inf")
    if total == 0:
        return []
    B = cauchy_bound(c)
    out = []
    stack = [(-B, B, sign_variations(chain, -B), sign_variations(chain, B))]
    while stack:
        lo, hi, vlo, vhi = stack.pop()
        n = vlo - vhi
        if n == 0:
            continue
        if n == 1:
            out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        if sign_at(c, mid) == 0:
            out.append((mid, mid))
        vmid = sign_variations(chain, mid)
        stack.append((lo, mid, vlo, vmid))
        stack.append((mid, hi, vmid, vhi))
    # an interval (lo, mid] ending on an exact root is that same root
    exact = {lo for lo, hi in out if lo == hi}
    out = [(lo, hi) for lo, hi in out if lo == hi or hi not in exact]
    return sorted(out)


def refine(c, lo, hi, digits: int):
    """Bisect (lo, hi] on the sign of c until narrower than 10**-digits relative."""
    lo, hi = to_mpq(lo), to_mpq(hi)
    if lo == hi:
        return lo, hi
    if sign_at(c, hi) == 0:
        return hi, hi
    s_hi = sign_at(c, hi)
    tol = mpq(1, mpz(10) ** digits)
    while hi - lo > tol * max(1, abs(lo), abs(hi)):
        mid = (lo + hi) / 2
        s = sign_at(c, mid)
        if s == 0:
            return mid, mid
        if s == s_hi:
            hi = mid
        else:
            lo = mid
    return lo, hi


# -- exact rational polynomial arithmetic, for square-free splitting ---------

def _q_divmod(a, b):
    a = [to_mpq(x) for x in a]
    b = [to_mpq(x) for x in _trim(b)]
    q = [mpq(0)] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and any(a):
        f = a[-1] / b[-1]
        shift = len(a) - len(b)
        q[shift] = f
        for i, y in enumerate(b):
            a[shift + i] -= f * y
        a.pop()
        a = _trim(a)
    return _trim(q), a


def _q_sub(a, b):
    n = max(len(a), len(b))
    return _trim([(a[k] if k < len(a) else 0) - (b[k] if k < len(b) else 0) for k in range(n)])


def _q_gcd(a, b):
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _q_divmod(a, b)[1]
    lead = to_mpq(a[-1])
    return [to_mpq(x) / lead for x in a]


def squarefree_factors(coeffs):
    """Yun's decomposition: [(f_i, i)] with p = const * prod f_i**i."""
    p = [to_mpq(x) for x in _trim(coeffs)]
    dp = _derivative(p)
    g = _q_gcd(p, dp)
    if len(g) == 1:
        return [(p, 1)]
    b = _q_divmod(p, g)[0]
    c = _q_divmod(dp, g)[0]
    d = _q_sub(c, _derivative(b))
    out, i = [], 1
    while len(b) > 1:
        a = _q_gcd(b, d)
        if len(a) > 1:
            out.append((a, i))
        b = _q_divmod(b, a)[0]
        c = _q_divmod(d, a)[0]
        d = _q_sub(c, _derivative(b))
        i += 1
    return out


def real_roots(coeffs, precision: int = 30, positive_only: bool = False):
    """All real roots, sorted, each certified by a Sturm count and refined by bisection."""
    c = primitive(coeffs)
    if not c:
        raise ValueError("the zero polynomial has no isolated roots")
    if len(c) == 1:
        return []
    chain = sturm_chain(c)
    if len(chain[-1]) == 1:
        factors = [(c, 1)]
    else:
        factors = [(primitive(f), m) for f, m in squarefree_factors(c)]
    roots = []
    for f, mult in factors:
        for lo, hi in _isolate_squarefree(f):
            if positive_only and hi <= 0:
                continue
            lo, hi = refine(f, lo, hi, precision + 5)
            if positive_only and hi <= 0:
                continue
            with mpmath.workdps(precision + 5):
                value = to_mpf(lo) if lo == hi else (to_mpf(lo) + to_mpf(hi)) / 2
            roots.append(RealRoot(value, lo, hi, mult))
    return sorted(roots, key=lambda r: (r.lo, r.hi))


def refine_root(coeffs, root: RealRoot, precision: int) -> RealRoot:
    """Tighten an isolated root's bracket to the requested number of digits."""
    if root.lo == root.hi:
        return root
    c = primitive(coeffs)
    if root.multiplicity > 1:
        c = primitive(_q_divmod(c, _q_gcd(c, _derivative(c)))[0])
    lo, hi = refine(c, root.lo, root.hi, precision + 5)
    with mpmath.workdps(precision + 5):
        value = to_mpf(lo) if lo == hi else (to_mpf(lo) + to_mpf(hi)) / 2
    return RealRoot(value, lo, hi, root.multiplicity)


def certify(coeffs, root: RealRoot) -> bool:
    """Sign change (or exact zero) of the polynomial across the root's bracket."""
    c = primitive(coeffs)
    if root.lo == root.hi:
        return sign_at(c, root.lo) == 0
    a, b = sign_at(c, root.lo), sign_at(c, root.hi)
    if root.multiplicity % 2 == 0:
        return True
    return a * b <= 0
