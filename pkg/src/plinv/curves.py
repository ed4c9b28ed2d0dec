"""Integral Weierstrass models over Q: invariants, local minimal models,
reduction types, quadratic twists, Tate periods and their L-invariants.
"""

import importlib.resources
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .cache import shared_cache
from .padic import PadicNumber, check_prime, int_val
from .periods import Period, li


class CurveError(ValueError):
    pass


def _vp(n, p):
    """Valuation with v(0) treated as +infinity (as a big sentinel)."""
    if n == 0:
        return 10 ** 9
    return int_val(n, p)


@dataclass(frozen=True)
class WeierstrassCurve:
    a1: int
    a2: int
    a3: int
    a4: int
    a6: int
    label: str = ""

    def __post_init__(self):
        if self.discriminant == 0:
            raise CurveError("singular model")

    @property
    def a_invariants(self):
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def b_invariants(self):
        a1, a2, a3, a4, a6 = self.a_invariants
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return (b2, b4, b6, b8)

    @property
    def c4(self):
        b2, b4, _, _ = self.b_invariants
        return b2 * b2 - 24 * b4

    @property
    def c6(self):
        b2, b4, b6, _ = self.b_invariants
        return -b2 ** 3 + 36 * b2 * b4 - 216 * b6

    @property
    def discriminant(self):
        b2, b4, b6, b8 = self.b_invariants
        return -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    @property
    def j_invariant(self):
        return Fraction(self.c4 ** 3, self.discriminant)

    def transform(self, u=1, r=0, s=0, t=0):
        """The substitution x = u^2 x' + r, y = u^3 y' + s u^2 x' + t."""
        a1, a2, a3, a4, a6 = self.a_invariants
        b1 = a1 + 2 * s
        b2 = a2 - s * a1 + 3 * r - s * s
        b3 = a3 + r * a1 + 2 * t
        b4 = a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t
        b6 = a6 + r * a4 + r * r * a2 + r ** 3 - t * a3 - t * t - r * t * a1
        for val, power in ((b1, 1), (b2, 2), (b3, 3), (b4, 4), (b6, 6)):
            if val % u ** power:
                raise CurveError("transform is not integral")
        return WeierstrassCurve(
            b1 // u, b2 // u ** 2, b3 // u ** 3, b4 // u ** 4, b6 // u ** 6
        )

    def __repr__(self):
        tag = f" {self.label}" if self.label else ""
        return f"EllipticCurve{list(self.a_invariants)}{tag}"

    def to_json(self):
        return {
            "label": self.label or None,
            "a_invariants": list(self.a_invariants),
            "c4": self.c4,
            "c6": self.c6,
            "disc": self.discriminant,
            "j": str(self.j_invariant),
        }


def invariants(curve):
    """(c4, c6, disc, j); the defining identity 1728*disc = c4^3 - c6^2
    is asserted."""
    c4, c6, disc = curve.c4, curve.c6, curve.discriminant
    assert 1728 * disc == c4 ** 3 - c6 ** 2
    return c4, c6, disc, curve.j_invariant


def _descend_once(curve, p):
    """Find (r, s, t) making the u = p substitution integral, or None.

    For p >= 5 the translation is forced by invertibility of 2 and 3.
    For p in {2, 3} a complete bounded search is used: the divisibility
    conditions only involve s mod p^4 and r, t mod p^6.
    """
    a1, a2, a3, a4, a6 = curve.a_invariants
    if p >= 5:
        s = -a1 * pow(2, -1, p) % p
        r = (s * s + s * a1 - a2) * pow(3, -1, p * p) % (p * p)
        t = -(a3 + r * a1) * pow(2, -1, p ** 3) % p ** 3
        return (r, s, t)
    p2, p3, p4, p6 = p ** 2, p ** 3, p ** 4, p ** 6
    for s in range(p4):
        if (a1 + 2 * s) % p:
            continue
        for r in range(p6):
            if (a2 - s * a1 + 3 * r - s * s) % p2:
                continue
            for t in range(p6):
                if (a3 + r * a1 + 2 * t) % p3:
                    continue
                if (a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t) % p4:
                    continue
                if (a6 + r * a4 + r * r * a2 + r ** 3 - t * a3 - t * t - r * t * a1) % p6:
                    continue
                return (r, s, t)
    return None


def minimal_model_at(curve, p):
    """A model with v_p(disc) minimal among integral models.

    Descends u = p while v(c4) >= 4 and v(c6) >= 6 permit an integral
    substitution; at p in {2, 3} the substitution search is exhaustive,
    so failure proves p-minimality.
    """
    check_prime(p)
    while True:
        if _vp(curve.c4, p) < 4 or _vp(curve.c6, p) < 6:
            return curve
        rst = _descend_once(curve, p)
        if rst is None:
            return curve
        r, s, t = rst
        curve = curve.transform(u=p, r=r, s=s, t=t)


def _legendre(a, p):
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def kronecker(d, n):
    """Kronecker symbol (d/n) for n > 0, by factoring n."""
    if n <= 0:
        raise CurveError("kronecker wants a positive second argument")
    result = 1
    while n % 2 == 0:
        n //= 2
        if d % 2 == 0:
            return 0
        if d % 8 in (3, 5):
            result = -result
    q = 3
    while n > 1:
        if q * q > n:
            q = n
        if n % q == 0:
            e = 0
            while n % q == 0:
                n //= q
                e += 1
            ls = _legendre(d, q)
            if ls == 0:
                return 0
            if e % 2:
                result *= ls
        else:
            q += 2
    return result


def point_count(curve, p):
    """|E(F_p)| by direct counting; only meaningful at good p."""
    a1, a2, a3, a4, a6 = curve.a_invariants
    if p == 2:
        count = 1
        for x in range(2):
            for y in range(2):
                if (y * y + a1 * x * y + a3 * y - x ** 3 - a2 * x * x - a4 * x - a6) % 2 == 0:
                    count += 1
        return count
    b2, b4, b6, _ = curve.b_invariants
    count = p + 1
    for x in range(p):
        g = (4 * x ** 3 + b2 * x * x + 2 * b4 * x + b6) % p
        count += _legendre(g, p)
    return count


def _singular_point(curve, p):
    a1, a2, a3, a4, a6 = curve.a_invariants
    found = []
    for x in range(p):
        for y in range(p):
            f = y * y + a1 * x * y + a3 * y - x ** 3 - a2 * x * x - a4 * x - a6
            if f % p:
                continue
            fx = a1 * y - 3 * x * x - 2 * a2 * x - a4
            fy = 2 * y + a1 * x + a3
            if fx % p == 0 and fy % p == 0:
                found.append((x, y))
    return found


def _node_is_split(curve, p):
    """Rationality of the nodal tangents of the reduced curve.

    Shift the singular point to the origin; the degree-2 part of the
    equation is Q(X, Y) = -(3x0 + a2) X^2 + a1 XY + Y^2 (plus terms from
    the shift), and the node is split iff Q has two distinct roots in
    P^1(F_p).
    """
    sing = _singular_point(curve, p)
    if len(sing) != 1:
        raise CurveError("reduced curve does not have a unique singular point")
    x0, y0 = sing[0]
    a1, a2, a3, a4, a6 = curve.a_invariants
    # quadratic part of F(x0+X, y0+Y)
    qxx = (-3 * x0 - a2) % p
    qxy = a1 % p
    qyy = 1
    roots = 0
    for X, Y in ((1, 0), (0, 1), (1, 1)) if p == 2 else [
        (1, s) for s in range(p)
    ] + [(0, 1)]:
        if (qxx * X * X + qxy * X * Y + qyy * Y * Y) % p == 0:
            roots += 1
    if roots == 1:
        raise CurveError("tangent cone is degenerate (cusp?)")
    return roots == 2


GOOD, SPLIT, NONSPLIT, ADDITIVE = (
    "good",
    "split-multiplicative",
    "nonsplit-multiplicative",
    "additive",
)


@dataclass(frozen=True)
class ReductionInfo:
    p: int
    kind: str
    v_delta: int
    v_j: int
    ap: int
    minimal: WeierstrassCurve

    @property
    def is_multiplicative(self):
        return self.kind in (SPLIT, NONSPLIT)

    def to_json(self):
        return {
            "p": self.p,
            "kind": self.kind,
            "v_delta": self.v_delta,
            "v_j": self.v_j,
            "ap": self.ap,
        }


def reduction_type(curve, p):
    check_prime(p)
    e = minimal_model_at(curve, p)
    vd = _vp(e.discriminant, p)
    vj = 3 * _vp(e.c4, p) - vd if e.c4 else 10 ** 9
    if vd == 0:
        ap = p + 1 - point_count(e, p)
        return ReductionInfo(p, GOOD, 0, vj, ap, e)
    if _vp(e.c4, p) == 0:
        if p == 2:
            split = _node_is_split(e, 2)
        else:
            split = _legendre(-e.c6, p) == 1
        kind = SPLIT if split else NONSPLIT
        return ReductionInfo(p, kind, vd, vj, 1 if split else -1, e)
    return ReductionInfo(p, ADDITIVE, vd, vj, 0, e)


def trace_of_frobenius(curve, p):
    return reduction_type(curve, p).ap


def bad_primes(curve):
    d = abs(curve.discriminant)
    out = []
    q = 2
    while d > 1:
        if q * q > d:
            q = d
        if d % q == 0:
            while d % q == 0:
                d //= q
            if reduction_type(curve, q).kind != GOOD:
                out.append(q)
        q += 1 if q == 2 else 2
    return out


def conductor(curve):
    """prod p^{f_p}; additive exponents at p in {2, 3} are out of reach
    of this implementation (no Tate algorithm) and raise."""
    n = 1
    for p in bad_primes(curve):
        red = reduction_type(curve, p)
        if red.is_multiplicative:
            n *= p
        elif red.kind == ADDITIVE:
            if p in (2, 3):
                raise CurveError(
                    f"conductor exponent at additive p={p} not implemented"
                )
            n *= p * p
    return n


def quadratic_twist(curve, d):
    """Twist by d via (c4, c6) -> (d^2 c4, d^3 c6), then re-minimalize
    at 2, 3 and the primes dividing d."""
    if d == 0:
        raise CurveError("twist by zero")
    c4, c6 = curve.c4 * d * d, curve.c6 * d ** 3
    twisted = WeierstrassCurve(0, 0, 0, -27 * c4, -54 * c6)
    for p in sorted({2, 3} | set(_odd_prime_factors(abs(d)))):
        twisted = minimal_model_at(twisted, p)
    return twisted


def _odd_prime_factors(n):
    out = set()
    q = 3
    while n % 2 == 0:
        n //= 2
    while n > 1:
        if q * q > n:
            q = n
        if n % q == 0:
            out.add(q)
            while n % q == 0:
                n //= q
        else:
            q += 2
    return out


def is_fundamental_discriminant(d):
    if d == 1 or d == 0:
        return False
    def squarefree(m):
        m = abs(m)
        q = 2
        while q * q <= m:
            if m % (q * q) == 0:
                return False
            q += 1
        return True
    if d % 4 == 1:
        return squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and squarefree(m)
    return False


# -- j-invariant q-expansion and the Tate parameter --------------------


def _sigma3(n):
    total = 0
    for d in range(1, n + 1):
        if n % d == 0:
            total += d ** 3
    return total


def _series_mul(a, b, m):
    out = [0] * m
    for i, ai in enumerate(a[:m]):
        if ai == 0:
            continue
        for j, bj in enumerate(b[: m - i]):
            if bj:
                out[i + j] += ai * bj
    return out


def _series_inv(a, m):
    assert a[0] == 1
    inv = [0] * m
    inv[0] = 1
    for k in range(1, m):
        acc = 0
        for i in range(1, min(k, len(a) - 1) + 1):
            acc += a[i] * inv[k - i]
        inv[k] = -acc
    return inv


def j_q_coefficients(nterms, cache=None):
    """Integer coefficients c(0..nterms) of j(q) = 1/q + sum c(n) q^n.

    Computed exactly from E4^3 / (q prod (1-q^n)^24) and cached on disk.
    """
    cache = cache or shared_cache()
    payload = cache.load("j_q_coefficients", "jq")
    if payload and len(payload) >= nterms + 1:
        return [int(x) for x in payload[: nterms + 1]]
    m = nterms + 2
    e4 = [1] + [240 * _sigma3(n) for n in range(1, m)]
    e4cubed = _series_mul(_series_mul(e4, e4, m), e4, m)
    eta24 = [1]
    for n in range(1, m):
        eta24 = _series_mul(eta24, _binomial_expand_term(n, m), m)
    jq = _series_mul(e4cubed, _series_inv(eta24, m), m)
    # jq[k] = c(k-1): coefficient of q^k in q*j(q)
    assert jq[0] == 1 and jq[1] == 744
    coeffs = jq[1 : nterms + 2]
    try:
        cache.store("j_q_coefficients", "jq", [str(c) for c in coeffs])
    except OSError:
        pass
    return coeffs


def _binomial_expand_term(n, m):
    """(1 - q^n)^24 truncated to q^m."""
    out = [0] * m
    coeff = 1
    for k in range(0, 25):
        idx = n * k
        if idx >= m:
            break
        out[idx] = coeff
        coeff = -coeff * (24 - k) // (k + 1)
    return out


@dataclass(frozen=True)
class TatePeriod:
    period: Period
    q: PadicNumber
    curve: WeierstrassCurve
    p: int
    v_delta: int

    def to_json(self):
        return {
            "p": self.p,
            "q": self.q.to_json(),
            "ord_q": self.v_delta,
            "curve": self.curve.to_json(),
        }


def tate_period(curve, p, prec=20, cache=None):
    """The parameter q with j(q) = j(E), ord(q) = v_p(disc_min) > 0,
    found by the contracting iteration q <- 1/(j - 744 - sum c(n) q^n)."""
    red = reduction_type(curve, p)
    if not red.is_multiplicative:
        raise CurveError("no Tate period")
    m = red.v_delta
    guard = 4
    nterms = (prec + guard) // m + 2
    coeffs = j_q_coefficients(nterms, cache)
    rel = prec + guard + m  # j has ord -m; q needs prec+guard digits
    j = PadicNumber.from_fraction(p, red.minimal.j_invariant, rel)
    q = 1 / (j - 744)
    for _ in range(prec + guard + 5):
        s = PadicNumber.zero(p)
        for n in range(nterms, 0, -1):
            s = (s + coeffs[n]) * q
        qn = 1 / (j - 744 - s)
        if (qn - q).is_zero and (qn - q).abs_prec >= m + prec:
            q = qn
            break
        q = qn
    else:
        raise CurveError("Tate parameter iteration did not stabilize")
    assert q.ord() == m
    q = q.truncate(prec)
    period = Period(p, [(q, 1)])
    return TatePeriod(period, q, curve, p, m)


def j_of_q(q, nterms=None, cache=None):
    """Evaluate the j-series at a p-adic q (for round-trip checks)."""
    m = q.ord()
    if nterms is None:
        nterms = (q.n + m) // m + 2
    coeffs = j_q_coefficients(nterms, cache)
    s = PadicNumber.zero(q.p)
    for n in range(nterms, 0, -1):
        s = (s + coeffs[n]) * q
    return 1 / q + 744 + s


def curve_l_invariant(curve, p, prec=20, cache=None):
    """LI_p of the Tate period: log_p(q)/ord_p(q)."""
    tp = tate_period(curve, p, prec, cache)
    return li(tp.period, "iwasawa", prec=prec)


# -- bundled curve table ------------------------------------------------


def _table_rows():
    data = importlib.resources.files("plinv").joinpath("curves.tsv").read_text()
    rows = []
    for line in data.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        label, ainvs, cond = line.split("\t")
        rows.append((label, tuple(int(x) for x in ainvs.split(",")), int(cond)))
    return rows


@lru_cache(maxsize=1)
def curve_table():
    """label -> (curve, conductor); derived data is recomputed, never
    trusted from the file."""
    table = {}
    for label, ainvs, cond in _table_rows():
        curve = WeierstrassCurve(*ainvs, label=label)
        _validate_conductor(curve, cond)
        table[label] = (curve, cond)
    return table


def _validate_conductor(curve, cond):
    leftover = cond
    for p in bad_primes(curve):
        red = reduction_type(curve, p)
        e = _vp(cond, p)
        if red.is_multiplicative:
            if e != 1:
                raise CurveError(f"{curve.label}: conductor exponent at {p} should be 1")
        elif red.kind == ADDITIVE:
            if p >= 5 and e != 2:
                raise CurveError(f"{curve.label}: conductor exponent at {p} should be 2")
            if p in (2, 3) and not 2 <= e <= (8 if p == 2 else 5):
                raise CurveError(f"{curve.label}: implausible conductor exponent at {p}")
        leftover //= p ** e
    if leftover != 1:
        raise CurveError(f"{curve.label}: conductor has spurious prime factors")


def parse_table_row(row):
    """Parse `label <sep> a1,a2,a3,a4,a6` (tab or whitespace separated);
    derived data is always recomputed, never read."""
    parts = row.replace("\t", " ").split()
    if len(parts) < 2:
        raise CurveError("row wants: label a1,a2,a3,a4,a6")
    label = parts[0]
    try:
        ainvs = [int(x) for x in parts[1].split(",")]
    except ValueError as exc:
        raise CurveError(f"bad a-invariants: {exc}") from exc
    if len(ainvs) != 5:
        raise CurveError("need five a-invariants")
    return WeierstrassCurve(*ainvs, label=label)


def load_user_table(path):
    """Optional user extension table next to the cache; same validation
    discipline as the bundled file."""
    import os

    table = {}
    if not os.path.exists(path):
        return table
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            curve = parse_table_row(line)
            table[curve.label] = (curve, None)
    return table


def curve_by_label(label, user_table_path=None):
    table = curve_table()
    if label in table:
        return table[label][0]
    if user_table_path:
        user = load_user_table(user_table_path)
        if label in user:
            return user[label][0]
    raise CurveError(f"unknown curve label {label!r}")


def curve_from_ainvs(ainvs, label=""):
    if len(ainvs) != 5:
        raise CurveError("need five a-invariants")
    return WeierstrassCurve(*[int(a) for a in ainvs], label=label)
