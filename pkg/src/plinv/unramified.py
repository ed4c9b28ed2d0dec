"""Unramified extensions Q_{p^f} = Q_p[t]/(g), Frobenius, norm and trace.

Elements are stored like PadicNumbers, but the unit part is a coefficient
vector modulo p^n on the power basis 1, t, ..., t^(f-1).  Because the
extension is unramified, ord extends Z-valued: ord(x) is the minimum of
the coefficient valuations, so every nonzero element factors as
p^v * (unit vector).
"""

from fractions import Fraction
from math import inf

from .padic import PadicError, PadicNumber, check_prime, int_val


# -- polynomial helpers over Z/p^k ------------------------------------


def _poly_trim(c):
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_mulmod(a, b, g, m):
    """a*b mod (g, m) for monic integer g; coefficient lists, low first."""
    f = len(g) - 1
    prod = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            prod[i + j] = (prod[i + j] + ai * bj) % m
    for k in range(len(prod) - 1, f - 1, -1):
        c = prod[k]
        if c == 0:
            continue
        prod[k] = 0
        for i in range(f):
            prod[k - f + i] = (prod[k - f + i] - c * g[i]) % m
    prod = prod[:f] + [0] * max(0, f - len(prod))
    return [x % m for x in prod]


def _poly_powmod(a, e, g, m):
    result = [1]
    base = list(a)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, g, m)
        base = _poly_mulmod(base, base, g, m)
        e >>= 1
    f = len(g) - 1
    return result[:f] + [0] * max(0, f - len(result))


def _poly_gcd_fp(a, b, p):
    a = [x % p for x in a]
    b = [x % p for x in b]
    _poly_trim(a)
    _poly_trim(b)
    while b:
        inv = pow(b[-1], -1, p)
        b = [x * inv % p for x in b]
        while len(a) >= len(b):
            if a[-1]:
                c = a[-1]
                off = len(a) - len(b)
                for i in range(len(b)):
                    a[off + i] = (a[off + i] - c * b[i]) % p
            _poly_trim(a)
            if not a:
                break
            if len(a) < len(b):
                break
        a, b = b, a
    return a


def is_irreducible_mod_p(g, p):
    """Rabin test: g monic of degree f irreducible over F_p."""
    f = len(g) - 1
    if f < 1:
        return False
    x = [0, 1]
    xq = _poly_powmod(x, p ** f, g, p)
    diff = [(xq[i] - x[i] if i < len(x) else xq[i]) % p for i in range(len(xq))]
    if any(diff):
        return False
    ell = 2
    ff = f
    primes = set()
    while ff > 1:
        while ff % ell == 0:
            primes.add(ell)
            ff //= ell
        ell += 1
    for ell in sorted(primes):
        xq = _poly_powmod(x, p ** (f // ell), g, p)
        diff = [(xq[i] - (x[i] if i < len(x) else 0)) % p for i in range(len(xq))]
        h = _poly_gcd_fp(diff, g, p)
        if len(h) - 1 > 0:
            return False
    return True


def default_modulus(p, f):
    """Smallest monic degree-f polynomial irreducible mod p.

    Candidates t^f + a_{f-1} t^{f-1} + ... + a_0 are ordered by the value
    of the base-p digit string a_{f-1}...a_1 a_0, so runs are reproducible.
    """
    check_prime(p)
    if f == 1:
        return (0, 1)  # t itself: Q_p, for uniformity
    for code in range(p ** f):
        digits = []
        c = code
        for _ in range(f):
            digits.append(c % p)
            c //= p
        # digits[0] = a_0, ..., digits[f-1] = a_{f-1}
        g = digits + [1]
        if is_irreducible_mod_p(g, p):
            return tuple(g)
    raise PadicError("no irreducible polynomial found")  # unreachable


class UnramifiedContext:
    """The field Q_{p^f} presented by a monic integer polynomial g,
    irreducible mod p (checked at construction)."""

    def __init__(self, p, f, modulus=None):
        check_prime(p)
        if f < 1:
            raise PadicError("degree must be positive")
        self.p = p
        self.f = f
        if modulus is None:
            modulus = default_modulus(p, f)
        modulus = tuple(int(c) for c in modulus)
        if len(modulus) != f + 1 or modulus[-1] != 1:
            raise PadicError("modulus must be monic of degree f")
        if f > 1 and not is_irreducible_mod_p(list(modulus), p):
            raise PadicError("modulus is reducible mod p")
        self.modulus = modulus
        self._frob_cache = {}

    def __repr__(self):
        return f"Q_{self.p}^{self.f} mod {list(self.modulus)}"

    def to_json(self):
        return {"p": self.p, "f": self.f, "modulus": list(self.modulus)}

    def one(self, n):
        return UnramifiedElement(self, 0, (1,) + (0,) * (self.f - 1), n)

    def from_vector(self, coeffs, n):
        """Element with exact rational coefficients, to n digits."""
        coeffs = [Fraction(c) for c in coeffs]
        if len(coeffs) > self.f:
            raise PadicError("too many coefficients")
        coeffs += [Fraction(0)] * (self.f - len(coeffs))
        if all(c == 0 for c in coeffs):
            return UnramifiedElement(self, inf, (0,) * self.f, 0)
        v = min(
            int_val(c.numerator, self.p) - int_val(c.denominator, self.p)
            for c in coeffs
            if c != 0
        )
        m = self.p ** n
        pv = Fraction(self.p) ** v
        unit = []
        for c in coeffs:
            c = c / pv
            unit.append(c.numerator % m * pow(c.denominator, -1, m) % m)
        return UnramifiedElement(self, v, tuple(unit), n)

    def frobenius_root(self, n):
        """The root of the modulus congruent to t^p mod p, to n digits.

        Hensel lifting: Newton on g with initial value t^p over F_p.
        """
        if n in self._frob_cache:
            return self._frob_cache[n]
        p, g = self.p, list(self.modulus)
        dg = [i * g[i] for i in range(1, len(g))]
        y = _poly_powmod([0, 1], p, g, p)
        prec = 1
        while prec < n:
            prec = min(2 * prec, n)
            m = p ** prec
            gy = self._eval_poly(g, y, m)
            dgy = self._eval_poly(dg, y, m)
            inv = self._inv_unit_vector(dgy, prec)
            corr = _poly_mulmod(gy, inv, g, m)
            y = [(y[i] if i < len(y) else 0) - (corr[i] if i < len(corr) else 0) for i in range(self.f)]
            y = [c % m for c in y]
        assert all(c % p ** n == 0 for c in self._eval_poly(g, y, p ** n))
        self._frob_cache[n] = y
        return y

    def _eval_poly(self, poly, x, m):
        """poly(x) in Z[t]/(modulus, m) by Horner."""
        g = list(self.modulus)
        acc = [0] * self.f
        for c in reversed(poly):
            acc = _poly_mulmod(acc, x, g, m)
            acc[0] = (acc[0] + c) % m
        return acc

    def _inv_unit_vector(self, vec, n):
        """Inverse of a unit coefficient vector mod (modulus, p^n)."""
        p, g = self.p, list(self.modulus)
        # invert in the residue field via extended Euclid, then Hensel
        inv = self._invert_mod_p(vec)
        prec = 1
        while prec < n:
            prec = min(2 * prec, n)
            m = p ** prec
            t = _poly_mulmod(vec, inv, g, m)
            t[0] = (2 - t[0]) % m
            for i in range(1, self.f):
                t[i] = -t[i] % m
            inv = _poly_mulmod(inv, t, g, m)
        return inv

    def _invert_mod_p(self, vec):
        p, g = self.p, list(self.modulus)
        a = [c % p for c in vec]
        # extended Euclid in F_p[t] for gcd(a, g) = 1
        r0, r1 = list(g), list(a)
        s0, s1 = [], [1]
        _poly_trim(r1)
        while r1:
            inv = pow(r1[-1], -1, p)
            q = [0] * (len(r0) - len(r1) + 1) if len(r0) >= len(r1) else []
            r = list(r0)
            while len(r) >= len(r1) and r:
                c = r[-1] * inv % p
                off = len(r) - len(r1)
                q[off] = c
                for i in range(len(r1)):
                    r[off + i] = (r[off + i] - c * r1[i]) % p
                _poly_trim(r)
            # s = s0 - q*s1
            qs1 = [0] * (len(q) + len(s1) - 1) if q and s1 else []
            for i, qi in enumerate(q):
                if qi:
                    for j, sj in enumerate(s1):
                        qs1[i + j] = (qs1[i + j] + qi * sj) % p
            s = [((s0[i] if i < len(s0) else 0) - (qs1[i] if i < len(qs1) else 0)) % p
                 for i in range(max(len(s0), len(qs1), 1))]
            r0, r1 = r1, r
            s0, s1 = s1, s
            _poly_trim(r1)
        if len(r0) != 1:
            raise PadicError("vector is not a unit")
        c = pow(r0[0], -1, p)
        out = [x * c % p for x in s0]
        return out[: self.f] + [0] * max(0, self.f - len(out))


class UnramifiedElement:
    """p^v * (unit coefficient vector mod p^n) in Q_{p^f}."""

    __slots__ = ("ctx", "v", "coeffs", "n")

    def __init__(self, ctx, v, coeffs, n):
        self.ctx = ctx
        self.v = v
        self.coeffs = tuple(coeffs)
        self.n = n

    @classmethod
    def _make(cls, ctx, v, coeffs, n):
        if n <= 0:
            return cls(ctx, v + n, (0,) * ctx.f, 0)
        m = ctx.p ** n
        coeffs = [c % m for c in coeffs]
        if all(c == 0 for c in coeffs):
            return cls(ctx, v + n, (0,) * ctx.f, 0)
        t = min(int_val(c, ctx.p) for c in coeffs if c) if any(coeffs) else 0
        t = min(t, n)
        if t:
            coeffs = [c // ctx.p ** t for c in coeffs]
            return cls(ctx, v + t, tuple(c % ctx.p ** (n - t) for c in coeffs), n - t)
        return cls(ctx, v, tuple(coeffs), n)

    @property
    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    @property
    def abs_prec(self):
        return self.v + self.n if not self.is_zero else self.v

    def ord(self):
        if self.is_zero:
            raise PadicError("valuation of zero")
        return self.v

    def __add__(self, other):
        other = self._coerce(other)
        a, b, ctx = self, other, self.ctx
        prec = min(a.abs_prec, b.abs_prec)
        if a.is_zero and b.is_zero:
            return UnramifiedElement(ctx, prec, (0,) * ctx.f, 0)
        if a.is_zero:
            return UnramifiedElement._make(ctx, b.v, b.coeffs, min(b.n, prec - b.v))
        if b.is_zero:
            return UnramifiedElement._make(ctx, a.v, a.coeffs, min(a.n, prec - a.v))
        v0 = min(a.v, b.v)
        k = prec - v0
        if k <= 0:
            return UnramifiedElement(ctx, prec, (0,) * ctx.f, 0)
        m = ctx.p ** k
        sa = ctx.p ** (a.v - v0)
        sb = ctx.p ** (b.v - v0)
        coeffs = [(x * sa + y * sb) % m for x, y in zip(a.coeffs, b.coeffs)]
        return UnramifiedElement._make(ctx, v0, coeffs, k)

    def __neg__(self):
        if self.is_zero:
            return self
        m = self.ctx.p ** self.n
        return UnramifiedElement(self.ctx, self.v, tuple(-c % m for c in self.coeffs), self.n)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def _coerce(self, other):
        if isinstance(other, UnramifiedElement):
            if other.ctx is not self.ctx and other.ctx.to_json() != self.ctx.to_json():
                raise PadicError("mixed contexts")
            return other
        if isinstance(other, PadicNumber):
            if other.u == 0:
                return UnramifiedElement(self.ctx, other.v, (0,) * self.ctx.f, 0)
            return UnramifiedElement(self.ctx, other.v, (other.u,) + (0,) * (self.ctx.f - 1), other.n)
        if isinstance(other, (int, Fraction)):
            n = self.n if not self.is_zero else 64
            return self.ctx.from_vector([Fraction(other)], max(n, 1))
        raise PadicError(f"cannot coerce {other!r}")

    def __mul__(self, other):
        other = self._coerce(other)
        ctx = self.ctx
        if self.is_zero or other.is_zero:
            if self.is_zero and other.is_zero:
                prec = self.v + other.v
            else:
                z, x = (self, other) if self.is_zero else (other, self)
                prec = z.v + x.v
            return UnramifiedElement(ctx, prec, (0,) * ctx.f, 0)
        n = min(self.n, other.n)
        m = ctx.p ** n
        coeffs = _poly_mulmod(list(self.coeffs), list(other.coeffs), list(ctx.modulus), m)
        return UnramifiedElement._make(ctx, self.v + other.v, coeffs, n)

    def inverse(self):
        if self.is_zero:
            raise PadicError("division by zero")
        ctx = self.ctx
        inv = ctx._inv_unit_vector(list(self.coeffs), self.n)
        return UnramifiedElement._make(ctx, -self.v, inv, self.n)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        ctx = self.ctx
        if self.is_zero:
            return UnramifiedElement(ctx, self.v * max(k, 1), (0,) * ctx.f, 0)
        m = ctx.p ** self.n
        coeffs = _poly_powmod(list(self.coeffs), k, list(ctx.modulus), m)
        return UnramifiedElement._make(ctx, self.v * k, coeffs, self.n)

    def __eq__(self, other):
        return (self - self._coerce(other)).is_zero

    def frobenius(self):
        """The lift of x -> x^p fixing Q_p; phi^f = id."""
        if self.is_zero:
            return self
        ctx = self.ctx
        if ctx.f == 1:
            return self
        y = ctx.frobenius_root(self.n)
        m = ctx.p ** self.n
        img = ctx._eval_poly(list(self.coeffs), y, m)
        return UnramifiedElement._make(ctx, self.v, img, self.n)

    def norm(self, subfield_degree=1):
        """prod of phi^(d*i)(x) over i < f/d: the norm to Q_{p^d}."""
        d = subfield_degree
        if self.ctx.f % d:
            raise PadicError("not a subfield degree")
        steps = self.ctx.f // d
        if self.is_zero:
            return UnramifiedElement(self.ctx, self.v * steps, (0,) * self.ctx.f, 0)
        acc = self.ctx.one(self.n)
        cur = self
        for _ in range(steps):
            acc = acc * cur
            for _ in range(d):
                cur = cur.frobenius()
        return acc

    def trace(self, subfield_degree=1):
        d = subfield_degree
        if self.ctx.f % d:
            raise PadicError("not a subfield degree")
        steps = self.ctx.f // d
        acc = UnramifiedElement(self.ctx, self.abs_prec, (0,) * self.ctx.f, 0)
        cur = self
        for _ in range(steps):
            acc = acc + cur
            for _ in range(d):
                cur = cur.frobenius()
        return acc

    def as_padic(self, slack=1):
        """Coerce a base-field element to a PadicNumber.

        Coefficients 1..f-1 must vanish to precision (up to `slack`
        trailing digits of computational noise, which are reported as
        lost precision).
        """
        ctx = self.ctx
        if self.is_zero:
            return PadicNumber.zero(ctx.p, self.v)
        noise = 0
        for c in self.coeffs[1:]:
            if c:
                w = int_val(c, ctx.p)
                if self.n - w > slack:
                    raise PadicError("element does not lie in Q_p")
                noise = max(noise, self.n - w)
        n = self.n - noise
        return PadicNumber._make(ctx.p, self.v, self.coeffs[0] % ctx.p ** n, n)

    def teichmuller_part(self):
        """omega(x mod p): the (p^f - 1)-st root of unity congruent to
        the reduction of the unit part."""
        if self.is_zero:
            raise PadicError("Teichmuller lift of zero")
        ctx, n = self.ctx, self.n
        p, f = ctx.p, ctx.f
        g = list(ctx.modulus)
        q = p ** f - 1
        x = [c % p for c in self.coeffs]
        # Newton for x^q = 1 (derivative q*x^(q-1) is a unit)
        prec = 1
        y = list(x)
        while prec < n:
            prec = min(2 * prec, n)
            m = p ** prec
            yq = _poly_powmod(y, q, g, m)
            fy = list(yq)
            fy[0] = (fy[0] - 1) % m
            dfy = _poly_mulmod([q % m], _poly_powmod(y, q - 1, g, m), g, m)
            inv = ctx._inv_unit_vector(dfy, prec)
            corr = _poly_mulmod(fy, inv, g, m)
            y = [(y[i] - (corr[i] if i < len(corr) else 0)) % m for i in range(f)]
        return UnramifiedElement._make(ctx, 0, y, n)

    def log(self):
        """Iwasawa branch: log(p) = 0, Teichmuller part killed."""
        if self.is_zero:
            raise PadicError("log of zero")
        ctx, n = self.ctx, self.n
        p = ctx.p
        if ctx.f == 1:
            return self._coerce_self_to_padic_log()
        u = UnramifiedElement(ctx, 0, self.coeffs, n)
        if p == 2:
            # square once so the 1-unit part has ord >= 2
            usq = UnramifiedElement._make(ctx, 0,
                                          _poly_mulmod(list(self.coeffs), list(self.coeffs),
                                                       list(ctx.modulus), 2 ** (n + 1)),
                                          n + 1)
            w = usq.teichmuller_part()
            z = usq * w.inverse() - 1
            val = _unram_log_series(z, n + 1)
            return _unram_halve(val, n)
        w = u.teichmuller_part()
        z = u * w.inverse() - 1
        return _unram_log_series(z, n)

    def _coerce_self_to_padic_log(self):
        from .padic import iwasawa_log

        x = PadicNumber._make(self.ctx.p, self.v, self.coeffs[0], self.n)
        res = iwasawa_log(x)
        out = UnramifiedElement(self.ctx, res.v, (res.u,) + (0,) * (self.ctx.f - 1), res.n)
        return out if res.u else UnramifiedElement(self.ctx, res.v, (0,) * self.ctx.f, 0)

    def truncate(self, n):
        if self.is_zero or n >= self.n:
            return self
        return UnramifiedElement._make(self.ctx, self.v,
                                       tuple(c % self.ctx.p ** n for c in self.coeffs), n)

    def __repr__(self):
        if self.is_zero:
            return f"O({self.ctx.p}^{self.v}) in {self.ctx!r}"
        return f"{self.ctx.p}^{self.v}*{list(self.coeffs)} + O(^{self.abs_prec})"

    def to_json(self):
        return {
            "ctx": self.ctx.to_json(),
            "zero": self.is_zero,
            "v": None if self.v == inf else self.v,
            "coeffs": [str(c) for c in self.coeffs],
            "n": self.n,
        }


def _unram_log_series(z, aprec):
    """log(1+z) for an UnramifiedElement z with ord(z) >= 1 (>= 2 if p=2)."""
    ctx = z.ctx
    p = ctx.p
    if z.is_zero:
        return UnramifiedElement(ctx, min(aprec, z.v), (0,) * ctx.f, 0)
    m = z.ord()
    if m < (2 if p == 2 else 1):
        raise PadicError("log series does not converge")
    guard = 1
    while p ** guard <= aprec + 4 * guard:
        guard += 1
    work = aprec + guard
    mod = p ** work
    g = list(ctx.modulus)
    zv = [c * p ** z.v % mod for c in z.coeffs]  # integral vector of z
    total = [0] * ctx.f
    zk = list(zv)
    k = 1
    while k * m - guard < aprec:
        vk = int_val(k, p) if k % p == 0 else 0
        kk = k // p ** vk
        inv = pow(kk, -1, mod)
        sgn = 1 if k % 2 == 1 else -1
        for i in range(ctx.f):
            total[i] = (total[i] + sgn * (zk[i] // p ** vk) * inv) % mod
        k += 1
        zk = _poly_mulmod(zk, zv, g, mod)
    total = [c % p ** aprec for c in total]
    return UnramifiedElement._make(ctx, 0, total, aprec)


def _unram_halve(x, aprec):
    """x/2 at p = 2 for x with even coefficients, clamped to aprec."""
    if x.is_zero:
        return UnramifiedElement(x.ctx, min(x.v - 1, aprec), (0,) * x.ctx.f, 0)
    ints = [c * 2 ** x.v for c in x.coeffs]
    assert all(c % 2 == 0 for c in ints)
    m = 2 ** aprec
    return UnramifiedElement._make(x.ctx, 0, [c // 2 % m for c in ints], aprec)


def norm_trace(x):
    """Full norm and trace down to Q_p, as PadicNumbers."""
    if isinstance(x, PadicNumber):
        return x, x
    n = x.norm().as_padic()
    t = x.trace().as_padic()
    return n, t


class ExactUnramified:
    """Element of Q_{p^f} with exact rational coefficients.

    Period bases are stored this way so they can be re-evaluated at any
    precision.
    """

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx, coeffs):
        coeffs = [Fraction(c) for c in coeffs]
        if len(coeffs) > ctx.f:
            raise PadicError("too many coefficients")
        coeffs += [Fraction(0)] * (ctx.f - len(coeffs))
        if all(c == 0 for c in coeffs):
            raise PadicError("zero is not a field element")
        self.ctx = ctx
        self.coeffs = tuple(coeffs)

    def ord(self):
        p = self.ctx.p
        return min(
            int_val(c.numerator, p) - int_val(c.denominator, p)
            for c in self.coeffs
            if c != 0
        )

    def to_padic(self, n):
        return self.ctx.from_vector(self.coeffs, n)

    def __eq__(self, other):
        return (
            isinstance(other, ExactUnramified)
            and self.ctx.to_json() == other.ctx.to_json()
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.ctx.p, self.ctx.f, self.ctx.modulus, self.coeffs))

    def __repr__(self):
        return f"Exact{list(map(str, self.coeffs))} in {self.ctx!r}"

    def to_json(self):
        return {"ctx": self.ctx.to_json(), "coeffs": [str(c) for c in self.coeffs]}
