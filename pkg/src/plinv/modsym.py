"""Weight-2 modular symbols for Gamma_0(N) via Manin symbols.

The symbol space is presented on P^1(Z/N): two-term (S and sign) relations
are folded in by a signed union-find, the three-term T-relations by exact
sparse elimination over Q.  Hecke operators act through paths: a Manin
generator is a unimodular path, its Hecke image is a sum of paths, and
paths convert back to generators with Manin's continued-fraction trick.
All arithmetic is exact.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .linalg import identity, kernel_basis, left_eigen_space
from .curves import conductor, curve_table, trace_of_frobenius


class ModSymError(ValueError):
    pass


INF = None  # the cusp at infinity in path endpoints


def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def _lift_unit(a, d, n):
    """Lift a unit a mod d (d | n) to a unit mod n."""
    if d == n:
        return a % n
    u, v = 1, n
    g = gcd(v, d)
    while g > 1:
        u *= g
        v //= g
        g = gcd(v, g)
    # n = u*v with u supported on primes of d and gcd(v, d) = 1
    _, x, y = _xgcd(u, v)
    return (u * x + a % n * y * v) % n


class P1List:
    """Representatives of P^1(Z/N) with O(log N) canonical reduction."""

    def __init__(self, n, reps=None):
        if n < 1:
            raise ModSymError("level must be positive")
        self.N = n
        if reps is None:
            seen = set()
            reps = []
            for c in range(n):
                for d in range(n):
                    if gcd(gcd(c, d), n) != 1:
                        continue
                    key = self.reduce(c, d)
                    if key not in seen:
                        seen.add(key)
                        reps.append(key)
            reps.sort()
        self._reps = [tuple(cd) for cd in reps]
        self._index = {cd: i for i, cd in enumerate(self._reps)}

    def __len__(self):
        return len(self._reps)

    def __getitem__(self, i):
        return self._reps[i]

    def reduce(self, u, v):
        """Canonical representative of (u:v); Stein, Algorithm 8.29."""
        n = self.N
        if n == 1:
            return (0, 0)
        u %= n
        v %= n
        if u == 0:
            if gcd(v, n) != 1:
                raise ModSymError("not a projective point")
            return (0, 1)
        g, _, s = _xgcd(n, u)
        if gcd(g, v) > 1:
            raise ModSymError("not a projective point")
        s = _lift_unit(s % n, n // g, n)
        u, v = g, s * v % n
        if g == 1:
            return (1, v)
        v = min(v * t % n for t in range(1, n, n // g) if gcd(n, t) == 1)
        return (g, v)

    def index(self, u, v):
        return self._index[self.reduce(u, v)]

    def act_right(self, i, mat):
        """Index of (c:d)*mat for mat = [[a, b], [c, d]] acting on rows."""
        c, d = self._reps[i]
        a, b, cc, dd = mat
        return self.index(c * a + d * cc, c * b + d * dd)


def lift_to_sl2z(c, d, n):
    """A matrix [[a, b], [c', d']] in SL_2(Z) whose bottom row is
    projectively congruent to (c:d) mod n; any such lift represents the
    same Gamma_0(n)-coset."""
    if n == 1:
        return (1, 0, 0, 1)
    c %= n
    d %= n
    if c == 0:
        if gcd(d, n) != 1:
            raise ModSymError("not liftable")
        return (1, 0, 0, 1)  # (0:d) ~ (0:1)
    k = 0
    dd = d
    while gcd(c, dd) != 1:
        k += 1
        dd = d + k * n
    g, x, y = _xgcd(c, dd)
    assert g == 1
    # y*dd + x*c = 1: take a = y, b = -x so a*dd - b*c = 1
    return (y, -x, c, dd)


@dataclass
class _SignedUF:
    parent: list
    sgn: list
    dead: set

    @classmethod
    def create(cls, n):
        return cls(list(range(n)), [1] * n, set())

    def find(self, i):
        s = 1
        while self.parent[i] != i:
            s *= self.sgn[i]
            i = self.parent[i]
        return i, s

    def union(self, i, j, sign):
        """Impose x_i = sign * x_j."""
        ri, si = self.find(i)
        rj, sj = self.find(j)
        if ri == rj:
            if si != sign * sj:
                self.dead.add(ri)
            return
        # x_ri = (1/si) x_i = (sign * sj / si) x_rj
        self.parent[ri] = rj
        self.sgn[ri] = sign * sj * si  # signs are +-1: 1/si = si
        if ri in self.dead:
            self.dead.discard(ri)
            self.dead.add(rj)


S_MAT = (0, -1, 1, 0)
T_MAT = (0, -1, 1, -1)
ETA_MAT = (-1, 0, 0, 1)


class SymbolSpace:
    """The sign-quotient of weight-2 modular symbols for Gamma_0(N)."""

    def __init__(self, level, sign=1):
        if sign not in (1, -1):
            raise ModSymError("sign must be +1 or -1")
        self.level = level
        self.sign = sign
        self.p1 = P1List(level)
        self._hecke = {}
        self._build()

    # -- presentation ----------------------------------------------------

    def _build(self):
        p1 = self.p1
        ngen = len(p1)
        uf = _SignedUF.create(ngen)
        for i in range(ngen):
            uf.union(i, p1.act_right(i, S_MAT), -1)
            uf.union(i, p1.act_right(i, ETA_MAT), self.sign)
        live = []
        col = {}
        for i in range(ngen):
            r, _ = uf.find(i)
            if r not in uf.dead and r not in col:
                col[r] = len(live)
                live.append(r)
        rows = set()
        for i in range(ngen):
            it = p1.act_right(i, T_MAT)
            itt = p1.act_right(it, T_MAT)
            row = {}
            for j in (i, it, itt):
                r, s = uf.find(j)
                if r in uf.dead:
                    continue
                row[col[r]] = row.get(col[r], 0) + s
            row = {c: v for c, v in row.items() if v}
            if row:
                rows.add(tuple(sorted(row.items())))
        pivots = {}
        for row in sorted(rows, key=len):
            row = {c: Fraction(v) for c, v in row}
            row = self._reduce_row(row, pivots)
            if not row:
                continue
            pc = min(row)
            inv = Fraction(1) / row[pc]
            row = {c: v * inv for c, v in row.items() if c != pc}
            for opc in list(pivots):
                orow = pivots[opc]
                if pc in orow:
                    f = orow.pop(pc)
                    for c, v in row.items():
                        orow[c] = orow.get(c, Fraction(0)) - f * v
                    pivots[opc] = {c: v for c, v in orow.items() if v}
            pivots[pc] = row
        self._uf = uf
        self._col = col
        self._live = live
        self._pivots = pivots
        free_cols = [c for c in range(len(live)) if c not in pivots]
        self._free = free_cols
        self._free_pos = {c: k for k, c in enumerate(free_cols)}
        self.dimension = len(free_cols)
        self._gen_expr_cache = {}
        self._build_boundary()

    @staticmethod
    def _reduce_row(row, pivots):
        row = dict(row)
        changed = True
        while changed:
            changed = False
            for c in list(row):
                if c in pivots and row.get(c):
                    f = row.pop(c)
                    for cc, vv in pivots[c].items():
                        row[cc] = row.get(cc, Fraction(0)) - f * vv
                    row = {k: v for k, v in row.items() if v}
                    changed = True
        return row

    def gen_coords(self, i):
        """Coordinates of Manin generator i on the free basis."""
        if i in self._gen_expr_cache:
            return self._gen_expr_cache[i]
        r, s = self._uf.find(i)
        out = {}
        if r not in self._uf.dead:
            c = self._col[r]
            if c in self._pivots:
                for cc, vv in self._pivots[c].items():
                    # x_c = -sum vv * x_cc
                    out[self._free_pos[cc]] = out.get(self._free_pos[cc], Fraction(0)) - s * vv
            else:
                out[self._free_pos[c]] = out.get(self._free_pos[c], Fraction(0)) + s
        out = {k: v for k, v in out.items() if v}
        self._gen_expr_cache[i] = out
        return out

    def basis_generator(self, k):
        """A Manin generator mapping to the k-th basis vector."""
        root = self._live_root_of_free(k)
        return root

    def _live_root_of_free(self, k):
        target = self._free[k]
        for r, c in self._col.items():
            if c == target:
                return r
        raise ModSymError("basis bookkeeping broke")

    # -- paths -----------------------------------------------------------

    def path_to_infinity(self, r):
        """Coordinates of the path {r -> oo} via Manin's trick."""
        if r is INF:
            return {}
        r = Fraction(r)
        a, m = r.numerator, r.denominator
        # continued fraction convergents of a/m
        quots = []
        x, y = a, m
        while y:
            q, rem = divmod(x, y)
            quots.append(q)
            x, y = y, rem
        p_prev, q_prev = 1, 0
        p_cur, q_cur = quots[0], 1
        pieces = [(q_prev, q_cur)]  # k = 0 piece: (q_{-1}, (+1) q_0)
        sign = 1
        for k in range(1, len(quots)):
            p_prev, p_cur = p_cur, quots[k] * p_cur + p_prev
            q_prev, q_cur = q_cur, quots[k] * q_cur + q_prev
            sign = -sign
            pieces.append((q_prev, sign * q_cur))
        total = {}
        for c, d in pieces:
            idx = self.p1.index(c, d)
            for pos, val in self.gen_coords(idx).items():
                total[pos] = total.get(pos, Fraction(0)) + val
        return {k: v for k, v in total.items() if v}

    def path(self, alpha, beta):
        """{alpha -> beta} = {alpha -> oo} - {beta -> oo}."""
        out = dict(self.path_to_infinity(alpha))
        for k, v in self.path_to_infinity(beta).items():
            out[k] = out.get(k, Fraction(0)) - v
        return {k: v for k, v in out.items() if v}

    def generator_endpoints(self, i):
        """(alpha, beta) with generator i = {alpha -> beta}."""
        c, d = self.p1[i]
        a, b, cc, dd = lift_to_sl2z(c, d, self.level)
        alpha = INF if dd == 0 else Fraction(b, dd)
        beta = INF if cc == 0 else Fraction(a, cc)
        return alpha, beta

    # -- Hecke operators ---------------------------------------------------

    def hecke_matrix(self, ell):
        """T_ell for ell prime to the level, U_ell for ell dividing it."""
        if ell in self._hecke:
            return self._hecke[ell]
        dim = self.dimension
        cols = []
        for k in range(dim):
            gen = self.basis_generator(k)
            alpha, beta = self.generator_endpoints(gen)
            total = {}
            for img_a, img_b in _hecke_images(alpha, beta, ell, self.level):
                for pos, val in self.path(img_a, img_b).items():
                    total[pos] = total.get(pos, Fraction(0)) + val
            cols.append(total)
        mat = [[cols[j].get(i, Fraction(0)) for j in range(dim)] for i in range(dim)]
        self._hecke[ell] = mat
        return mat

    # -- boundary and the cuspidal subspace --------------------------------

    def _build_boundary(self):
        # boundary to the sign-quotient of the cusp space, where
        # [cusp] = sign * [-cusp]; a self-negating cusp dies when sign=-1
        self._cusps = []
        self._dead_cusp = set()
        bmap = []
        for k in range(self.dimension):
            gen = self.basis_generator(k)
            alpha, beta = self.generator_endpoints(gen)
            bmap.append((self._cusp_index(beta), self._cusp_index(alpha)))
        mat = [[Fraction(0)] * self.dimension for _ in range(len(self._cusps))]
        for k, ((ti, ts), (fi, fs)) in enumerate(bmap):
            mat[ti][k] += ts
            mat[fi][k] -= fs
        self._boundary = mat
        self._cuspidal_basis = kernel_basis(mat) if mat else identity(self.dimension)

    def _cusp_key(self, c):
        if c is INF:
            return (1, 0)
        c = Fraction(c)
        return (c.numerator, c.denominator)

    def _cusp_index(self, cusp):
        """Index and sign of a cusp in the sign-quotient of the cusp space."""
        a, m = self._cusp_key(cusp)
        for idx, (aa, mm) in enumerate(self._cusps):
            dead = idx in self._dead_cusp
            if _cusps_equivalent(a, m, aa, mm, self.level):
                return idx, 0 if dead else 1
            if _cusps_equivalent(-a, m, aa, mm, self.level):
                return idx, 0 if dead else self.sign
        self._cusps.append((a, m))
        idx = len(self._cusps) - 1
        if self.sign == -1 and _cusps_equivalent(a, m, -a, m, self.level):
            self._dead_cusp.add(idx)
            return idx, 0
        return idx, 1

    @property
    def cusp_count(self):
        return len(self._cusps)

    @property
    def cuspidal_dimension(self):
        return len(self._cuspidal_basis)

    def cuspidal_basis(self):
        return self._cuspidal_basis

    def to_json(self):
        return {
            "level": self.level,
            "sign": self.sign,
            "p1_size": len(self.p1),
            "dimension": self.dimension,
            "cuspidal_dimension": self.cuspidal_dimension,
            "generators": [list(self.p1[i]) for i in range(len(self.p1))],
            "gen_coords": [
                {str(k): str(v) for k, v in self.gen_coords(i).items()}
                for i in range(len(self.p1))
            ],
        }

    # -- disk serialization (exact; Fractions as strings) ----------------

    def to_payload(self):
        return {
            "level": self.level,
            "sign": self.sign,
            "p1": [list(cd) for cd in self.p1._reps],
            "uf_parent": self._uf.parent,
            "uf_sgn": self._uf.sgn,
            "uf_dead": sorted(self._uf.dead),
            "col": {str(k): v for k, v in self._col.items()},
            "live": self._live,
            "pivots": {
                str(c): {str(cc): str(vv) for cc, vv in row.items()}
                for c, row in self._pivots.items()
            },
            "free": self._free,
            "hecke": {
                str(l): [[str(x) for x in row] for row in mat]
                for l, mat in self._hecke.items()
            },
        }

    @classmethod
    def from_payload(cls, payload):
        self = cls.__new__(cls)
        self.level = payload["level"]
        self.sign = payload["sign"]
        self.p1 = P1List(self.level, [tuple(cd) for cd in payload["p1"]])
        self._uf = _SignedUF(list(payload["uf_parent"]), list(payload["uf_sgn"]),
                             set(payload["uf_dead"]))
        self._col = {int(k): v for k, v in payload["col"].items()}
        self._live = list(payload["live"])
        self._pivots = {
            int(c): {int(cc): Fraction(vv) for cc, vv in row.items()}
            for c, row in payload["pivots"].items()
        }
        self._free = list(payload["free"])
        self._free_pos = {c: k for k, c in enumerate(self._free)}
        self.dimension = len(self._free)
        self._gen_expr_cache = {}
        self._hecke = {
            int(l): [[Fraction(x) for x in row] for row in mat]
            for l, mat in payload["hecke"].items()
        }
        self._build_boundary()
        return self


def _mobius(num_a, num_b, den_a, den_b, z):
    """(num_a z + num_b) / (den_a z + den_b) on Q u {oo}."""
    if z is INF:
        if den_a == 0:
            return INF
        return Fraction(num_a, den_a)
    z = Fraction(z)
    den = den_a * z + den_b
    if den == 0:
        return INF
    return (num_a * z + num_b) / den


def _hecke_images(alpha, beta, ell, level):
    """Endpoint pairs of the degree-ell Hecke correspondence."""
    out = []
    for k in range(ell):
        out.append((_mobius(1, k, 0, ell, alpha), _mobius(1, k, 0, ell, beta)))
    if level % ell:
        out.append((_mobius(ell, 0, 0, 1, alpha), _mobius(ell, 0, 0, 1, beta)))
    return out


def _cusps_equivalent(a1, m1, a2, m2, n):
    """Gamma_0(N)-equivalence of cusps a1/m1 and a2/m2 (lowest terms)."""
    g1 = gcd(a1, m1)
    a1, m1 = a1 // g1, m1 // g1
    g2 = gcd(a2, m2)
    a2, m2 = a2 // g2, m2 // g2
    if m1 < 0:
        a1, m1 = -a1, -m1
    if m2 < 0:
        a2, m2 = -a2, -m2
    _, s1, _ = _xgcd(a1, m1)
    _, s2, _ = _xgcd(a2, m2)
    g = gcd(n, m1 * m2)
    return (s1 * m2 - s2 * m1) % g == 0


# -- spaces are memoized per (level, sign), optionally disk-cached -------

_space_memo = {}


def _space_cache_name(level, sign):
    return f"modsym_{level}_{'plus' if sign == 1 else 'minus'}"


def build_space(level, sign=1, cache=None):
    key = (level, sign)
    if key in _space_memo:
        return _space_memo[key]
    if cache is not None:
        payload = cache.load(_space_cache_name(level, sign), "modsym")
        if payload is not None:
            space = SymbolSpace.from_payload(payload)
            _space_memo[key] = space
            return space
    space = SymbolSpace(level, sign)
    _space_memo[key] = space
    if cache is not None:
        cache.store(_space_cache_name(level, sign), "modsym", space.to_payload())
    return space


def hecke_operator(space, ell):
    return space.hecke_matrix(ell)


# -- eigen-symbols -------------------------------------------------------


@dataclass
class EigenSymbol:
    level: int
    sign: int
    space: SymbolSpace
    weights: list            # left eigenvector on the basis
    gen_values: list         # value at every Manin generator (content 1)
    eigenvalues: dict
    label: str = ""

    def evaluate(self, r):
        """Value on the path {r -> oo}; exact rational."""
        coords = self.space.path_to_infinity(r)
        return sum((self.weights[k] * v for k, v in coords.items()), Fraction(0))

    def evaluate_path(self, alpha, beta):
        coords = self.space.path(alpha, beta)
        return sum((self.weights[k] * v for k, v in coords.items()), Fraction(0))

    @property
    def at_zero(self):
        return self.evaluate(0)

    def to_json(self):
        return {
            "level": self.level,
            "sign": self.sign,
            "label": self.label or None,
            "weights": [str(w) for w in self.weights],
            "eigenvalues": {str(k): str(v) for k, v in self.eigenvalues.items()},
            "value_at_zero": str(self.at_zero),
        }


def eigen_symbol(curve, sign=1, level=None, lmax=50, cache=None, _eigen_override=None):
    """The rational Hecke eigen-functional attached to an elliptic curve.

    Probes T_ell for good primes ell until the joint left-eigenspace is a
    line; values are normalized to content 1 with value at {0 -> oo}
    nonnegative.
    """
    if level is None:
        label = getattr(curve, "label", "")
        table = curve_table()
        if label and label in table:
            level = table[label][1]
        else:
            level = conductor(curve)
    space = build_space(level, sign, cache)
    basis = None
    probes = {}
    ell = 2
    while ell <= lmax:
        if level % ell:
            a_ell = _eigen_override.get(ell) if _eigen_override else trace_of_frobenius(curve, ell)
            probes[ell] = a_ell
            mat = space.hecke_matrix(ell)
            basis = left_eigen_space(mat, Fraction(a_ell), basis)
            if not basis:
                raise ModSymError("curve not found at this level")
            if len(basis) == 1:
                break
        ell = _next_prime(ell)
    else:
        raise ModSymError("eigenline not isolated by ell <= %d" % lmax)
    w = list(basis[0])
    # record U_ell eigenvalues at bad primes (diagnostics and tests)
    for ell in _prime_divisors(level):
        mat = space.hecke_matrix(ell)
        img = [sum(w[i] * mat[i][j] for i in range(len(w))) for j in range(len(w))]
        k = next((i for i, x in enumerate(w) if x), None)
        mu = img[k] / w[k] if k is not None else Fraction(0)
        if all(img[j] == mu * w[j] for j in range(len(w))):
            probes[ell] = mu
    vals = []
    for i in range(len(space.p1)):
        coords = space.gen_coords(i)
        vals.append(sum((w[k] * v for k, v in coords.items()), Fraction(0)))
    # content-1 normalization over all generator values
    nonzero = [v for v in vals if v]
    if nonzero:
        from math import lcm

        den = 1
        for v in nonzero:
            den = lcm(den, v.denominator)
        num_gcd = 0
        for v in nonzero:
            num_gcd = gcd(num_gcd, abs(v.numerator * (den // v.denominator)))
        scale = Fraction(den, num_gcd)
        vals = [v * scale for v in vals]
        w = [x * scale for x in w]
    sym = EigenSymbol(level, sign, space, w, vals, probes,
                      label=getattr(curve, "label", ""))
    v0 = sym.at_zero
    flip = v0 < 0 or (v0 == 0 and next((v for v in vals if v), Fraction(0)) < 0)
    if flip:
        sym.weights = [-x for x in sym.weights]
        sym.gen_values = [-v for v in vals]
    return sym


def _next_prime(n):
    n += 1
    while True:
        if all(n % q for q in range(2, int(n ** 0.5) + 1)):
            return n
        n += 1


def _prime_divisors(n):
    out = []
    q = 2
    while n > 1:
        if q * q > n:
            q = n
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        else:
            q += 1
    return out
