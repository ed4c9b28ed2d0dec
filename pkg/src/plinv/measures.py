"""Mazur-Tate measures on Z_p^*, Stickelberger elements, cyclotomic
p-adic L-values and derivatives, and the exceptional-zero / twist /
product verifiers.

For a p-ordinary eigen-symbol with unit root alpha the measure of the
residue disc a + p^n Z_p is built from symbol values [r] at rationals:

  * alpha = +-1 (multiplicative p, U_p-eigenvalue):
        mu(a + p^n) = alpha^(-n) [a/p^n]            (exact rational)
  * good ordinary p (alpha a unit root of x^2 - a_p x + p):
        mu(a + p^n) = alpha^(-n) [a/p^n] - alpha^(-n-1) [a/p^(n-1)]

In both cases the U_p / T_p relation on the eigen-symbol makes the
distribution property exact; the good-ordinary second term has no
analogue at Steinberg primes, where the local L-factor has a single
root.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .curves import (
    SPLIT,
    conductor,
    curve_l_invariant,
    curve_table,
    is_fundamental_discriminant,
    kronecker,
    quadratic_twist,
    reduction_type,
)
from .modsym import eigen_symbol
from .padic import PadicNumber, check_prime, int_val, iwasawa_log


class MeasureError(ValueError):
    pass


# -- unit roots ----------------------------------------------------------


@dataclass(frozen=True)
class UnitRootData:
    p: int
    ap: int
    multiplicative: bool
    ordinary: bool
    alpha_exact: int | None    # +-1 in the multiplicative case
    alpha: PadicNumber

    def to_json(self):
        return {
            "p": self.p,
            "ap": self.ap,
            "multiplicative": self.multiplicative,
            "ordinary": self.ordinary,
            "alpha": str(self.alpha_exact) if self.alpha_exact else self.alpha.to_json(),
        }


def unit_root(p, ap, multiplicative, prec=20):
    """alpha = a_p at multiplicative p; else the unit root of
    x^2 - a_p x + p by Hensel lifting."""
    check_prime(p)
    if multiplicative:
        if ap not in (1, -1):
            raise MeasureError("multiplicative a_p must be +-1")
        return UnitRootData(p, ap, True, True, ap, PadicNumber.from_int(p, ap, prec))
    if ap % p == 0:
        raise MeasureError("supersingular not supported")
    m = p
    x = ap % p
    k = 1
    while k < prec:
        k = min(2 * k, prec)
        m = p ** k
        fx = (x * x - ap * x + p) % m
        dfx = (2 * x - ap) % m
        x = (x - fx * pow(dfx, -1, m)) % m
    alpha = PadicNumber.from_int(p, x, prec)
    assert ((alpha * alpha - ap * alpha + p)).is_zero
    return UnitRootData(p, ap, False, True, None, alpha)


# -- measures ------------------------------------------------------------


@dataclass
class PadicMeasure:
    p: int
    depth: int
    root: UnitRootData
    symbol: object
    values: dict               # a (unit mod p^depth) -> Fraction | PadicNumber
    exact: bool

    def mass(self):
        total = None
        for v in self.values.values():
            total = v if total is None else total + v
        return total if total is not None else Fraction(0)

    def to_json(self):
        enc = (lambda v: str(v)) if self.exact else (lambda v: v.to_json())
        return {
            "p": self.p,
            "depth": self.depth,
            "exact": self.exact,
            "values": {str(a): enc(v) for a, v in sorted(self.values.items())},
        }


def build_measure(symbol, p, depth, root=None, prec=20):
    """Measure table on (Z/p^depth)^*; exact rationals when alpha = +-1."""
    check_prime(p)
    if depth < 1:
        raise MeasureError("depth must be at least 1")
    level = symbol.level
    if level % p == 0:
        if level % (p * p) == 0:
            raise MeasureError("additive primes not supported")
        multiplicative = True
    else:
        multiplicative = False
    if root is None:
        ap = symbol.eigenvalues.get(p)
        if ap is None:
            raise MeasureError("symbol carries no eigenvalue at p")
        root = unit_root(p, int(ap), multiplicative, prec)
    if not root.ordinary:
        raise MeasureError("supersingular not supported")
    pn = p ** depth
    values = {}
    if root.multiplicative:
        a_inv_n = Fraction(root.alpha_exact) ** (-depth)
        for a in range(1, pn):
            if a % p == 0:
                continue
            values[a] = a_inv_n * symbol.evaluate(Fraction(a, pn))
        return PadicMeasure(p, depth, root, symbol, values, True)
    ai = root.alpha ** (-depth)
    ai1 = root.alpha ** (-depth - 1)
    pn1 = pn // p
    for a in range(1, pn):
        if a % p == 0:
            continue
        lead = ai * symbol.evaluate(Fraction(a, pn))
        tail = ai1 * symbol.evaluate(Fraction(a % pn1, pn1) if pn1 > 1 else Fraction(a))
        values[a] = lead - tail
    return PadicMeasure(p, depth, root, symbol, values, False)


def distribution_defect(measure, finer):
    """mu_n(a) - sum of mu_{n+1} over the fiber; all-zero iff the
    distribution property holds."""
    if finer.depth != measure.depth + 1 or finer.p != measure.p:
        raise MeasureError("need measures at consecutive depths")
    p, pn = measure.p, measure.p ** measure.depth
    out = {}
    for a, v in measure.values.items():
        s = None
        for k in range(p):
            b = a + k * pn
            w = finer.values[b]
            s = w if s is None else s + w
        out[a] = v - s
    return out


# -- Stickelberger elements ----------------------------------------------


@dataclass
class StickelbergerElement:
    p: int
    depth: int
    coeffs: dict               # a in (Z/p^depth)^* -> Fraction | PadicNumber
    exact: bool
    dual: bool = False

    def augmentation(self):
        total = None
        for v in self.coeffs.values():
            total = v if total is None else total + v
        return total if total is not None else Fraction(0)

    def pushforward(self):
        """Image under (Z/p^depth)^* -> (Z/p^(depth-1))^*."""
        if self.depth < 2:
            raise MeasureError("already at depth 1")
        pm = self.p ** (self.depth - 1)
        out = {}
        for a, v in self.coeffs.items():
            b = a % pm
            out[b] = out[b] + v if b in out else v
        return StickelbergerElement(self.p, self.depth - 1, out, self.exact, self.dual)

    def chi_twisted_sum(self, chi):
        """sum chi(a) * coeff(a) for a map a -> Fraction."""
        total = None
        for a, v in self.coeffs.items():
            t = v * chi(a)
            total = t if total is None else total + t
        return total

    def moment(self, j, prec=20):
        """sum coeff(a) * log_p<a>^j."""
        if j == 0:
            return self.augmentation()
        total = None
        for a, v in self.coeffs.items():
            la = iwasawa_log(PadicNumber.from_int(self.p, a, prec))
            t = la ** j * v
            total = t if total is None else total + t
        return total

    def leading_term(self, r, prec=20):
        """The I^r/I^(r+1) leading coefficient via moments; requires all
        moments of degree < r to vanish."""
        if r < 1:
            raise MeasureError("order must be at least 1")
        for j in range(r):
            m = self.moment(j, prec)
            vanishes = (m == 0) if isinstance(m, Fraction) else m.is_zero
            if not vanishes:
                raise MeasureError("order of vanishing less than %d" % r)
        return self.moment(r, prec)

    def to_json(self):
        enc = (lambda v: str(v)) if self.exact else (lambda v: v.to_json())
        aug = self.augmentation()
        return {
            "p": self.p,
            "depth": self.depth,
            "dual": self.dual,
            "coefficients": {str(a): enc(v) for a, v in sorted(self.coeffs.items())},
            "augmentation": enc(aug),
        }


def stickelberger(measure, dual=False):
    """Theta_n = sum mu(a + p^n) [sigma_a]; sigma_a indexed by a itself
    (arithmetic normalization), or by a^(-1) when dual."""
    pn = measure.p ** measure.depth
    coeffs = {}
    for a, v in measure.values.items():
        key = pow(a, -1, pn) if dual else a
        coeffs[key] = v
    return StickelbergerElement(measure.p, measure.depth, coeffs, measure.exact, dual)


# -- L-values -------------------------------------------------------------


def lp_value_and_derivative(measure, prec=20):
    """(L_p(0), L_p'(0)): the mass and the log<a>-weighted Riemann sum.

    The integrand log_p<a> is constant mod p^depth on each disc and the
    measure values are p-integral, so the derivative is provable exactly
    to absolute precision `depth`; the reported precision says so.
    """
    l0 = measure.mass()
    p, n = measure.p, measure.depth
    total = None
    for a, v in measure.values.items():
        la = iwasawa_log(PadicNumber.from_int(p, a, prec))
        t = la * v
        total = t if total is None else total + t
    if total is None:
        total = PadicNumber.zero(p, n)
    loss = 0
    for v in measure.values.values():
        if isinstance(v, Fraction):
            if v != 0:
                loss = max(loss, int_val(v.denominator, p))
        elif not v.is_zero and v.ord() < 0:
            loss = max(loss, -v.ord())
    l1 = total.cap_abs_prec(n - loss)
    return l0, l1


def euler_factor(root, chi_p):
    """Modified Euler factor at p for an unramified quadratic chi with
    chi(p) in {1, -1}, or chi_p = 0 for ramified chi (factor 1).

    Multiplicative p: 1 - chi(p)/alpha.  Good ordinary p: the weight-2
    normalization (1 - chi(p)/alpha)(1 - chibar(p)/alpha).
    """
    if chi_p == 0:
        return Fraction(1)
    chi_p = Fraction(chi_p)
    if chi_p ** 2 != 1:
        raise MeasureError("only quadratic or trivial characters supported")
    if root.multiplicative:
        return 1 - chi_p / root.alpha_exact
    ainv = root.alpha ** -1
    return (1 - ainv * chi_p) * (1 - ainv * (1 / chi_p))


# -- verifier reports ------------------------------------------------------


CONVENTIONS = {
    "sigma_indexing": "sigma_a <-> a (pass dual=True for a^(-1))",
    "symbol_normalization": "content 1 over all Manin generator values; value at {0->oo} >= 0",
    "euler_factor": "multiplicative: 1 - chi(p)/alpha; good ordinary: (1 - chi(p)/alpha)(1 - chibar(p)/alpha)",
    "derivative_integrand": "log_p of a/omega(a) (Iwasawa branch)",
}


def _agreement(a, b):
    """Provable absolute precision to which two p-adic numbers agree."""
    d = a - b
    return d.abs_prec if d.is_zero else d.v


@dataclass
class EzcReport:
    label: str
    p: int
    depth: int
    lp0_is_zero: bool
    lp0: Fraction
    derivative: PadicNumber
    value_at_zero: Fraction
    ratio: PadicNumber
    l_invariant: PadicNumber
    matched_sign: str
    agreement_digits: int
    conventions: dict = field(default_factory=lambda: dict(CONVENTIONS))

    def to_json(self):
        return {
            "curve": self.label,
            "p": self.p,
            "depth": self.depth,
            "Lp0": str(self.lp0),
            "Lp0_is_zero": self.lp0_is_zero,
            "Lp_derivative": self.derivative.to_json(),
            "value_at_zero": str(self.value_at_zero),
            "ratio": self.ratio.to_json(),
            "tate_l_invariant": self.l_invariant.to_json(),
            "matched_sign": self.matched_sign,
            "agreement_digits": self.agreement_digits,
            "conventions": self.conventions,
        }


def exceptional_zero_check(curve, p, depth=3, prec=20, sign=1, dual=False, level=None, cache=None):
    """Compare L_p'(0)/[0->oo] with +-LI_p(q_E) for a split
    multiplicative prime; both sides are linear in the same symbol scale,
    so the normalization cancels."""
    red = reduction_type(curve, p)
    if red.kind != SPLIT:
        raise MeasureError("not an exceptional (split multiplicative) prime")
    symbol = eigen_symbol(curve, sign, level=level, cache=cache)
    measure = build_measure(symbol, p, depth, prec=prec)
    l0, l1 = lp_value_and_derivative(measure, prec)
    if dual:
        l1 = -l1  # sigma_a -> sigma_a^(-1) flips the log weight
    v0 = symbol.at_zero
    if v0 == 0:
        raise MeasureError("symbol vanishes at {0->oo}; vanishing central L-value")
    ratio = l1 * Fraction(1, v0)
    li_val = curve_l_invariant(curve, p, prec, cache)
    agree_plus = _agreement(ratio, li_val)
    agree_minus = _agreement(ratio, -li_val)
    if agree_plus >= agree_minus:
        matched, digits = "+", agree_plus
    else:
        matched, digits = "-", agree_minus
    return EzcReport(
        label=getattr(curve, "label", "") or str(curve.a_invariants),
        p=p,
        depth=depth,
        lp0_is_zero=(l0 == 0),
        lp0=l0,
        derivative=l1,
        value_at_zero=v0,
        ratio=ratio,
        l_invariant=li_val,
        matched_sign=matched,
        agreement_digits=digits,
    )


@dataclass
class TwistReport:
    label: str
    d: int
    p: int
    chi_p: int
    case: str
    data: dict
    conventions: dict = field(default_factory=lambda: dict(CONVENTIONS))

    def to_json(self):
        def enc(v):
            if hasattr(v, "to_json"):
                return v.to_json()
            if isinstance(v, Fraction):
                return str(v)
            return v

        return {
            "curve": self.label,
            "D": self.d,
            "p": self.p,
            "chi_p": self.chi_p,
            "case": self.case,
            **{k: enc(v) for k, v in self.data.items()},
            "conventions": self.conventions,
        }


def twist_level(curve, d):
    """Conductor of the quadratic twist for fundamental d coprime to the
    conductor: N * cond(chi_d)^2 = N * d^2, since the local components
    away from d are unramified twists."""
    label = getattr(curve, "label", "")
    table = curve_table()
    n = table[label][1] if label in table else conductor(curve)
    return n * d * d


def twist_product_check(curve, d, p, depth=3, prec=20, sign=1, cache=None):
    """Quadratic-twist bookkeeping for the product of p-adic L-functions.

    chi_d(p) = 1 (split): both factors are exceptional; the derivative
    ratios and the Tate-period invariants of curve and twist must agree.
    chi_d(p) = -1 (inert): the twisted factor is nonsplit with Euler
    factor 2, so its L_p(0) equals exactly twice its value at {0->oo}.
    """
    if not is_fundamental_discriminant(d):
        raise MeasureError("D must be a fundamental discriminant")
    label = getattr(curve, "label", "")
    table = curve_table()
    n = table[label][1] if label in table else conductor(curve)
    from math import gcd

    if gcd(d, n * p) != 1:
        raise MeasureError("D must be coprime to p and the conductor")
    chi_p = kronecker(d, p)
    twist = quadratic_twist(curve, d)
    level_tw = n * d * d
    sym_tw = eigen_symbol(twist, sign, level=level_tw, cache=cache)
    measure_tw = build_measure(sym_tw, p, depth, prec=prec)
    l0_tw, l1_tw = lp_value_and_derivative(measure_tw, prec)
    v0_tw = sym_tw.at_zero

    if chi_p == 1:
        base = exceptional_zero_check(curve, p, depth, prec, sign, cache=cache)
        if v0_tw == 0:
            raise MeasureError("twisted symbol vanishes at {0->oo}")
        ratio_tw = l1_tw * Fraction(1, v0_tw)
        li_base = base.l_invariant
        li_tw = curve_l_invariant(twist, p, prec, cache)
        tate_match = _agreement(li_base, li_tw)
        ratio_match = max(_agreement(base.ratio, ratio_tw),
                          _agreement(base.ratio, -ratio_tw))
        return TwistReport(
            label=base.label, d=d, p=p, chi_p=1, case="split",
            data={
                "base_ratio": base.ratio,
                "twist_ratio": ratio_tw,
                "ratio_agreement_digits": ratio_match,
                "tate_li_base": li_base,
                "tate_li_twist": li_tw,
                "tate_agreement_digits": tate_match,
                "base_augmentation": base.lp0,
                "twist_augmentation": l0_tw,
                "product_vanishing_order_at_least_2": base.lp0 == 0 and l0_tw == 0,
            },
        )
    if chi_p == -1:
        factor = l0_tw * Fraction(1, v0_tw) if v0_tw else None
        root = measure_tw.root
        return TwistReport(
            label=getattr(curve, "label", "") or str(curve.a_invariants),
            d=d, p=p, chi_p=-1, case="inert",
            data={
                "twist_L0": l0_tw,
                "twist_value_at_zero": v0_tw,
                "euler_factor": euler_factor(root, 1),
                "factor_two_exact": v0_tw != 0 and l0_tw == 2 * v0_tw,
                "ratio": factor,
            },
        )
    raise MeasureError("chi_D(p) must be +-1 (D coprime to p)")


# -- exact cyclotomic identity ---------------------------------------------


def _poly_divmod_z(num, den):
    """Exact division of integer polynomials, den monic."""
    num = list(num)
    dn = len(den) - 1
    q = [0] * max(0, len(num) - dn)
    for i in range(len(num) - 1, dn - 1, -1):
        c = num[i]
        if c == 0:
            continue
        q[i - dn] = c
        for k in range(dn + 1):
            num[i - dn + k] -= c * den[k]
    while num and num[-1] == 0:
        num.pop()
    return q, num


def cyclotomic_polynomial(n):
    """Integer coefficients of Phi_n, by exact division of x^n - 1."""
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            q, r = _poly_divmod_z(poly, cyclotomic_polynomial(d))
            assert not r
            poly = q
    return poly


def one_minus_zeta_product(n):
    """prod_{i=1}^{n-1} (1 - zeta_n^i) computed exactly in Z[x]/Phi_n(x);
    the classical value is n."""
    if n < 2:
        raise MeasureError("need n >= 2")
    phi = cyclotomic_polynomial(n)
    deg = len(phi) - 1

    def reduce_mod_phi(poly):
        _, r = _poly_divmod_z(poly, phi)
        return r + [0] * (deg - len(r))

    acc = [1] + [0] * (deg - 1) if deg > 1 else [1]
    for i in range(1, n):
        factor = [1] + [0] * (i - 1) + [-1]  # 1 - x^i
        prod = [0] * (len(acc) + len(factor) - 1)
        for a, ca in enumerate(acc):
            if ca:
                for b, cb in enumerate(factor):
                    prod[a + b] += ca * cb
        acc = reduce_mod_phi(prod)
    if any(acc[1:]):
        raise MeasureError("product did not reduce to a constant")
    return acc[0]
