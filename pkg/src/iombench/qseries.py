"""Exact truncated multivariate power series over the rationals.

Coefficients are fractions.Fraction, truncation is by total degree, and
every variable is graded in degree one.  This ring is used to machine-verify
the combinatorial identities behind the transfer-matrix coefficients; all
checks here are exact, no floating point is involved.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple

from .partitions import nodes, partitions_up_to

#: canonical variable order of the three-variable ring used by the identity
#: checks: the partition-counting variable first, then the two node weights.
PQQ = ("p", "q1", "q3")


class SeriesError(ValueError):
    pass


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise SeriesError("coefficients must be exact (int or Fraction), got %r" % type(x))


@dataclass(frozen=True)
class TruncatedMultiSeries:
    """A polynomial representative of a power series modulo total degree.

    coeffs maps exponent tuples (one entry per variable) to nonzero Fraction
    coefficients; anything of total degree above `degree` has been dropped.
    Arithmetic requires both operands to share variables and degree.
    """

    variables: tuple[str, ...]
    degree: int
    coeffs: Mapping[tuple[int, ...], Fraction] = field(default_factory=dict)

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, variables=PQQ, degree: int = 0):
        return cls(tuple(variables), degree, {})

    @classmethod
    def constant(cls, value, variables=PQQ, degree: int = 0):
        value = _as_fraction(value)
        zero_exp = (0,) * len(variables)
        coeffs = {zero_exp: value} if value else {}
        return cls(tuple(variables), degree, coeffs)

    @classmethod
    def one(cls, variables=PQQ, degree: int = 0):
        return cls.constant(1, variables, degree)

    @classmethod
    def monomial(cls, exponents: Mapping[str, int], coefficient=1,
                 variables=PQQ, degree: int = 0):
        variables = tuple(variables)
        exp = [0] * len(variables)
        for name, k in exponents.items():
            if name not in variables:
                raise SeriesError("unknown variable %r" % name)
            if k < 0:
                raise SeriesError("negative exponents are not representable")
            exp[variables.index(name)] = k
        coefficient = _as_fraction(coefficient)
        if sum(exp) > degree or not coefficient:
            return cls(variables, degree, {})
        return cls(variables, degree, {tuple(exp): coefficient})

    # -- basic queries -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def constant_term(self) -> Fraction:
        return self.coeffs.get((0,) * len(self.variables), Fraction(0))

    def coefficient(self, exponents: Mapping[str, int]) -> Fraction:
        exp = [0] * len(self.variables)
        for name, k in exponents.items():
            exp[self.variables.index(name)] = k
        return self.coeffs.get(tuple(exp), Fraction(0))

    def _check_compatible(self, other):
        if self.variables != other.variables or self.degree != other.degree:
            raise SeriesError("series live in different rings: %r/%d vs %r/%d"
                              % (self.variables, self.degree,
                                 other.variables, other.degree))

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = TruncatedMultiSeries.constant(other, self.variables, self.degree)
        self._check_compatible(other)
        coeffs = dict(self.coeffs)
        for exp, c in other.coeffs.items():
            s = coeffs.get(exp, Fraction(0)) + c
            if s:
                coeffs[exp] = s
            else:
                coeffs.pop(exp, None)
        return TruncatedMultiSeries(self.variables, self.degree, coeffs)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedMultiSeries(
            self.variables, self.degree,
            {exp: -c for exp, c in self.coeffs.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = TruncatedMultiSeries.constant(other, self.variables, self.degree)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = _as_fraction(other)
            if not other:
                return TruncatedMultiSeries(self.variables, self.degree, {})
            return TruncatedMultiSeries(
                self.variables, self.degree,
                {exp: c * other for exp, c in self.coeffs.items()})
        self._check_compatible(other)
        degree = self.degree
        out: dict[tuple[int, ...], Fraction] = {}
        # iterate over the smaller factor for the outer loop
        a, b = self.coeffs, other.coeffs
        if len(a) > len(b):
            a, b = b, a
        for ea, ca in a.items():
            da = sum(ea)
            for eb, cb in b.items():
                if da + sum(eb) > degree:
                    continue
                exp = tuple(x + y for x, y in zip(ea, eb))
                s = out.get(exp, Fraction(0)) + ca * cb
                if s:
                    out[exp] = s
                else:
                    del out[exp]
        return TruncatedMultiSeries(self.variables, degree, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = TruncatedMultiSeries.one(self.variables, self.degree)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def inverse(self):
        """Multiplicative inverse in the truncated ring.

        Requires a nonzero constant term.  Newton iteration doubles the
        correct degree each step, so ceil(log2(degree+1)) multiplications
        suffice.
        """
        c0 = self.constant_term()
        if not c0:
            raise SeriesError("series with zero constant term has no inverse")
        x = TruncatedMultiSeries.constant(1 / c0, self.variables, self.degree)
        correct = 0
        while correct < self.degree:
            x = x * (2 - self * x)
            correct = 2 * correct + 1
        return x

    # -- structural helpers --------------------------------------------------

    def first_difference(self, other):
        """Smallest monomial (graded lexicographic) where the two disagree.

        Returns (exponent_tuple, self_coeff, other_coeff) or None.
        """
        self._check_compatible(other)
        exps = set(self.coeffs) | set(other.coeffs)
        for exp in sorted(exps, key=lambda e: (sum(e), e)):
            a = self.coeffs.get(exp, Fraction(0))
            b = other.coeffs.get(exp, Fraction(0))
            if a != b:
                return exp, a, b
        return None

    def specialize(self, name: str, exponents: Mapping[str, int] | None):
        """Substitute a variable by a monomial (or by zero when None).

        The substituting monomial must not mention the substituted variable
        and must have total degree >= 1, so the substitution never moves
        terms from above the truncation bound to below it.
        """
        if name not in self.variables:
            raise SeriesError("unknown variable %r" % name)
        i = self.variables.index(name)
        if exponents is not None:
            if name in exponents and exponents[name]:
                raise SeriesError("substitution may not mention %r itself" % name)
            target = [0] * len(self.variables)
            for v, k in exponents.items():
                target[self.variables.index(v)] = k
            if sum(target) < 1:
                raise SeriesError("substituting monomial must have degree >= 1")
        out: dict[tuple[int, ...], Fraction] = {}
        for exp, c in self.coeffs.items():
            k = exp[i]
            if exponents is None:
                if k:
                    continue
                new = exp
            else:
                new = list(exp)
                new[i] = 0
                for j, t in enumerate(target):
                    new[j] += k * t
                new = tuple(new)
                if sum(new) > self.degree:
                    continue
            s = out.get(new, Fraction(0)) + c
            if s:
                out[new] = s
            else:
                del out[new]
        return TruncatedMultiSeries(self.variables, self.degree, out)

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for exp in sorted(self.coeffs, key=lambda e: (sum(e), e)):
            c = self.coeffs[exp]
            mono = "*".join("%s^%d" % (v, k) for v, k in zip(self.variables, exp) if k)
            terms.append(("%s" % c) + ("*" + mono if mono else ""))
        return " + ".join(terms)


# -- Pochhammer products ----------------------------------------------------

def _require_monomial(z: TruncatedMultiSeries) -> tuple[tuple[int, ...], Fraction]:
    if len(z.coeffs) != 1:
        raise SeriesError("expected a monomial, got %d terms" % len(z.coeffs))
    [(exp, c)] = z.coeffs.items()
    return exp, c


def poch_finite(z: TruncatedMultiSeries, m: int) -> TruncatedMultiSeries:
    """Finite Pochhammer (z; p)_m = prod_{s=0}^{m-1} (1 - z p^s).

    z must be a monomial in a ring containing the variable p.
    """
    _require_monomial(z)
    if m < 0:
        raise SeriesError("finite Pochhammer needs m >= 0")
    p = TruncatedMultiSeries.monomial({"p": 1}, 1, z.variables, z.degree)
    out = TruncatedMultiSeries.one(z.variables, z.degree)
    zp = z
    for _ in range(m):
        out = out * (1 - zp)
        zp = zp * p
    return out


def poch_infinite(z: TruncatedMultiSeries) -> TruncatedMultiSeries:
    """Infinite Pochhammer (z; p)_infty truncated at the ring degree.

    z must be a monomial of positive total degree; factors beyond the
    truncation bound are identically 1 and are skipped.
    """
    exp, _ = _require_monomial(z)
    if sum(exp) < 1:
        raise SeriesError("infinite Pochhammer needs a monomial of degree >= 1")
    p = TruncatedMultiSeries.monomial({"p": 1}, 1, z.variables, z.degree)
    out = TruncatedMultiSeries.one(z.variables, z.degree)
    zp = z
    while not zp.is_zero():
        out = out * (1 - zp)
        zp = zp * p
    return out


# -- identity checks ---------------------------------------------------------

@dataclass(frozen=True)
class IdentityReport:
    """Outcome of one exact identity check."""

    name: str
    passed: bool
    detail: str = ""
    mismatch: tuple | None = None  # (exponent tuple, lhs coeff, rhs coeff)

    def __bool__(self):
        return self.passed


def _report(name: str, lhs: TruncatedMultiSeries, rhs: TruncatedMultiSeries,
            detail: str = "") -> IdentityReport:
    diff = lhs.first_difference(rhs)
    if diff is None:
        return IdentityReport(name, True, detail)
    exp, a, b = diff
    where = "*".join("%s^%d" % (v, k) for v, k in zip(lhs.variables, exp) if k) or "1"
    return IdentityReport(
        name, False,
        detail + (" first mismatch at %s: %s vs %s" % (where, a, b)).strip(),
        (exp, a, b))


def _geometric(degree: int, r: int = 1) -> TruncatedMultiSeries:
    """1 / ((1 - q1^r)(1 - q3^r)) in the canonical three-variable ring."""
    q1r = TruncatedMultiSeries.monomial({"q1": r}, 1, PQQ, degree)
    q3r = TruncatedMultiSeries.monomial({"q3": r}, 1, PQQ, degree)
    return ((1 - q1r) * (1 - q3r)).inverse()


def check_prop_A1(degree: int) -> IdentityReport:
    """Partition sum of complement node weights against its product form.

    Left side: sum over partitions lam of p^|lam| times
    (1/((1-q1)(1-q3)) - sum over cells (i,j) of lam of q1^(i-1) q3^(j-1)).
    Right side: (p q1 q3)_infty / ((q1)_infty (q3)_infty), all base p.
    """
    if degree < 1:
        raise SeriesError("degree must be >= 1")
    geo = _geometric(degree)
    lhs = TruncatedMultiSeries.zero(PQQ, degree)
    for lam in partitions_up_to(degree):
        inner = geo
        for a, b in nodes(lam):
            inner = inner - TruncatedMultiSeries.monomial(
                {"q1": a - 1, "q3": b - 1}, 1, PQQ, degree)
        lhs = lhs + TruncatedMultiSeries.monomial(
            {"p": lam.size}, 1, PQQ, degree) * inner
    pq1q3 = TruncatedMultiSeries.monomial({"p": 1, "q1": 1, "q3": 1}, 1, PQQ, degree)
    q1 = TruncatedMultiSeries.monomial({"q1": 1}, 1, PQQ, degree)
    q3 = TruncatedMultiSeries.monomial({"q3": 1}, 1, PQQ, degree)
    rhs = poch_infinite(pq1q3) * poch_infinite(q1).inverse() * poch_infinite(q3).inverse()
    return _report("prop_A1[degree=%d]" % degree, lhs, rhs)


class HookPoincare(NamedTuple):
    brute: TruncatedMultiSeries
    closed: TruncatedMultiSeries
    agree: bool


def hook_poincare(a: int, b: int, degree: int) -> HookPoincare:
    """Generating series of partitions avoiding the cell (a, b), two ways.

    Brute force enumerates partitions of size <= degree; the closed form is
    the Durfee-style sum over s of p^((a-1-s)(b-1-s)) divided by
    (p)_{a-1-s} (p)_{b-1-s}.  The shift by one: the cell is addressed by
    1-based row and column here, while the Durfee decomposition counts the
    full rows and columns strictly above and left of it.
    Both series (variable p only) are returned together with their equality.
    """
    if a < 1 or b < 1:
        raise SeriesError("cell indices are 1-based positive integers")
    var = ("p",)
    brute = TruncatedMultiSeries.zero(var, degree)
    for lam in partitions_up_to(degree):
        if not lam.contains((a, b)):
            brute = brute + TruncatedMultiSeries.monomial(
                {"p": lam.size}, 1, var, degree)
    p = TruncatedMultiSeries.monomial({"p": 1}, 1, var, degree)
    closed = TruncatedMultiSeries.zero(var, degree)
    for s in range(min(a, b)):
        term = TruncatedMultiSeries.monomial(
            {"p": (a - 1 - s) * (b - 1 - s)}, 1, var, degree)
        term = term * poch_finite(p, a - 1 - s).inverse()
        term = term * poch_finite(p, b - 1 - s).inverse()
        closed = closed + term
    return HookPoincare(brute, closed, brute.first_difference(closed) is None)


def check_one_variable_identity(degree: int, s_max: int) -> IdentityReport:
    """Single-sum reduction sum_m q1^m (q3)_m / (p)_m = (q1 q3)_infty / (q1)_infty.

    Verified in the full three-variable ring, then re-verified under the
    specializations q3 -> p^s for s = 1..s_max.
    """
    if degree < 1:
        raise SeriesError("degree must be >= 1")
    q1 = TruncatedMultiSeries.monomial({"q1": 1}, 1, PQQ, degree)
    q3 = TruncatedMultiSeries.monomial({"q3": 1}, 1, PQQ, degree)
    p = TruncatedMultiSeries.monomial({"p": 1}, 1, PQQ, degree)
    lhs = TruncatedMultiSeries.zero(PQQ, degree)
    for m in range(degree + 1):
        term = TruncatedMultiSeries.monomial({"q1": m}, 1, PQQ, degree)
        if term.is_zero():
            break
        term = term * poch_finite(q3, m)
        term = term * poch_finite(p, m).inverse()
        lhs = lhs + term
    q1q3 = TruncatedMultiSeries.monomial({"q1": 1, "q3": 1}, 1, PQQ, degree)
    rhs = poch_infinite(q1q3) * poch_infinite(q1).inverse()
    rep = _report("one_variable_identity[degree=%d]" % degree, lhs, rhs)
    if not rep.passed:
        return rep
    for s in range(1, s_max + 1):
        ls = lhs.specialize("q3", {"p": s})
        rs = rhs.specialize("q3", {"p": s})
        sub = _report("one_variable_identity[degree=%d,q3=p^%d]" % (degree, s), ls, rs)
        if not sub.passed:
            return sub
    return IdentityReport(rep.name + "+specializations[s<=%d]" % s_max, True)


def C_alpha(alpha: Mapping[int, int], degree: int) -> TruncatedMultiSeries:
    """Partition sum C_alpha = sum_lam p^|lam| prod_r z_r(lam)^(alpha_r).

    Here z_r(lam) = 1/((1-q3^r)(1-q1^r)) - sum over cells (a,b) of lam of
    q3^((a-1)r) q1^((b-1)r).  alpha maps the label r to its multiplicity.
    """
    alpha = {r: k for r, k in alpha.items() if k}
    for r, k in alpha.items():
        if r < 1 or k < 0:
            raise SeriesError("alpha must map positive labels to multiplicities")
    geo = {r: _geometric(degree, r) for r in alpha}
    out = TruncatedMultiSeries.zero(PQQ, degree)
    for lam in partitions_up_to(degree):
        term = TruncatedMultiSeries.monomial({"p": lam.size}, 1, PQQ, degree)
        for r, k in alpha.items():
            z = geo[r]
            for a, b in nodes(lam):
                z = z - TruncatedMultiSeries.monomial(
                    {"q3": (a - 1) * r, "q1": (b - 1) * r}, 1, PQQ, degree)
            term = term * z ** k
        out = out + term
    return out


def check_C_ell_factorization(ell: int, degree: int) -> IdentityReport:
    """Single-label partition sum against its infinite-product form.

    C_(alpha = one label ell) factorizes as
    (p q3^ell q1^ell)_infty / ((q3^ell)_infty (q1^ell)_infty), base p.
    """
    if ell < 1:
        raise SeriesError("ell must be >= 1")
    lhs = C_alpha({ell: 1}, degree)

    def poch_inf(exps):
        # a factor whose leading monomial exceeds the truncation bound is 1
        if sum(exps.values()) > degree:
            return TruncatedMultiSeries.one(PQQ, degree)
        return poch_infinite(TruncatedMultiSeries.monomial(exps, 1, PQQ, degree))

    rhs = (poch_inf({"p": 1, "q1": ell, "q3": ell})
           * poch_inf({"q1": ell}).inverse()
           * poch_inf({"q3": ell}).inverse())
    return _report("C_ell_factorization[ell=%d,degree=%d]" % (ell, degree), lhs, rhs)
