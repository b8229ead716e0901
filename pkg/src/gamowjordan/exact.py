"""Exact verification of the combinatorics behind the exponential decay of ``W^(n)``.

Everything here is integer arithmetic.  Polynomials are in the formal
variables ``X = i t Gamma`` (from evolving bras) and ``Xbar = -i t Gamma``
(from evolving kets); the two are kept apart during expansion and only
identified (``Xbar = -X``) at the end.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import comb, factorial

from .errors import DomainError

__all__ = [
    "GaussInt",
    "GaussIntPolynomial",
    "BivariatePolynomial",
    "SymbolicEvolution",
    "binom_product_identity",
    "binom_cancellation",
    "triple_index_sets",
    "reorder_check",
    "symbolic_state_evolution",
    "decay_exponent",
    "MAX_SYMBOLIC_N",
    "identity_suite",
]

MAX_SYMBOLIC_N = 20

@dataclass(frozen=True)
class GaussInt:
    """Gaussian integer ``re + i*im``."""

    re: int = 0
    im: int = 0

    @classmethod
    def coerce(cls, x) -> "GaussInt":
        if isinstance(x, GaussInt):
            return x
        if isinstance(x, int):
            return cls(x, 0)
        raise TypeError(f"cannot make a Gaussian integer from {type(x).__name__}")

    def __add__(self, other):
        o = GaussInt.coerce(other)
        return GaussInt(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussInt(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-GaussInt.coerce(other))

    def __rsub__(self, other):
        return GaussInt.coerce(other) - self

    def __mul__(self, other):
        o = GaussInt.coerce(other)
        return GaussInt(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = GaussInt(1)
        for _ in range(k):
            out = out * self
        return out

    def __bool__(self):
        return bool(self.re or self.im)

    def __eq__(self, other):
        if isinstance(other, int):
            other = GaussInt(other)
        if not isinstance(other, GaussInt):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def exact_div(self, d: int) -> "GaussInt":
        """Divide by a rational integer; raises if the division is not exact."""
        if self.re % d or self.im % d:
            raise ArithmeticError(f"{self} is not divisible by {d}")
        return GaussInt(self.re // d, self.im // d)

    def __complex__(self):
        return complex(self.re, self.im)

    def __repr__(self):
        return f"GaussInt({self.re}, {self.im})"

I = GaussInt(0, 1)

@dataclass(frozen=True)
class GaussIntPolynomial:
    """Univariate polynomial ``sum_j coeffs[j] X**j`` with Gaussian-integer coefficients."""

    coeffs: tuple = ()

    def __post_init__(self):
        cs = [GaussInt.coerce(c) for c in self.coeffs]
        while cs and not cs[-1]:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def constant(cls, c) -> "GaussIntPolynomial":
        return cls((c,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_one(self) -> bool:
        return self.coeffs == (GaussInt(1),)

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (GaussInt(),) * (n - len(self.coeffs))
        b = other.coeffs + (GaussInt(),) * (n - len(other.coeffs))
        return GaussIntPolynomial(tuple(x + y for x, y in zip(a, b)))

    def __mul__(self, other):
        if isinstance(other, (int, GaussInt)):
            return GaussIntPolynomial(tuple(c * other for c in self.coeffs))
        if self.is_zero() or other.is_zero():
            return GaussIntPolynomial()
        out = [GaussInt()] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return GaussIntPolynomial(tuple(out))

    __rmul__ = __mul__

    def exact_div(self, d: int) -> "GaussIntPolynomial":
        return GaussIntPolynomial(tuple(c.exact_div(d) for c in self.coeffs))

    def in_tau(self) -> "GaussIntPolynomial":
        """Re-express in ``tau = t*Gamma`` by substituting ``X = i*tau``."""
        return GaussIntPolynomial(tuple(c * I**j for j, c in enumerate(self.coeffs)))

@dataclass(frozen=True)
class BivariatePolynomial:
    """``sum c[p, q] X**p Xbar**q`` stored sparsely as ``{(p, q): GaussInt}``."""

    terms: tuple = ()

    @classmethod
    def from_dict(cls, d) -> "BivariatePolynomial":
        return cls(tuple(sorted((k, v) for k, v in d.items() if v)))

    def as_dict(self):
        return dict(self.terms)

    def identify_conjugates(self) -> GaussIntPolynomial:
        """Collapse to one variable with ``Xbar = -X``."""
        out = {}
        for (p, q), c in self.terms:
            out[p + q] = out.get(p + q, GaussInt()) + c * (-1) ** q
        if not out:
            return GaussIntPolynomial()
        return GaussIntPolynomial(tuple(out.get(j, GaussInt()) for j in range(max(out) + 1)))

def _check(cond, message):
    if not cond:
        raise DomainError(message)

def binom_product_identity(n: int, k: int, l: int, m: int) -> bool:
    """``C(n,k) C(k,l) C(n-k,m) == C(n,m) C(n-m,l) C(n-m-l,k-l)``."""
    _check(0 <= l <= k <= n and 0 <= m <= n - k, f"need 0<=l<=k<=n, 0<=m<=n-k; got {(n, k, l, m)}")
    lhs = comb(n, k) * comb(k, l) * comb(n - k, m)
    rhs = comb(n, m) * comb(n - m, l) * comb(n - m - l, k - l)
    return lhs == rhs

def _cancellation_bivariate(n, m, l) -> BivariatePolynomial:
    terms = {}
    for k in range(l, n - m + 1):
        key = (n - k - m, k - l)  # X^(n-k-m) Xbar^(k-l)
        terms[key] = terms.get(key, GaussInt()) + comb(n - m - l, k - l)
    return BivariatePolynomial.from_dict(terms)

def binom_cancellation(n: int, m: int, l: int) -> GaussIntPolynomial:
    """``sum_{k=l}^{n-m} C(n-m-l, k-l) Xbar**(k-l) X**(n-k-m)`` with ``Xbar = -X``.

    This is ``(X - X)**(n-m-l)``: the zero polynomial unless ``l == n - m``,
    in which case it is the constant 1.
    """
    _check(0 <= m <= n and 0 <= l <= n - m, f"need 0<=m<=n, 0<=l<=n-m; got {(n, m, l)}")
    return _cancellation_bivariate(n, m, l).identify_conjugates()

def triple_index_sets(n: int):
    """The ``(k, l, m)`` triples in original and in reordered summation order."""
    _check(n >= 0, "n must be non-negative")
    original = [
        (k, l, m) for k in range(n + 1) for l in range(k + 1) for m in range(n - k + 1)
    ]
    reordered = [
        (k, l, m) for m in range(n + 1) for l in range(n - m + 1) for k in range(l, n - m + 1)
    ]
    return original, reordered

def reorder_check(n: int) -> bool:
    """Both summation orders visit the same multiset of ``(k, l, m)`` triples."""
    original, reordered = triple_index_sets(n)
    return sorted(original) == sorted(reordered)

def decay_exponent():
    """Coefficient of ``t`` in ``-i z_R t + i conj(z_R) t``.

    ``z_R = E_R - i (Gamma/2)`` is represented on the basis
    ``(E_R, Gamma/2)``; returns the two Gaussian-integer coordinates of the
    exponent.  ``(0, -2)`` means ``exp(-Gamma t)``.
    """
    z = (GaussInt(1), -I)
    zbar = (GaussInt(1), I)
    return tuple(-I * a + I * b for a, b in zip(z, zbar))

@dataclass(frozen=True)
class SymbolicEvolution:
    """Result of evolving ``W^(n)`` symbolically.

    ``terms[(l, m)]`` is the jordan-normalized coefficient of
    ``|z_R>>^(l) <<^(m)|``, a polynomial in ``X = i t Gamma`` multiplying
    ``exp(-Gamma t)`` when ``pure_exponential_prefactor`` holds.
    ``raw[(l, m)]`` keeps the unidentified two-variable form scaled by ``n!``.
    """

    n: int
    terms: dict
    raw: dict
    pure_exponential_prefactor: bool

    def theorem_holds(self) -> bool:
        """Exactly ``W^(n)`` again: constant 1 on ``l + m = n``, zero elsewhere."""
        if not self.pure_exponential_prefactor:
            return False
        for (l, m), poly in self.terms.items():
            if l + m == self.n:
                if not poly.is_one():
                    return False
            elif not poly.is_zero():
                return False
        return all((l, self.n - l) in self.terms for l in range(self.n + 1))

def symbolic_state_evolution(n: int) -> SymbolicEvolution:
    """Evolve ``W^(n)`` through the full triple sum in exact arithmetic.

    Each term ``C(n,k) C(k,l) C(n-k,m) (-it)^(k-l) (it)^(n-k-m)`` of the
    raw-derivative expansion is converted to jordan normalization, where it
    becomes ``n! / ((k-l)! (n-k-m)!)`` times ``Xbar^(k-l) X^(n-k-m)`` divided
    by ``n!``.  Accumulation happens on the integer numerators; the single
    division by ``n!`` at the end must be exact.
    """
    _check(0 <= n <= MAX_SYMBOLIC_N, f"n must be in 0..{MAX_SYMBOLIC_N}, got {n}")
    nf = factorial(n)
    raw = {}
    for k, l, m in triple_index_sets(n)[0]:
        # C(n,k)C(k,l)C(n-k,m) * l! m! = n! / ((k-l)! (n-k-m)!)
        coeff = comb(n, k) * comb(k, l) * comb(n - k, m) * factorial(l) * factorial(m)
        bucket = raw.setdefault((l, m), {})
        key = (n - k - m, k - l)
        bucket[key] = bucket.get(key, GaussInt()) + coeff
    raw = {lm: BivariatePolynomial.from_dict(d) for lm, d in raw.items()}
    terms = {lm: poly.identify_conjugates().exact_div(nf) for lm, poly in raw.items()}
    e_coeff, half_gamma_coeff = decay_exponent()
    pure = e_coeff == 0 and half_gamma_coeff == GaussInt(-2)
    return SymbolicEvolution(n, terms, raw, pure)

def identity_suite(n_max: int, reorder_max: int | None = None) -> dict:
    """Exhaustive pass/fail table for all identity families up to ``n_max``."""
    reorder_max = n_max if reorder_max is None else reorder_max
    rows = []
    for n in range(n_max + 1):
        product_ok = all(
            binom_product_identity(n, k, l, m)
            for k in range(n + 1)
            for l in range(k + 1)
            for m in range(n - k + 1)
        )
        cancel_ok = True
        for m, l in product(range(n + 1), range(n + 1)):
            if l > n - m:
                continue
            poly = binom_cancellation(n, m, l)
            cancel_ok &= poly.is_one() if l == n - m else poly.is_zero()
        evolution_ok = (
            symbolic_state_evolution(n).theorem_holds() if n <= MAX_SYMBOLIC_N else None
        )
        rows.append(
            {
                "n": n,
                "binom_product_identity": product_ok,
                "binom_cancellation": cancel_ok,
                "reorder_check": reorder_check(n),
                "symbolic_state_evolution": evolution_ok,
            }
        )
    for n in range(n_max + 1, reorder_max + 1):
        rows.append({"n": n, "reorder_check": reorder_check(n)})
    passed = all(v is not False for row in rows for k, v in row.items() if k != "n")
    return {"n_max": n_max, "reorder_max": reorder_max, "rows": rows, "passed": passed}
