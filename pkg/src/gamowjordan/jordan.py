"""Operator algebra on the r-dimensional resonance subspace.

Basis order is ``k = 0 .. r-1`` (lowest Jordan degree first).  In that
order the Hamiltonian restricted to the subspace is a *lower* Jordan block
with ``z_R`` on the diagonal and ``Gamma`` on the first subdiagonal.  All
matrices here act on component vectors ``v[k] = <psi|z_R>>^(k)``.

Three normalizations of the components are supported:

``"derivative"``
    ``d^k/dz^k <psi|z>`` at ``z_R`` (raw derivatives).
``"jordan"``
    ``Gamma**k / k! * derivative[k]``; the standard Jordan-vector scaling.
``"psiG"``
    ``(-1)**(k+1) * sqrt(2 pi Gamma) * jordan[k]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial, comb

import numpy as np

from .errors import ConvergenceError, DomainError
from .model import ResonanceModel

__all__ = [
    "NORMALIZATIONS",
    "GamowComponents",
    "JordanOperator",
    "hamiltonian_block",
    "nilpotency_check",
    "lagrange_sylvester",
    "evolution_matrix",
    "evolve_components",
    "matrix_exp_oracle",
]

NORMALIZATIONS = ("derivative", "jordan", "psiG")


def _scale_to_jordan(model, normalization):
    """Per-index factors ``s[k]`` such that ``jordan[k] = s[k] * other[k]``."""
    g = model.Gamma
    k = np.arange(model.r)
    if normalization == "jordan":
        return np.ones(model.r, dtype=complex)
    if normalization == "derivative":
        return np.array([g**i / factorial(i) for i in k], dtype=complex)
    if normalization == "psiG":
        return np.array([(-1) ** (i + 1) / np.sqrt(2 * np.pi * g) for i in k], dtype=complex)
    raise ValueError(f"unknown normalization {normalization!r}; expected one of {NORMALIZATIONS}")


@dataclass(frozen=True)
class GamowComponents:
    """The ``r`` numbers ``<psi|z_R>^(k)`` tagged with their normalization."""

    values: np.ndarray
    normalization: str
    model: ResonanceModel

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex).reshape(-1)
        if values.size != self.model.r:
            raise DomainError(f"expected {self.model.r} components, got {values.size}")
        _scale_to_jordan(self.model, self.normalization)
        object.__setattr__(self, "values", values)

    def to(self, normalization: str) -> "GamowComponents":
        """Convert to another normalization; a no-op when already there."""
        if normalization == self.normalization:
            return self
        to_j = _scale_to_jordan(self.model, self.normalization)
        from_j = _scale_to_jordan(self.model, normalization)
        return GamowComponents(self.values * to_j / from_j, normalization, self.model)

    def __len__(self):
        return self.model.r

    def __getitem__(self, k):
        return self.values[k]


@dataclass(frozen=True)
class JordanOperator:
    """An ``r x r`` matrix acting on jordan-normalized component vectors."""

    entries: np.ndarray
    model: ResonanceModel

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def __matmul__(self, other):
        other = other.entries if isinstance(other, JordanOperator) else other
        out = self.entries @ np.asarray(other)
        if out.ndim == 2:
            return JordanOperator(out, self.model)
        return out

    @property
    def shape(self):
        return self.entries.shape

    def adjoint(self) -> "JordanOperator":
        """Conjugate transpose; for the Hamiltonian block this is the upper form with ``conj(z_R)``."""
        return JordanOperator(self.entries.conj().T, self.model)

    def is_lower_triangular(self) -> bool:
        return not np.any(np.triu(self.entries, 1))


def hamiltonian_block(model: ResonanceModel) -> JordanOperator:
    """Lower Jordan block: ``H|k>> = z_R|k>> + Gamma|k-1>>``."""
    r = model.r
    J = np.diag(np.full(r, model.z_R, dtype=complex))
    J += np.diag(np.full(r - 1, model.Gamma, dtype=complex), -1)
    return JordanOperator(J, model)


def nilpotency_check(model: ResonanceModel, k: int, exact: bool = False) -> bool:
    """Verify that basis vector ``e_k`` is a Jordan vector of degree exactly ``k + 1``.

    ``e_k`` stands for the ket ``|z_R>>^(k)``.  The block returned by
    :func:`hamiltonian_block` acts on component vectors, so in ket
    coordinates the Hamiltonian is its transpose:
    ``H e_k = z_R e_k + Gamma e_{k-1}``.

    With ``exact=True`` the check runs in rational arithmetic (sympy) on the
    exact binary values of ``E_R`` and ``Gamma``.
    """
    if not 0 <= k < model.r:
        raise DomainError(f"index k={k} outside 0..{model.r - 1}")
    e_k = np.zeros(model.r)
    e_k[k] = 1
    if exact:
        import sympy

        z = sympy.Rational(model.E_R) - sympy.I * sympy.Rational(model.Gamma) / 2
        g = sympy.Rational(model.Gamma)
        J = sympy.zeros(model.r, model.r)
        for i in range(model.r):
            J[i, i] = z
            if i:
                J[i, i - 1] = g
        N = (J - z * sympy.eye(model.r)).T
        v = sympy.Matrix(e_k.astype(int))
        lower = (N**k) * v
        upper = N * lower
        return all(sympy.simplify(x) == 0 for x in upper) and any(
            sympy.simplify(x) != 0 for x in lower
        )
    N = (hamiltonian_block(model).entries - model.z_R * np.eye(model.r)).T
    lower = np.linalg.matrix_power(N, k) @ e_k
    upper = N @ lower
    return bool(np.all(upper == 0) and np.any(lower != 0))


def lagrange_sylvester(model: ResonanceModel, f_derivatives) -> JordanOperator:
    """``f(H)`` on the resonance subspace from ``f(z_R), f'(z_R), ..., f^(r-1)(z_R)``.

    The result is lower-triangular Toeplitz with ``Gamma**nu / nu! * f^(nu)(z_R)``
    on the ``nu``-th subdiagonal.
    """
    d = np.asarray(f_derivatives, dtype=complex).reshape(-1)
    if d.size != model.r:
        raise ValueError(f"need exactly r={model.r} derivative values, got {d.size}")
    r, g = model.r, model.Gamma
    M = np.zeros((r, r), dtype=complex)
    for nu in range(r):
        coef = g**nu / factorial(nu) * d[nu]
        idx = np.arange(nu, r)
        M[idx, idx - nu] = coef
    return JordanOperator(M, model)


def _check_time(t):
    t = float(t)
    if not t >= 0:
        raise DomainError(f"time evolution is a semigroup defined for t >= 0 only, got t={t}")
    return t


def evolution_matrix(model: ResonanceModel, t: float) -> JordanOperator:
    """``exp(-i H t)`` on the resonance subspace, ``t >= 0``."""
    t = _check_time(t)
    derivs = [(-1j * t) ** nu * np.exp(-1j * model.z_R * t) for nu in range(model.r)]
    return lagrange_sylvester(model, derivs)


def evolve_components(components: GamowComponents, t: float) -> GamowComponents:
    """Time-translate the components ``<psi|exp(-iHt)|z_R>^(k)``.

    In derivative normalization the mixing coefficients are
    ``C(k, nu) (-it)**nu``; other normalizations go through the Jordan
    evolution matrix.
    """
    t = _check_time(t)
    model = components.model
    if components.normalization == "derivative":
        v = components.values
        phase = np.exp(-1j * model.z_R * t)
        out = np.array(
            [
                phase * sum(comb(k, nu) * (-1j * t) ** nu * v[k - nu] for nu in range(k + 1))
                for k in range(model.r)
            ]
        )
        return GamowComponents(out, "derivative", model)
    jordan = components.to("jordan")
    out = evolution_matrix(model, t) @ jordan.values
    return GamowComponents(out, "jordan", model).to(components.normalization)


def matrix_exp_oracle(model: ResonanceModel, t: float, max_terms: int = 200) -> JordanOperator:
    """Independent ``exp(-i J t)`` by scaled Taylor series and repeated squaring.

    Works on the explicit matrix ``J`` and knows nothing about its Jordan
    structure.
    """
    t = _check_time(t)
    A = -1j * t * hamiltonian_block(model).entries
    norm = np.linalg.norm(A, 1)
    s = max(0, int(np.ceil(np.log2(norm / 0.5)))) if norm > 0.5 else 0
    A = A / 2**s
    term = np.eye(model.r, dtype=complex)
    total = term.copy()
    for j in range(1, max_terms):
        term = term @ A / j
        total = total + term
        if np.linalg.norm(term, 1) <= 1e-18 * np.linalg.norm(total, 1):
            break
    else:
        raise ConvergenceError(
            "Taylor series for the matrix exponential did not converge",
            float(np.linalg.norm(term, 1)),
        )
    for _ in range(s):
        total = total @ total
    return JordanOperator(total, model)
