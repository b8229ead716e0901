"""Resonance S-matrix model and rational Hardy-class wave functions.

The S-matrix of an order-``r`` resonance at ``z_R = E_R - i*Gamma/2`` is

    S(w) = ((w - E_R - i*Gamma/2) / (w - z_R))**r * exp(2i*gamma(w))

with a real polynomial background phase ``gamma``.  Wave functions that
stand in for the prepared state and the registered observable are rational
functions whose poles all sit in the upper half-plane, so they continue
analytically into the closed lower half-plane.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, factorial
from typing import Sequence

import numpy as np

from . import _series
from .errors import DomainError, HardyValidationError, PoleEvaluationError

__all__ = [
    "ResonanceModel",
    "HardyFunction",
    "HardyReport",
    "LaurentPrincipalPart",
    "smatrix_eval",
    "laurent_principal",
    "hardy_derivative",
    "hardy_validate",
    "POLE_PROXIMITY",
]

#: Relative distance below which an evaluation point counts as "on" a pole.
POLE_PROXIMITY = 1e-12


def _near_pole(w, pole):
    return np.abs(np.asarray(w) - pole) < POLE_PROXIMITY * (1.0 + abs(pole))


@dataclass(frozen=True)
class ResonanceModel:
    """Single-channel S-matrix with one pole of order ``r``.

    Parameters
    ----------
    E_R : float
        Resonance energy.
    Gamma : float
        Width, strictly positive.
    r : int
        Pole order, ``r >= 1``.
    gamma : sequence of float
        Background phase coefficients ``gamma(w) = gamma[0] + gamma[1]*w``.
        At most linear; contour-deformation checks further require a
        constant phase.
    """

    E_R: float
    Gamma: float
    r: int = 1
    gamma: tuple = (0.0,)

    def __post_init__(self):
        object.__setattr__(self, "E_R", float(self.E_R))
        object.__setattr__(self, "Gamma", float(self.Gamma))
        gamma = tuple(float(g) for g in (self.gamma or (0.0,)))
        object.__setattr__(self, "gamma", gamma)
        if not np.isfinite(self.E_R):
            raise DomainError("E_R must be finite")
        if not (self.Gamma > 0 and np.isfinite(self.Gamma)):
            raise DomainError(f"Gamma must be positive and finite, got {self.Gamma}")
        if int(self.r) != self.r or self.r < 1:
            raise DomainError(f"pole order r must be a positive integer, got {self.r}")
        object.__setattr__(self, "r", int(self.r))
        if len(gamma) > 2:
            raise DomainError("background phase must be a polynomial of degree <= 1")

    @property
    def z_R(self) -> complex:
        return complex(self.E_R, -self.Gamma / 2)

    @property
    def gamma_is_constant(self) -> bool:
        return all(g == 0.0 for g in self.gamma[1:])

    def background_phase(self, w):
        """Evaluate ``gamma(w)``."""
        w = np.asarray(w, dtype=complex)
        out = np.zeros_like(w)
        for i, g in enumerate(self.gamma):
            out = out + g * w**i
        return out if out.ndim else complex(out)

    def gauge_series(self, z0, order):
        """Taylor coefficients of ``exp(2i*gamma(w))`` about ``z0``."""
        slope = 2j * (self.gamma[1] if len(self.gamma) > 1 else 0.0)
        value = np.exp(2j * self.background_phase(z0))
        return _series.exp_linear(slope, complex(value), order)


@dataclass(frozen=True)
class LaurentPrincipalPart:
    """Principal part ``a_{-1}, ..., a_{-r}`` stored as ``coefficients[n] = a_{-n-1}``."""

    coefficients: np.ndarray

    @property
    def order(self) -> int:
        return len(self.coefficients)

    def __getitem__(self, n):
        return self.coefficients[n]


def smatrix_eval(model: ResonanceModel, w):
    """Evaluate the model S-matrix at complex energy ``w``.

    A single global formula serves both sheets: the pole at ``z_R`` lies
    below the real axis and the zero at ``conj(z_R)`` above it.

    Raises
    ------
    PoleEvaluationError
        If ``w`` is numerically on top of ``z_R``.
    """
    z = model.z_R
    w_arr = np.asarray(w, dtype=complex)
    if np.any(_near_pole(w_arr, z)):
        raise PoleEvaluationError(f"S-matrix evaluated at its pole z_R = {z}")
    ratio = (w_arr - z.conjugate()) / (w_arr - z)
    out = ratio**model.r * np.exp(2j * model.background_phase(w_arr))
    return out if out.ndim else complex(out)


def laurent_principal(model: ResonanceModel, include_phase: bool = False) -> LaurentPrincipalPart:
    """Closed-form principal part ``a_{-n-1} = C(r, n+1) (-i Gamma)^(n+1)``.

    This is the principal part of the resonant factor alone, exact for a
    vanishing background phase.  With ``include_phase`` the factor
    ``exp(2i*gamma)`` is multiplied in: ``S (w - z_R)**r`` is expanded as a
    Taylor series about ``z_R`` and its first ``r`` coefficients are read
    off, which mixes orders when the phase is linear.
    """
    r, g = model.r, model.Gamma
    if not include_phase:
        coeffs = np.array([comb(r, n + 1) * (-1j * g) ** (n + 1) for n in range(r)])
        return LaurentPrincipalPart(coeffs)
    # (w - conj(z_R))**r = (h - i Gamma)**r with h = w - z_R
    resonant = [comb(r, j) * (-1j * g) ** (r - j) for j in range(r)]
    series = _series.mul(resonant, model.gauge_series(model.z_R, r - 1), r - 1)
    return LaurentPrincipalPart(np.array([series[r - 1 - n] for n in range(r)], dtype=complex))


def _as_complex(x):
    if isinstance(x, dict):
        return complex(float(x.get("re", 0.0)), float(x.get("im", 0.0)))
    return complex(x)


@dataclass(frozen=True)
class HardyFunction:
    """Rational function ``numer(E) / prod_j (E - p_j)**m_j``.

    ``numer`` holds ascending polynomial coefficients.  ``poles`` is a
    sequence of ``(position, multiplicity)`` pairs.  Construction does not
    enforce the Hardy constraints; call :func:`hardy_validate` (or
    :meth:`require_valid`) for that.
    """

    numer: tuple
    poles: tuple = field(default=())

    def __post_init__(self):
        numer = tuple(_as_complex(c) for c in np.atleast_1d(self.numer))
        while len(numer) > 1 and numer[-1] == 0:
            numer = numer[:-1]
        poles = tuple((_as_complex(p), int(m)) for p, m in self.poles)
        object.__setattr__(self, "numer", numer or (0j,))
        object.__setattr__(self, "poles", poles)

    @classmethod
    def from_poles(cls, poles: Sequence, numer=(1.0,)):
        """Shorthand: ``HardyFunction.from_poles([(2j, 2)])`` is ``1/(E - 2i)**2``."""
        return cls(tuple(numer), tuple(poles))

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.numer)

    @property
    def numerator_degree(self) -> int:
        return -1 if self.is_zero else len(self.numer) - 1

    @property
    def decay_degree(self):
        """``sum(m_j) - deg(numer)``; infinite for the zero function."""
        if self.is_zero:
            return float("inf")
        return sum(m for _, m in self.poles) - self.numerator_degree

    def __call__(self, E):
        E = np.asarray(E, dtype=complex)
        for p, _ in self.poles:
            if np.any(_near_pole(E, p)):
                raise PoleEvaluationError(f"Hardy function evaluated at its pole {p}")
        num = np.polyval(np.array(self.numer[::-1]), E)
        den = np.ones_like(E)
        for p, m in self.poles:
            den = den * (E - p) ** m
        out = num / den
        return out if out.ndim else complex(out)

    def taylor(self, z, order):
        """Exact Taylor coefficients about ``z`` up to ``h**order``."""
        z = complex(z)
        for p, _ in self.poles:
            if _near_pole(z, p):
                raise PoleEvaluationError(f"Hardy function expanded at its pole {p}")
        series = _series.shift_polynomial(self.numer, z, order)
        for p, m in self.poles:
            series = _series.mul(series, _series.inverse_power(z - p, m, order), order)
        return series

    def derivatives(self, z, order):
        """``[F(z), F'(z), ..., F^(order)(z)]``."""
        return _series.to_derivatives(self.taylor(z, order))

    def abs_bound_coefficient(self, E_max):
        """Constant ``K`` with ``|F(E)| <= K |E|**(-decay)`` for real ``|E| >= E_max``.

        Uses ``|numer(E)| <= sum |a_i| |E|^i`` and ``|E - p| >= |E| - |p|``;
        the resulting ratio times ``|E|**decay`` is non-increasing in ``|E|``,
        so evaluating at ``E_max`` bounds the whole tail.
        """
        if self.is_zero:
            return 0.0
        radii = [abs(p) for p, _ in self.poles]
        if radii and E_max <= max(radii):
            return float("inf")
        x = float(E_max)
        num = sum(abs(c) * x**i for i, c in enumerate(self.numer))
        den = 1.0
        for p, m in self.poles:
            den *= (x - abs(p)) ** m
        return num / den * x ** self.decay_degree

    def require_valid(self):
        report = hardy_validate(self)
        if not report.valid:
            raise HardyValidationError(report.violations)
        return self

    def to_dict(self):
        return {
            "numer": [{"re": c.real, "im": c.imag} for c in self.numer],
            "poles": [{"re": p.real, "im": p.imag, "mult": m} for p, m in self.poles],
        }

    @classmethod
    def from_dict(cls, data):
        numer = data.get("numer", [1.0])
        poles = [
            (complex(float(p.get("re", 0.0)), float(p.get("im", 0.0))), int(p.get("mult", 1)))
            for p in data.get("poles", [])
        ]
        return cls(tuple(numer), tuple(poles))


@dataclass(frozen=True)
class HardyReport:
    valid: bool
    violations: tuple = ()


def hardy_validate(F: HardyFunction) -> HardyReport:
    """Check the constructive Hardy-class membership rules.

    Every pole must lie strictly in the upper half-plane and the decay
    degree must be at least 2, so that products of two such functions
    vanish fast enough on the infinite lower semicircle.
    """
    violations = []
    for p, m in F.poles:
        if m < 1:
            violations.append(f"pole {p} has non-positive multiplicity {m}")
        if not p.imag > 0:
            violations.append(f"wrong half-plane: pole {p} must have Im > 0")
    if F.decay_degree < 2:
        violations.append(f"insufficient decay: degree {F.decay_degree} < 2")
    return HardyReport(not violations, tuple(violations))


def hardy_derivative(F: HardyFunction, z, k: int) -> complex:
    """``k``-th derivative of ``F`` at ``z`` from its exact rational form."""
    if k < 0:
        raise DomainError("derivative order must be non-negative")
    return complex(factorial(k) * F.taylor(z, k)[k])
