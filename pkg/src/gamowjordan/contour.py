"""Contour machinery: Cauchy extraction, pole term, background integrals.

The central relation checked here is the contour deformation

    int_0^inf psi(E) S(E) phi(E) dE
        = int_0^{-inf} psi(E) S(E) phi(E) dE  +  pole term,

where the pole term is the clockwise circle integral around ``z_R``,
``sum_n (-2 pi i / n!) a_{-n-1} (psi e^{2i gamma} phi)^(n)(z_R)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, factorial
from typing import Callable

import numpy as np
from scipy import integrate

from . import _series
from .errors import ConvergenceError, DomainError, HardyValidationError
from .jordan import GamowComponents
from .model import (
    HardyFunction,
    LaurentPrincipalPart,
    ResonanceModel,
    laurent_principal,
    smatrix_eval,
)

__all__ = [
    "QuadratureSpec",
    "PoleTermResult",
    "IntegralResult",
    "IdentityReport",
    "default_radius",
    "cauchy_derivative",
    "cauchy_residue_coeffs",
    "pole_term",
    "pole_term_quadrature",
    "direct_integral",
    "background_integral",
    "contour_identity_check",
    "gamow_components",
    "bra_components",
    "expansion_coefficients",
    "pole_term_from_expansion",
]

SCHEMES = ("adaptive", "fixed-trapezoid")


@dataclass(frozen=True)
class QuadratureSpec:
    """Quadrature settings.

    ``radius`` and ``E_max`` may be left as ``None`` to be chosen
    automatically.  ``scheme`` controls the circle rule: ``"adaptive"``
    doubles the node count until two successive estimates agree to ``tol``,
    ``"fixed-trapezoid"`` uses exactly ``panels`` nodes.
    """

    radius: float | None = None
    panels: int = 64
    E_max: float | None = None
    scheme: str = "adaptive"
    tol: float = 1e-12
    max_panels: int = 1 << 14

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.panels < 1:
            raise ValueError("panels must be positive")
        if self.radius is not None and not self.radius > 0:
            raise ValueError("radius must be positive")
        if self.E_max is not None and not self.E_max > 0:
            raise ValueError("E_max must be positive")

    @classmethod
    def from_dict(cls, data):
        return cls(**{k: v for k, v in (data or {}).items() if v is not None})


@dataclass(frozen=True)
class PoleTermResult:
    total: complex
    per_order: tuple
    gauge_included: bool = True


@dataclass(frozen=True)
class IntegralResult:
    """A truncated real-axis integral.

    ``value`` covers ``|E| <= E_max``; ``tail_bound`` is a rigorous bound on
    the omitted part and ``error`` the quadrature's own estimate.
    """

    value: complex
    error: float
    tail_bound: float
    E_max: float


@dataclass(frozen=True)
class IdentityReport:
    direct: IntegralResult
    background: IntegralResult
    pole_term: PoleTermResult
    defect: float
    relative_defect: float
    tol: float
    passed: bool = field(default=False)


def _require_hardy(*funcs):
    for F in funcs:
        F.require_valid()


def default_radius(model: ResonanceModel, *funcs: HardyFunction) -> float:
    """Half the distance from ``z_R`` to the real axis or the nearest wave-function pole."""
    z = model.z_R
    d = abs(z.imag)
    for F in funcs:
        for p, _ in F.poles:
            d = min(d, abs(p - z))
    return 0.5 * d


def _circle_rule(g, center, radius, n_nodes, power):
    """``(1/N) sum g(w_j) e^{-i power theta_j}`` on ``w_j = center + radius e^{i theta_j}``.

    Also returns ``max |g(w_j)|``, which sets the round-off floor.
    """
    theta = 2 * np.pi * np.arange(n_nodes) / n_nodes
    w = center + radius * np.exp(1j * theta)
    vals = np.asarray(g(w), dtype=complex)
    return np.mean(vals * np.exp(-1j * power * theta)), float(np.max(np.abs(vals)))


def _adaptive_circle(g, center, radius, power, q: QuadratureSpec):
    n = max(q.panels, 2 * abs(power) + 2)
    value, _ = _circle_rule(g, center, radius, n, power)
    if q.scheme == "fixed-trapezoid":
        return value, float("nan")
    while True:
        n2 = 2 * n
        value2, peak = _circle_rule(g, center, radius, n2, power)
        err = abs(value2 - value)
        if err <= max(q.tol * abs(value2), 64 * np.finfo(float).eps * peak):
            return value2, err
        if n2 >= q.max_panels:
            raise ConvergenceError("circle quadrature did not converge", err)
        n, value = n2, value2


def cauchy_derivative(
    g: Callable,
    z_R: complex,
    n: int,
    q: QuadratureSpec,
    full_output: bool = False,
):
    """``g^(n)(z_R)`` from the Cauchy integral on a circle, by the trapezoid rule.

    ``g`` must accept numpy arrays and be analytic on and inside the circle
    of radius ``q.radius``.

    Returns
    -------
    value : complex
    err : float
        Panel-doubling error estimate of ``value`` (only when ``full_output``).
    """
    if n < 0:
        raise DomainError("derivative order must be non-negative")
    if q.radius is None:
        raise ValueError("cauchy_derivative needs an explicit radius")
    rho = q.radius
    mean, err = _adaptive_circle(g, complex(z_R), rho, n, q)
    factor = factorial(n) / rho**n
    value = complex(factor * mean)
    if full_output:
        return value, factor * err
    return value


def cauchy_residue_coeffs(model: ResonanceModel, q: QuadratureSpec | None = None) -> LaurentPrincipalPart:
    """Numerical principal part of ``S`` at ``z_R``.

    ``a_{-n-1} = (1 / 2 pi i) oint S(w) (w - z_R)**n dw`` on a
    counter-clockwise circle.
    """
    q = q or QuadratureSpec()
    rho = q.radius if q.radius is not None else 0.5 * abs(model.z_R.imag)
    z = model.z_R
    coeffs = []
    for n in range(model.r):
        # (1/2 pi i) oint f dw = rho * mean(f(w) e^{i theta})
        g = lambda w, n=n: smatrix_eval(model, w) * (w - z) ** n
        mean, _ = _adaptive_circle(g, z, rho, -1, q)
        coeffs.append(rho * mean)
    return LaurentPrincipalPart(np.array(coeffs, dtype=complex))


def gamow_components(model: ResonanceModel, psi: HardyFunction) -> GamowComponents:
    """Derivatives ``d^k/dz^k [psi(z) exp(2i gamma(z))]`` at ``z_R``, ``k < r``."""
    order = model.r - 1
    z = model.z_R
    series = _series.mul(psi.taylor(z, order), model.gauge_series(z, order), order)
    return GamowComponents(_series.to_derivatives(series), "derivative", model)


def bra_components(model: ResonanceModel, phi: HardyFunction, normalization: str = "jordan"):
    """Bra components of the prepared state at ``z_R``.

    ``"derivative"`` gives ``phi^(l)(z_R)``; ``"jordan"`` multiplies by
    ``Gamma**l / l!``.
    """
    d = phi.derivatives(model.z_R, model.r - 1)
    if normalization == "derivative":
        return d
    if normalization == "jordan":
        return np.array([model.Gamma**l / factorial(l) * d[l] for l in range(model.r)])
    raise ValueError(f"unsupported bra normalization {normalization!r}")


def pole_term(
    model: ResonanceModel,
    psi: HardyFunction,
    phi: HardyFunction,
    absorb_gauge: bool = True,
) -> PoleTermResult:
    """Higher-order pole term from exact derivatives.

    With ``absorb_gauge`` the background phase is folded into the ket
    components and the derivative of the product is expanded by Leibniz;
    otherwise the Taylor series of ``psi * exp(2i gamma) * phi`` is formed
    directly.  Both routes are exact and must agree.
    """
    _require_hardy(psi, phi)
    r = model.r
    a = laurent_principal(model).coefficients
    if absorb_gauge:
        ket = gamow_components(model, psi).values
        bra = bra_components(model, phi, "derivative")
        derivs = [
            sum(comb(n, k) * ket[k] * bra[n - k] for k in range(n + 1)) for n in range(r)
        ]
    else:
        z, order = model.z_R, r - 1
        s = _series.mul(psi.taylor(z, order), model.gauge_series(z, order), order)
        s = _series.mul(s, phi.taylor(z, order), order)
        derivs = list(_series.to_derivatives(s))
    per_order = tuple(complex(-2j * np.pi / factorial(n) * a[n] * derivs[n]) for n in range(r))
    return PoleTermResult(complex(sum(per_order)), per_order, absorb_gauge)


def pole_term_quadrature(
    model: ResonanceModel,
    psi: HardyFunction,
    phi: HardyFunction,
    q: QuadratureSpec | None = None,
) -> complex:
    """Clockwise circle integral of ``psi S phi`` around ``z_R``.

    Uses only point evaluations of the S-matrix and the wave functions, so
    it is independent of the Laurent closed form and of the symbolic
    derivatives.
    """
    _require_hardy(psi, phi)
    q = q or QuadratureSpec()
    rho = q.radius if q.radius is not None else default_radius(model, psi, phi)

    def g(w):
        return psi(w) * smatrix_eval(model, w) * phi(w)

    # counter-clockwise integral = 2 pi i rho * mean(g e^{i theta}); clockwise flips sign
    mean, _ = _adaptive_circle(g, model.z_R, rho, -1, q)
    return complex(-2j * np.pi * rho * mean)


def _tail_bound(model, psi, phi, E_max):
    d = psi.decay_degree + phi.decay_degree
    if d == float("inf"):
        return 0.0
    if d <= 1:
        raise HardyValidationError([f"integrand decay degree {d} too low for a tail bound"])
    K = psi.abs_bound_coefficient(E_max) * phi.abs_bound_coefficient(E_max)
    # |S| = 1 on the real axis for a real background phase
    return K * E_max ** (1 - d) / (d - 1)


def _choose_E_max(model, psi, phi, q):
    if q.E_max is not None:
        return float(q.E_max)
    scale = max([abs(model.E_R) + model.Gamma, 1.0] + [abs(p) for F in (psi, phi) for p, _ in F.poles])
    E_max = 10.0 * scale
    while _tail_bound(model, psi, phi, E_max) > q.tol / 10:
        E_max *= 2
        if E_max > 1e12:
            break
    return E_max


def _breakpoints(model, E_max):
    """Panel boundaries on ``[0, E_max]``: dense around the resonance, geometric beyond."""
    pts = {0.0, E_max}
    for k in (-8, -4, -2, -1, 0, 1, 2, 4, 8):
        x = model.E_R + k * model.Gamma
        if 0 < x < E_max:
            pts.add(x)
    x = 1.0
    while x < E_max:
        pts.add(x)
        x *= 2
    return sorted(pts)


def _axis_integral(model, psi, phi, q, sign):
    """``int_0^{sign * E_max}`` of ``psi S phi`` along the real axis."""
    _require_hardy(psi, phi)
    if psi.is_zero or phi.is_zero:
        return IntegralResult(0j, 0.0, 0.0, float(q.E_max or 0.0))
    E_max = _choose_E_max(model, psi, phi, q)
    tail = _tail_bound(model, psi, phi, E_max)

    def f(x):
        E = sign * x
        return complex(psi(E) * smatrix_eval(model, E) * phi(E))

    # mirror the resonance breakpoints onto the negative axis for sign=-1
    mirror = ResonanceModel(sign * model.E_R, model.Gamma, model.r)
    pts = _breakpoints(mirror, E_max)
    total, err = 0j, 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        val, e = integrate.quad(
            f, lo, hi, complex_func=True, epsabs=q.tol * 1e-3, epsrel=q.tol, limit=500
        )
        total += val
        err += abs(e)
    return IntegralResult(complex(sign * total), err, tail, E_max)


def direct_integral(model, psi, phi, q: QuadratureSpec | None = None) -> IntegralResult:
    """``int_0^inf psi(E) S(E) phi(E) dE`` truncated at ``E_max`` with a tail bound."""
    return _axis_integral(model, psi, phi, q or QuadratureSpec(), +1)


def background_integral(model, psi, phi, q: QuadratureSpec | None = None) -> IntegralResult:
    """``int_0^{-inf} psi(E) S(E) phi(E) dE`` (oriented from 0 to -inf).

    Requires a constant background phase: a linear phase makes
    ``exp(2i gamma)`` grow on part of the lower arc.
    """
    if not model.gamma_is_constant:
        raise DomainError("background integral requires a constant background phase")
    return _axis_integral(model, psi, phi, q or QuadratureSpec(), -1)


def contour_identity_check(model, psi, phi, q: QuadratureSpec | None = None, tol: float = 1e-8) -> IdentityReport:
    """Compare the real-axis integral with background integral plus pole term.

    Passes when ``|direct - (background + pole)| <= tol * (1 + |direct|)``.
    """
    if not model.gamma_is_constant:
        raise DomainError("contour deformation requires a constant background phase")
    q = q or QuadratureSpec(tol=min(1e-11, tol * 1e-3))
    direct = direct_integral(model, psi, phi, q)
    background = background_integral(model, psi, phi, q)
    pt = pole_term(model, psi, phi)
    defect = abs(direct.value - (background.value + pt.total))
    rel = defect / (1 + abs(direct.value))
    return IdentityReport(direct, background, pt, defect, rel, tol, rel <= tol)


def expansion_coefficients(model: ResonanceModel, phi: HardyFunction) -> np.ndarray:
    """Coefficients ``b_k`` of the Jordan kets in the complex basis expansion of ``phi``.

    ``b_k = -2 pi Gamma sum_{n=k}^{r-1} C(r, n+1) (-i)**n beta[n-k]`` with
    ``beta`` the jordan-normalized bra components.
    """
    r = model.r
    beta = bra_components(model, phi, "jordan")
    b = np.array(
        [
            -2 * np.pi * model.Gamma
            * sum(comb(r, n + 1) * (-1j) ** n * beta[n - k] for n in range(k, r))
            for k in range(r)
        ],
        dtype=complex,
    )
    return b


def pole_term_from_expansion(model: ResonanceModel, psi: HardyFunction, phi: HardyFunction) -> complex:
    """Pole term rebuilt as ``sum_k <psi|z_R>>^(k) b_k``."""
    ket = gamow_components(model, psi).to("jordan").values
    return complex(np.dot(ket, expansion_coefficients(model, phi)))
