"""Dyad algebra for state operators on the resonance subspace.

An operator is stored as a coefficient matrix ``c`` over the dyads
``|z_R>>^(k) <<^(m)|`` in jordan normalization.  Kets evolve with
``U = M.T`` and bras with ``U^dagger``, where ``M`` is
:func:`gamowjordan.jordan.evolution_matrix`; the coefficient matrix therefore
evolves as ``c -> M.T @ c @ conj(M)``.

``W^(n)`` (ones on the anti-diagonal ``k + m = n``) decays as
``exp(-Gamma t)`` even though each of its dyads picks up powers of ``t``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial

import numpy as np

from .contour import PoleTermResult, gamow_components, pole_term
from .errors import DomainError
from .jordan import GamowComponents, _check_time, evolution_matrix
from .model import HardyFunction, ResonanceModel

__all__ = [
    "BRA_KINDS",
    "DyadCoefficients",
    "state_operator",
    "full_state_operator",
    "evolve_operator",
    "evolve_dyad",
    "evolve_state_triple_sum",
    "evolve_state_closed",
    "pair_with_observable",
    "survival_curve",
    "scattering_probability_evolution",
]

BRA_KINDS = ("scattering_plus", "decay_minus")


def _jordan_scale(model):
    g = model.Gamma
    return np.array([g**k / factorial(k) for k in range(model.r)])


@dataclass(frozen=True)
class DyadCoefficients:
    """Coefficients ``c[k, m]`` of ``|z_R>>^(k) <<^(m)|`` (jordan normalization)."""

    c: np.ndarray
    bra_kind: str
    model: ResonanceModel

    def __post_init__(self):
        c = np.asarray(self.c, dtype=complex)
        r = self.model.r
        if c.shape != (r, r):
            raise DomainError(f"coefficient matrix must be {r}x{r}, got {c.shape}")
        if self.bra_kind not in BRA_KINDS:
            raise ValueError(f"bra_kind must be one of {BRA_KINDS}")
        object.__setattr__(self, "c", c)

    def to_derivative(self) -> np.ndarray:
        """Coefficients over ``|z_R>^(k) ^(m)<|`` (raw-derivative dyads)."""
        s = _jordan_scale(self.model)
        return self.c * np.outer(s, s)

    @classmethod
    def from_derivative(cls, d, bra_kind, model) -> "DyadCoefficients":
        s = _jordan_scale(model)
        return cls(np.asarray(d, dtype=complex) / np.outer(s, s), bra_kind, model)

    def __add__(self, other):
        self._check_compatible(other)
        return DyadCoefficients(self.c + other.c, self.bra_kind, self.model)

    def __sub__(self, other):
        self._check_compatible(other)
        return DyadCoefficients(self.c - other.c, self.bra_kind, self.model)

    def __mul__(self, scalar):
        return DyadCoefficients(self.c * scalar, self.bra_kind, self.model)

    __rmul__ = __mul__

    def _check_compatible(self, other):
        if other.model != self.model or other.bra_kind != self.bra_kind:
            raise ValueError("dyad operators belong to different models or bra kinds")


def _check_n(model, n):
    if not 0 <= n < model.r:
        raise DomainError(f"state index n={n} outside 0..{model.r - 1}")


def state_operator(model: ResonanceModel, n: int, bra_kind: str = "decay_minus") -> DyadCoefficients:
    """``W^(n) = sum_{k+m=n} |z_R>>^(k) <<^(m)|``."""
    _check_n(model, n)
    c = np.zeros((model.r, model.r), dtype=complex)
    for k in range(n + 1):
        c[k, n - k] = 1
    return DyadCoefficients(c, bra_kind, model)


def full_state_operator(model: ResonanceModel, bra_kind: str = "decay_minus") -> DyadCoefficients:
    """Mixture of all ``W^(n)`` weighted by ``C(r, n+1) (-i)**n``.

    The decay operator carries ``+2 pi Gamma``; the scattering pole-term
    operator (``bra_kind="scattering_plus"``) carries ``-2 pi Gamma`` so that
    its matrix element between ``psi`` and ``phi`` is the pole term itself.
    """
    r = model.r
    sign = 1.0 if bra_kind == "decay_minus" else -1.0
    c = np.zeros((r, r), dtype=complex)
    for n in range(r):
        c += comb(r, n + 1) * (-1j) ** n * state_operator(model, n, bra_kind).c
    return DyadCoefficients(sign * 2 * np.pi * model.Gamma * c, bra_kind, model)


def evolve_operator(W: DyadCoefficients, t: float) -> DyadCoefficients:
    """Bilinear evolution ``exp(-iHt) W exp(iHt)`` of a decay operator."""
    if W.bra_kind != "decay_minus":
        raise DomainError("only decay-type (minus) bras have a semigroup evolution here")
    M = evolution_matrix(W.model, t).entries
    return DyadCoefficients(M.T @ W.c @ M.conj(), W.bra_kind, W.model)


def evolve_dyad(model: ResonanceModel, k: int, m: int, t: float) -> DyadCoefficients:
    """Evolve the single dyad ``|z_R>>^(k) <<^(m)|`` by the explicit double sum.

    The coefficient landing on ``(k - l, m - mu)`` is
    ``exp(-Gamma t) (-i t Gamma)**l / l! * (i t Gamma)**mu / mu!``.
    """
    _check_n(model, k)
    _check_n(model, m)
    t = _check_time(t)
    x = t * model.Gamma
    decay = np.exp(-model.Gamma * t)
    c = np.zeros((model.r, model.r), dtype=complex)
    for l in range(k + 1):
        for mu in range(m + 1):
            c[k - l, m - mu] += decay * (-1j * x) ** l / factorial(l) * (1j * x) ** mu / factorial(mu)
    return DyadCoefficients(c, "decay_minus", model)


def evolve_state_triple_sum(model: ResonanceModel, n: int, t: float) -> DyadCoefficients:
    """Evolve ``W^(n)`` term by term, before any cancellation is used.

    Works over raw-derivative dyads ``|z>^(l) ^(m)<|`` with the triple sum
    over ``k`` (which dyad of ``W^(n)``), ``l`` (ket degree after evolution)
    and ``m`` (bra degree after evolution), then converts back to jordan
    normalization.
    """
    _check_n(model, n)
    t = _check_time(t)
    g = model.Gamma
    z = model.z_R
    prefactor = np.exp(-1j * z * t) * np.exp(1j * z.conjugate() * t) * g**n / factorial(n)
    d = np.zeros((model.r, model.r), dtype=complex)
    for k in range(n + 1):
        for l in range(k + 1):
            for m in range(n - k + 1):
                d[l, m] += (
                    comb(n, k) * comb(k, l) * comb(n - k, m)
                    * (-1j * t) ** (k - l) * (1j * t) ** (n - k - m)
                )
    return DyadCoefficients.from_derivative(prefactor * d, "decay_minus", model)


def evolve_state_closed(model: ResonanceModel, n: int | None, t: float) -> DyadCoefficients:
    """``exp(-Gamma t) W^(n)``; ``n=None`` evolves the full mixture ``W``."""
    t = _check_time(t)
    W = full_state_operator(model) if n is None else state_operator(model, n)
    return W * np.exp(-model.Gamma * t)


def pair_with_observable(W: DyadCoefficients, psi: GamowComponents, phi_bra=None) -> complex:
    """Matrix element of ``W`` with the observable ``psi``.

    For decay operators this is ``<psi|W|psi> = sum c[k,m] v[k] conj(v[m])``
    with ``v`` the jordan-normalized ket components; the minus-type bra
    component is defined as the complex conjugate of the ket component.
    For scattering operators pass the prepared state's jordan bra components
    as ``phi_bra`` to get ``<psi|W|phi>``.
    """
    if psi.model != W.model:
        raise ValueError("observable components belong to a different model")
    if psi.normalization != "jordan":
        raise ValueError(f"components must be jordan-normalized, got {psi.normalization!r}")
    v = psi.values
    if W.bra_kind == "decay_minus":
        if phi_bra is not None:
            raise ValueError("decay operators pair with the observable only")
        return complex(v @ W.c @ v.conj())
    if phi_bra is None:
        raise ValueError("scattering operators need the prepared state's bra components")
    return complex(v @ W.c @ np.asarray(phi_bra, dtype=complex))


def survival_curve(model: ResonanceModel, psi: HardyFunction, times, n=None, normalize=False):
    """``P(t) = <psi|W(t)|psi>`` for ``W^(n)`` (or the full ``W`` when ``n`` is None).

    With ``normalize`` the curve is divided by ``P(0)``.
    """
    comps = gamow_components(model, psi).to("jordan")
    out = np.array([pair_with_observable(evolve_state_closed(model, n, t), comps) for t in times])
    if normalize:
        out = out / out[0] if len(out) and out[0] != 0 else out
    return out


def scattering_probability_evolution(
    model: ResonanceModel, psi: HardyFunction, phi: HardyFunction, t: float
) -> complex:
    """Pole-term amplitude with the observable translated by ``t >= 0`` (first-order poles)."""
    if model.r != 1:
        raise DomainError("scattering-side time translation is only available for r = 1")
    t = _check_time(t)
    pt: PoleTermResult = pole_term(model, psi, phi)
    return complex(np.exp(-1j * model.E_R * t) * np.exp(-model.Gamma * t / 2) * pt.total)
