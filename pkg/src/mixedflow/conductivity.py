"""Conductivity laws for mixed pre-Darcy / Darcy / post-Darcy flow.

Four laws are provided, all mapping a pressure-gradient magnitude ``xi`` to a
conductivity ``K(xi)`` in ``v = -K(|grad p|) grad p``:

``Piecewise``
    Izbash power law, a Darcy plateau and a Forchheimer polynomial glued
    continuously at speeds ``s1 < s2``.
``Interpolated``
    ``g(s) = a_{-1} s^{-alpha} + a_0 + sum_i a_i s^{alpha_i}``, smooth on (0, inf).
``Rational``
    ``K = a xi^b1 / ((1 + b xi^b1)(1 + c xi^b2))`` given directly.
``Multiplicative``
    ``K = K_F(xi) * kbar xi^b1 / (1 + kbar xi^b1)``.

Models are immutable; every method is a pure function of its arguments.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from . import kernels
from .errors import ConvergenceError, DomainError, KinkError, ShapeError, UnsupportedOperation
from .quadrature import adaptive_simpson

H_RTOL = 1e-10


def _arr(x):
    return np.asarray(x, dtype=float)


def _like(x, values):
    """Return ``values`` shaped like ``x`` (a float for scalar input)."""
    if np.ndim(x) == 0:
        return float(np.asarray(values).reshape(-1)[0])
    return np.asarray(values).reshape(np.shape(x))


def eval_K_star(profile, xi):
    """Reference kernel ``xi^b1 / (1 + xi)^(b1 + b2)``."""
    b1, b2 = profile.beta1, profile.beta2
    x = _arr(xi)
    return _like(xi, x**b1 / (1.0 + x) ** (b1 + b2))


# --------------------------------------------------------------------------
# parameter containers
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ExponentProfile:
    """Pre-Darcy exponent ``alpha`` and Forchheimer exponents ``alpha_1 < ... < alpha_N``."""

    alpha: float
    forchheimer_exponents: tuple

    def __post_init__(self):
        object.__setattr__(self, "forchheimer_exponents", tuple(float(e) for e in self.forchheimer_exponents))
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha}")
        ex = self.forchheimer_exponents
        if len(ex) < 1:
            raise DomainError("need at least one Forchheimer exponent")
        if ex[0] <= 0.0 or any(b <= a for a, b in zip(ex, ex[1:])):
            raise DomainError(f"Forchheimer exponents must be positive and strictly increasing, got {ex}")

    @property
    def n_terms(self):
        return len(self.forchheimer_exponents)

    @property
    def beta1(self):
        return self.alpha / (1.0 - self.alpha)

    @property
    def beta2(self):
        top = self.forchheimer_exponents[-1]
        return top / (1.0 + top)

    @property
    def xi_c(self):
        return self.beta1 / self.beta2


@dataclass(frozen=True)
class CoefficientVector:
    """``(a_{-1}, a_0, a_1, ..., a_N)`` with ``a_{-1}, a_N > 0`` and the rest ``>= 0``."""

    a: tuple

    def __post_init__(self):
        a = tuple(float(v) for v in self.a)
        object.__setattr__(self, "a", a)
        if len(a) < 3:
            raise ShapeError("coefficient vector needs at least (a_-1, a_0, a_1)")
        if not all(np.isfinite(a)):
            raise DomainError("coefficients must be finite")
        if a[0] <= 0.0:
            raise DomainError(f"a_-1 must be > 0, got {a[0]}")
        if a[-1] <= 0.0:
            raise DomainError(f"a_N must be > 0, got {a[-1]}")
        if any(v < 0.0 for v in a[1:-1]):
            raise DomainError(f"a_0 .. a_(N-1) must be >= 0, got {a[1:-1]}")

    @property
    def xi0(self):
        return float(sum(self.a))

    @property
    def n_terms(self):
        return len(self.a) - 2

    def as_array(self):
        return np.array(self.a)

    def minimum(self, other):
        """Coordinatewise minimum (stays admissible)."""
        _check_same_length(self, other)
        return CoefficientVector(tuple(min(x, y) for x, y in zip(self.a, other.a)))

    def distance(self, other):
        _check_same_length(self, other)
        return float(np.linalg.norm(self.as_array() - other.as_array()))


def _check_same_length(u, v):
    if len(u.a) != len(v.a):
        raise ShapeError(f"coefficient vectors differ in length: {len(u.a)} vs {len(v.a)}")


@dataclass(frozen=True)
class ForchheimerLaw:
    """``g_F(s) = a_0 + a_1 s^alpha_1 + ... + a_N s^alpha_N`` with ``a_0, a_N > 0``."""

    coefficients: tuple
    exponents: tuple

    def __post_init__(self):
        c = tuple(float(v) for v in self.coefficients)
        e = tuple(float(v) for v in self.exponents)
        object.__setattr__(self, "coefficients", c)
        object.__setattr__(self, "exponents", e)
        if len(c) != len(e) + 1 or len(e) < 1:
            raise ShapeError("need coefficients (a_0..a_N) and exponents (alpha_1..alpha_N), N >= 1")
        if c[0] <= 0.0 or c[-1] <= 0.0 or any(v < 0.0 for v in c):
            raise DomainError(f"Forchheimer coefficients need a_0, a_N > 0 and the rest >= 0, got {c}")
        if e[0] <= 0.0 or any(y <= x for x, y in zip(e, e[1:])):
            raise DomainError(f"Forchheimer exponents must be positive and increasing, got {e}")

    @property
    def beta2(self):
        return self.exponents[-1] / (1.0 + self.exponents[-1])

    @cached_property
    def power_sum(self):
        """``(coefs, exps)`` of ``G_F(s) = s g_F(s)``."""
        return np.array(self.coefficients), np.array((1.0,) + tuple(1.0 + x for x in self.exponents))

    def g(self, s):
        s = _arr(s)
        out = np.full_like(s, self.coefficients[0])
        for c, e in zip(self.coefficients[1:], self.exponents):
            out = out + c * s**e
        return out

    def K(self, xi):
        coefs, exps = self.power_sum
        k, bad = kernels.conductivity(kernels.KIND_POWER, _NO_SCAL, coefs, exps, _arr(xi).ravel())
        _raise_if_bad(bad)
        return k.reshape(np.shape(xi))

    def K_prime(self, xi):
        coefs, exps = self.power_sum
        return _power_sum_K_prime(coefs, exps, _arr(xi))

    def d1(self):
        """A valid ``d1`` with ``d1^-1 (1+xi)^-b2 <= K_F(xi) <= d1 (1+xi)^-b2``.

        Closed form from bounding ``G_F`` by its extreme terms on ``s <= 1``
        and ``s >= 1``, where ``s0 = G_F(1)`` splits the two regimes.
        """
        c = self.coefficients
        b2 = self.beta2
        s0 = float(sum(c))
        lower = min(s0 ** (b2 - 1.0), 1.0 / s0)
        upper = max(c[-1] ** (b2 - 1.0) * ((1.0 + s0) / s0) ** b2, (1.0 + s0) ** b2 / c[0])
        return max(upper, 1.0 / lower)


_NO_SCAL = np.zeros(1)


def _raise_if_bad(bad):
    if bad:
        raise ConvergenceError(f"G inversion failed to converge at {bad} point(s)")


def _power_sum_K_prime(coefs, exps, xi):
    """``K' = 1/(xi G'(s)) - s/xi^2`` for ``K = s/xi``, ``G(s) = xi``."""
    if np.any(xi <= 0.0):
        raise DomainError("K' is evaluated for xi > 0 only")
    flat = xi.ravel()
    s, status, lo, hi = kernels.invert_power_sum(flat, coefs, exps)
    if status.any():
        i = int(np.flatnonzero(status)[0])
        raise ConvergenceError("G inversion failed", bracket=(float(lo[i]), float(hi[i])))
    dG = (coefs[None, :] * exps[None, :] * s[:, None] ** (exps[None, :] - 1.0)).sum(axis=1)
    return (1.0 / (flat * dG) - s / flat**2).reshape(xi.shape)


@dataclass(frozen=True)
class SandwichConstants:
    """Constants of the two-sided comparison ``d2 K* <= K <= d3 K*`` and friends."""

    d2: float
    d3: float
    d4: float
    d5: float
    xi_c: float
    kstar_at_xic: float
    d1: Optional[float] = None
    d6: Optional[float] = None
    d7: Optional[float] = None


# --------------------------------------------------------------------------
# models
# --------------------------------------------------------------------------


class ConductivityModel:
    """Common surface of the four laws."""

    kind_name = ""
    has_forward_map = False

    # subclasses provide: beta1, beta2, kernel_args(), _sandwich_d2_d3()

    @property
    def xi_c(self):
        return self.beta1 / self.beta2

    @property
    def profile_view(self):
        """Object exposing ``beta1``/``beta2`` for :func:`eval_K_star`."""
        return self

    def K(self, xi):
        kind, scal, coefs, exps = self.kernel_args()
        x = _arr(xi)
        if np.any(x < 0.0):
            raise DomainError("K is defined for xi >= 0")
        k, bad = kernels.conductivity(kind, scal, coefs, exps, x.ravel())
        _raise_if_bad(bad)
        return _like(xi, k)

    def K_star(self, xi):
        return eval_K_star(self, xi)

    def g(self, s):
        raise UnsupportedOperation(f"{self.kind_name} law is defined through K directly; it has no g(s)")

    def G(self, s):
        raise UnsupportedOperation(f"{self.kind_name} law is defined through K directly; it has no G(s)")

    def invert_G(self, xi):
        raise UnsupportedOperation(f"{self.kind_name} law is defined through K directly; it has no G(s)")

    def K_prime(self, xi, side=None):
        raise NotImplementedError

    def breakpoints(self):
        """Gradient magnitudes where K is not smooth."""
        return ()

    def H(self, xi):
        """``H(xi) = 2 * int_0^xi K(u) u du`` by adaptive Simpson."""
        x = _arr(xi)
        if np.any(x < 0.0):
            raise DomainError("H is defined for xi >= 0")
        flat = x.ravel()
        if flat.size == 0:
            return _like(xi, flat)
        top = float(flat.max())
        knots = np.unique(np.concatenate([[0.0], flat, [z for z in self.breakpoints() if z < top]]))
        pieces = adaptive_simpson(lambda u: 2.0 * self.K(u) * u, knots[:-1], knots[1:], rtol=H_RTOL)
        cum = np.concatenate([[0.0], np.cumsum(pieces)])
        return _like(xi, cum[np.searchsorted(knots, flat)])

    def sandwich_constants(self):
        d2, d3, d1 = self._sandwich_d2_d3()
        b1, b2 = self.beta1, self.beta2
        kc = float(eval_K_star(self, self.xi_c))
        d5 = d2 * (1.0 - b2) / (2.0 ** (b1 + 1.0) * (b1 + 1.0))
        return SandwichConstants(d2=d2, d3=d3, d4=d3 * kc, d5=d5, xi_c=self.xi_c, kstar_at_xic=kc, d1=d1)


def _ratio_bounds(beta, k):
    """Bounds of ``(1+x)^beta / (1 + k x^beta)`` over ``x >= 0``."""
    lo = min(1.0, 2.0 ** (beta - 1.0)) * min(1.0, 1.0 / k)
    hi = max(1.0, 2.0 ** (beta - 1.0)) * max(1.0, 1.0 / k)
    return lo, hi


@dataclass(frozen=True)
class Interpolated(ConductivityModel):
    profile: ExponentProfile
    coeffs: CoefficientVector

    kind_name = "interpolated"
    has_forward_map = True

    def __post_init__(self):
        if self.coeffs.n_terms != self.profile.n_terms:
            raise ShapeError(
                f"{self.profile.n_terms} Forchheimer exponents but {self.coeffs.n_terms} Forchheimer coefficients"
            )

    @property
    def beta1(self):
        return self.profile.beta1

    @property
    def beta2(self):
        return self.profile.beta2

    @cached_property
    def _power_sum(self):
        al = self.profile.alpha
        exps = (1.0 - al, 1.0) + tuple(1.0 + e for e in self.profile.forchheimer_exponents)
        return np.array(self.coeffs.a), np.array(exps)

    def kernel_args(self):
        coefs, exps = self._power_sum
        return kernels.KIND_POWER, _NO_SCAL, coefs, exps

    def with_coefficients(self, coeffs):
        if not isinstance(coeffs, CoefficientVector):
            coeffs = CoefficientVector(tuple(coeffs))
        return Interpolated(self.profile, coeffs)

    def g(self, s):
        x = _arr(s)
        if np.any(x <= 0.0):
            raise DomainError("g(s) blows up like s^-alpha; need s > 0")
        a = self.coeffs.a
        out = a[0] * x ** (-self.profile.alpha) + a[1]
        for c, e in zip(a[2:], self.profile.forchheimer_exponents):
            out = out + c * x**e
        return _like(s, out)

    def G(self, s):
        x = _arr(s)
        if np.any(x < 0.0):
            raise DomainError("G is defined for s >= 0")
        coefs, exps = self._power_sum
        out = (coefs[None, :] * x.reshape(-1, 1) ** exps[None, :]).sum(axis=1)
        return _like(s, out)

    def invert_G(self, xi):
        x = _arr(xi)
        if np.any(x < 0.0):
            raise DomainError("G^-1 is defined for xi >= 0")
        coefs, exps = self._power_sum
        s, status, lo, hi = kernels.invert_power_sum(x.ravel(), coefs, exps)
        if status.any():
            i = int(np.flatnonzero(status)[0])
            raise ConvergenceError(
                f"G inversion did not converge at xi={x.ravel()[i]:g}", bracket=(float(lo[i]), float(hi[i]))
            )
        return _like(xi, s)

    def K_prime(self, xi, side=None):
        coefs, exps = self._power_sum
        return _like(xi, _power_sum_K_prime(coefs, exps, _arr(xi)))

    def _sandwich_d2_d3(self):
        # open question: the paper's max{1, beta_0} is read as max{1, xi0}
        b1, b2 = self.beta1, self.beta2
        a = self.coeffs.a
        xi0 = self.coeffs.xi0
        d2 = 1.0 / max(1.0, xi0) ** (1.0 + b1)
        d3 = (1.0 + max(1.0, xi0)) ** (b1 + b2) / min(1.0, a[0], a[-1]) ** (1.0 + b1)
        return d2, d3, None


@dataclass(frozen=True)
class Piecewise(ConductivityModel):
    """Izbash / Darcy / Forchheimer glued at speeds ``s1 < s2``.

    ``c1`` and ``c2`` are derived from continuity, ``c1 s1^-alpha = c2 = g_F(s2)``,
    and cannot be supplied.
    """

    alpha: float
    s1: float
    s2: float
    forchheimer: ForchheimerLaw

    kind_name = "piecewise"
    has_forward_map = True

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not 0.0 < self.s1 < self.s2:
            raise DomainError(f"need 0 < s1 < s2, got s1={self.s1}, s2={self.s2}")

    @property
    def beta1(self):
        return self.alpha / (1.0 - self.alpha)

    @property
    def beta2(self):
        return self.forchheimer.beta2

    @property
    def c2(self):
        return float(self.forchheimer.g(self.s2))

    @property
    def c1(self):
        return self.c2 * self.s1**self.alpha

    @property
    def Z1(self):
        return self.c2 * self.s1

    @property
    def Z2(self):
        return self.c2 * self.s2

    @property
    def M1(self):
        return self.c1 ** (-1.0 / (1.0 - self.alpha))

    @property
    def M2(self):
        return 1.0 / self.c2

    def kernel_args(self):
        coefs, exps = self.forchheimer.power_sum
        scal = np.array([self.M1, self.beta1, self.M2, self.Z1, self.Z2])
        return kernels.KIND_PIECEWISE, scal, coefs, exps

    def breakpoints(self):
        return (self.Z1, self.Z2)

    def g(self, s):
        x = _arr(s)
        if np.any(x <= 0.0):
            raise DomainError("g(s) blows up like s^-alpha; need s > 0")
        out = np.where(
            x < self.s1,
            self.c1 * x ** (-self.alpha),
            np.where(x <= self.s2, self.c2, self.forchheimer.g(x)),
        )
        return _like(s, out)

    def G(self, s):
        x = _arr(s)
        if np.any(x < 0.0):
            raise DomainError("G is defined for s >= 0")
        out = np.where(
            x < self.s1,
            self.c1 * x ** (1.0 - self.alpha),
            np.where(x <= self.s2, self.c2 * x, x * self.forchheimer.g(x)),
        )
        return _like(s, out)

    def invert_G(self, xi):
        x = _arr(xi)
        if np.any(x < 0.0):
            raise DomainError("G^-1 is defined for xi >= 0")
        flat = x.ravel()
        out = np.empty_like(flat)
        b1 = flat < self.Z1
        b2 = ~b1 & (flat <= self.Z2)
        b3 = ~(b1 | b2)
        out[b1] = (flat[b1] / self.c1) ** (1.0 / (1.0 - self.alpha))
        out[b2] = flat[b2] / self.c2
        if b3.any():
            coefs, exps = self.forchheimer.power_sum
            s, status, lo, hi = kernels.invert_power_sum(flat[b3], coefs, exps)
            if status.any():
                i = int(np.flatnonzero(status)[0])
                raise ConvergenceError("G_F inversion did not converge", bracket=(float(lo[i]), float(hi[i])))
            out[b3] = s
        return _like(xi, out)

    def K_prime(self, xi, side=None):
        """Analytic K'; at ``Z1``/``Z2`` pass ``side='left'`` or ``'right'``."""
        x = _arr(xi)
        flat = x.ravel()
        if np.any(flat <= 0.0):
            raise DomainError("K' is evaluated for xi > 0 only")
        at_kink = (flat == self.Z1) | (flat == self.Z2)
        if at_kink.any() and side not in ("left", "right"):
            raise KinkError(f"K is not differentiable at Z1={self.Z1:g}, Z2={self.Z2:g}; pass side='left'/'right'")
        # branch index per point; kinks resolved by the requested side
        branch = np.where(flat < self.Z1, 0, np.where(flat < self.Z2, 1, 2))
        branch = np.where((flat == self.Z1) & (side == "left"), 0, branch)
        branch = np.where((flat == self.Z2) & (side == "left"), 1, branch)
        branch = np.where((flat == self.Z2) & (side == "right"), 2, branch)
        out = np.zeros_like(flat)
        m0 = branch == 0
        out[m0] = self.beta1 * self.M1 * flat[m0] ** (self.beta1 - 1.0)
        m2 = branch == 2
        if m2.any():
            out[m2] = self.forchheimer.K_prime(flat[m2])
        return _like(xi, out)

    def _sandwich_d2_d3(self):
        b1, b2 = self.beta1, self.beta2
        z1, z2 = self.Z1, self.Z2
        m1, m2 = self.M1, self.M2
        d1 = self.forchheimer.d1()
        lows = [m1, m2 / z2**b1, 1.0 / d1]
        highs = [
            m1 * (1.0 + z1) ** (b1 + b2),
            m2 * (1.0 + z1) ** b1 * (1.0 + z2) ** b2 / z1**b1,
            d1 * ((1.0 + z2) / z2) ** b1,
        ]
        return min(lows), max(highs), d1


@dataclass(frozen=True)
class Rational(ConductivityModel):
    a: float
    b: float
    c: float
    beta1_: float
    beta2_: float

    kind_name = "rational"

    def __post_init__(self):
        if min(self.a, self.b, self.c) <= 0.0:
            raise DomainError("a, b, c must be positive")
        if self.beta1_ <= 0.0 or not 0.0 < self.beta2_ < 1.0:
            raise DomainError("need beta1 > 0 and 0 < beta2 < 1")

    @property
    def beta1(self):
        return self.beta1_

    @property
    def beta2(self):
        return self.beta2_

    def kernel_args(self):
        scal = np.array([self.a, self.b, self.c, self.beta1_, self.beta2_])
        return kernels.KIND_RATIONAL, scal, np.ones(1), np.ones(1)

    def K_prime(self, xi, side=None):
        x = _arr(xi)
        if np.any(x <= 0.0):
            raise DomainError("K' is evaluated for xi > 0 only")
        b1, b2 = self.beta1_, self.beta2_
        t1 = self.b * x**b1
        t2 = self.c * x**b2
        logd = b1 / x - b1 * t1 / (x * (1.0 + t1)) - b2 * t2 / (x * (1.0 + t2))
        return _like(xi, self.K(x) * logd)

    def _sandwich_d2_d3(self):
        l1, h1 = _ratio_bounds(self.beta1_, self.b)
        l2, h2 = _ratio_bounds(self.beta2_, self.c)
        return self.a * l1 * l2, self.a * h1 * h2, None


@dataclass(frozen=True)
class Multiplicative(ConductivityModel):
    """``K_F(xi) * kbar xi^b1 / (1 + kbar xi^b1)`` with ``kbar = M1 / K_F(0)``."""

    alpha: float
    forchheimer: ForchheimerLaw
    m1: float

    kind_name = "multiplicative"

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.m1 <= 0.0:
            raise DomainError("M1 must be positive")

    @classmethod
    def from_piecewise(cls, model):
        return cls(model.alpha, model.forchheimer, model.M1)

    @property
    def beta1(self):
        return self.alpha / (1.0 - self.alpha)

    @property
    def beta2(self):
        return self.forchheimer.beta2

    @property
    def kbar(self):
        # K_F(0) = 1 / g_F(0) = 1 / a_0
        return self.m1 * self.forchheimer.coefficients[0]

    def kernel_args(self):
        coefs, exps = self.forchheimer.power_sum
        return kernels.KIND_MULTIPLICATIVE, np.array([self.kbar, self.beta1]), coefs, exps

    def K_prime(self, xi, side=None):
        x = _arr(xi)
        if np.any(x <= 0.0):
            raise DomainError("K' is evaluated for xi > 0 only")
        b1 = self.beta1
        t = self.kbar * x**b1
        m = t / (1.0 + t)
        dm = m * b1 / (x * (1.0 + t))
        kf = self.forchheimer.K(x)
        return _like(xi, self.forchheimer.K_prime(x) * m + kf * dm)

    def _sandwich_d2_d3(self):
        d1 = self.forchheimer.d1()
        lo, hi = _ratio_bounds(self.beta1, self.kbar)
        return self.kbar * lo / d1, self.kbar * hi * d1, d1


# --------------------------------------------------------------------------
# functional surface
# --------------------------------------------------------------------------


def eval_g(model, s):
    return model.g(s)


def eval_G(model, s):
    return model.G(s)


def invert_G(model, xi):
    return model.invert_G(xi)


def eval_K(model, xi):
    return model.K(xi)


def eval_K_prime(model, xi, side=None):
    return model.K_prime(xi, side=side)


def eval_H(model, xi):
    return model.H(xi)


def sandwich_constants(model):
    return model.sandwich_constants()


def perturbation_constants(a1, a2, profile):
    """``(d6, d7)`` of the perturbed monotonicity inequality."""
    if len(a1.a) != profile.n_terms + 2 or len(a2.a) != profile.n_terms + 2:
        raise ShapeError("coefficient vectors do not match the exponent profile")
    n = profile.n_terms
    b1, b2 = profile.beta1, profile.beta2
    big = max([1.0, *a1.a, *a2.a])
    d6 = (1.0 - b2) / ((b1 + 1.0) * (2.0 * (n + 2) * big) ** (b1 + 1.0))
    d7 = (n + 1) / ((1.0 - profile.alpha) * min(a1.a[0], a2.a[0], a1.a[-1], a2.a[-1]))
    return d6, d7


# --------------------------------------------------------------------------
# canonical instances used by tests, presets and docs
# --------------------------------------------------------------------------


def canonical_interpolated():
    """``g(s) = s^{-1/2} + s``: beta1 = 1, beta2 = 1/2, xi0 = 2."""
    return Interpolated(ExponentProfile(0.5, (1.0,)), CoefficientVector((1.0, 0.0, 1.0)))


def canonical_forchheimer():
    """``g_F(s) = 1 + s``."""
    return ForchheimerLaw((1.0, 1.0), (1.0,))


def canonical_piecewise():
    """alpha = 1/2, s1 = 1, s2 = 2, g_F = 1 + s: c1 = c2 = 3, Z1 = 3, Z2 = 6."""
    return Piecewise(0.5, 1.0, 2.0, canonical_forchheimer())


def canonical_rational():
    return Rational(1.0, 1.0, 1.0, 1.0, 0.5)


def canonical_multiplicative():
    return Multiplicative.from_piecewise(canonical_piecewise())


def canonical_models():
    return {
        "interpolated": canonical_interpolated(),
        "piecewise": canonical_piecewise(),
        "rational": canonical_rational(),
        "multiplicative": canonical_multiplicative(),
    }
